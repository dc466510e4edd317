import numpy as np

from hypnav.policy.Policy import Policy
from hypnav.sim.CrowdSim import action_velocities


class GoalSeekingPolicy(Policy):
    """
    Picks the action that brings the robot closest to its goal this step,
    ignoring humans
    """
    name = 'straight'

    def __init__(self, v_pref=1.0, time_step=0.25):
        self.velocities = action_velocities(v_pref)
        self.time_step = time_step

    def __call__(self, obs):
        robot = obs.robot
        goal = np.array([robot.gx, robot.gy])
        next_positions = np.array([robot.px, robot.py]) + self.velocities * self.time_step
        return int(np.argmin(np.linalg.norm(next_positions - goal, axis=1)))
