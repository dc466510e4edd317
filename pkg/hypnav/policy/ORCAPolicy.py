import numpy as np

from hypnav.policy.Policy import Policy
from hypnav.sim.CrowdSim import action_velocities
from hypnav.sim.ORCA import RADIUS_PADDING, compute_velocity

SAFETY_SPACE = 0.2


class ORCAPolicy(Policy):
    """
    Robot steered by ORCA against the observed humans

    Humans are treated as reciprocating agents with their observed
    velocities and inflated by the safety space. The ORCA velocity is snapped
    to the nearest of the discrete actions.

    :param scenario: ScenarioConfig supplying time step, horizon and speeds
    """
    name = 'orca'

    def __init__(self, scenario, safety_space=SAFETY_SPACE):
        self.scenario = scenario
        self.safety_space = safety_space
        self.velocities = action_velocities(scenario.robot_v_pref)

    def desired_velocity(self, obs):
        robot = obs.robot
        goal = np.array([robot.gx - robot.px, robot.gy - robot.py])
        distance = np.linalg.norm(goal)
        pref = goal / distance * robot.v_pref if distance > 1.0 else goal * robot.v_pref
        neighbors = []
        for human in obs.humans:
            distance = np.hypot(human.px - robot.px, human.py - robot.py)
            if distance < self.scenario.neighbor_dist:
                neighbors.append((distance, ((human.px, human.py), (human.vx, human.vy),
                                             human.radius + RADIUS_PADDING + self.safety_space)))
        neighbors.sort(key=lambda item: item[0])
        neighbors = [item[1] for item in neighbors[:self.scenario.max_neighbors]]
        return compute_velocity((robot.px, robot.py), (robot.vx, robot.vy),
                                robot.radius + RADIUS_PADDING, robot.v_pref,
                                (float(pref[0]), float(pref[1])), neighbors,
                                self.scenario.orca_time_horizon, self.scenario.time_step)

    def __call__(self, obs):
        velocity = np.asarray(self.desired_velocity(obs))
        return int(np.argmin(np.linalg.norm(self.velocities - velocity, axis=1)))
