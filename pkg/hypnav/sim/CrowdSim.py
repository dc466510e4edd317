"""
Episodic crowd navigation environment

A holonomic robot crosses an arena among humans driven by ORCA. Humans do not
perceive the robot. Each step lasts time_step seconds; an episode ends on
collision, on reaching the goal or when time_limit elapses.
"""
import csv
import logging
import math
from dataclasses import dataclass

import numpy as np

from hypnav.errors import SimulationError
from hypnav.sim.Agent import Human, Robot
from hypnav.sim.ORCA import orca_policy
from hypnav.sim.ScenarioConfig import STRUCTURED_HUMANS
from hypnav.sim.state import (Action, EpisodeOutcome, Observation, Outcome,
                              HUMAN_STATE_DIM, ROBOT_STATE_DIM)

logger = logging.getLogger(__name__)

N_SPEEDS = 5
N_HEADINGS = 16
N_ACTIONS = 1 + N_SPEEDS * N_HEADINGS

SUCCESS_REWARD = 0.25
COLLISION_PENALTY = -0.25
GOAL_DISTANCE_WEIGHT = 0.2
MAX_SPAWN_ATTEMPTS = 1000


def speed_levels(v_pref):
    """
    Exponentially spaced speeds v_M (e^(k/5) - 1) / (e - 1), k = 1..5
    """
    k = np.arange(1, N_SPEEDS + 1)
    return v_pref * (np.exp(k / N_SPEEDS) - 1.0) / (math.e - 1.0)


def action_space(v_pref):
    """
    The 81 discrete actions; index 0 stays still, index 1 + 16 (k - 1) + j
    moves at speed level k along heading 2 pi j / 16
    """
    if v_pref <= 0:
        raise ValueError("v_pref must be positive")
    actions = [Action(0.0, 0.0)]
    for speed in speed_levels(v_pref):
        for j in range(N_HEADINGS):
            actions.append(Action(float(speed), 2.0 * math.pi * j / N_HEADINGS))
    return actions


def action_velocities(v_pref):
    return np.array([action.velocity() for action in action_space(v_pref)])


def safety_penalty(surface_distances, discomfort_dist=0.2):
    d = np.asarray(surface_distances, dtype=np.float64)
    return float(np.sum(np.where(d < discomfort_dist, d - discomfort_dist, 0.0)))


def extrinsic_reward(obs_next, outcome=None, prev_goal_distance=None,
                     goal_reward='distance', discomfort_dist=0.2):
    """
    0.25 on success, -0.25 on collision, otherwise a goal term plus the
    discomfort penalty sum over humans closer than discomfort_dist

    goal_reward 'distance' uses -0.2 d_g, 'progress' uses
    0.2 (prev_goal_distance - d_g).
    """
    if outcome is Outcome.SUCCESS:
        return SUCCESS_REWARD
    if outcome is Outcome.COLLISION:
        return COLLISION_PENALTY
    goal_distance = obs_next.robot.goal_distance()
    if goal_reward == 'progress':
        if prev_goal_distance is None:
            raise ValueError("progress reward needs the previous goal distance")
        goal_term = GOAL_DISTANCE_WEIGHT * (prev_goal_distance - goal_distance)
    else:
        goal_term = -GOAL_DISTANCE_WEIGHT * goal_distance
    return goal_term + safety_penalty(obs_next.surface_distances(), discomfort_dist)


def segment_min_distance(rel_start, rel_end):
    """
    Closest approach to the origin of the segment rel_start -> rel_end
    """
    start = np.asarray(rel_start, dtype=np.float64)
    delta = np.asarray(rel_end, dtype=np.float64) - start
    length_sq = float(delta @ delta)
    if length_sq == 0.0:
        return float(np.linalg.norm(start))
    u = min(max(-float(start @ delta) / length_sq, 0.0), 1.0)
    return float(np.linalg.norm(start + u * delta))


@dataclass
class TraceStep:
    observation: Observation
    action: int
    reward: float
    done: bool


class CrowdSim(object):
    """
    :param config: ScenarioConfig
    :param rng: numpy Generator used for spawning and goal changes
    """

    def __init__(self, config, rng=None):
        self.config = config.validate()
        self.rng = rng if rng is not None else np.random.default_rng(config.seed)
        self.actions = action_space(config.robot_v_pref)
        self.robot = Robot(config.robot_radius, config.robot_v_pref)
        self.humans = []
        self.global_time = 0.0
        self.done = True
        self.goal_kinds = []

    @property
    def n_actions(self):
        return len(self.actions)

    def observe(self):
        return Observation(self.robot.state(),
                           tuple(human.state() for human in self.humans),
                           self.global_time)

    def reset(self):
        cfg = self.config
        self.global_time = 0.0
        self.done = False
        self.robot.set(0.0, -cfg.circle_radius, 0.0, cfg.circle_radius)
        self.robot.theta = math.pi / 2
        self.humans = []
        self.goal_kinds = []
        for index in range(cfg.humans):
            if cfg.kind == 'simple-circle':
                kind = 'circle'
            elif index < STRUCTURED_HUMANS:
                kind = 'circle' if cfg.kind == 'complex-circle' else 'square'
            else:
                kind = 'random'
            self.humans.append(self._spawn(kind))
            self.goal_kinds.append(kind)
        logger.debug("Reset %s scenario with %d humans", cfg.kind, len(self.humans))
        return self.observe()

    def _occupied(self, px, py, others, clearance):
        for other in others:
            if math.hypot(px - other.px, py - other.py) < clearance + other.radius:
                return True
        return False

    def _goal_taken(self, gx, gy, others, clearance):
        for other in others:
            if math.hypot(gx - other.gx, gy - other.gy) < clearance + other.radius:
                return True
        return False

    def _spawn(self, kind):
        cfg = self.config
        human = Human(cfg.human_radius, cfg.human_v_pref)
        agents = [self.robot] + self.humans
        clearance = cfg.human_radius + cfg.discomfort_dist
        half = cfg.square_width / 2.0
        for _ in range(MAX_SPAWN_ATTEMPTS):
            if kind == 'circle':
                px, py = self._circle_point()
                gx, gy = -px, -py
            elif kind == 'square':
                sign = -1.0 if self.rng.random() > 0.5 else 1.0
                px = self.rng.random() * half * sign
                py = (self.rng.random() - 0.5) * cfg.square_width
                gx = self.rng.random() * half * -sign
                gy = (self.rng.random() - 0.5) * cfg.square_width
            else:
                px, py, gx, gy = self.rng.uniform(-half, half, size=4)
            if (not self._occupied(px, py, agents, clearance) and
                    not self._goal_taken(gx, gy, agents, clearance)):
                human.set(float(px), float(py), float(gx), float(gy))
                return human
        raise SimulationError("Could not place a {0} human without overlap after {1} "
                              "attempts".format(kind, MAX_SPAWN_ATTEMPTS))

    def _circle_point(self):
        cfg = self.config
        angle = self.rng.random() * 2.0 * math.pi
        noise = (self.rng.random(2) - 0.5) * 2.0 * cfg.spawn_noise
        return (float(cfg.circle_radius * math.cos(angle) + noise[0]),
                float(cfg.circle_radius * math.sin(angle) + noise[1]))

    def _new_goal(self, human, kind):
        """
        Random destination of the same kind; circle humans get a noisy point
        on the circle away from their position and from other humans' goals
        """
        cfg = self.config
        half = cfg.square_width / 2.0
        if kind == 'circle':
            others = [agent for agent in [self.robot] + self.humans if agent is not human]
            clearance = cfg.human_radius + cfg.discomfort_dist
            for _ in range(MAX_SPAWN_ATTEMPTS):
                gx, gy = self._circle_point()
                if (math.hypot(gx - human.px, gy - human.py) > cfg.circle_radius and
                        not self._goal_taken(gx, gy, others, clearance)):
                    break
            human.gx, human.gy = gx, gy
        elif kind == 'square':
            sign = 1.0 if human.px < 0 else -1.0
            human.gx = float(self.rng.random() * half * sign)
            human.gy = float((self.rng.random() - 0.5) * cfg.square_width)
        else:
            human.gx, human.gy = (float(v) for v in self.rng.uniform(-half, half, size=2))

    def advance_humans(self):
        """
        Move every human by its ORCA velocity; the robot takes no part
        :return: array of the velocities applied, shape (N, 2)
        """
        cfg = self.config
        velocities = orca_policy(self.humans, cfg.time_step, cfg.orca_time_horizon,
                                 cfg.neighbor_dist, cfg.max_neighbors)
        for human, (vx, vy) in zip(self.humans, velocities):
            human.move(vx, vy, cfg.time_step)
        if cfg.end_goal_changing:
            for human, kind in zip(self.humans, self.goal_kinds):
                if human.reached_goal():
                    self._new_goal(human, kind)
        return velocities

    def step(self, action_index):
        """
        :param action_index: index into the 81-action space
        :return: (Observation, reward, done, Outcome or None)
        """
        if self.done:
            raise SimulationError("step() called on a finished episode, call reset()")
        if not 0 <= action_index < self.n_actions:
            raise SimulationError("Action index {0} outside [0, {1})".format(
                action_index, self.n_actions))
        cfg = self.config
        dt = cfg.time_step
        prev_goal_distance = self.robot.goal_distance()
        action = self.actions[action_index]
        rvx, rvy = action.velocity()
        if action_index != 0:
            self.robot.theta = action.heading

        start = [(h.px - self.robot.px, h.py - self.robot.py) for h in self.humans]
        radii = [h.radius for h in self.humans]
        human_velocities = self.advance_humans()
        self.robot.move(rvx, rvy, dt)
        self.global_time += dt
        collision = False
        for (sx, sy), radius, (hvx, hvy) in zip(start, radii, human_velocities):
            end = (sx + (hvx - rvx) * dt, sy + (hvy - rvy) * dt)
            if segment_min_distance((sx, sy), end) < radius + self.robot.radius:
                collision = True
                break

        if collision:
            outcome = Outcome.COLLISION
        elif self.robot.reached_goal():
            outcome = Outcome.SUCCESS
        elif self.global_time >= cfg.time_limit - 1e-9:
            outcome = Outcome.TIMEOUT
        else:
            outcome = None
        self.done = outcome is not None
        obs = self.observe()
        reward = extrinsic_reward(obs, outcome, prev_goal_distance, cfg.goal_reward,
                                  cfg.discomfort_dist)
        return obs, reward, self.done, outcome


def rollout(policy, config, seed, max_steps=None):
    """
    Run one episode to termination

    :param policy: callable Observation -> action index; if it has a
        for_episode(seed) method it is called first
    :return: (EpisodeOutcome, list of TraceStep); the trace starts with the
        initial observation carrying action -1
    """
    rng = np.random.default_rng(seed)
    env = CrowdSim(config, rng)
    if hasattr(policy, 'for_episode'):
        policy = policy.for_episode(seed)
    obs = env.reset()
    trace = [TraceStep(obs, -1, 0.0, False)]
    rewards = []
    min_distance = float('inf')
    discomfort_steps = 0
    outcome = None
    limit = max_steps if max_steps is not None else config.max_steps
    for _ in range(limit):
        action = int(policy(obs))
        obs, reward, done, outcome = env.step(action)
        rewards.append(reward)
        trace.append(TraceStep(obs, action, reward, done))
        distances = obs.surface_distances()
        if distances.size:
            min_distance = min(min_distance, float(distances.min()))
            if distances.min() < config.discomfort_dist:
                discomfort_steps += 1
        if done:
            break
    if outcome is None:
        outcome = Outcome.TIMEOUT
    nav_time = env.global_time
    result = EpisodeOutcome(outcome, nav_time, float(sum(rewards)), len(rewards),
                            min_distance, discomfort_steps, rewards)
    return result, trace


def trace_header(n_humans):
    header = ['t', 'robot_px', 'robot_py', 'robot_vx', 'robot_vy', 'robot_radius',
              'robot_gx', 'robot_gy', 'robot_v_pref', 'robot_theta']
    for i in range(n_humans):
        header.extend('human{0}_{1}'.format(i, field)
                      for field in ('px', 'py', 'vx', 'vy', 'radius'))
    return header + ['action', 'reward', 'done']


def write_trace_csv(path, trace):
    """
    One row per step: time, robot 9-vector, human 5-vectors, action, reward
    and done flag; the first row is the initial state with action -1
    """
    n_humans = trace[0].observation.n_humans if trace else 0
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(trace_header(n_humans))
        for step in trace:
            values = step.observation.flatten()
            assert values.size == ROBOT_STATE_DIM + HUMAN_STATE_DIM * n_humans
            writer.writerow(['{0:.2f}'.format(step.observation.t)] +
                            [repr(float(v)) for v in values] +
                            [step.action, repr(float(step.reward)), int(step.done)])
    logger.info("Wrote %d trace rows to %s", len(trace), path)
