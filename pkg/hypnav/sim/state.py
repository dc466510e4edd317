"""
Value types exchanged between the simulator, the policies and the trainer
"""
import enum
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

ROBOT_STATE_DIM = 9
HUMAN_STATE_DIM = 5


@dataclass(frozen=True)
class HumanState:
    px: float
    py: float
    vx: float
    vy: float
    radius: float

    def to_array(self):
        return np.array([self.px, self.py, self.vx, self.vy, self.radius])


@dataclass(frozen=True)
class RobotState:
    px: float
    py: float
    vx: float
    vy: float
    radius: float
    gx: float
    gy: float
    v_pref: float
    theta: float

    def to_array(self):
        return np.array([self.px, self.py, self.vx, self.vy, self.radius,
                         self.gx, self.gy, self.v_pref, self.theta])

    def goal_distance(self):
        return math.hypot(self.gx - self.px, self.gy - self.py)


@dataclass(frozen=True)
class Observation:
    robot: RobotState
    humans: Tuple[HumanState, ...]
    t: float = 0.0

    @property
    def n_humans(self):
        return len(self.humans)

    def human_array(self):
        if not self.humans:
            return np.zeros((0, HUMAN_STATE_DIM))
        return np.stack([human.to_array() for human in self.humans])

    def flatten(self):
        """
        Robot 9-vector followed by every human 5-vector
        """
        return np.concatenate([self.robot.to_array(),
                               self.human_array().reshape(-1)])

    def surface_distances(self):
        """
        Center distance minus radii sum for every human, shape (N,)
        """
        if not self.humans:
            return np.zeros(0)
        humans = self.human_array()
        centers = np.hypot(humans[:, 0] - self.robot.px, humans[:, 1] - self.robot.py)
        return centers - humans[:, 4] - self.robot.radius


@dataclass(frozen=True)
class Action:
    speed: float
    heading: float

    def velocity(self):
        return self.speed * math.cos(self.heading), self.speed * math.sin(self.heading)


class Outcome(enum.Enum):
    SUCCESS = 'Success'
    COLLISION = 'Collision'
    TIMEOUT = 'Timeout'


@dataclass
class EpisodeOutcome:
    outcome: Outcome
    nav_time: float
    cumulative_return: float
    steps: int
    min_surface_distance: float = float('inf')
    discomfort_steps: int = 0
    rewards: list = field(default_factory=list, repr=False)

    def discounted_return(self, gamma):
        return float(sum(reward * gamma ** t for t, reward in enumerate(self.rewards)))
