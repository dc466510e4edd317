from dataclasses import dataclass
from typing import Optional

from hypnav.errors import ConfigError

SCENARIO_KINDS = ('simple-circle', 'complex-circle', 'complex-square', 'empty')
GOAL_REWARDS = ('distance', 'progress')
DEFAULT_HUMANS = {'simple-circle': 5, 'complex-circle': 10,
                  'complex-square': 10, 'empty': 0}
STRUCTURED_HUMANS = 5


@dataclass
class ScenarioConfig:
    """
    Scenario section of the experiment file

    n_humans=None takes the kind's default (5 simple, 10 complex, 0 empty).
    In complex kinds the first five humans cross a circle or a square and the
    rest start and head to uniform random points inside the square arena.
    """
    kind: str = 'simple-circle'
    n_humans: Optional[int] = None
    circle_radius: float = 4.0
    square_width: float = 8.0
    time_step: float = 0.25
    time_limit: float = 30.0
    human_radius: float = 0.3
    robot_radius: float = 0.3
    human_v_pref: float = 1.0
    robot_v_pref: float = 1.0
    spawn_noise: float = 0.5
    discomfort_dist: float = 0.2
    goal_reward: str = 'distance'
    orca_time_horizon: float = 5.0
    neighbor_dist: float = 10.0
    max_neighbors: int = 10
    end_goal_changing: bool = True
    seed: int = 0

    def validate(self):
        if self.kind not in SCENARIO_KINDS:
            raise ConfigError("scenario.kind must be one of {0}, got '{1}'".format(
                ', '.join(SCENARIO_KINDS), self.kind))
        if self.goal_reward not in GOAL_REWARDS:
            raise ConfigError("scenario.goal_reward must be one of {0}, got "
                              "'{1}'".format(', '.join(GOAL_REWARDS), self.goal_reward))
        if self.n_humans is not None and self.n_humans < 0:
            raise ConfigError("scenario.n_humans must be >= 0")
        if self.kind == 'empty' and self.n_humans:
            raise ConfigError("scenario.n_humans must be 0 for the empty kind")
        for name in ('time_step', 'time_limit', 'human_radius', 'robot_radius',
                     'human_v_pref', 'robot_v_pref', 'orca_time_horizon'):
            if getattr(self, name) <= 0:
                raise ConfigError("scenario.{0} must be positive".format(name))
        return self

    @property
    def humans(self):
        if self.n_humans is None:
            return DEFAULT_HUMANS[self.kind]
        return self.n_humans

    @property
    def max_steps(self):
        return int(round(self.time_limit / self.time_step))
