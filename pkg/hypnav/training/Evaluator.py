"""
Greedy evaluation over seeded episodes
"""
import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List

import numpy as np

from hypnav.sim.CrowdSim import rollout
from hypnav.sim.state import Outcome

logger = logging.getLogger(__name__)


@dataclass
class EvaluationResult:
    success_rate: float
    collision_rate: float
    timeout_rate: float
    nav_time: float
    avg_return: float
    discomfort_steps: float
    min_surface_distance: float
    episodes: List = field(default_factory=list, repr=False)
    seeds: List[int] = field(default_factory=list, repr=False)

    def summary(self):
        return ("success rate {0:.1f}%, collision rate {1:.1f}%, nav time {2:.2f} s, "
                "avg return {3:.4f}".format(self.success_rate, self.collision_rate,
                                            self.nav_time, self.avg_return))


def episode_seeds(seed, n_episodes):
    """
    One independent integer seed per episode, derived from the run seed
    """
    children = np.random.SeedSequence(seed).spawn(n_episodes)
    return [int(child.generate_state(1)[0]) for child in children]


def evaluate(policy, scenario, n_episodes, seed, gamma=0.9, workers=1):
    """
    Roll out the policy on n_episodes seeded episodes

    Success, collision and timeout rates are percentages. Navigation time is
    averaged over successful episodes only (NaN if there are none); the
    average return is the mean discounted sum of extrinsic rewards.
    Results are aggregated in episode order regardless of workers.
    """
    if n_episodes <= 0:
        raise ValueError("n_episodes must be positive, got {0}".format(n_episodes))
    seeds = episode_seeds(seed, n_episodes)

    def run(episode_seed):
        return rollout(policy, scenario, episode_seed)[0]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, seeds))
    else:
        outcomes = [run(s) for s in seeds]

    def rate(kind):
        return 100.0 * sum(o.outcome is kind for o in outcomes) / n_episodes

    times = [o.nav_time for o in outcomes if o.outcome is Outcome.SUCCESS]
    result = EvaluationResult(
        success_rate=rate(Outcome.SUCCESS),
        collision_rate=rate(Outcome.COLLISION),
        timeout_rate=rate(Outcome.TIMEOUT),
        nav_time=float(np.mean(times)) if times else float('nan'),
        avg_return=float(np.mean([o.discounted_return(gamma) for o in outcomes])),
        discomfort_steps=float(np.mean([o.discomfort_steps for o in outcomes])),
        min_surface_distance=float(min(o.min_surface_distance for o in outcomes)),
        episodes=outcomes,
        seeds=seeds)
    logger.info("Evaluated %d episodes: %s", n_episodes, result.summary())
    return result


def write_episode_csv(path, result, gamma=0.9):
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(['episode', 'seed', 'outcome', 'nav_time', 'return',
                         'discounted_return', 'steps', 'min_surface_distance',
                         'discomfort_steps'])
        for index, (seed, outcome) in enumerate(zip(result.seeds, result.episodes)):
            writer.writerow([index, seed, outcome.outcome.value,
                             '{0:.2f}'.format(outcome.nav_time),
                             repr(outcome.cumulative_return),
                             repr(outcome.discounted_return(gamma)), outcome.steps,
                             repr(outcome.min_surface_distance),
                             outcome.discomfort_steps])
