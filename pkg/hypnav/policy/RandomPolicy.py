from hypnav.policy.Policy import Policy, episode_rng
from hypnav.sim.CrowdSim import N_ACTIONS

RANDOM_STREAM = 11


class RandomPolicy(Policy):
    """
    Uniform over all actions
    """
    name = 'random'

    def __init__(self, rng=None):
        self.rng = rng

    def for_episode(self, seed):
        return RandomPolicy(episode_rng(seed, RANDOM_STREAM))

    def __call__(self, obs):
        if self.rng is None:
            self.rng = episode_rng(0, RANDOM_STREAM)
        return int(self.rng.integers(N_ACTIONS))
