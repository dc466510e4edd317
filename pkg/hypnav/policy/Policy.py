import numpy as np


class Policy(object):
    """
    Maps an Observation to an action index in the 81-action space

    for_episode(seed) returns the instance that drives one episode; stateless
    policies return themselves, stochastic ones a copy with a fresh stream.
    """
    name = 'policy'

    def for_episode(self, seed):
        return self

    def __call__(self, obs):
        raise NotImplementedError


def episode_rng(seed, stream):
    """
    Generator for one episode, independent of the environment stream
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), stream]))
