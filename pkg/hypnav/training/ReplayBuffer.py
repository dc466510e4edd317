import logging
from dataclasses import dataclass

import numpy as np

from hypnav.errors import TrainingError

logger = logging.getLogger(__name__)


@dataclass
class Transition:
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray
    done: bool


@dataclass
class Batch:
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray
    dones: np.ndarray

    def __len__(self):
        return len(self.actions)


class ReplayBuffer(object):
    """
    Fixed-capacity ring of transitions; a batch is drawn uniformly without
    replacement

    Storage is allocated on the first push, once the state width is known;
    the oldest transition is overwritten when the buffer is full.
    """

    def __init__(self, capacity):
        if capacity <= 0:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.size = 0
        self.position = 0
        self.states = None

    def __len__(self):
        return self.size

    def _allocate(self, state_dim):
        self.states = np.zeros((self.capacity, state_dim))
        self.next_states = np.zeros((self.capacity, state_dim))
        self.actions = np.zeros(self.capacity, dtype=np.int64)
        self.rewards = np.zeros(self.capacity)
        self.dones = np.zeros(self.capacity)

    def push(self, transition):
        state = np.asarray(transition.state, dtype=np.float64)
        if self.states is None:
            self._allocate(state.size)
        elif state.size != self.states.shape[1]:
            raise TrainingError("Transition width {0} does not match buffer width "
                                "{1}".format(state.size, self.states.shape[1]))
        i = self.position
        self.states[i] = state
        self.next_states[i] = transition.next_state
        self.actions[i] = transition.action
        self.rewards[i] = transition.reward
        self.dones[i] = float(transition.done)
        self.position = (self.position + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size, rng):
        if self.size < batch_size:
            raise TrainingError("Cannot sample {0} transitions from a buffer of "
                                "{1}".format(batch_size, self.size))
        index = rng.choice(self.size, size=batch_size, replace=False)
        return Batch(self.states[index], self.actions[index], self.rewards[index],
                     self.next_states[index], self.dones[index])
