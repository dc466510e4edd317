"""
Curiosity module whose features and forward model live on the Poincare ball

The intrinsic reward of a transition is the geodesic distance between the
embedded next state and its prediction from the current state and action.
"""
import logging

import numpy as np

from hypnav.autodiff.Tensor import (Tensor, concat, gather_columns,
                                    log_softmax_rows, no_grad)
from hypnav.autodiff.hyperbolic import exp_map_origin, log_map_origin, poincare_distance
from hypnav.errors import TrainingError
from hypnav.nn.HLinearLayer import HMLP
from hypnav.nn.MLP import MLP
from hypnav.nn.Module import Module
from hypnav.sim.CrowdSim import N_ACTIONS

logger = logging.getLogger(__name__)


def one_hot(actions, n_actions=N_ACTIONS):
    actions = np.asarray(actions, dtype=np.int64)
    encoded = np.zeros((actions.size, n_actions))
    encoded[np.arange(actions.size), actions] = 1.0
    return encoded


class HyperCuriosity(Module):
    """
    :param state_dim: width of flattened observations, 9 + 5N
    :param config: CuriosityConfig
    :param rng: numpy Generator for parameter initialisation
    """

    def __init__(self, state_dim, config, rng):
        self.config = config.validate()
        n = config.embed_dim
        self.state_dim = state_dim
        self.phi_net = HMLP((state_dim, config.hidden, n), rng)
        self.forward_net = HMLP((n + N_ACTIONS, config.hidden, n), rng)
        self.inverse_net = MLP((2 * n, config.hidden, N_ACTIONS), rng)

    def layer_sizes(self):
        return {'phi': list(self.phi_net.sizes),
                'forward': list(self.forward_net.sizes),
                'inverse': list(self.inverse_net.sizes)}

    def phi(self, states):
        states = np.atleast_2d(np.asarray(states, dtype=np.float64))
        return self.phi_net(exp_map_origin(Tensor(states * self.config.input_scale)))

    def forward_predict(self, states, actions, features=None):
        """
        Predicted embedding of the next state from phi(w_t) and one-hot a_t
        """
        if features is None:
            features = self.phi(states)
        joint = concat([log_map_origin(features), Tensor(one_hot(actions))], axis=1)
        return self.forward_net(exp_map_origin(joint))

    def intrinsic_reward(self, states, actions, next_states):
        """
        eta times the Poincare distance between phi(w_t+1) and its prediction
        :return: array of shape (B,)
        """
        with no_grad():
            target = self.phi(next_states)
            predicted = self.forward_predict(states, actions)
            distance = poincare_distance(target, predicted)
        return self.config.eta * distance.data[:, 0]

    def inverse_weight(self, updates=None):
        """
        Weight of the inverse cross-entropy after the given number of updates;
        None means fully warmed up
        """
        weight = 1.0 - self.config.beta
        warmup = self.config.inverse_warmup
        if updates is None or warmup == 0:
            return weight
        return weight * min(1.0, updates / float(warmup))

    def curiosity_loss(self, states, actions, next_states, updates=None):
        """
        beta * mean squared forward distance + (1 - beta) * mean inverse
        cross-entropy, the inverse weight ramped by inverse_weight(updates)
        :return: (scalar loss Tensor, intrinsic rewards array (B,))
        """
        actions = np.asarray(actions, dtype=np.int64).reshape(-1)
        if actions.size == 0:
            raise TrainingError("curiosity_loss needs a nonempty batch")
        features = self.phi(states)
        target = self.phi(next_states)
        predicted = self.forward_predict(states, actions, features)
        forward_loss = poincare_distance(target, predicted, squared=True).mean()
        logits = self.inverse_net(concat([log_map_origin(features),
                                          log_map_origin(target)], axis=1))
        inverse_loss = -gather_columns(log_softmax_rows(logits), actions).mean()
        loss = self.config.beta * forward_loss + self.inverse_weight(updates) * inverse_loss
        distance = poincare_distance(target.detach(), predicted.detach())
        return loss, self.config.eta * distance.data[:, 0]
