"""
Graph encoder with a hyperbolic dueling value head

Robot and human states are embedded by two Euclidean MLPs, mixed by two
graph attention layers over the complete graph of agents, and the robot
node is mapped onto the Poincare ball. A shared h-MLP trunk feeds the value
and advantage h-MLPs, whose outputs are read back through the logarithmic
map at the origin and combined as q = v + a - mean(a).
"""
import logging
from dataclasses import dataclass

import numpy as np

from hypnav.autodiff.Tensor import Tensor, concat, no_grad
from hypnav.autodiff.hyperbolic import exp_map_origin, log_map_origin
from hypnav.errors import SimulationError
from hypnav.geometry.poincare import hyperbolic_radius
from hypnav.nn.GATLayer import GATLayer
from hypnav.nn.HLinearLayer import HMLP
from hypnav.nn.MLP import MLP
from hypnav.nn.Module import Module
from hypnav.policy.Policy import Policy, episode_rng
from hypnav.sim.CrowdSim import N_ACTIONS
from hypnav.sim.state import HUMAN_STATE_DIM, ROBOT_STATE_DIM

logger = logging.getLogger(__name__)

EXPLORATION_STREAM = 7


@dataclass
class QOutput:
    q: np.ndarray
    v: float
    advantages: np.ndarray
    attention: np.ndarray
    embedding: np.ndarray

    @property
    def self_attention(self):
        return float(self.attention[0, 0])


@dataclass
class BatchOutput:
    q: Tensor
    v: Tensor
    advantages: Tensor
    attention: np.ndarray
    embedding: Tensor


def split_states(states):
    """
    :param states: array (B, 9 + 5N) of flattened observations
    :return: robot array (B, 9), human array (B*N, 5), N
    """
    states = np.atleast_2d(np.asarray(states, dtype=np.float64))
    extra = states.shape[1] - ROBOT_STATE_DIM
    if extra < 0 or extra % HUMAN_STATE_DIM:
        raise SimulationError("State width {0} is not 9 + 5N".format(states.shape[1]))
    n_humans = extra // HUMAN_STATE_DIM
    humans = states[:, ROBOT_STATE_DIM:].reshape(-1, HUMAN_STATE_DIM)
    return states[:, :ROBOT_STATE_DIM], humans, n_humans


def dueling_combine(v, advantages):
    """
    q = v + a - mean(a) row-wise; works on Tensors and arrays alike
    """
    return v + advantages - advantages.mean(axis=1, keepdims=True)


def graph_order(batch, n_humans):
    """
    Row index that interleaves [robots; humans] into graph-major node order,
    robot first in every graph
    """
    n_nodes = n_humans + 1
    index = np.empty(batch * n_nodes, dtype=np.int64)
    for b in range(batch):
        index[b * n_nodes] = b
        index[b * n_nodes + 1:(b + 1) * n_nodes] = batch + b * n_humans + np.arange(n_humans)
    return index


class HyperPlanner(Module):
    """
    :param config: PolicyConfig
    :param rng: numpy Generator for parameter initialisation
    """

    def __init__(self, config, rng):
        self.config = config.validate()
        n = config.embed_dim
        width = config.head_width
        self.robot_phi = MLP((ROBOT_STATE_DIM,) + tuple(config.robot_phi_hidden) +
                             (config.phi_dim,), rng, final_activation=True)
        self.human_phi = MLP((HUMAN_STATE_DIM,) + tuple(config.human_phi_hidden) +
                             (config.phi_dim,), rng, final_activation=True)
        self.gat1 = GATLayer(config.phi_dim, config.gat_dim, rng)
        self.gat2 = GATLayer(config.gat_dim, config.gat_dim, rng)
        self.trunk = HMLP((config.gat_dim, width, n), rng, final_activation=True)
        self.value_head = HMLP((n, width, 1), rng)
        self.advantage_head = HMLP((n, width, N_ACTIONS), rng)

    def layer_sizes(self):
        return {'robot_phi': list(self.robot_phi.sizes),
                'human_phi': list(self.human_phi.sizes),
                'gat': [self.config.phi_dim, self.config.gat_dim, self.config.gat_dim],
                'trunk': list(self.trunk.sizes),
                'value_head': list(self.value_head.sizes),
                'advantage_head': list(self.advantage_head.sizes)}

    def encode_state(self, states):
        """
        :return: (robot node features (B, gat_dim), second-layer attention
            array (B*(N+1), N+1))
        """
        robots, humans, n_humans = split_states(states)
        batch = robots.shape[0]
        n_nodes = n_humans + 1
        parts = [self.robot_phi(Tensor(robots))]
        if n_humans:
            parts.append(self.human_phi(Tensor(humans)))
        nodes = concat(parts, axis=0).take_rows(graph_order(batch, n_humans))
        hidden, _ = self.gat1(nodes, n_nodes)
        out, attention = self.gat2(hidden.relu(), n_nodes)
        robot_rows = np.arange(batch) * n_nodes
        return out.take_rows(robot_rows), attention

    def forward(self, states):
        """
        Batched Q-values for flattened observations with a common N
        """
        features, attention = self.encode_state(states)
        embedding = self.trunk(exp_map_origin(features))
        v = log_map_origin(self.value_head(embedding))
        advantages = log_map_origin(self.advantage_head(embedding))
        return BatchOutput(dueling_combine(v, advantages), v, advantages, attention, embedding)

    def q_values(self, obs):
        with no_grad():
            out = self.forward(obs.flatten()[None, :])
        return QOutput(q=out.q.data[0].copy(), v=float(out.v.data[0, 0]),
                       advantages=out.advantages.data[0].copy(),
                       attention=out.attention.copy(),
                       embedding=out.embedding.data[0].copy())

    def radius(self, obs):
        return hyperbolic_radius(self.q_values(obs).embedding)

    def select_action(self, obs, epsilon=0.0, rng=None):
        """
        Greedy argmax with lowest-index tie-break, or a uniform random action
        with probability epsilon when an rng is given
        """
        if rng is not None and epsilon > 0.0 and rng.random() < epsilon:
            return int(rng.integers(N_ACTIONS))
        return int(np.argmax(self.q_values(obs).q))

    def as_policy(self, epsilon=0.0):
        return PlannerPolicy(self, epsilon)


class PlannerPolicy(Policy):
    name = 'hyperplanner'

    def __init__(self, planner, epsilon=0.0, rng=None):
        self.planner = planner
        self.epsilon = epsilon
        self.rng = rng

    def for_episode(self, seed):
        return PlannerPolicy(self.planner, self.epsilon,
                             episode_rng(seed, EXPLORATION_STREAM))

    def __call__(self, obs):
        return self.planner.select_action(obs, self.epsilon, self.rng)
