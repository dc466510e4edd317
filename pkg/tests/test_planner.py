from hypnav.autodiff.Tensor import no_grad
from hypnav.autodiff.gradcheck import check_gradients
from hypnav.errors import ConfigError, SimulationError
from hypnav.policy.HyperPlanner import HyperPlanner, dueling_combine, graph_order, split_states
from hypnav.policy.PolicyConfig import PolicyConfig
from hypnav.policy.RandomPolicy import RandomPolicy
from hypnav.sim.CrowdSim import CrowdSim, N_ACTIONS, rollout
from hypnav.sim.ScenarioConfig import ScenarioConfig
from hypnav.sim.state import Observation
from scipy import stats
import numpy as np
import numpy.testing as npt
import unittest
import logging

logging.basicConfig(level=logging.WARNING)
logger = logging.getLogger(__name__)


def first_observation(kind='simple-circle', seed=0):
    return CrowdSim(ScenarioConfig(kind=kind), np.random.default_rng(seed)).reset()


class DuelingTestCase(unittest.TestCase):

    def test_example(self):
        q = dueling_combine(np.array([[0.2]]), np.array([[0.1, 0.3, -0.4]]))
        npt.assert_allclose(q, [[0.3, 0.5, -0.2]], atol=1e-12)

    def test_advantage_shift_cancels(self):
        advantages = np.random.default_rng(0).normal(size=(4, N_ACTIONS))
        v = np.ones((4, 1))
        npt.assert_allclose(dueling_combine(v, advantages + 3.7),
                            dueling_combine(v, advantages), atol=1e-12)


class PlannerConfigTestCase(unittest.TestCase):

    def test_epsilon_schedule(self):
        config = PolicyConfig()
        self.assertEqual(config.epsilon(0), 0.5)
        self.assertAlmostEqual(config.epsilon(2000), 0.26)
        self.assertAlmostEqual(config.epsilon(4000), 0.02)
        self.assertAlmostEqual(config.epsilon(10000), 0.02)

    def test_validation(self):
        with self.assertRaises(ConfigError):
            PolicyConfig(embed_dim=1).validate()
        with self.assertRaises(ConfigError):
            PolicyConfig(epsilon_start=0.1, epsilon_end=0.3).validate()

    def test_parameter_counts(self):
        small = HyperPlanner(PolicyConfig(embed_dim=2), np.random.default_rng(0))
        large = HyperPlanner(PolicyConfig(embed_dim=128), np.random.default_rng(0))
        self.assertEqual(small.parameter_count(), 59870)
        self.assertEqual(large.parameter_count(), 123878)
        self.assertEqual(small.layer_sizes()['advantage_head'], [2, 2, N_ACTIONS])
        self.assertEqual(small.layer_sizes()['value_head'], [2, 2, 1])


class GraphLayoutTestCase(unittest.TestCase):

    def test_split_states(self):
        states = np.arange(2 * 19, dtype=float).reshape(2, 19)
        robots, humans, n_humans = split_states(states)
        self.assertEqual(n_humans, 2)
        npt.assert_array_equal(robots, states[:, :9])
        npt.assert_array_equal(humans[3], states[1, 14:19])
        with self.assertRaises(SimulationError):
            split_states(np.zeros((1, 12)))

    def test_graph_order(self):
        npt.assert_array_equal(graph_order(2, 2), [0, 2, 3, 1, 4, 5])
        npt.assert_array_equal(graph_order(3, 0), [0, 1, 2])


class HyperPlannerTestCase(unittest.TestCase):

    def setUp(self):
        self.planner = HyperPlanner(PolicyConfig(), np.random.default_rng(11))
        self.obs = first_observation()

    def test_dueling_identity(self):
        out = self.planner.q_values(self.obs)
        centered = out.advantages - out.advantages.mean()
        self.assertLessEqual(np.max(np.abs(out.q - (out.v + centered))), 1e-9)
        self.assertLessEqual(abs(centered.mean()), 1e-12)
        self.assertAlmostEqual(out.q.mean(), out.v, places=9)
        self.assertEqual(out.q.shape, (N_ACTIONS,))

    def test_dueling_identity_on_random_batch(self):
        states = np.random.default_rng(3).normal(scale=2.0, size=(1000, 9 + 5 * 5))
        with no_grad():
            out = self.planner.forward(states)
        q, v, a = out.q.data, out.v.data, out.advantages.data
        self.assertLessEqual(np.max(np.abs(q - (v + a - a.mean(axis=1, keepdims=True)))), 1e-9)
        npt.assert_allclose(q.mean(axis=1), v[:, 0], atol=1e-9)
        best = q[np.arange(1000), np.argmax(a, axis=1)]
        npt.assert_allclose(best, q.max(axis=1), atol=1e-12)

    def test_attention_rows(self):
        out = self.planner.q_values(self.obs)
        self.assertEqual(out.attention.shape, (6, 6))
        npt.assert_allclose(out.attention.sum(axis=1), np.ones(6), atol=1e-9)
        self.assertTrue(0.0 <= out.self_attention <= 1.0)

    def test_robot_alone(self):
        out = self.planner.q_values(first_observation('empty'))
        npt.assert_array_equal(out.attention, [[1.0]])
        self.assertTrue(np.all(np.isfinite(out.q)))

    def test_permutation_equivariance(self):
        order = np.array([3, 0, 4, 2, 1])
        shuffled = Observation(self.obs.robot, tuple(self.obs.humans[i] for i in order),
                               self.obs.t)
        a = self.planner.q_values(self.obs)
        b = self.planner.q_values(shuffled)
        npt.assert_allclose(b.embedding, a.embedding, atol=1e-12)
        npt.assert_allclose(b.q, a.q, atol=1e-12)
        nodes = np.concatenate([[0], order + 1])
        npt.assert_allclose(b.attention, a.attention[np.ix_(nodes, nodes)], atol=1e-12)
        self.assertEqual(self.planner.select_action(shuffled),
                         self.planner.select_action(self.obs))

    def test_batch_matches_single(self):
        config = ScenarioConfig(kind='complex-circle')
        _, trace = rollout(RandomPolicy(), config, seed=3, max_steps=40)
        states = np.stack([step.observation.flatten() for step in trace])
        batch = self.planner.forward(states)
        self.assertTrue(np.all(np.isfinite(batch.q.data)))
        self.assertTrue(np.all(np.linalg.norm(batch.embedding.data, axis=1) < 1.0))
        for row in (0, len(trace) // 2, len(trace) - 1):
            single = self.planner.q_values(trace[row].observation)
            npt.assert_allclose(batch.q.data[row], single.q, atol=1e-10)

    def test_lowest_index_tie_break(self):
        last = self.planner.advantage_head.layers[-1]
        last.weight.data = np.zeros_like(last.weight.data)
        out = self.planner.q_values(self.obs)
        npt.assert_allclose(out.q, np.full(N_ACTIONS, out.v), atol=1e-15)
        self.assertEqual(self.planner.select_action(self.obs), 0)

    def test_value_head_finite_along_episodes(self):
        env = CrowdSim(ScenarioConfig(kind='complex-circle'), np.random.default_rng(8))
        rng = np.random.default_rng(9)
        obs = env.reset()
        values = []
        for _ in range(1000):
            out = self.planner.q_values(obs)
            self.assertTrue(np.all(np.isfinite(out.q)))
            self.assertTrue(np.all(np.isfinite(out.embedding)))
            self.assertLess(np.linalg.norm(out.embedding), 1.0)
            values.append(out.v)
            obs, _, done, _ = env.step(self.planner.select_action(obs, 0.3, rng))
            if done:
                obs = env.reset()
        self.assertTrue(np.all(np.isfinite(values)))
        self.assertGreater(np.ptp(values), 0.0)

    def test_radius(self):
        radius = self.planner.radius(self.obs)
        self.assertTrue(0.0 <= radius < 1.0)
        self.assertAlmostEqual(radius, float(np.linalg.norm(
            self.planner.q_values(self.obs).embedding)))

    def test_full_exploration_is_uniform(self):
        rng = np.random.default_rng(2024)
        counts = np.bincount([self.planner.select_action(self.obs, 1.0, rng)
                              for _ in range(100000)], minlength=N_ACTIONS)
        self.assertGreater(stats.chisquare(counts).pvalue, 0.01)

    def test_episode_policy_is_reproducible(self):
        policy = self.planner.as_policy(epsilon=0.5)
        first = policy.for_episode(9)
        second = policy.for_episode(9)
        self.assertEqual([first(self.obs) for _ in range(20)],
                         [second(self.obs) for _ in range(20)])


class PlannerGradcheckTestCase(unittest.TestCase):
    """
    Full Q-network gradients against central differences over 100 seeds
    """

    def test_q_loss(self):
        config = PolicyConfig(robot_phi_hidden=(8,), human_phi_hidden=(8,), phi_dim=6,
                              gat_dim=6, head_hidden=4)
        worst = 0.0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            planner = HyperPlanner(config, rng)
            states = rng.normal(size=(3, 9 + 5 * 2))
            weights = rng.normal(size=(3, N_ACTIONS))
            worst = max(worst, check_gradients(
                lambda: (planner(states).q * weights).sum(), planner.parameters(), rng))
        self.assertLessEqual(worst, 1e-4)


if __name__ == '__main__':
    unittest.main()
