from hypnav.autodiff.gradcheck import check_gradients
from hypnav.curiosity.CuriosityConfig import CuriosityConfig
from hypnav.curiosity.HyperCuriosity import HyperCuriosity, one_hot
from hypnav.errors import ConfigError, TrainingError
from hypnav.nn.RiemannianAdam import RiemannianAdam
from hypnav.sim.CrowdSim import N_ACTIONS
from hypnav.training.TrainRunConfig import TrainRunConfig
import numpy as np
import numpy.testing as npt
import unittest
import logging

logging.basicConfig(level=logging.WARNING)
logger = logging.getLogger(__name__)

STATE_DIM = 9 + 5 * 5


def constant_output(net, point):
    """
    Make an h-MLP ignore its input and return point
    """
    last = net.layers[-1]
    last.weight.data = np.zeros_like(last.weight.data)
    last.bias.data = np.array([point], dtype=np.float64)


class HyperCuriosityTestCase(unittest.TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(5)
        self.curiosity = HyperCuriosity(STATE_DIM, CuriosityConfig(eta=1.0),
                                        np.random.default_rng(0))
        self.states = self.rng.normal(scale=3.0, size=(8, STATE_DIM))
        self.next_states = self.states + self.rng.normal(scale=0.25, size=(8, STATE_DIM))
        self.actions = self.rng.integers(N_ACTIONS, size=8)

    def test_one_hot(self):
        encoded = one_hot([0, 80, 3])
        self.assertEqual(encoded.shape, (3, N_ACTIONS))
        npt.assert_array_equal(encoded.sum(axis=1), np.ones(3))
        self.assertEqual(encoded[1, 80], 1.0)

    def test_shapes(self):
        self.assertEqual(self.curiosity.forward_net.sizes[0], 2 + N_ACTIONS)
        self.assertEqual(self.curiosity.inverse_net.sizes[-1], N_ACTIONS)
        features = self.curiosity.phi(self.states)
        self.assertEqual(features.shape, (8, 2))
        self.assertTrue(np.all(np.linalg.norm(features.data, axis=1) < 1.0))

    def test_phi_is_deterministic(self):
        npt.assert_array_equal(self.curiosity.phi(self.states[0]).data,
                               self.curiosity.phi(self.states[0]).data)

    def test_intrinsic_reward_is_nonnegative(self):
        rewards = self.curiosity.intrinsic_reward(self.states, self.actions, self.next_states)
        self.assertEqual(rewards.shape, (8,))
        self.assertTrue(np.all(rewards >= 0.0))
        _, from_loss = self.curiosity.curiosity_loss(self.states, self.actions,
                                                     self.next_states)
        npt.assert_allclose(from_loss, rewards, atol=1e-12)

    def test_intrinsic_reward_on_random_transitions(self):
        rng = np.random.default_rng(6)
        states = rng.normal(scale=3.0, size=(10000, STATE_DIM))
        next_states = rng.normal(scale=3.0, size=(10000, STATE_DIM))
        actions = rng.integers(N_ACTIONS, size=10000)
        rewards = self.curiosity.intrinsic_reward(states, actions, next_states)
        self.assertTrue(np.all(np.isfinite(rewards)))
        self.assertTrue(np.all(rewards >= 0.0))

    def test_perfect_prediction(self):
        point = [0.3, -0.1]
        constant_output(self.curiosity.phi_net, point)
        constant_output(self.curiosity.forward_net, point)
        rewards = self.curiosity.intrinsic_reward(self.states, self.actions, self.next_states)
        npt.assert_array_equal(rewards, np.zeros(8))
        curiosity = HyperCuriosity(STATE_DIM, CuriosityConfig(beta=1.0),
                                   np.random.default_rng(0))
        constant_output(curiosity.phi_net, point)
        constant_output(curiosity.forward_net, point)
        loss, _ = curiosity.curiosity_loss(self.states, self.actions, self.next_states)
        self.assertEqual(loss.item(), 0.0)

    def test_origin_features_leave_only_the_action(self):
        constant_output(self.curiosity.phi_net, [0.0, 0.0])
        other_states = self.rng.normal(size=(8, STATE_DIM))
        same = self.curiosity.forward_predict(self.states, self.actions).data
        npt.assert_allclose(self.curiosity.forward_predict(other_states, self.actions).data,
                            same, atol=1e-15)
        shifted = (self.actions + 1) % N_ACTIONS
        moved = self.curiosity.forward_predict(self.states, shifted).data
        self.assertGreater(np.max(np.abs(moved - same)), 0.0)

    def test_gradients_reach_all_three_nets(self):
        loss, _ = self.curiosity.curiosity_loss(self.states, self.actions, self.next_states)
        loss.backward()
        for net in (self.curiosity.phi_net, self.curiosity.forward_net,
                    self.curiosity.inverse_net):
            self.assertTrue(any(np.any(p.grad != 0) for p in net.parameters()))

    def test_pure_forward_loss_skips_inverse_head(self):
        curiosity = HyperCuriosity(STATE_DIM, CuriosityConfig(beta=1.0),
                                   np.random.default_rng(0))
        loss, _ = curiosity.curiosity_loss(self.states, self.actions, self.next_states)
        loss.backward()
        for param in curiosity.inverse_net.parameters():
            npt.assert_array_equal(param.grad, np.zeros_like(param.data))

    def test_empty_batch(self):
        with self.assertRaises(TrainingError):
            self.curiosity.curiosity_loss(np.zeros((0, STATE_DIM)), [], np.zeros((0, STATE_DIM)))

    def test_config_validation(self):
        with self.assertRaises(ConfigError):
            CuriosityConfig(beta=1.5).validate()
        with self.assertRaises(ConfigError):
            CuriosityConfig(input_scale=0.0).validate()

    def test_overfits_one_transition(self):
        lr = TrainRunConfig().lr
        for seed in range(5):
            rng = np.random.default_rng(seed)
            curiosity = HyperCuriosity(STATE_DIM, CuriosityConfig(eta=1.0), rng)
            states = rng.normal(size=(1, STATE_DIM))
            next_states = states + rng.normal(scale=0.25, size=(1, STATE_DIM))
            actions = rng.integers(N_ACTIONS, size=1)
            optimizer = RiemannianAdam(curiosity.named_parameters(), lr=lr)
            rewards = []
            for update in range(200):
                optimizer.zero_grad()
                loss, reward = curiosity.curiosity_loss(states, actions, next_states, update)
                rewards.append(reward[0])
                loss.backward()
                optimizer.step()
            rewards.append(curiosity.intrinsic_reward(states, actions, next_states)[0])
            self.assertLessEqual(rewards[-1], rewards[0] / 10.0, "seed {0}".format(seed))
            windows = np.array(rewards[:200]).reshape(10, 20).mean(axis=1)
            self.assertTrue(np.all(np.diff(windows) <= 1e-3 * rewards[0]),
                            "seed {0}: {1}".format(seed, windows))
            for param in curiosity.parameters():
                if param.manifold:
                    self.assertTrue(np.all(np.linalg.norm(param.data, axis=1) < 1.0))

    def test_inverse_weight_ramps_in(self):
        curiosity = HyperCuriosity(STATE_DIM, CuriosityConfig(beta=0.2, inverse_warmup=100),
                                   np.random.default_rng(0))
        self.assertEqual(curiosity.inverse_weight(0), 0.0)
        self.assertAlmostEqual(curiosity.inverse_weight(50), 0.4, places=12)
        self.assertAlmostEqual(curiosity.inverse_weight(100), 0.8, places=12)
        self.assertAlmostEqual(curiosity.inverse_weight(5000), 0.8, places=12)
        self.assertAlmostEqual(curiosity.inverse_weight(), 0.8, places=12)
        loss, _ = curiosity.curiosity_loss(self.states, self.actions, self.next_states, 0)
        loss.backward()
        for param in curiosity.inverse_net.parameters():
            npt.assert_array_equal(param.grad, np.zeros_like(param.data))
        with self.assertRaises(ConfigError):
            CuriosityConfig(inverse_warmup=-1).validate()


class CuriosityGradcheckTestCase(unittest.TestCase):
    """
    Curiosity loss gradients against central differences over 100 seeds
    """

    def test_curiosity_loss(self):
        config = CuriosityConfig(hidden=6)
        worst = 0.0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            curiosity = HyperCuriosity(STATE_DIM, config, rng)
            states = rng.normal(scale=3.0, size=(4, STATE_DIM))
            next_states = states + rng.normal(scale=0.25, size=(4, STATE_DIM))
            actions = rng.integers(N_ACTIONS, size=4)
            worst = max(worst, check_gradients(
                lambda: curiosity.curiosity_loss(states, actions, next_states)[0],
                curiosity.parameters(), rng))
        self.assertLessEqual(worst, 1e-4)


if __name__ == '__main__':
    unittest.main()
