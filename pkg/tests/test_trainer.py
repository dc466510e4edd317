from hypnav.ExperimentConfig import ExperimentConfig, sidecar_path
from hypnav.autodiff.Tensor import Tensor, gather_columns, huber, no_grad
from hypnav.autodiff.gradcheck import check_gradients
from hypnav.curiosity.CuriosityConfig import CuriosityConfig
from hypnav.errors import TrainingError
from hypnav.geometry.poincare import MAX_NORM
from hypnav.policy.PolicyConfig import PolicyConfig
from hypnav.sim.CrowdSim import N_ACTIONS
from hypnav.sim.ScenarioConfig import ScenarioConfig
from hypnav.training.ReplayBuffer import Batch, ReplayBuffer, Transition
from hypnav.training.TrainRunConfig import TrainRunConfig
from hypnav.training.Trainer import METRICS_HEADER, Trainer, double_q_target
import numpy as np
import numpy.testing as npt
import csv
import os
import tempfile
import unittest
import logging

logging.basicConfig(level=logging.WARNING)
logger = logging.getLogger(__name__)

N_HUMANS = 2
STATE_DIM = 9 + 5 * N_HUMANS


def tiny_experiment(episodes=3, lam=0.1, curiosity=True, lr=1e-3, target_sync=5):
    return ExperimentConfig(
        scenario=ScenarioConfig(kind='simple-circle', n_humans=N_HUMANS, time_limit=5.0),
        policy=PolicyConfig(robot_phi_hidden=(16,), human_phi_hidden=(16,), phi_dim=8,
                            gat_dim=8, epsilon_decay_episodes=2),
        curiosity=CuriosityConfig(hidden=8, lam=lam, enabled=curiosity),
        training=TrainRunConfig(episodes=episodes, eval_every=2, eval_episodes=2, lr=lr,
                                batch_size=8, capacity=500, target_sync=target_sync,
                                warmup=16))


def random_batch(rng, size=8, done=0.0):
    states = rng.normal(size=(size, STATE_DIM))
    return Batch(states, rng.integers(N_ACTIONS, size=size), rng.normal(size=size),
                 states + rng.normal(scale=0.1, size=(size, STATE_DIM)),
                 np.full(size, done))


def snapshot(module):
    return {name: value.copy() for name, value in module.state_dict().items()}


class DoubleQTargetTestCase(unittest.TestCase):

    def test_terminal_transitions(self):
        q = np.array([[1.0, 2.0]])
        npt.assert_allclose(double_q_target([0.7], [1.0], q, q, 0.9), [0.7])

    def test_zero_discount(self):
        q_online = np.random.default_rng(0).normal(size=(3, 4))
        npt.assert_allclose(double_q_target([1.0, 2.0, 3.0], [0, 0, 0], q_online,
                                            q_online * 5.0, 0.0), [1.0, 2.0, 3.0])

    def test_online_selects_target_evaluates(self):
        q_online = np.array([[1.0, 2.0], [3.0, 0.0]])
        q_target = np.array([[10.0, 20.0], [30.0, 40.0]])
        y = double_q_target([1.0, 0.5], [0.0, 0.0], q_online, q_target, 0.9)
        npt.assert_allclose(y, [1.0 + 0.9 * 20.0, 0.5 + 0.9 * 30.0])


class ReplayBufferTestCase(unittest.TestCase):

    def fill(self, buffer, count):
        for i in range(count):
            buffer.push(Transition(np.full(3, float(i)), i % N_ACTIONS, float(i),
                                   np.full(3, i + 1.0), False))

    def test_capacity_and_eviction(self):
        buffer = ReplayBuffer(5)
        self.fill(buffer, 12)
        self.assertEqual(len(buffer), 5)
        self.assertEqual(sorted(buffer.rewards.tolist()), [7.0, 8.0, 9.0, 10.0, 11.0])

    def test_uniform_coverage(self):
        buffer = ReplayBuffer(10)
        self.fill(buffer, 10)
        rng = np.random.default_rng(0)
        seen = np.zeros(10)
        for _ in range(10000):
            batch = buffer.sample(10, rng)
            np.add.at(seen, batch.rewards.astype(int), 1)
        npt.assert_array_equal(seen, np.full(10, 10000.0))

    def test_batch_has_no_repeats(self):
        buffer = ReplayBuffer(50)
        self.fill(buffer, 30)
        rng = np.random.default_rng(1)
        for _ in range(200):
            rewards = buffer.sample(20, rng).rewards
            self.assertEqual(len(np.unique(rewards)), 20)
            self.assertTrue(np.all(rewards < 30))

    def test_sample_needs_enough_transitions(self):
        buffer = ReplayBuffer(10)
        self.fill(buffer, 3)
        with self.assertRaises(TrainingError):
            buffer.sample(4, np.random.default_rng(0))

    def test_width_mismatch(self):
        buffer = ReplayBuffer(10)
        self.fill(buffer, 1)
        with self.assertRaises(TrainingError):
            buffer.push(Transition(np.zeros(4), 0, 0.0, np.zeros(4), False))


class TrainStepTestCase(unittest.TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(3)

    def test_terminal_td_target_adds_intrinsic(self):
        trainer = Trainer(tiny_experiment(), seed=0)
        batch = random_batch(self.rng, done=1.0)
        intrinsic = np.linspace(0.0, 0.7, len(batch))
        npt.assert_allclose(trainer.td_target(batch, intrinsic), batch.rewards + intrinsic)

    def test_zero_lambda_freezes_curiosity(self):
        trainer = Trainer(tiny_experiment(lam=0.0), seed=0)
        before = snapshot(trainer.curiosity)
        planner_before = snapshot(trainer.planner)
        stats = trainer.train_step(random_batch(self.rng))
        for name, value in trainer.curiosity.state_dict().items():
            npt.assert_array_equal(value, before[name])
        changed = [name for name, value in trainer.planner.state_dict().items()
                   if not np.array_equal(value, planner_before[name])]
        self.assertTrue(changed)
        self.assertGreaterEqual(stats['mean_intrinsic_reward'], 0.0)

    def test_td_loss_decreases_on_one_transition(self):
        trainer = Trainer(tiny_experiment(curiosity=False, lr=5e-3, target_sync=1000), seed=0)
        single = random_batch(self.rng, size=1, done=1.0)
        repeated = Batch(np.repeat(single.states, 8, axis=0), np.repeat(single.actions, 8),
                         np.full(8, 1.0), np.repeat(single.next_states, 8, axis=0),
                         np.ones(8))
        losses = [trainer.train_step(repeated)['td_loss'] for _ in range(100)]
        self.assertLess(losses[-1], 0.5 * losses[0])

    def test_target_sync(self):
        trainer = Trainer(tiny_experiment(target_sync=3), seed=0)
        frozen = snapshot(trainer.target)
        for _ in range(2):
            trainer.train_step(random_batch(self.rng))
        for name, value in trainer.target.state_dict().items():
            npt.assert_array_equal(value, frozen[name])
        trainer.train_step(random_batch(self.rng))
        online = trainer.planner.state_dict()
        for name, value in trainer.target.state_dict().items():
            npt.assert_array_equal(value, online[name])

    def test_non_finite_loss(self):
        trainer = Trainer(tiny_experiment(), seed=0)
        batch = random_batch(self.rng)
        batch.rewards[0] = np.nan
        with self.assertRaises(TrainingError) as context:
            trainer.train_step(batch)
        self.assertIn('episode None', str(context.exception))
        trainer.episode = 4
        with self.assertRaises(TrainingError) as context:
            trainer.train_step(batch)
        self.assertIn('train step 0 of episode 4', str(context.exception))

    def test_curiosity_loss_leaves_planner_gradients_zero(self):
        trainer = Trainer(tiny_experiment(), seed=0)
        batch = random_batch(self.rng)
        trainer.optimizer.zero_grad()
        loss, _ = trainer.curiosity.curiosity_loss(batch.states, batch.actions,
                                                   batch.next_states)
        loss.backward()
        curiosity_ids = {id(param) for param in trainer.curiosity.parameters()}
        for name, param in trainer.planner.named_parameters():
            self.assertNotIn(id(param), curiosity_ids, name)
            npt.assert_array_equal(param.grad, np.zeros_like(param.data), name)
        self.assertTrue(any(np.any(param.grad != 0)
                            for param in trainer.curiosity.parameters()))

    def test_total_loss_gradient(self):
        trainer = Trainer(tiny_experiment(), seed=0)
        batch = random_batch(self.rng)
        intrinsic = trainer.curiosity.intrinsic_reward(batch.states, batch.actions,
                                                       batch.next_states)
        y = Tensor(trainer.td_target(batch, intrinsic)[:, None])

        def total_loss():
            q = trainer.planner(batch.states).q
            td = huber(gather_columns(q, batch.actions) - y).mean()
            curiosity, _ = trainer.curiosity.curiosity_loss(batch.states, batch.actions,
                                                            batch.next_states)
            return td + 0.1 * curiosity

        params = [param for _, param in trainer.optimizer.params]
        self.assertLessEqual(check_gradients(total_loss, params, self.rng), 1e-4)


class LongTrainingTestCase(unittest.TestCase):
    """
    Ten thousand updates on noisy random batches
    """

    def test_embeddings_stay_inside_the_shell(self):
        trainer = Trainer(tiny_experiment(), seed=0)
        rng = np.random.default_rng(11)
        held_out = rng.normal(scale=3.0, size=(16, STATE_DIM))
        manifold = [(name, param) for name, param in trainer.optimizer.params
                    if param.manifold]
        self.assertTrue(manifold)
        for step in range(10000):
            batch = random_batch(rng, size=4)
            batch.states *= 3.0
            batch.next_states *= 3.0
            trainer.train_step(batch)
            if (step + 1) % 500:
                continue
            for name, param in manifold:
                norms = np.linalg.norm(param.data, axis=-1)
                self.assertTrue(np.all(norms <= MAX_NORM + 1e-12),
                                "{0} at step {1}".format(name, step))
            with no_grad():
                embedding = trainer.planner(held_out).embedding.data
                features = trainer.curiosity.phi(held_out).data
            for points in (embedding, features):
                self.assertTrue(np.all(np.isfinite(points)))
                self.assertTrue(np.all(np.linalg.norm(points, axis=1) <= MAX_NORM + 1e-12))
        self.assertEqual(trainer.train_steps, 10000)


class RunTrainingTestCase(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def run_once(self, name, experiment, seed=7):
        out = os.path.join(self.tmp.name, name)
        result = Trainer(experiment, seed=seed).run_training(out)
        with open(os.path.join(out, 'metrics.csv'), 'rb') as handle:
            return result, handle.read(), out

    def test_metrics_and_checkpoint(self):
        result, content, out = self.run_once('a', tiny_experiment())
        rows = list(csv.reader(content.decode().splitlines()))
        self.assertEqual(rows[0], METRICS_HEADER)
        self.assertEqual([row[0] for row in rows[1:]], ['2', '3'])
        self.assertEqual(len(result.metrics), 2)
        self.assertTrue(os.path.exists(os.path.join(out, 'best.npz')))
        self.assertTrue(os.path.exists(sidecar_path(os.path.join(out, 'best.npz'))))
        self.assertGreater(result.train_steps, 0)

    def test_same_seed_same_metrics(self):
        _, first, _ = self.run_once('a', tiny_experiment())
        _, second, _ = self.run_once('b', tiny_experiment())
        self.assertEqual(first, second)

    def test_zero_episodes(self):
        result, content, out = self.run_once('empty', tiny_experiment(episodes=0))
        self.assertEqual(content.decode().splitlines(), [','.join(METRICS_HEADER)])
        self.assertEqual(result.metrics, [])
        self.assertIsNone(result.best_checkpoint)
        self.assertFalse(os.path.exists(os.path.join(out, 'best.npz')))


if __name__ == '__main__':
    unittest.main()
