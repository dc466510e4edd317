"""
Double dueling Q-learning with hyperbolic curiosity
"""
import csv
import logging
import math
import os
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from hypnav.ExperimentConfig import sidecar_path
from hypnav.autodiff.Tensor import Tensor, gather_columns, huber, no_grad
from hypnav.curiosity.HyperCuriosity import HyperCuriosity
from hypnav.errors import TrainingError
from hypnav.nn.Checkpoint import save_checkpoint
from hypnav.nn.RiemannianAdam import RiemannianAdam
from hypnav.policy.HyperPlanner import HyperPlanner
from hypnav.sim.CrowdSim import CrowdSim
from hypnav.sim.state import HUMAN_STATE_DIM, ROBOT_STATE_DIM
from hypnav.training.Evaluator import evaluate
from hypnav.training.ReplayBuffer import ReplayBuffer, Transition

logger = logging.getLogger(__name__)

METRICS_HEADER = ['episode', 'eval_success_rate', 'eval_nav_time', 'eval_avg_return',
                  'mean_intrinsic_reward', 'epsilon', 'eval_collision_rate',
                  'eval_timeout_rate', 'eval_discomfort_steps']

# child streams of the run seed
INIT_STREAM, ENV_STREAM, REPLAY_STREAM, EXPLORE_STREAM, EVAL_STREAM = range(5)


def double_q_target(rewards, dones, q_online_next, q_target_next, gamma):
    """
    y = r + gamma (1 - done) Q_target(s', argmax_a Q_online(s', a))
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    dones = np.asarray(dones, dtype=np.float64)
    best = np.argmax(q_online_next, axis=1)
    bootstrap = q_target_next[np.arange(len(best)), best]
    return rewards + gamma * (1.0 - dones) * bootstrap


@dataclass
class TrainResult:
    metrics: List[dict] = field(default_factory=list)
    best_checkpoint: Optional[str] = None
    train_steps: int = 0


class Trainer(object):
    """
    Owns the online and target planners, the curiosity nets, one optimizer
    over both parameter sets and the replay buffer

    :param experiment: ExperimentConfig
    :param seed: run seed; defaults to training.seed
    """

    def __init__(self, experiment, seed=None):
        self.experiment = experiment.validate()
        self.seed = experiment.training.seed if seed is None else seed
        streams = np.random.SeedSequence(self.seed).spawn(5)
        self.rngs = [np.random.default_rng(s) for s in streams]
        self.eval_seed = int(streams[EVAL_STREAM].generate_state(1)[0])
        init_rng = self.rngs[INIT_STREAM]
        self.planner = HyperPlanner(experiment.policy, init_rng)
        self.target = HyperPlanner(experiment.policy, init_rng)
        self.target.copy_from(self.planner)
        self.curiosity = None
        named = [('planner.' + name, p) for name, p in self.planner.named_parameters()]
        if experiment.curiosity.enabled:
            state_dim = ROBOT_STATE_DIM + HUMAN_STATE_DIM * experiment.scenario.humans
            self.curiosity = HyperCuriosity(state_dim, experiment.curiosity, init_rng)
            named += [('curiosity.' + name, p)
                      for name, p in self.curiosity.named_parameters()]
        self.optimizer = RiemannianAdam(named, lr=experiment.training.lr)
        self.buffer = ReplayBuffer(experiment.training.capacity)
        self.train_steps = 0
        self.episode = None

    def modules(self):
        modules = {'planner': self.planner}
        if self.curiosity is not None:
            modules['curiosity'] = self.curiosity
        return modules

    def sync_target(self):
        self.target.copy_from(self.planner)

    def td_target(self, batch, intrinsic=None):
        rewards = batch.rewards if intrinsic is None else batch.rewards + intrinsic
        with no_grad():
            q_online_next = self.planner(batch.next_states).q.data
            q_target_next = self.target(batch.next_states).q.data
        return double_q_target(rewards, batch.dones, q_online_next, q_target_next,
                               self.experiment.training.gamma)

    def train_step(self, batch):
        """
        One optimizer step on Huber TD loss plus lam times the curiosity loss
        :return: dict of loss statistics
        """
        cfg = self.experiment.training
        self.optimizer.zero_grad()
        curiosity_loss = None
        intrinsic = np.zeros(len(batch))
        if self.curiosity is not None:
            curiosity_loss, intrinsic = self.curiosity.curiosity_loss(
                batch.states, batch.actions, batch.next_states, self.train_steps)
        y = self.td_target(batch, intrinsic)
        q = self.planner(batch.states).q
        q_taken = gather_columns(q, batch.actions)
        td_loss = huber(q_taken - Tensor(y[:, None]), cfg.huber_delta).mean()
        loss = td_loss
        if curiosity_loss is not None:
            loss = td_loss + self.experiment.curiosity.lam * curiosity_loss
        if not math.isfinite(loss.item()):
            raise TrainingError("Non-finite loss at train step {0} of episode {1}: td {2}, "
                                "curiosity {3}".format(self.train_steps, self.episode,
                                                       td_loss.item(),
                                                       None if curiosity_loss is None
                                                       else curiosity_loss.item()))
        loss.backward()
        self.optimizer.step()
        self.train_steps += 1
        if self.train_steps % cfg.target_sync == 0:
            self.sync_target()
            logger.debug("Synced target network at step %d", self.train_steps)
        return {'loss': loss.item(), 'td_loss': td_loss.item(),
                'curiosity_loss': 0.0 if curiosity_loss is None else curiosity_loss.item(),
                'mean_intrinsic_reward': float(np.mean(intrinsic))}

    def run_episode(self, env, epsilon):
        """
        Collect one episode with epsilon-greedy actions, training after each
        step once the buffer is warm
        :return: list of mean intrinsic rewards of the train steps taken
        """
        cfg = self.experiment.training
        explore_rng = self.rngs[EXPLORE_STREAM]
        ready = max(cfg.warmup, cfg.batch_size)
        intrinsic = []
        obs = env.reset()
        done = False
        while not done:
            action = self.planner.select_action(obs, epsilon, explore_rng)
            next_obs, reward, done, _ = env.step(action)
            self.buffer.push(Transition(obs.flatten(), action, reward,
                                        next_obs.flatten(), done))
            if len(self.buffer) >= ready:
                batch = self.buffer.sample(cfg.batch_size, self.rngs[REPLAY_STREAM])
                intrinsic.append(self.train_step(batch)['mean_intrinsic_reward'])
            obs = next_obs
        return intrinsic

    def save(self, path):
        layer_sizes = {name: module.layer_sizes() for name, module in self.modules().items()}
        save_checkpoint(path, self.modules(), self.experiment.policy.embed_dim, layer_sizes)
        self.experiment.save(sidecar_path(path))

    def run_training(self, output_dir=None):
        """
        Train for training.episodes episodes, evaluating greedily every
        eval_every episodes and after the last one

        Writes metrics.csv and keeps best.npz, the checkpoint with the highest
        success rate, ties broken by average return.
        """
        experiment = self.experiment
        cfg = experiment.training
        output_dir = output_dir or experiment.output_dir
        os.makedirs(output_dir, exist_ok=True)
        metrics_path = os.path.join(output_dir, 'metrics.csv')
        checkpoint_path = os.path.join(output_dir, 'best.npz')
        result = TrainResult()
        env = CrowdSim(experiment.scenario, self.rngs[ENV_STREAM])
        logger.info("Training %d episodes on %s, planner has %d parameters",
                    cfg.episodes, experiment.scenario.kind, self.planner.parameter_count())
        best_key = None
        recent_intrinsic = []
        with open(metrics_path, 'w', newline='') as handle:
            writer = csv.writer(handle)
            writer.writerow(METRICS_HEADER)
            for episode in range(cfg.episodes):
                self.episode = episode + 1
                epsilon = experiment.policy.epsilon(episode)
                recent_intrinsic.extend(self.run_episode(env, epsilon))
                finished = episode + 1
                if finished % cfg.eval_every and finished != cfg.episodes:
                    continue
                evaluation = evaluate(self.planner.as_policy(), experiment.scenario,
                                      cfg.eval_episodes, self.eval_seed, cfg.gamma,
                                      cfg.eval_workers)
                row = {'episode': finished,
                       'eval_success_rate': evaluation.success_rate,
                       'eval_nav_time': evaluation.nav_time,
                       'eval_avg_return': evaluation.avg_return,
                       'mean_intrinsic_reward': (float(np.mean(recent_intrinsic))
                                                 if recent_intrinsic else 0.0),
                       'epsilon': epsilon,
                       'eval_collision_rate': evaluation.collision_rate,
                       'eval_timeout_rate': evaluation.timeout_rate,
                       'eval_discomfort_steps': evaluation.discomfort_steps}
                writer.writerow([row['episode']] + [repr(float(row[k]))
                                                    for k in METRICS_HEADER[1:]])
                handle.flush()
                result.metrics.append(row)
                recent_intrinsic = []
                key = (evaluation.success_rate, evaluation.avg_return)
                if best_key is None or key > best_key:
                    best_key = key
                    self.save(checkpoint_path)
                    result.best_checkpoint = checkpoint_path
                logger.info("Episode %d: %s", finished, evaluation.summary())
        result.train_steps = self.train_steps
        return result
