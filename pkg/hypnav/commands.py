"""
Command-line verbs: train, eval, rollout and radius-analysis
"""
import argparse
import dataclasses
import logging
import os
import sys

import numpy as np

from hypnav.ExperimentConfig import ExperimentConfig, sidecar_path
from hypnav.analysis.RadiusAnalysis import (correlate, radius_trace, write_points_csv,
                                            write_report)
from hypnav.analysis.TrajectoryRenderer import TrajectoryRenderer
from hypnav.errors import CheckpointError, ConfigError, HypNavError
from hypnav.nn.Checkpoint import load_checkpoint
from hypnav.policy.GoalSeekingPolicy import GoalSeekingPolicy
from hypnav.policy.HyperPlanner import HyperPlanner
from hypnav.policy.ORCAPolicy import ORCAPolicy
from hypnav.policy.RandomPolicy import RandomPolicy
from hypnav.sim.CrowdSim import rollout, write_trace_csv
from hypnav.sim.ScenarioConfig import SCENARIO_KINDS
from hypnav.training.Evaluator import episode_seeds, evaluate, write_episode_csv
from hypnav.training.Trainer import Trainer

logger = logging.getLogger(__name__)

BUILTIN_POLICIES = ('orca', 'straight', 'random')
DEFAULT_EVAL_EPISODES = 1000
DEFAULT_ANALYSIS_EPISODES = 50


def resolve_experiment(args):
    """
    Experiment config from --config (defaults otherwise) with the command
    line overrides applied
    """
    if getattr(args, 'config', None):
        experiment = ExperimentConfig.load(args.config)
    else:
        experiment = ExperimentConfig()
    scenario = experiment.scenario
    if getattr(args, 'scenario', None):
        n_humans = scenario.n_humans if scenario.kind == args.scenario else None
        scenario = dataclasses.replace(scenario, kind=args.scenario, n_humans=n_humans)
    if getattr(args, 'humans', None) is not None:
        scenario = dataclasses.replace(scenario, n_humans=args.humans)
    training = experiment.training
    if args.seed is not None:
        scenario = dataclasses.replace(scenario, seed=args.seed)
        training = dataclasses.replace(training, seed=args.seed)
    if getattr(args, 'episodes', None) is not None and args.command == 'train':
        training = dataclasses.replace(training, episodes=args.episodes)
    output_dir = args.out or experiment.output_dir
    return dataclasses.replace(experiment, scenario=scenario.validate(),
                               training=training.validate(),
                               output_dir=output_dir).validate()


def load_policy(checkpoint, scenario):
    """
    :return: (policy callback, HyperPlanner or None for builtin policies)
    """
    if checkpoint == 'orca':
        return ORCAPolicy(scenario), None
    if checkpoint == 'straight':
        return GoalSeekingPolicy(scenario.robot_v_pref, scenario.time_step), None
    if checkpoint == 'random':
        return RandomPolicy(), None
    sidecar = sidecar_path(checkpoint)
    if not os.path.exists(sidecar):
        raise CheckpointError("Checkpoint config {0} not found".format(sidecar))
    trained = ExperimentConfig.load(sidecar)
    planner = HyperPlanner(trained.policy, np.random.default_rng(0))
    load_checkpoint(checkpoint, {'planner': planner}, trained.policy.embed_dim)
    logger.info("Loaded planner from %s (embed dim %d)", checkpoint,
                trained.policy.embed_dim)
    return planner.as_policy(), planner


def run_seed(experiment, args):
    return args.seed if args.seed is not None else experiment.training.seed


def cmd_train(args):
    experiment = resolve_experiment(args)
    trainer = Trainer(experiment, run_seed(experiment, args))
    result = trainer.run_training(experiment.output_dir)
    if result.metrics:
        last = result.metrics[-1]
        print("episode {0}: success rate {1:.1f}%, nav time {2:.2f} s, avg return "
              "{3:.4f}".format(last['episode'], last['eval_success_rate'],
                               last['eval_nav_time'], last['eval_avg_return']))
    else:
        print("no episodes trained")
    return 0


def cmd_eval(args):
    experiment = resolve_experiment(args)
    n_episodes = DEFAULT_EVAL_EPISODES if args.episodes is None else args.episodes
    if n_episodes <= 0:
        raise ConfigError("eval needs at least one episode, got {0}".format(n_episodes))
    policy, _ = load_policy(args.checkpoint, experiment.scenario)
    training = experiment.training
    result = evaluate(policy, experiment.scenario, n_episodes, run_seed(experiment, args),
                      training.gamma, training.eval_workers)
    os.makedirs(experiment.output_dir, exist_ok=True)
    write_episode_csv(os.path.join(experiment.output_dir, 'eval_episodes.csv'), result,
                      training.gamma)
    print("success rate: {0:.1f}%".format(result.success_rate))
    print("navigation time: {0:.2f} s".format(result.nav_time))
    print("average return: {0:.4f}".format(result.avg_return))
    return 0


def cmd_rollout(args):
    experiment = resolve_experiment(args)
    policy, planner = load_policy(args.checkpoint, experiment.scenario)
    outcome, trace = rollout(policy, experiment.scenario, run_seed(experiment, args))
    out = experiment.output_dir
    os.makedirs(out, exist_ok=True)
    write_trace_csv(os.path.join(out, 'trace.csv'), trace)
    attentions = None
    if planner is not None:
        write_points_csv(os.path.join(out, 'radius_timeline.csv'),
                         radius_trace(planner, trace))
        attentions = [planner.q_values(step.observation).attention for step in trace[:-1]]
    else:
        logger.warning("Builtin policy %s has no embedding, skipping radius timeline",
                       args.checkpoint)
    TrajectoryRenderer(trace, attentions).write(os.path.join(out, 'trajectory.svg'))
    print("{0} after {1:.2f} s".format(outcome.outcome.value, outcome.nav_time))
    return 0


def cmd_radius_analysis(args):
    experiment = resolve_experiment(args)
    policy, planner = load_policy(args.checkpoint, experiment.scenario)
    if planner is None:
        raise ConfigError("radius-analysis needs a trained checkpoint, not '{0}'".format(
            args.checkpoint))
    n_episodes = DEFAULT_ANALYSIS_EPISODES if args.episodes is None else args.episodes
    if n_episodes <= 0:
        raise ConfigError("radius-analysis needs at least one episode")
    points = []
    for episode, seed in enumerate(episode_seeds(run_seed(experiment, args), n_episodes)):
        _, trace = rollout(policy, experiment.scenario, seed)
        points.extend(radius_trace(planner, trace, episode))
    out = experiment.output_dir
    os.makedirs(out, exist_ok=True)
    write_points_csv(os.path.join(out, 'radius_points.csv'), points)
    report = correlate(points)
    write_report(os.path.join(out, 'radius_report.txt'), report)
    print(report.describe())
    return 0


COMMANDS = {
    'train': cmd_train,
    'eval': cmd_eval,
    'rollout': cmd_rollout,
    'radius-analysis': cmd_radius_analysis,
}


def build_parser():
    parser = argparse.ArgumentParser(description='Hyperbolic crowd navigation',
                                     formatter_class=argparse.RawTextHelpFormatter)
    parser.add_argument('--verbose', '-v', action='store_true', help='Debug logging')
    parser.add_argument('--quiet', '-q', action='store_true', help='Warnings only')
    subparsers = parser.add_subparsers(dest='command', required=True)
    for name in COMMANDS:
        sub = subparsers.add_parser(name)
        sub.add_argument('--config', '-c', help='Experiment file, see example '
                                                'formatting in conf directory')
        sub.add_argument('--seed', type=int, help='Overrides the config seeds')
        sub.add_argument('--out', '-o', help='Output directory')
        sub.add_argument('--scenario', choices=SCENARIO_KINDS, help='Scenario kind')
        sub.add_argument('--humans', type=int, help='Number of humans')
        sub.add_argument('--episodes', '-n', type=int, help='Episode count')
        if name != 'train':
            sub.add_argument('--checkpoint', required=True,
                             help='Checkpoint path or one of ' + ', '.join(BUILTIN_POLICIES))
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(level=level)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, CheckpointError, FileNotFoundError) as error:
        logger.error("%s", error)
        return 2
    except (HypNavError, OSError) as error:
        logger.error("%s", error)
        return 1


if __name__ == '__main__':
    sys.exit(main())
