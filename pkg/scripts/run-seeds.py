#!/usr/bin/env python3
"""
Train one configuration under several seeds and report the median of the
final evaluation rows
"""
import argparse
import csv
import logging
import os
import statistics

from hypnav.commands import main as hypnav_main


def final_row(metrics_path):
    with open(metrics_path, newline='') as handle:
        rows = list(csv.DictReader(handle))
    return rows[-1] if rows else None


def main():
    logging.basicConfig(level=logging.INFO)
    logger = logging.getLogger(__name__)

    parser = argparse.ArgumentParser(description='Multi-seed training run')
    parser.add_argument('--config', '-c', required=True, help='Experiment file')
    parser.add_argument('--seeds', type=int, nargs='+', default=[0, 1, 2])
    parser.add_argument('--out', '-o', default='out/seeds', help='Output root')
    args = parser.parse_args()

    success, returns = [], []
    for seed in args.seeds:
        out = os.path.join(args.out, 'seed{0}'.format(seed))
        code = hypnav_main(['train', '--config', args.config, '--seed', str(seed),
                            '--out', out])
        if code != 0:
            logger.error("Seed %d failed with exit code %d", seed, code)
            return code
        row = final_row(os.path.join(out, 'metrics.csv'))
        if row is None:
            continue
        success.append(float(row['eval_success_rate']))
        returns.append(float(row['eval_avg_return']))

    if success:
        print("median success rate: {0:.1f}%".format(statistics.median(success)))
        print("median avg return: {0:.4f}".format(statistics.median(returns)))
    return 0

if __name__ == "__main__":
    main()
