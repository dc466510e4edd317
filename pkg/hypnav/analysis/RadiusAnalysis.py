"""
Hyperbolic radius versus attention paid to other agents

Each decision step of a rollout gives one point: the norm of the state
embedding fed to the value heads, and one minus the robot's self-attention
in the second graph attention layer. Points are pooled per step across
episodes and correlated with Pearson's r.
"""
import csv
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats

from hypnav.errors import AnalysisError
from hypnav.geometry.poincare import hyperbolic_radius

logger = logging.getLogger(__name__)

MIN_POINTS = 100
LOW_RADIUS = 0.5
DEGENERATE = 'degenerate (zero variance)'


@dataclass(frozen=True)
class RadiusTracePoint:
    episode: int
    step: int
    t: float
    radius: float
    attention_to_others: float


@dataclass
class RadiusReport:
    n_points: int
    pearson_r: Optional[float]
    p_value: Optional[float]
    low_radius_share: float
    pooling: str = 'per-step'

    @property
    def degenerate(self):
        return self.pearson_r is None

    def describe(self):
        if self.degenerate:
            correlation = DEGENERATE
        else:
            correlation = "r = {0:.4f} (p = {1:.3g})".format(self.pearson_r, self.p_value)
        return "{0} points pooled {1}: {2}".format(self.n_points, self.pooling, correlation)


def radius_trace(planner, trace, episode=0):
    """
    One RadiusTracePoint per decision step of a rollout trace
    """
    points = []
    for step, current in enumerate(trace[:-1]):
        out = planner.q_values(current.observation)
        points.append(RadiusTracePoint(episode, step, current.observation.t,
                                       hyperbolic_radius(out.embedding),
                                       1.0 - out.self_attention))
    return points


def correlate(points):
    """
    Pearson correlation between radius and attention-to-others
    """
    if len(points) < MIN_POINTS:
        raise AnalysisError("Radius analysis needs at least {0} points, got {1}".format(
            MIN_POINTS, len(points)))
    radius = np.array([p.radius for p in points])
    attention = np.array([p.attention_to_others for p in points])
    low_share = float(np.mean(radius <= LOW_RADIUS))
    if np.ptp(radius) == 0.0 or np.ptp(attention) == 0.0:
        logger.warning("Radius analysis is %s", DEGENERATE)
        return RadiusReport(len(points), None, None, low_share)
    r, p_value = stats.pearsonr(radius, attention)
    return RadiusReport(len(points), float(r), float(p_value), low_share)


def write_points_csv(path, points):
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(['episode', 'step', 't', 'radius', 'attention_to_others'])
        for p in points:
            writer.writerow([p.episode, p.step, '{0:.2f}'.format(p.t), repr(p.radius),
                             repr(p.attention_to_others)])


def write_report(path, report):
    with open(path, 'w') as handle:
        handle.write("pooling: {0}\n".format(report.pooling))
        handle.write("points: {0}\n".format(report.n_points))
        if report.degenerate:
            handle.write("pearson_r: {0}\n".format(DEGENERATE))
        else:
            handle.write("pearson_r: {0!r}\n".format(report.pearson_r))
            handle.write("p_value: {0!r}\n".format(report.p_value))
        handle.write("low_radius_share: {0!r}\n".format(report.low_radius_share))
