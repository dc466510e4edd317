import logging
import xml.etree.ElementTree as ET

import numpy as np

logger = logging.getLogger(__name__)

SVG_NS = 'http://www.w3.org/2000/svg'
PIXELS_PER_METER = 50.0
MARGIN = 1.0
ROBOT_COLOR = '#ffb000'
NEUTRAL_COLOR = '#808080'


def attention_color(value):
    """
    Blue at 0, red at 1
    """
    value = min(max(float(value), 0.0), 1.0)
    return '#{0:02x}00{1:02x}'.format(int(round(255 * value)), int(round(255 * (1.0 - value))))


def human_attention(attentions):
    """
    Mean attention of the robot to each human over the rollout

    :param attentions: list of (N+1, N+1) second-layer attention arrays
    :return: array (N,)
    """
    rows = np.array([a[0, 1:] for a in attentions])
    return rows.mean(axis=0)


class TrajectoryRenderer(object):
    """
    Renders a rollout trace as one SVG path per agent

    Humans are coloured by the robot's mean attention to them, scaled so the
    most attended human is drawn at the red end.
    """

    def __init__(self, trace, attentions=None):
        self.trace = trace
        self.attentions = attentions
        observations = [step.observation for step in trace]
        self.robot_xy = np.array([[o.robot.px, o.robot.py] for o in observations])
        n_humans = observations[0].n_humans
        self.humans_xy = [np.array([[o.humans[i].px, o.humans[i].py] for o in observations])
                          for i in range(n_humans)]
        self.goal = (observations[0].robot.gx, observations[0].robot.gy)
        points = [self.robot_xy, np.array([self.goal])] + self.humans_xy
        stacked = np.vstack(points)
        self.low = stacked.min(axis=0) - MARGIN
        self.high = stacked.max(axis=0) + MARGIN

    def _to_svg(self, xy):
        x = (xy[0] - self.low[0]) * PIXELS_PER_METER
        y = (self.high[1] - xy[1]) * PIXELS_PER_METER
        return x, y

    def _path(self, points):
        coords = ["{0:.1f},{1:.1f}".format(*self._to_svg(p)) for p in points]
        return 'M ' + ' L '.join(coords)

    def human_colors(self):
        n = len(self.humans_xy)
        if not self.attentions or n == 0:
            return [NEUTRAL_COLOR] * n
        weights = human_attention(self.attentions)
        top = weights.max()
        scaled = weights / top if top > 0 else np.zeros(n)
        return [attention_color(value) for value in scaled]

    def to_element(self):
        width, height = (self.high - self.low) * PIXELS_PER_METER
        root = ET.Element('svg', {'xmlns': SVG_NS, 'width': '{0:.0f}'.format(width),
                                  'height': '{0:.0f}'.format(height),
                                  'viewBox': '0 0 {0:.0f} {1:.0f}'.format(width, height)})
        gx, gy = self._to_svg(self.goal)
        ET.SubElement(root, 'circle', {'id': 'goal', 'cx': '{0:.1f}'.format(gx),
                                       'cy': '{0:.1f}'.format(gy), 'r': '6',
                                       'fill': 'none', 'stroke': 'green'})
        for index, (xy, color) in enumerate(zip(self.humans_xy, self.human_colors())):
            ET.SubElement(root, 'path', {'id': 'human-{0}'.format(index), 'd': self._path(xy),
                                         'fill': 'none', 'stroke': color,
                                         'stroke-width': '2'})
        ET.SubElement(root, 'path', {'id': 'robot', 'd': self._path(self.robot_xy),
                                     'fill': 'none', 'stroke': ROBOT_COLOR,
                                     'stroke-width': '3'})
        return root

    def write(self, path):
        ET.ElementTree(self.to_element()).write(path, encoding='utf-8', xml_declaration=True)
        logger.info("Wrote trajectory SVG %s", path)
