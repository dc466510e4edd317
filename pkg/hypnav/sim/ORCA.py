"""
Optimal Reciprocal Collision Avoidance for disc agents without obstacles

Port of the RVO2 velocity computation: every neighbour contributes one
half-plane of permitted velocities, a 2-D incremental linear program picks
the permitted velocity closest to the preferred one, and a 3-D fallback
minimises the worst violation when the half-planes do not intersect. Plain
float arithmetic is used, the vectors are only two long.
"""
import logging
import math

import numpy as np

logger = logging.getLogger(__name__)

RVO_EPSILON = 1e-5
# RVO2 convention, agents are inflated slightly when building constraints
RADIUS_PADDING = 0.01


def _det(ax, ay, bx, by):
    return ax * by - ay * bx


class Line(object):
    """
    Directed line; permitted velocities lie to its left
    """
    __slots__ = ('px', 'py', 'dx', 'dy')

    def __init__(self, px, py, dx, dy):
        self.px, self.py = px, py
        self.dx, self.dy = dx, dy


def linear_program1(lines, line_no, radius, opt_x, opt_y, direction_opt):
    """
    Optimise on line line_no subject to lines[:line_no] and the speed disc
    :return: (feasible, result_x, result_y)
    """
    line = lines[line_no]
    dot = line.px * line.dx + line.py * line.dy
    discriminant = dot * dot + radius * radius - (line.px * line.px + line.py * line.py)
    if discriminant < 0.0:
        return False, 0.0, 0.0
    sqrt_disc = math.sqrt(discriminant)
    t_left = -dot - sqrt_disc
    t_right = -dot + sqrt_disc
    for i in range(line_no):
        other = lines[i]
        denominator = _det(line.dx, line.dy, other.dx, other.dy)
        numerator = _det(other.dx, other.dy, line.px - other.px, line.py - other.py)
        if abs(denominator) <= RVO_EPSILON:
            if numerator < 0.0:
                return False, 0.0, 0.0
            continue
        t = numerator / denominator
        if denominator >= 0.0:
            t_right = min(t_right, t)
        else:
            t_left = max(t_left, t)
        if t_left > t_right:
            return False, 0.0, 0.0
    if direction_opt:
        if opt_x * line.dx + opt_y * line.dy > 0.0:
            t = t_right
        else:
            t = t_left
    else:
        t = line.dx * (opt_x - line.px) + line.dy * (opt_y - line.py)
        t = min(max(t, t_left), t_right)
    return True, line.px + t * line.dx, line.py + t * line.dy


def linear_program2(lines, radius, opt_x, opt_y, direction_opt):
    """
    :return: (index of the first line that failed or len(lines), result)
    """
    if direction_opt:
        rx, ry = opt_x * radius, opt_y * radius
    elif opt_x * opt_x + opt_y * opt_y > radius * radius:
        norm = math.hypot(opt_x, opt_y)
        rx, ry = opt_x / norm * radius, opt_y / norm * radius
    else:
        rx, ry = opt_x, opt_y
    for i, line in enumerate(lines):
        if _det(line.dx, line.dy, line.px - rx, line.py - ry) > 0.0:
            feasible, x, y = linear_program1(lines, i, radius, opt_x, opt_y, direction_opt)
            if not feasible:
                return i, (rx, ry)
            rx, ry = x, y
    return len(lines), (rx, ry)


def linear_program3(lines, begin_line, radius, result):
    rx, ry = result
    distance = 0.0
    for i in range(begin_line, len(lines)):
        line = lines[i]
        if _det(line.dx, line.dy, line.px - rx, line.py - ry) <= distance:
            continue
        projected = []
        for j in range(i):
            other = lines[j]
            determinant = _det(line.dx, line.dy, other.dx, other.dy)
            if abs(determinant) <= RVO_EPSILON:
                if line.dx * other.dx + line.dy * other.dy > 0.0:
                    continue
                px = 0.5 * (line.px + other.px)
                py = 0.5 * (line.py + other.py)
            else:
                scale = _det(other.dx, other.dy, line.px - other.px,
                             line.py - other.py) / determinant
                px = line.px + scale * line.dx
                py = line.py + scale * line.dy
            dx, dy = other.dx - line.dx, other.dy - line.dy
            norm = math.hypot(dx, dy)
            projected.append(Line(px, py, dx / norm, dy / norm))
        fail, candidate = linear_program2(projected, radius, -line.dy, line.dx, True)
        if fail >= len(projected):
            rx, ry = candidate
        distance = _det(line.dx, line.dy, line.px - rx, line.py - ry)
    return rx, ry


def orca_lines(position, velocity, radius, neighbors, time_horizon, time_step):
    """
    Half-planes induced on one agent by its neighbours

    :param neighbors: iterable of (position, velocity, radius) tuples
    """
    px, py = position
    vx, vy = velocity
    inv_horizon = 1.0 / time_horizon
    lines = []
    for (ox, oy), (ovx, ovy), other_radius in neighbors:
        rel_px, rel_py = ox - px, oy - py
        rel_vx, rel_vy = vx - ovx, vy - ovy
        dist_sq = rel_px * rel_px + rel_py * rel_py
        combined = radius + other_radius
        combined_sq = combined * combined
        if dist_sq > combined_sq:
            wx = rel_vx - inv_horizon * rel_px
            wy = rel_vy - inv_horizon * rel_py
            w_len_sq = wx * wx + wy * wy
            dot1 = wx * rel_px + wy * rel_py
            if dot1 < 0.0 and dot1 * dot1 > combined_sq * w_len_sq:
                # project on cut-off circle
                w_len = math.sqrt(w_len_sq)
                ux, uy = wx / w_len, wy / w_len
                dx, dy = uy, -ux
                scale = combined * inv_horizon - w_len
                u_x, u_y = scale * ux, scale * uy
            else:
                # project on legs
                leg = math.sqrt(dist_sq - combined_sq)
                if _det(rel_px, rel_py, wx, wy) > 0.0:
                    dx = (rel_px * leg - rel_py * combined) / dist_sq
                    dy = (rel_px * combined + rel_py * leg) / dist_sq
                else:
                    dx = -(rel_px * leg + rel_py * combined) / dist_sq
                    dy = -(-rel_px * combined + rel_py * leg) / dist_sq
                dot2 = rel_vx * dx + rel_vy * dy
                u_x, u_y = dot2 * dx - rel_vx, dot2 * dy - rel_vy
        else:
            # already overlapping, resolve within one step
            inv_step = 1.0 / time_step
            wx = rel_vx - inv_step * rel_px
            wy = rel_vy - inv_step * rel_py
            w_len = math.hypot(wx, wy)
            if w_len == 0.0:
                continue
            ux, uy = wx / w_len, wy / w_len
            dx, dy = uy, -ux
            scale = combined * inv_step - w_len
            u_x, u_y = scale * ux, scale * uy
        lines.append(Line(vx + 0.5 * u_x, vy + 0.5 * u_y, dx, dy))
    return lines


def compute_velocity(position, velocity, radius, max_speed, pref_velocity,
                     neighbors, time_horizon, time_step):
    """
    Velocity closest to pref_velocity inside every ORCA half-plane and the
    max_speed disc
    """
    lines = orca_lines(position, velocity, radius, neighbors, time_horizon, time_step)
    fail, result = linear_program2(lines, max_speed, pref_velocity[0],
                                   pref_velocity[1], False)
    if fail < len(lines):
        logger.debug("ORCA infeasible at line %d of %d, using fallback", fail, len(lines))
        result = linear_program3(lines, fail, max_speed, result)
    return result


def preferred_velocity(agent):
    """
    Unit vector to the goal scaled by v_pref, shortened inside the last meter
    """
    dx, dy = agent.gx - agent.px, agent.gy - agent.py
    distance = math.hypot(dx, dy)
    if distance > 1.0:
        return dx / distance * agent.v_pref, dy / distance * agent.v_pref
    return dx * agent.v_pref, dy * agent.v_pref


def nearest_neighbors(index, agents, neighbor_dist, max_neighbors):
    me = agents[index]
    candidates = []
    for j, other in enumerate(agents):
        if j == index:
            continue
        distance = math.hypot(other.px - me.px, other.py - me.py)
        if distance < neighbor_dist:
            candidates.append((distance, j))
    candidates.sort()
    return [agents[j] for _, j in candidates[:max_neighbors]]


def orca_policy(humans, time_step, time_horizon, neighbor_dist=10.0, max_neighbors=10):
    """
    New velocity for every human, computed from the current states of all
    humans only; callers apply the velocities simultaneously

    :param humans: list of Agent objects with position, velocity, goal, v_pref
    :return: array of shape (N, 2)
    """
    velocities = np.zeros((len(humans), 2))
    for i, human in enumerate(humans):
        neighbors = [(other.position, other.velocity, other.radius + RADIUS_PADDING)
                     for other in nearest_neighbors(i, humans, neighbor_dist, max_neighbors)]
        velocities[i] = compute_velocity(human.position, human.velocity,
                                         human.radius + RADIUS_PADDING, human.v_pref,
                                         preferred_velocity(human), neighbors,
                                         time_horizon, time_step)
    return velocities
