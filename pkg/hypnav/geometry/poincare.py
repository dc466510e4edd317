"""
Poincare ball primitives, curvature -1

All functions work on the last axis, so a single point of shape (n,) and a
batch of shape (b, n) are both accepted. Computation is float64 throughout.
Every function that produces a point re-projects it into the ball of radius
1 - BALL_EPS.
"""
import logging

import numpy as np

from hypnav.errors import GeometryError

logger = logging.getLogger(__name__)

BALL_EPS = 1e-5
MAX_NORM = 1.0 - BALL_EPS


def _as_array(x):
    return np.asarray(x, dtype=np.float64)


def _norm(x):
    return np.linalg.norm(x, axis=-1, keepdims=True)


def _check_same_dim(x, y):
    if x.shape[-1] != y.shape[-1]:
        raise GeometryError("Dimension mismatch: {0} vs {1}".format(
            x.shape[-1], y.shape[-1]))


def project_to_ball(x):
    """
    Rescale points that fall outside the projection shell back onto it
    :param x: real vector or batch of vectors
    :return: points with norm <= 1 - BALL_EPS, inside points unchanged
    """
    x = _as_array(x)
    if np.isnan(x).any():
        raise GeometryError("Cannot project a point with NaN components")
    norm = _norm(x)
    outside = norm > MAX_NORM
    if not outside.any():
        return x
    safe_norm = np.where(outside, norm, 1.0)
    return np.where(outside, x * (MAX_NORM / safe_norm), x)


def mobius_add(x, y):
    """
    Mobius addition x (+) y
    :param x: PoincarePoint(s)
    :param y: PoincarePoint(s), same dimension as x
    :return: PoincarePoint(s)
    """
    x = _as_array(x)
    y = _as_array(y)
    _check_same_dim(x, y)
    xy = np.sum(x * y, axis=-1, keepdims=True)
    x2 = np.sum(x * x, axis=-1, keepdims=True)
    y2 = np.sum(y * y, axis=-1, keepdims=True)
    numerator = (1.0 + 2.0 * xy + y2) * x + (1.0 - x2) * y
    denominator = 1.0 + 2.0 * xy + x2 * y2
    return project_to_ball(numerator / denominator)


def mobius_matvec(matrix, x):
    """
    Mobius matrix-vector product M (x) x

    tanh(|Mx| / |x| * artanh|x|) * Mx / |Mx|, with the origin returned
    whenever x or Mx vanishes.

    :param matrix: real matrix of shape (m, n)
    :param x: PoincarePoint(s) of dimension n
    :return: PoincarePoint(s) of dimension m
    """
    matrix = _as_array(matrix)
    x = _as_array(x)
    if matrix.shape[-1] != x.shape[-1]:
        raise GeometryError("Matrix with {0} columns cannot act on a {1}-dim "
                            "point".format(matrix.shape[-1], x.shape[-1]))
    mx = x @ matrix.T
    x_norm = _norm(x)
    mx_norm = _norm(mx)
    zero = (x_norm == 0) | (mx_norm == 0)
    safe_x_norm = np.where(zero, 1.0, x_norm)
    safe_mx_norm = np.where(zero, 1.0, mx_norm)
    scale = np.tanh(safe_mx_norm / safe_x_norm *
                    np.arctanh(np.minimum(safe_x_norm, MAX_NORM)))
    result = np.where(zero, 0.0, scale * mx / safe_mx_norm)
    return project_to_ball(result)


def exp_map_origin(u):
    """
    Exponential map at the origin, tanh(|u|) u / |u|
    :param u: TangentVector(s)
    :return: PoincarePoint(s); the zero vector maps to the origin
    """
    u = _as_array(u)
    norm = _norm(u)
    zero = norm == 0
    safe_norm = np.where(zero, 1.0, norm)
    result = np.where(zero, 0.0, np.tanh(safe_norm) * u / safe_norm)
    return project_to_ball(result)


def log_map_origin(v):
    """
    Logarithmic map at the origin, artanh(|v|) v / |v|
    :param v: PoincarePoint(s)
    :return: TangentVector(s); the origin maps to the zero vector
    """
    v = _as_array(v)
    norm = _norm(v)
    zero = norm == 0
    safe_norm = np.where(zero, 1.0, norm)
    return np.where(zero, 0.0,
                    np.arctanh(np.minimum(safe_norm, MAX_NORM)) * v / safe_norm)


def poincare_distance(x, y):
    """
    Geodesic distance arcosh(1 + 2|x-y|^2 / ((1-|x|^2)(1-|y|^2)))

    Evaluated as 2 asinh(sqrt(z / 2)), the same function with no loss of
    precision near z = 0.

    :return: float for single points, array of shape (b,) for batches
    """
    x = _as_array(x)
    y = _as_array(y)
    _check_same_dim(x, y)
    diff2 = np.sum((x - y) ** 2, axis=-1)
    x2 = np.sum(x * x, axis=-1)
    y2 = np.sum(y * y, axis=-1)
    z = 2.0 * diff2 / ((1.0 - x2) * (1.0 - y2))
    distance = 2.0 * np.arcsinh(np.sqrt(z / 2.0))
    if np.ndim(distance) == 0:
        return float(distance)
    return distance


def hyperbolic_radius(x):
    """
    Euclidean norm of an embedding, in [0, 1)
    """
    radius = np.linalg.norm(_as_array(x), axis=-1)
    if np.ndim(radius) == 0:
        return float(radius)
    return radius


def conformal_factor(x):
    """
    lambda_x = 2 / (1 - |x|^2), the scale of the ball metric at x
    """
    x = _as_array(x)
    return 2.0 / (1.0 - np.sum(x * x, axis=-1, keepdims=True))


def egrad_to_rgrad(x, grad):
    """
    Convert a Euclidean gradient at x to the Riemannian gradient,
    grad * (1 - |x|^2)^2 / 4
    """
    return _as_array(grad) / conformal_factor(x) ** 2


def exp_map(x, v):
    """
    Exponential map at an arbitrary base point,
    x (+) tanh(lambda_x |v| / 2) v / |v|. Used as the optimizer retraction.
    """
    x = _as_array(x)
    v = _as_array(v)
    _check_same_dim(x, v)
    norm = _norm(v)
    zero = norm == 0
    safe_norm = np.where(zero, 1.0, norm)
    second = np.where(zero, 0.0,
                      np.tanh(conformal_factor(x) * safe_norm / 2.0) *
                      v / safe_norm)
    return mobius_add(x, second)
