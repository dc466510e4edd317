"""
Differentiable Poincare ball operations on row batches of Tensors

These mirror hypnav.geometry.poincare but record on the gradient tape. The
ratios tanh(n)/n and artanh(n)/n are primitives with their limits and
derivatives defined at n = 0, so the maps stay exact and differentiable at
the origin without epsilon padding.
"""
import numpy as np

from hypnav.autodiff.Tensor import Function, row_norm, as_tensor
from hypnav.geometry.poincare import MAX_NORM

_SERIES_CUTOFF = 1e-4


class TanhRatio(Function):
    def forward(self, n):
        small = n < _SERIES_CUTOFF
        safe = np.where(small, 1.0, n)
        t = np.tanh(safe)
        n2 = n * n
        self.derivative = np.where(small, -2.0 * n / 3.0 + 8.0 * n * n2 / 15.0,
                                   (safe * (1.0 - t * t) - t) / (safe * safe))
        return np.where(small, 1.0 - n2 / 3.0 + 2.0 * n2 * n2 / 15.0, t / safe)

    def backward(self, grad):
        return (grad * self.derivative,)


class ArtanhRatio(Function):
    def forward(self, n):
        clamped = n > MAX_NORM
        n = np.minimum(n, MAX_NORM)
        small = n < _SERIES_CUTOFF
        safe = np.where(small, 0.5, n)
        a = np.arctanh(safe)
        n2 = n * n
        self.derivative = np.where(small, 2.0 * n / 3.0 + 4.0 * n * n2 / 5.0,
                                   (safe / (1.0 - safe * safe) - a) / (safe * safe))
        self.derivative = np.where(clamped, 0.0, self.derivative)
        return np.where(small, 1.0 + n2 / 3.0 + n2 * n2 / 5.0, a / safe)

    def backward(self, grad):
        return (grad * self.derivative,)


class Acosh1p(Function):
    """
    arcosh(1 + z) for z >= 0, with a zero subgradient at z = 0
    """

    def forward(self, z):
        z = np.maximum(z, 0.0)
        root = np.sqrt(z * (z + 2.0))
        self.derivative = np.where(root > 0, 1.0 / np.where(root > 0, root, 1.0), 0.0)
        return 2.0 * np.arcsinh(np.sqrt(z / 2.0))

    def backward(self, grad):
        return (grad * self.derivative,)


class Acosh1pSquared(Function):
    """
    arcosh(1 + z)^2, smooth at z = 0 where its derivative is 2
    """

    def forward(self, z):
        z = np.maximum(z, 0.0)
        d = 2.0 * np.arcsinh(np.sqrt(z / 2.0))
        small = z < 1e-8
        root = np.sqrt(z * (z + 2.0))
        safe_root = np.where(small, 1.0, root)
        self.derivative = np.where(small, 2.0 - 2.0 * z / 3.0, 2.0 * d / safe_root)
        return d * d

    def backward(self, grad):
        return (grad * self.derivative,)


class ProjectRows(Function):
    """
    Rescale rows with norm above MAX_NORM onto the projection shell
    """

    def forward(self, x):
        self.x = x
        self.norm = np.linalg.norm(x, axis=1, keepdims=True)
        self.outside = self.norm > MAX_NORM
        safe = np.where(self.outside, self.norm, 1.0)
        self.scale = np.where(self.outside, MAX_NORM / safe, 1.0)
        return x * self.scale

    def backward(self, grad):
        safe = np.where(self.outside, self.norm, 1.0)
        unit = self.x / safe
        radial = np.sum(grad * unit, axis=1, keepdims=True)
        projected = self.scale * (grad - unit * radial)
        return (np.where(self.outside, projected, grad),)


def project_to_ball(x):
    return ProjectRows.apply(x)


def exp_map_origin(u):
    return project_to_ball(TanhRatio.apply(row_norm(u)) * u)


def log_map_origin(x):
    return ArtanhRatio.apply(row_norm(x)) * x


def mobius_add(x, y):
    x, y = as_tensor(x), as_tensor(y)
    xy = (x * y).sum(axis=1, keepdims=True)
    x2 = (x * x).sum(axis=1, keepdims=True)
    y2 = (y * y).sum(axis=1, keepdims=True)
    numerator = (1.0 + 2.0 * xy + y2) * x + (1.0 - x2) * y
    denominator = 1.0 + 2.0 * xy + x2 * y2
    return project_to_ball(numerator / denominator)


def mobius_matvec(weight, x):
    """
    Row-batch Mobius product; weight has shape (n_in, n_out), so each row
    x_i maps to weight^T (x) x_i. Equal to exp_O(log_O(x) @ weight).
    """
    return exp_map_origin(log_map_origin(x) @ weight)


def hrelu(x):
    return exp_map_origin(log_map_origin(x).relu())


def poincare_distance(x, y, squared=False):
    """
    Row-wise geodesic distance as a column vector
    """
    x, y = as_tensor(x), as_tensor(y)
    diff = x - y
    diff2 = (diff * diff).sum(axis=1, keepdims=True)
    x2 = (x * x).sum(axis=1, keepdims=True)
    y2 = (y * y).sum(axis=1, keepdims=True)
    z = 2.0 * diff2 / ((1.0 - x2) * (1.0 - y2))
    if squared:
        return Acosh1pSquared.apply(z)
    return Acosh1p.apply(z)
