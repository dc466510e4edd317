import logging

import numpy as np

from hypnav.errors import OptimizerError
from hypnav.geometry import poincare

logger = logging.getLogger(__name__)


def riemannian_adam_step(name, param, moments, step_count, lr, betas=(0.9, 0.999), eps=1e-8):
    """
    Update one parameter in place from its accumulated gradient

    :param moments: (first, second) moment arrays, updated in place
    :param step_count: 1-based step used for bias correction
    """
    grad = param.grad
    if not np.all(np.isfinite(grad)):
        raise OptimizerError("Non-finite gradient for parameter {0}".format(name))
    beta1, beta2 = betas
    if param.manifold:
        grad = poincare.egrad_to_rgrad(param.data, grad)
    m, v = moments
    m *= beta1
    m += (1.0 - beta1) * grad
    v *= beta2
    v += (1.0 - beta2) * grad * grad
    m_hat = m / (1.0 - beta1 ** step_count)
    v_hat = v / (1.0 - beta2 ** step_count)
    update = -lr * m_hat / (np.sqrt(v_hat) + eps)
    if param.manifold:
        param.data = poincare.project_to_ball(poincare.exp_map(param.data, update))
        if __debug__:
            norms = np.linalg.norm(param.data, axis=-1)
            assert np.all(norms <= poincare.MAX_NORM + 1e-12), name
    else:
        param.data = param.data + update


class RiemannianAdam(object):
    """
    Adam over a mix of Euclidean and Poincare ball parameters

    Euclidean parameters get the standard update. Parameters flagged
    manifold=True have their gradient rescaled by (1 - |b|^2)^2 / 4, keep
    their moments in the tangent space and move by the exponential map at
    the current point, then are re-projected into the ball. Moments are not
    transported between tangent spaces.

    :param named_parameters: iterable of (path, Parameter)
    :param lr: learning rate
    """

    def __init__(self, named_parameters, lr=1e-3, betas=(0.9, 0.999), eps=1e-8):
        self.params = list(named_parameters)
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.step_count = 0
        self.first_moment = {name: np.zeros_like(p.data) for name, p in self.params}
        self.second_moment = {name: np.zeros_like(p.data) for name, p in self.params}

    def zero_grad(self):
        for _, param in self.params:
            param.zero_grad()

    def step(self):
        self.step_count += 1
        for name, param in self.params:
            if param.grad is None:
                continue
            riemannian_adam_step(name, param, (self.first_moment[name], self.second_moment[name]),
                                 self.step_count, self.lr, (self.beta1, self.beta2), self.eps)
        logger.debug("Optimizer step %d", self.step_count)
