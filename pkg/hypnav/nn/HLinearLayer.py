"""
Hyperbolic linear layers on the Poincare ball
"""
import numpy as np

from hypnav.autodiff.Tensor import Parameter, as_tensor
from hypnav.autodiff.hyperbolic import mobius_add, mobius_matvec, hrelu
from hypnav.errors import AutodiffError
from hypnav.nn.MLP import xavier_uniform
from hypnav.nn.Module import Module


class HLinear(Module):
    """
    y = (W (x) x) (+) b with a Euclidean weight and a bias on the ball
    """

    def __init__(self, n_in, n_out, rng):
        self.weight = Parameter(xavier_uniform(rng, n_in, n_out))
        self.bias = Parameter(np.zeros((1, n_out)), manifold=True)

    def forward(self, x):
        return mobius_add(mobius_matvec(self.weight, x), self.bias)


def hlinear_forward(layer, x):
    """
    Apply one HLinear layer to a batch of ball points
    :return: Tensor of shape (B, n_out)
    """
    x = as_tensor(x)
    n_in = layer.weight.shape[0]
    if len(x.shape) != 2 or x.shape[1] != n_in:
        raise AutodiffError("HLinear expects points of width {0}, got shape "
                            "{1}".format(n_in, x.shape))
    return layer(x)


class HMLP(Module):
    """
    Stack of HLinear layers with the hyperbolic ReLU between them

    :param sizes: layer widths including input and output
    :param final_activation: apply hrelu after the last layer too
    """

    def __init__(self, sizes, rng, final_activation=False):
        self.sizes = tuple(sizes)
        self.final_activation = final_activation
        self.layers = [HLinear(n_in, n_out, rng)
                       for n_in, n_out in zip(self.sizes[:-1], self.sizes[1:])]

    def forward(self, x):
        last = len(self.layers) - 1
        for index, layer in enumerate(self.layers):
            x = layer(x)
            if index < last or self.final_activation:
                x = hrelu(x)
        return x
