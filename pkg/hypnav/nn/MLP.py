import numpy as np

from hypnav.autodiff.Tensor import Parameter, as_tensor
from hypnav.nn.Module import Module


def xavier_uniform(rng, n_in, n_out):
    bound = np.sqrt(6.0 / (n_in + n_out))
    return rng.uniform(-bound, bound, size=(n_in, n_out))


class Linear(Module):
    def __init__(self, n_in, n_out, rng):
        self.weight = Parameter(xavier_uniform(rng, n_in, n_out))
        self.bias = Parameter(np.zeros((1, n_out)))

    def forward(self, x):
        return x @ self.weight + self.bias


class MLP(Module):
    """
    Euclidean multilayer perceptron with ReLU between layers

    :param sizes: layer widths including input and output, e.g. (9, 150, 32)
    :param final_activation: apply ReLU after the last layer too
    """

    def __init__(self, sizes, rng, final_activation=False):
        self.sizes = tuple(sizes)
        self.final_activation = final_activation
        self.layers = [Linear(n_in, n_out, rng)
                       for n_in, n_out in zip(self.sizes[:-1], self.sizes[1:])]

    def forward(self, x):
        return linear_relu_mlp(x, [(layer.weight, layer.bias) for layer in self.layers],
                               self.final_activation)


def linear_relu_mlp(x, layers, final_activation=True):
    """
    Functional affine + ReLU stack

    :param x: Tensor of shape (batch, n_in)
    :param layers: list of (weight, bias) pairs, weight shaped (n_in, n_out)
    :param final_activation: apply ReLU after the last pair
    """
    x = as_tensor(x)
    last = len(layers) - 1
    for index, (weight, bias) in enumerate(layers):
        x = x @ weight + bias
        if index < last or final_activation:
            x = x.relu()
    return x
