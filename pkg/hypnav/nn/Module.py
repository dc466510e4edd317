import logging

import numpy as np

from hypnav.autodiff.Tensor import Parameter
from hypnav.errors import CheckpointError

logger = logging.getLogger(__name__)


class Module(object):
    """
    Base class for anything holding Parameters

    Parameters and sub-modules are discovered from instance attributes,
    including lists of modules, and named by their dotted attribute path.
    """

    def named_parameters(self, prefix=''):
        for key, value in vars(self).items():
            path = prefix + key
            if isinstance(value, Parameter):
                yield path, value
            elif isinstance(value, Module):
                yield from value.named_parameters(path + '.')
            elif isinstance(value, (list, tuple)):
                for index, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(
                            "{0}.{1}.".format(path, index))

    def parameters(self):
        return [param for _, param in self.named_parameters()]

    def parameter_count(self):
        return int(sum(param.data.size for param in self.parameters()))

    def zero_grad(self):
        for param in self.parameters():
            param.zero_grad()

    def state_dict(self):
        return {name: param.data.copy()
                for name, param in self.named_parameters()}

    def load_state_dict(self, state):
        own = dict(self.named_parameters())
        missing = set(own) - set(state)
        unexpected = set(state) - set(own)
        if missing or unexpected:
            raise CheckpointError("Parameter mismatch, missing {0}, unexpected "
                                  "{1}".format(sorted(missing), sorted(unexpected)))
        for name, param in own.items():
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != param.data.shape:
                raise CheckpointError("Shape mismatch for {0}: stored {1}, "
                                      "expected {2}".format(name, value.shape,
                                                            param.data.shape))
            param.data = value.copy()
        logger.debug("Loaded %d parameter tensors", len(own))

    def copy_from(self, other):
        self.load_state_dict(other.state_dict())

    def forward(self, *args, **kwargs):
        raise NotImplementedError

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)
