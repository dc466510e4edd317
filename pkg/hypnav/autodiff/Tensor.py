"""
Define-by-run reverse-mode automatic differentiation over numpy arrays

Every operation on a Tensor that requires a gradient records the Function
that produced it. Tensor.backward() walks that tape in reverse topological
order, visiting each node exactly once and accumulating gradients additively
into the leaves. The tape is rebuilt on every forward pass.

Tensors are float64 and at most rank 2. Broadcasting follows numpy rules
and gradients are summed back onto the broadcast operand.
"""
import logging
import threading

import numpy as np

from hypnav.errors import AutodiffError

logger = logging.getLogger(__name__)

_grad_mode = threading.local()


def is_grad_enabled():
    return getattr(_grad_mode, 'enabled', True)


class no_grad(object):
    """
    Context manager that stops recording the tape on the current thread
    """

    def __enter__(self):
        self.previous = is_grad_enabled()
        _grad_mode.enabled = False
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        _grad_mode.enabled = self.previous
        return False


def as_tensor(value):
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def _unbroadcast(grad, shape):
    """
    Sum a gradient back down to the shape of the operand it belongs to
    """
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


class Tensor(object):
    """
    Dense float64 array that participates in the gradient tape

    :param data: array-like of rank <= 2
    :param requires_grad: leaves with requires_grad collect gradients in .grad
    :param name: optional parameter path, used in diagnostics
    """
    __array_ufunc__ = None

    def __init__(self, data, requires_grad=False, name=None):
        self.data = np.array(data, dtype=np.float64)
        if self.data.ndim > 2:
            raise AutodiffError("Tensors are limited to rank 2, got shape "
                                "{0}".format(self.data.shape))
        self.requires_grad = requires_grad
        self.grad = np.zeros_like(self.data) if requires_grad else None
        self.name = name
        self._ctx = None

    def __repr__(self):
        return "Tensor({0}, requires_grad={1})".format(self.data,
                                                       self.requires_grad)

    @property
    def shape(self):
        return self.data.shape

    @property
    def is_leaf(self):
        return self._ctx is None

    def numpy(self):
        return self.data

    def item(self):
        return float(self.data.reshape(-1)[0])

    def detach(self):
        return Tensor(self.data)

    def zero_grad(self):
        if self.requires_grad:
            self.grad = np.zeros_like(self.data)

    # arithmetic
    def __add__(self, other):
        return Add.apply(self, other)

    def __radd__(self, other):
        return Add.apply(other, self)

    def __sub__(self, other):
        return Sub.apply(self, other)

    def __rsub__(self, other):
        return Sub.apply(other, self)

    def __mul__(self, other):
        return Mul.apply(self, other)

    def __rmul__(self, other):
        return Mul.apply(other, self)

    def __truediv__(self, other):
        return Div.apply(self, other)

    def __rtruediv__(self, other):
        return Div.apply(other, self)

    def __neg__(self):
        return Neg.apply(self)

    def __matmul__(self, other):
        return MatMul.apply(self, other)

    def __pow__(self, exponent):
        return Pow.apply(self, exponent=float(exponent))

    def sum(self, axis=None, keepdims=False):
        return Sum.apply(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        count = self.data.size if axis is None else self.data.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) / float(count)

    def relu(self):
        return ReLU.apply(self)

    def tanh(self):
        return Tanh.apply(self)

    def exp(self):
        return Exp.apply(self)

    def log(self):
        return Log.apply(self)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return Reshape.apply(self, shape=shape)

    def take_rows(self, index):
        return TakeRows.apply(self, index=np.asarray(index, dtype=np.int64))

    def backward(self):
        """
        Accumulate d(self)/d(leaf) into every leaf that requires a gradient
        """
        if self.data.size != 1:
            raise AutodiffError("backward() needs a scalar loss, got shape "
                                "{0}".format(self.data.shape))
        if not self.requires_grad:
            return
        order = self._topological_order()
        grads = {id(self): np.ones_like(self.data)}
        for node in reversed(order):
            grad = grads.pop(id(node), None)
            if grad is None:
                continue
            if node._ctx is None:
                node.grad = grad.copy() if node.grad is None else node.grad + grad
                continue
            parent_grads = node._ctx.backward(grad)
            for parent, parent_grad in zip(node._ctx.parents, parent_grads):
                if parent_grad is None or not parent.requires_grad:
                    continue
                parent_grad = _unbroadcast(np.asarray(parent_grad, dtype=np.float64),
                                           parent.data.shape)
                key = id(parent)
                if key in grads:
                    grads[key] = grads[key] + parent_grad
                else:
                    grads[key] = parent_grad
        return

    def _topological_order(self):
        order = []
        visited = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            if node._ctx is not None:
                for parent in node._ctx.parents:
                    if parent.requires_grad and id(parent) not in visited:
                        stack.append((parent, False))
        return order


class Parameter(Tensor):
    """
    Trainable leaf tensor

    :param manifold: True for parameters that live on the Poincare ball
    """

    def __init__(self, data, name=None, manifold=False):
        super().__init__(data, requires_grad=True, name=name)
        self.manifold = manifold


class Function(object):
    """
    One recorded operation; subclasses implement forward on arrays and
    backward returning one gradient (or None) per parent
    """

    def __init__(self, *parents):
        self.parents = parents

    @classmethod
    def apply(cls, *inputs, **kwargs):
        parents = tuple(as_tensor(value) for value in inputs)
        fn = cls(*parents)
        out = Tensor(fn.forward(*[p.data for p in parents], **kwargs))
        if is_grad_enabled() and any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._ctx = fn
        return out

    def forward(self, *args, **kwargs):
        raise NotImplementedError

    def backward(self, grad):
        raise NotImplementedError


class Add(Function):
    def forward(self, x, y):
        return x + y

    def backward(self, grad):
        return grad, grad


class Sub(Function):
    def forward(self, x, y):
        return x - y

    def backward(self, grad):
        return grad, -grad


class Mul(Function):
    def forward(self, x, y):
        self.x, self.y = x, y
        return x * y

    def backward(self, grad):
        return grad * self.y, grad * self.x


class Div(Function):
    def forward(self, x, y):
        self.x, self.y = x, y
        return x / y

    def backward(self, grad):
        return grad / self.y, -grad * self.x / (self.y * self.y)


class Neg(Function):
    def forward(self, x):
        return -x

    def backward(self, grad):
        return (-grad,)


class Pow(Function):
    def forward(self, x, exponent):
        self.x, self.exponent = x, exponent
        return x ** exponent

    def backward(self, grad):
        return (grad * self.exponent * self.x ** (self.exponent - 1.0),)


class MatMul(Function):
    def forward(self, x, y):
        if x.ndim != 2 or y.ndim != 2 or x.shape[1] != y.shape[0]:
            raise AutodiffError("Cannot multiply shapes {0} and {1}".format(
                x.shape, y.shape))
        self.x, self.y = x, y
        return x @ y

    def backward(self, grad):
        return grad @ self.y.T, self.x.T @ grad


class Sum(Function):
    def forward(self, x, axis=None, keepdims=False):
        self.shape, self.axis, self.keepdims = x.shape, axis, keepdims
        return np.sum(x, axis=axis, keepdims=keepdims)

    def backward(self, grad):
        if self.axis is not None and not self.keepdims:
            grad = np.expand_dims(grad, self.axis)
        return (np.broadcast_to(grad, self.shape),)


class ReLU(Function):
    def forward(self, x):
        self.mask = x > 0
        return np.where(self.mask, x, 0.0)

    def backward(self, grad):
        return (grad * self.mask,)


class LeakyReLU(Function):
    def forward(self, x, negative_slope=0.2):
        self.slope = np.where(x > 0, 1.0, negative_slope)
        return x * self.slope

    def backward(self, grad):
        return (grad * self.slope,)


class Tanh(Function):
    def forward(self, x):
        self.y = np.tanh(x)
        return self.y

    def backward(self, grad):
        return (grad * (1.0 - self.y * self.y),)


class Exp(Function):
    def forward(self, x):
        self.y = np.exp(x)
        return self.y

    def backward(self, grad):
        return (grad * self.y,)


class Log(Function):
    def forward(self, x):
        self.x = x
        return np.log(x)

    def backward(self, grad):
        return (grad / self.x,)


class Reshape(Function):
    def forward(self, x, shape):
        self.original = x.shape
        return x.reshape(shape)

    def backward(self, grad):
        return (grad.reshape(self.original),)


class TakeRows(Function):
    def forward(self, x, index):
        self.shape, self.index = x.shape, index
        return x[index]

    def backward(self, grad):
        full = np.zeros(self.shape)
        np.add.at(full, self.index, grad)
        return (full,)


class Concat(Function):
    def forward(self, *arrays, axis=0):
        self.axis = axis
        self.sizes = [a.shape[axis] for a in arrays]
        return np.concatenate(arrays, axis=axis)

    def backward(self, grad):
        splits = np.cumsum(self.sizes)[:-1]
        return tuple(np.split(grad, splits, axis=self.axis))


class GatherColumns(Function):
    """
    Pick one column per row, x[i, index[i]], as a column vector
    """

    def forward(self, x, index):
        self.shape, self.index = x.shape, index
        self.rows = np.arange(x.shape[0])
        return x[self.rows, index].reshape(-1, 1)

    def backward(self, grad):
        full = np.zeros(self.shape)
        full[self.rows, self.index] = grad.reshape(-1)
        return (full,)


class SoftmaxRows(Function):
    def forward(self, x, mask=None):
        if mask is not None:
            x = np.where(mask, x, -np.inf)
        shifted = x - np.max(x, axis=1, keepdims=True)
        e = np.exp(shifted)
        self.y = e / np.sum(e, axis=1, keepdims=True)
        return self.y

    def backward(self, grad):
        inner = np.sum(grad * self.y, axis=1, keepdims=True)
        return (self.y * (grad - inner),)


class LogSoftmaxRows(Function):
    def forward(self, x):
        shifted = x - np.max(x, axis=1, keepdims=True)
        log_norm = np.log(np.sum(np.exp(shifted), axis=1, keepdims=True))
        out = shifted - log_norm
        self.softmax = np.exp(out)
        return out

    def backward(self, grad):
        return (grad - self.softmax * np.sum(grad, axis=1, keepdims=True),)


class Huber(Function):
    def forward(self, x, delta=1.0):
        self.x, self.delta = x, delta
        small = np.abs(x) <= delta
        return np.where(small, 0.5 * x * x, delta * (np.abs(x) - 0.5 * delta))

    def backward(self, grad):
        return (grad * np.clip(self.x, -self.delta, self.delta),)


class RowNorm(Function):
    """
    Euclidean norm of each row as a column vector; zero rows get a zero
    subgradient
    """

    def forward(self, x):
        self.x = x
        self.norm = np.linalg.norm(x, axis=1, keepdims=True)
        return self.norm

    def backward(self, grad):
        safe = np.where(self.norm == 0, 1.0, self.norm)
        return (np.where(self.norm == 0, 0.0, grad * self.x / safe),)


class BlockAggregate(Function):
    """
    Batched attention read-out over graphs of equal size

    alpha has shape (B*n, n) with row (b, i) holding node i's weights over
    the n nodes of graph b; values has shape (B*n, d). Row (b, i) of the
    result is sum_j alpha[(b, i), j] * values[(b, j)].
    """

    def forward(self, alpha, values, n_nodes=1):
        batch = alpha.shape[0] // n_nodes
        self.a = alpha.reshape(batch, n_nodes, n_nodes)
        self.v = values.reshape(batch, n_nodes, values.shape[1])
        return np.matmul(self.a, self.v).reshape(batch * n_nodes, -1)

    def backward(self, grad):
        g = grad.reshape(self.v.shape)
        grad_a = np.matmul(g, np.transpose(self.v, (0, 2, 1)))
        grad_v = np.matmul(np.transpose(self.a, (0, 2, 1)), g)
        return (grad_a.reshape(-1, self.a.shape[2]),
                grad_v.reshape(-1, self.v.shape[2]))


def concat(tensors, axis=0):
    return Concat.apply(*tensors, axis=axis)


def leaky_relu(x, negative_slope=0.2):
    return LeakyReLU.apply(x, negative_slope=negative_slope)


def softmax_rows(x, mask=None):
    return SoftmaxRows.apply(x, mask=mask)


def log_softmax_rows(x):
    return LogSoftmaxRows.apply(x)


def gather_columns(x, index):
    return GatherColumns.apply(x, index=np.asarray(index, dtype=np.int64))


def huber(x, delta=1.0):
    return Huber.apply(x, delta=delta)


def row_norm(x):
    return RowNorm.apply(x)


def block_aggregate(alpha, values, n_nodes):
    return BlockAggregate.apply(alpha, values, n_nodes=n_nodes)
