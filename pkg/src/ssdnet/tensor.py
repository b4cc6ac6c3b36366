# Licensed under a 3-clause BSD style license - see LICENSE.rst
"""
Dense float64 tensors with reverse-mode automatic differentiation.

Primitive operations record themselves on the active `Tape` (if any input
requires a gradient); `backward` walks the tape in reverse and fills the
``grad`` slot of every leaf tensor that contributed to the root.

Broadcasting is restricted to leading batch dimensions: two operands must have
the same shape, or the shape of one must be a suffix of the shape of the other.
"""
import numpy as np
from scipy.special import expit

from .errors import ContractError, DomainError, NumericError, ShapeError

__all__ = [
    "Tensor",
    "Parameter",
    "Tape",
    "forward_primitives",
    "backward",
    "grad_check",
    "primitive_check",
    "add",
    "subtract",
    "multiply",
    "divide",
    "negate",
    "matmul",
    "concat",
    "take",
    "reshape",
    "transpose_last_two",
    "reduce_sum",
    "reduce_mean",
    "exp",
    "log",
    "absolute",
    "softmax",
    "layer_norm",
    "relu",
    "softplus",
    "hard_sigmoid",
    "sigmoid",
    "tanh",
    "embedding",
    "dropout",
]

_PRIMITIVES = {}

TINY = np.finfo(np.float64).tiny

# stack of tapes entered with ``with Tape():``
_ACTIVE_TAPES = []


def primitive(name):
    """Register a differentiable primitive under ``name``."""

    def register(func):
        _PRIMITIVES[name] = func
        return func

    return register


def forward_primitives():
    """Return the names of all differentiable primitives."""
    return frozenset(_PRIMITIVES)


class Tensor:
    """
    Multi-dimensional array of 64-bit floats.

    Parameters
    ----------
    data : array_like
        Values; converted to a float64 `~numpy.ndarray`.
    requires_grad : bool, optional
        Whether operations on this tensor are recorded for differentiation.
    name : str, optional
        Label used in gradient reports.
    """

    # make ``ndarray <op> Tensor`` dispatch to the Tensor operators
    __array_ufunc__ = None

    def __init__(self, data, requires_grad=False, name=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.name = name
        self.grad = None
        self._tape = None
        self._index = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def item(self):
        if self.size != 1:
            raise ContractError(
                "item() needs a single-element tensor, got shape {0}".format(
                    self.shape
                )
            )
        return float(self.data.reshape(()))

    def numpy(self):
        return self.data

    def __repr__(self):
        return "Tensor({0}, requires_grad={1})".format(
            self.data, self.requires_grad
        )

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return subtract(self, other)

    def __rsub__(self, other):
        return subtract(other, self)

    def __mul__(self, other):
        return multiply(self, other)

    def __rmul__(self, other):
        return multiply(other, self)

    def __truediv__(self, other):
        return divide(self, other)

    def __rtruediv__(self, other):
        return divide(other, self)

    def __neg__(self):
        return negate(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)

    def __getitem__(self, index):
        return take(self, index)

    def sum(self, axis=None, keepdims=False):
        return reduce_sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return reduce_mean(self, axis=axis, keepdims=keepdims)

    def exp(self):
        return exp(self)

    def log(self):
        return log(self)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)


class Parameter(Tensor):
    """
    Trainable tensor with a gradient slot of identical shape.

    The ``name`` is the dotted path of the parameter inside its model (e.g.
    ``encoder.layers.0.attention.heads.0.query.weight``); it is assigned when
    the parameter is collected by `~ssdnet.layers.Module.named_parameters`.
    """

    def __init__(self, value, name=None):
        super().__init__(np.array(value, dtype=np.float64), True, name)
        self.grad = np.zeros_like(self.data)

    @property
    def value(self):
        return self.data

    @property
    def gradient(self):
        return self.grad

    def zero_grad(self):
        self.grad = np.zeros_like(self.data)

    def __repr__(self):
        return "Parameter({0!r}, shape={1})".format(self.name, self.shape)


class _Node:
    __slots__ = ("index", "op", "inputs", "output", "forward", "backward")

    def __init__(self, index, op, inputs, output, forward, backward):
        self.index = index
        self.op = op
        self.inputs = inputs
        self.output = output
        self.forward = forward
        self.backward = backward


class Tape:
    """
    Ordered record of primitive applications.

    Use as a context manager; every primitive applied inside the block to a
    tensor that requires a gradient is appended to ``nodes``. Inputs always
    precede the nodes that consume them.

    Examples
    --------
    >>> x = Tensor(3.0, requires_grad=True)
    >>> with Tape() as tape:
    ...     y = x * x
    >>> grads = backward(tape, y)
    >>> float(x.grad)
    6.0
    """

    def __init__(self):
        self.nodes = []

    def __enter__(self):
        _ACTIVE_TAPES.append(self)
        return self

    def __exit__(self, *exc_info):
        _ACTIVE_TAPES.remove(self)
        return False

    def __len__(self):
        return len(self.nodes)

    def record(self, op, inputs, output, forward, backward):
        node = _Node(len(self.nodes), op, inputs, output, forward, backward)
        output._tape = self
        output._index = node.index
        self.nodes.append(node)
        return node

    def replay(self):
        """Re-execute every node from its recorded inputs.

        Returns
        -------
        bool
            True if every recomputed output equals the recorded one
            bit-for-bit.
        """
        for node in self.nodes:
            with np.errstate(all="ignore"):
                data = node.forward(*[t.data for t in node.inputs])
            if not np.array_equal(data, node.output.data):
                return False
        return True

    def backward(self, root):
        return backward(self, root)


def _active_tape():
    return _ACTIVE_TAPES[-1] if _ACTIVE_TAPES else None


def _as_tensor(value):
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def _apply(op, inputs, forward, backward_fn):
    with np.errstate(all="ignore"):
        data = forward(*[t.data for t in inputs])
    if not np.all(np.isfinite(data)):
        raise NumericError("{0} produced non-finite values".format(op))
    out = Tensor(data)
    tape = _active_tape()
    if tape is not None and any(t.requires_grad for t in inputs):
        out.requires_grad = True
        tape.record(op, inputs, out, forward, backward_fn)
    return out


def _check_broadcast(op, shape_a, shape_b):
    if shape_a == shape_b:
        return
    short, full = sorted([tuple(shape_a), tuple(shape_b)], key=len)
    if len(short) < len(full) and full[len(full) - len(short) :] == short:
        return
    raise ShapeError(
        "{0}: incompatible shapes {1} and {2} (only leading batch dimensions "
        "may be expanded)".format(op, shape_a, shape_b)
    )


def _reduce_to(grad, shape):
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    return grad


# Elementwise arithmetic


@primitive("add")
def add(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _check_broadcast("add", a.shape, b.shape)

    def backward_fn(g, y):
        return _reduce_to(g, a.shape), _reduce_to(g, b.shape)

    return _apply("add", (a, b), np.add, backward_fn)


@primitive("subtract")
def subtract(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _check_broadcast("subtract", a.shape, b.shape)

    def backward_fn(g, y):
        return _reduce_to(g, a.shape), -_reduce_to(g, b.shape)

    return _apply("subtract", (a, b), np.subtract, backward_fn)


@primitive("multiply")
def multiply(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _check_broadcast("multiply", a.shape, b.shape)
    x, z = a.data, b.data

    def backward_fn(g, y):
        return _reduce_to(g * z, a.shape), _reduce_to(g * x, b.shape)

    return _apply("multiply", (a, b), np.multiply, backward_fn)


@primitive("divide")
def divide(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _check_broadcast("divide", a.shape, b.shape)
    if np.any(b.data == 0.0):
        raise DomainError("divide: division by zero")
    x, z = a.data, b.data

    def backward_fn(g, y):
        return (
            _reduce_to(g / z, a.shape),
            _reduce_to(-g * x / (z * z), b.shape),
        )

    return _apply("divide", (a, b), np.divide, backward_fn)


@primitive("negate")
def negate(a):
    a = _as_tensor(a)
    return _apply("negate", (a,), np.negative, lambda g, y: (-g,))


# Linear algebra and shape manipulation


@primitive("matmul")
def matmul(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    if a.ndim < 2 or b.ndim < 2:
        raise ShapeError(
            "matmul: operands need at least 2 dimensions, got {0} and "
            "{1}".format(a.shape, b.shape)
        )
    if a.shape[-1] != b.shape[-2]:
        raise ShapeError(
            "matmul: inner dimensions differ in {0} @ {1}".format(
                a.shape, b.shape
            )
        )
    _check_broadcast("matmul", a.shape[:-2], b.shape[:-2])
    x, z = a.data, b.data

    def backward_fn(g, y):
        grad_a = np.matmul(g, np.swapaxes(z, -1, -2))
        grad_b = np.matmul(np.swapaxes(x, -1, -2), g)
        return _reduce_to(grad_a, a.shape), _reduce_to(grad_b, b.shape)

    return _apply("matmul", (a, b), np.matmul, backward_fn)


@primitive("concat")
def concat(tensors, axis=-1):
    tensors = tuple(_as_tensor(t) for t in tensors)
    if not tensors:
        raise ShapeError("concat: nothing to concatenate")
    ndim = tensors[0].ndim
    axis = axis % ndim
    for t in tensors[1:]:
        other = list(t.shape)
        first = list(tensors[0].shape)
        if t.ndim != ndim or other[:axis] + other[axis + 1 :] != (
            first[:axis] + first[axis + 1 :]
        ):
            raise ShapeError(
                "concat: shapes {0} and {1} differ outside axis {2}".format(
                    tensors[0].shape, t.shape, axis
                )
            )
    splits = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def forward(*arrays):
        return np.concatenate(arrays, axis=axis)

    def backward_fn(g, y):
        return tuple(np.split(g, splits, axis=axis))

    return _apply("concat", tensors, forward, backward_fn)


@primitive("slice")
def take(a, index):
    a = _as_tensor(a)

    def forward(x):
        return np.array(x[index])

    def backward_fn(g, y):
        grad = np.zeros_like(a.data)
        np.add.at(grad, index, g)
        return (grad,)

    return _apply("slice", (a,), forward, backward_fn)


@primitive("reshape")
def reshape(a, shape):
    a = _as_tensor(a)
    shape = tuple(shape)
    if int(np.prod(shape)) != a.size:
        raise ShapeError(
            "reshape: cannot reshape {0} into {1}".format(a.shape, shape)
        )

    def forward(x):
        return np.array(x.reshape(shape))

    def backward_fn(g, y):
        return (g.reshape(a.shape),)

    return _apply("reshape", (a,), forward, backward_fn)


@primitive("transpose")
def transpose_last_two(a):
    a = _as_tensor(a)
    if a.ndim < 2:
        raise ShapeError(
            "transpose: need at least 2 dimensions, got {0}".format(a.shape)
        )

    def forward(x):
        return np.array(np.swapaxes(x, -1, -2))

    return _apply(
        "transpose", (a,), forward, lambda g, y: (np.swapaxes(g, -1, -2),)
    )


# Reductions


def _expand_reduced(g, shape, axis, keepdims):
    if axis is not None and not keepdims:
        g = np.expand_dims(g, axis)
    return np.broadcast_to(g, shape)


@primitive("sum")
def reduce_sum(a, axis=None, keepdims=False):
    a = _as_tensor(a)

    def forward(x):
        return np.asarray(np.sum(x, axis=axis, keepdims=keepdims))

    def backward_fn(g, y):
        return (_expand_reduced(g, a.shape, axis, keepdims),)

    return _apply("sum", (a,), forward, backward_fn)


@primitive("mean")
def reduce_mean(a, axis=None, keepdims=False):
    a = _as_tensor(a)
    count = a.size if axis is None else a.shape[axis]

    def forward(x):
        return np.asarray(np.mean(x, axis=axis, keepdims=keepdims))

    def backward_fn(g, y):
        return (_expand_reduced(g / count, a.shape, axis, keepdims),)

    return _apply("mean", (a,), forward, backward_fn)


# Elementwise functions


@primitive("exp")
def exp(a):
    a = _as_tensor(a)
    return _apply("exp", (a,), np.exp, lambda g, y: (g * y,))


@primitive("log")
def log(a):
    a = _as_tensor(a)
    if np.any(a.data <= 0.0):
        raise DomainError("log: argument has non-positive values")
    x = a.data
    return _apply("log", (a,), np.log, lambda g, y: (g / x,))


@primitive("absolute")
def absolute(a):
    a = _as_tensor(a)
    x = a.data
    return _apply("absolute", (a,), np.abs, lambda g, y: (g * np.sign(x),))


@primitive("relu")
def relu(a):
    a = _as_tensor(a)
    x = a.data

    def forward(v):
        return np.maximum(v, 0.0)

    return _apply("relu", (a,), forward, lambda g, y: (g * (x > 0.0),))


@primitive("softplus")
def softplus(a):
    """
    log(1 + exp(x)), computed as max(x, 0) + log1p(exp(-|x|)).

    The result is floored at the smallest normal float, so it stays strictly
    positive where exp(x) underflows.
    """
    a = _as_tensor(a)
    x = a.data

    def forward(v):
        y = np.maximum(v, 0.0) + np.log1p(np.exp(-np.abs(v)))
        return np.maximum(y, TINY)

    return _apply("softplus", (a,), forward, lambda g, y: (g * expit(x),))


@primitive("hard_sigmoid")
def hard_sigmoid(a):
    """
    Piecewise-linear sigmoid: 0 for x <= -3, 1 for x >= 3, x / 6 + 0.5
    otherwise. The derivative is 1/6 strictly inside (-3, 3) and 0 elsewhere,
    including at the kinks.
    """
    a = _as_tensor(a)
    x = a.data

    def forward(v):
        return np.where(v <= -3.0, 0.0, np.where(v >= 3.0, 1.0, v / 6.0 + 0.5))

    def backward_fn(g, y):
        inside = (x > -3.0) & (x < 3.0)
        return (g * np.where(inside, 1.0 / 6.0, 0.0),)

    return _apply("hard_sigmoid", (a,), forward, backward_fn)


@primitive("sigmoid")
def sigmoid(a):
    a = _as_tensor(a)
    return _apply("sigmoid", (a,), expit, lambda g, y: (g * y * (1.0 - y),))


@primitive("tanh")
def tanh(a):
    a = _as_tensor(a)
    return _apply("tanh", (a,), np.tanh, lambda g, y: (g * (1.0 - y * y),))


@primitive("softmax")
def softmax(a, mask=None):
    """
    Softmax over the last axis.

    Parameters
    ----------
    a : `Tensor`
        Scores.
    mask : bool array, optional
        Entries where ``mask`` is False are excluded: their output is exactly
        0 and they receive no gradient. Every row needs at least one allowed
        entry. The mask may omit leading batch dimensions.
    """
    a = _as_tensor(a)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        _check_broadcast("softmax", a.shape, mask.shape)
        if not np.all(mask.any(axis=-1)):
            raise ContractError("softmax: mask excludes every entry of a row")

    def forward(x):
        if mask is not None:
            x = np.where(mask, x, -np.inf)
        e = np.exp(x - np.max(x, axis=-1, keepdims=True))
        return e / np.sum(e, axis=-1, keepdims=True)

    def backward_fn(g, y):
        return (y * (g - np.sum(g * y, axis=-1, keepdims=True)),)

    return _apply("softmax", (a,), forward, backward_fn)


@primitive("layer_norm")
def layer_norm(a, eps=1e-5):
    """Normalize the last axis to zero mean and unit (population) variance."""
    a = _as_tensor(a)
    x = a.data
    inv_std = 1.0 / np.sqrt(np.var(x, axis=-1, keepdims=True) + eps)

    def forward(v):
        mu = np.mean(v, axis=-1, keepdims=True)
        return (v - mu) / np.sqrt(np.var(v, axis=-1, keepdims=True) + eps)

    def backward_fn(g, y):
        g_mean = np.mean(g, axis=-1, keepdims=True)
        gy_mean = np.mean(g * y, axis=-1, keepdims=True)
        return (inv_std * (g - g_mean - y * gy_mean),)

    return _apply("layer_norm", (a,), forward, backward_fn)


# Lookup and regularization


@primitive("embedding")
def embedding(weight, indices):
    """Gather rows of ``weight`` (shape ``(n, d)``) at integer ``indices``."""
    weight = _as_tensor(weight)
    indices = np.asarray(indices)
    if weight.ndim != 2:
        raise ShapeError(
            "embedding: weight must be 2-d, got {0}".format(weight.shape)
        )
    if not np.issubdtype(indices.dtype, np.integer):
        raise ContractError("embedding: indices must be integers")
    if indices.size and (indices.min() < 0 or indices.max() >= weight.shape[0]):
        raise ContractError(
            "embedding: index out of range for {0} rows".format(weight.shape[0])
        )

    def forward(w):
        return w[indices]

    def backward_fn(g, y):
        grad = np.zeros_like(weight.data)
        np.add.at(grad, indices, g)
        return (grad,)

    return _apply("embedding", (weight,), forward, backward_fn)


@primitive("dropout")
def dropout(a, rate, rng, training=True):
    """
    Inverted dropout: in training, zero entries with probability ``rate`` and
    scale the rest by ``1 / (1 - rate)``; outside training, identity.
    """
    a = _as_tensor(a)
    if not training or rate == 0.0:
        return a
    if not 0.0 <= rate < 1.0:
        raise ContractError("dropout: rate should be in the range [0:1)")
    mask = (rng.random(a.shape) >= rate) / (1.0 - rate)

    def forward(x):
        return x * mask

    return _apply("dropout", (a,), forward, lambda g, y: (g * mask,))


# Differentiation


def backward(tape, root):
    """
    Reverse-mode sweep over ``tape`` from the scalar ``root``.

    The ``grad`` slot of every leaf tensor (tensors not produced on the tape,
    such as parameters) that contributed to ``root`` is overwritten with
    d(root)/d(leaf).

    Returns
    -------
    grads : dict
        Parameter name to gradient array, for every contributing
        `Parameter`.
    """
    if not isinstance(root, Tensor) or root.size != 1:
        raise ContractError("backward: root must be a scalar tensor")
    if root._tape is not tape:
        raise ContractError("backward: root was not produced on this tape")

    grads = {id(root): np.ones_like(root.data)}
    leaves = {}
    for node in reversed(tape.nodes[: root._index + 1]):
        g = grads.pop(id(node.output), None)
        if g is None:
            continue
        for tensor, grad in zip(
            node.inputs, node.backward(g, node.output.data)
        ):
            if grad is None or not tensor.requires_grad:
                continue
            key = id(tensor)
            if key in grads:
                grads[key] = grads[key] + grad
            else:
                grads[key] = grad
            if tensor._tape is not tape:
                leaves[key] = tensor

    named = {}
    for key, tensor in leaves.items():
        tensor.grad = np.array(grads[key], dtype=np.float64)
        if isinstance(tensor, Parameter):
            named[tensor.name] = tensor.grad
    return named


def _scalar_value(root):
    if not isinstance(root, Tensor) or root.size != 1:
        raise ContractError("grad_check: program must return a scalar tensor")
    return root.item()


def grad_check(fn, inputs, eps=1e-5):
    """
    Compare analytic gradients with central finite differences.

    Parameters
    ----------
    fn : callable
        Deterministic tensor program taking one `Tensor` per input and
        returning a scalar `Tensor`. Dropout must be disabled (or driven by a
        generator re-seeded on every call).
    inputs : list of array_like or `Tensor`
        Arrays are wrapped in new tensors; tensors (e.g. model parameters) are
        perturbed in place and restored.
    eps : float, optional
        Finite-difference step.

    Returns
    -------
    max_error : float
        Maximum over all input entries of
        ``|analytic - numeric| / max(|analytic|, |numeric|, 1e-8)``.
    """
    tensors = []
    for value in inputs:
        if isinstance(value, Tensor):
            value.requires_grad = True
            tensors.append(value)
        else:
            tensors.append(Tensor(np.array(value, dtype=np.float64), True))

    for t in tensors:
        t.grad = None
    with Tape() as tape:
        root = fn(*tensors)
    _scalar_value(root)
    backward(tape, root)

    worst = 0.0
    for t in tensors:
        analytic = t.grad if t.grad is not None else np.zeros_like(t.data)
        for idx in np.ndindex(t.shape):
            original = t.data[idx]
            t.data[idx] = original + eps
            f_plus = _scalar_value(fn(*tensors))
            t.data[idx] = original - eps
            f_minus = _scalar_value(fn(*tensors))
            t.data[idx] = original
            numeric = (f_plus - f_minus) / (2.0 * eps)
            scale = max(abs(analytic[idx]), abs(numeric), 1e-8)
            worst = max(worst, abs(analytic[idx] - numeric) / scale)
    return worst


def _check_program(name, rng):
    a = rng.standard_normal((2, 3))
    b = rng.standard_normal((2, 3))
    w = rng.standard_normal((2, 3))
    away_from_zero = np.sign(a) * (np.abs(a) + 0.1)
    kinked = rng.uniform(-5.0, 5.0, (2, 3))
    kinked[np.abs(np.abs(kinked) - 3.0) < 1e-3] += 0.01

    def weighted(t, weights=w):
        return reduce_sum(multiply(t, weights))

    programs = {
        "add": (lambda x, y: weighted(add(x, y)), [a, b]),
        "subtract": (lambda x, y: weighted(subtract(x, y)), [a, b]),
        "multiply": (lambda x, y: weighted(multiply(x, y)), [a, b]),
        "divide": (
            lambda x, y: weighted(divide(x, y)),
            [a, np.abs(b) + 0.5],
        ),
        "negate": (lambda x: weighted(negate(x)), [a]),
        "matmul": (
            lambda x, y: weighted(matmul(x, y), w[:, :2]),
            [a, rng.standard_normal((3, 2))],
        ),
        "concat": (
            lambda x, y: weighted(concat([x, y]), np.hstack([w, w[:, ::-1]])),
            [a, b],
        ),
        "slice": (lambda x: weighted(take(x, np.s_[:, 1:]), w[:, 1:]), [a]),
        "reshape": (
            lambda x: weighted(reshape(x, (3, 2)), w.reshape(3, 2)),
            [a],
        ),
        "transpose": (lambda x: weighted(transpose_last_two(x), w.T), [a]),
        "sum": (lambda x: weighted(reduce_sum(x, axis=-1), w[:, 0]), [a]),
        "mean": (lambda x: weighted(reduce_mean(x, axis=0), w[0]), [a]),
        "exp": (lambda x: weighted(exp(x)), [a]),
        "log": (lambda x: weighted(log(x)), [np.abs(a) + 0.5]),
        "absolute": (lambda x: weighted(absolute(x)), [away_from_zero]),
        "relu": (lambda x: weighted(relu(x)), [away_from_zero]),
        "softplus": (lambda x: weighted(softplus(x)), [a]),
        "hard_sigmoid": (lambda x: weighted(hard_sigmoid(x)), [kinked]),
        "sigmoid": (lambda x: weighted(sigmoid(x)), [a]),
        "tanh": (lambda x: weighted(tanh(x)), [a]),
        "softmax": (lambda x: weighted(softmax(x)), [a]),
        "layer_norm": (lambda x: weighted(layer_norm(x)), [a]),
        "embedding": (
            lambda table: weighted(embedding(table, np.array([0, 2]))),
            [rng.standard_normal((4, 3))],
        ),
        "dropout": (
            lambda x: weighted(
                dropout(x, 0.5, np.random.default_rng(0), training=True)
            ),
            [a],
        ),
    }
    return programs[name]


def primitive_check(name, seed=0, eps=1e-5):
    """
    Finite-difference check of a single primitive on seeded random 2x3
    inputs.

    Returns
    -------
    max_error : float
        See `grad_check`.
    """
    if name not in _PRIMITIVES:
        raise ContractError(
            "unknown primitive {0!r}; available: {1}".format(
                name, ", ".join(sorted(_PRIMITIVES))
            )
        )
    fn, inputs = _check_program(name, np.random.default_rng(seed))
    return grad_check(fn, inputs, eps=eps)
