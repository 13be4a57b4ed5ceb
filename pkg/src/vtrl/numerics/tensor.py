"""Dense tensors with reverse-mode gradient evaluation.

A ``Tensor`` wraps a numpy array and remembers the operation that produced
it.  The chain of these records is the per-forward-pass tape: building a
loss builds the tape, ``grad_eval`` walks it once in reverse topological
order, and dropping the loss reference discards it.  Leaf tensors created
from a ``Parameter`` deposit their gradient into ``Parameter.grad``
(accumulating, so repeated ``grad_eval`` calls double the grads unless
``zero_grads`` intervenes).

Precision: the module default dtype is float64, which test and grad-check
code relies on.  Training loops switch to float32 via ``using_dtype`` for
speed; checkpoints always store float32.
"""

from __future__ import annotations

import contextlib

import numpy as np

from vtrl.errors import ContractError, DimensionError, NumericsError

_default_dtype = np.float64


def default_dtype():
    return _default_dtype


def set_default_dtype(dtype) -> None:
    global _default_dtype
    dtype = np.dtype(dtype)
    if dtype not in (np.dtype(np.float32), np.dtype(np.float64)):
        raise ContractError(f"unsupported dtype {dtype}; use float32 or float64")
    _default_dtype = dtype.type


@contextlib.contextmanager
def using_dtype(dtype):
    """Temporarily switch the default dtype (e.g. float32 for training)."""
    prev = _default_dtype
    set_default_dtype(dtype)
    try:
        yield
    finally:
        set_default_dtype(prev)


def _checked(data: np.ndarray, op: str) -> np.ndarray:
    if not np.all(np.isfinite(data)):
        raise NumericsError(f"non-finite values produced by {op}")
    return data


# non-finite results raise NumericsError, so numpy's own warnings are noise
def _quiet():
    return np.errstate(divide="ignore", invalid="ignore", over="ignore")


class Tensor:
    """A node on the tape: numpy data plus the backward rule that made it."""

    __slots__ = ("data", "parents", "backward_rule", "param")

    def __init__(self, data, parents=(), backward_rule=None, param=None):
        self.data = np.asarray(data, dtype=_default_dtype) if not isinstance(data, np.ndarray) else data
        self.parents = parents
        self.backward_rule = backward_rule
        self.param = param

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    def item(self) -> float:
        return float(self.data)

    def detach(self) -> "Tensor":
        """Constant copy of this value; gradients never flow past it."""
        return Tensor(self.data)

    def reshape(self, *shape) -> "Tensor":
        return reshape(self, shape if len(shape) > 1 else shape[0])

    def sum(self, axis=None, keepdims=False) -> "Tensor":
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False) -> "Tensor":
        return tmean(self, axis=axis, keepdims=keepdims)

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype})"


class Parameter:
    """Trainable value with a same-shaped gradient slot and a unique name."""

    __slots__ = ("value", "grad", "name")

    def __init__(self, value, name: str):
        self.value = np.array(value, dtype=_default_dtype)
        self.grad = np.zeros_like(self.value)
        self.name = name

    @property
    def shape(self):
        return self.value.shape

    def leaf(self) -> Tensor:
        """Fresh leaf node reading the current value; grads flow back here."""
        return Tensor(self.value, param=self)

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.value)

    def __repr__(self):
        return f"Parameter({self.name}, shape={self.value.shape})"


def zero_grads(params) -> None:
    for p in params:
        p.zero_grad()


def as_tensor(x) -> Tensor:
    if isinstance(x, Tensor):
        return x
    return Tensor(np.asarray(x, dtype=_default_dtype))


def constant(x) -> Tensor:
    return Tensor(np.asarray(x, dtype=_default_dtype))


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    """Sum a broadcasted gradient back down to the operand's shape."""
    if grad.shape == tuple(shape):
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


# ---------------------------------------------------------------------------
# elementwise ops

def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = _checked(a.data + b.data, "add")

    def rule(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return Tensor(out, (a, b), rule)


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = _checked(a.data - b.data, "sub")

    def rule(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return Tensor(out, (a, b), rule)


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = _checked(a.data * b.data, "mul")

    def rule(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return Tensor(out, (a, b), rule)


def div(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    with _quiet():
        out = _checked(a.data / b.data, "div")

    def rule(g):
        ga = _unbroadcast(g / b.data, a.shape)
        gb = _unbroadcast(-g * a.data / (b.data * b.data), b.shape)
        return ga, gb

    return Tensor(out, (a, b), rule)


def neg(a) -> Tensor:
    a = as_tensor(a)
    return Tensor(-a.data, (a,), lambda g: (-g,))


def exp(a) -> Tensor:
    a = as_tensor(a)
    with _quiet():
        out = _checked(np.exp(a.data), "exp")
    return Tensor(out, (a,), lambda g: (g * out,))


def log(a) -> Tensor:
    a = as_tensor(a)
    with _quiet():
        out = _checked(np.log(a.data), "log")
    return Tensor(out, (a,), lambda g: (g / a.data,))


def sqrt(a) -> Tensor:
    a = as_tensor(a)
    with _quiet():
        out = _checked(np.sqrt(a.data), "sqrt")
    return Tensor(out, (a,), lambda g: (g * (0.5 / out),))


def tanh(a) -> Tensor:
    a = as_tensor(a)
    out = np.tanh(a.data)
    return Tensor(out, (a,), lambda g: (g * (1.0 - out * out),))


def relu_apply(a) -> Tensor:
    """Elementwise max(0, x); subgradient at 0 is 0."""
    a = as_tensor(a)
    mask = a.data > 0
    return Tensor(np.where(mask, a.data, 0.0), (a,), lambda g: (g * mask,))


def clip(a, lo: float, hi: float) -> Tensor:
    """Clamp to [lo, hi]; gradient passes only strictly inside the interval."""
    a = as_tensor(a)
    out = np.clip(a.data, lo, hi)
    mask = (a.data > lo) & (a.data < hi)
    return Tensor(out, (a,), lambda g: (g * mask,))


def minimum(a, b) -> Tensor:
    """Elementwise min; ties route the gradient to the first operand."""
    a, b = as_tensor(a), as_tensor(b)
    take_a = a.data <= b.data
    out = np.where(take_a, a.data, b.data)

    def rule(g):
        return _unbroadcast(g * take_a, a.shape), _unbroadcast(g * ~take_a, b.shape)

    return Tensor(out, (a, b), rule)


# ---------------------------------------------------------------------------
# reductions and shape ops

def tsum(a, axis=None, keepdims=False) -> Tensor:
    a = as_tensor(a)
    out = a.data.sum(axis=axis, keepdims=keepdims)

    def rule(g):
        if axis is None:
            return (np.broadcast_to(g, a.shape).astype(a.data.dtype, copy=False),)
        gg = g if keepdims else np.expand_dims(g, axis)
        return (np.broadcast_to(gg, a.shape).astype(a.data.dtype, copy=False),)

    return Tensor(np.asarray(out), (a,), rule)


def tmean(a, axis=None, keepdims=False) -> Tensor:
    a = as_tensor(a)
    n = a.data.size if axis is None else a.data.shape[axis]
    return mul(tsum(a, axis=axis, keepdims=keepdims), 1.0 / n)


def reshape(a, shape) -> Tensor:
    a = as_tensor(a)
    out = a.data.reshape(shape)
    return Tensor(out, (a,), lambda g: (g.reshape(a.shape),))


def transpose(a) -> Tensor:
    a = as_tensor(a)
    return Tensor(a.data.T, (a,), lambda g: (g.T,))


def concat(tensors, axis: int = -1) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    out = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.data.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def rule(g):
        return tuple(np.split(g, splits, axis=axis))

    return Tensor(out, tuple(tensors), rule)


def diagonal(a) -> Tensor:
    """Extract the main diagonal of a square matrix."""
    a = as_tensor(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"diagonal expects a square matrix, got {a.shape}")

    def rule(g):
        ga = np.zeros_like(a.data)
        np.fill_diagonal(ga, g)
        return (ga,)

    return Tensor(np.diagonal(a.data).copy(), (a,), rule)


# ---------------------------------------------------------------------------
# linear algebra

def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionError(f"matmul expects 2-D operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul inner dims differ: {a.shape} vs {b.shape}")
    out = _checked(a.data @ b.data, "matmul")

    def rule(g):
        return g @ b.data.T, a.data.T @ g

    return Tensor(out, (a, b), rule)


def affine_apply(weight: Parameter, bias: Parameter, x) -> Tensor:
    """y = x W + b for a (B, n) batch or a single (n,) vector."""
    x = as_tensor(x)
    w, b = weight.leaf(), bias.leaf()
    single = x.ndim == 1
    if single:
        x = reshape(x, (1, x.shape[0]))
    if x.ndim != 2 or x.shape[1] != w.shape[0]:
        raise DimensionError(
            f"affine input {x.shape} incompatible with weight {w.shape}"
        )
    out = add(matmul(x, w), b)
    return reshape(out, (w.shape[1],)) if single else out


# ---------------------------------------------------------------------------
# convolution (valid cross-correlation)

def conv2d_apply(kernel: Parameter, bias: Parameter, x, stride: int = 1) -> Tensor:
    """Valid (unpadded) strided cross-correlation.

    kernel is (F, C, K, K), bias is (F,), x is (C, H, W) or (B, C, H, W).
    Output spatial dims are floor((H - K) / stride) + 1.
    """
    x = as_tensor(x)
    if stride < 1:
        raise ContractError(f"stride must be >= 1, got {stride}")
    single = x.ndim == 3
    if single:
        x = reshape(x, (1,) + x.shape)
    if x.ndim != 4:
        raise DimensionError(f"conv2d input must be 3-D or 4-D, got {x.shape}")
    kf, kc, kh, kw = kernel.shape
    _, c, h, w = x.shape
    if kc != c:
        raise DimensionError(f"kernel channels {kc} != input channels {c}")
    if kh > h or kw > w:
        raise DimensionError(
            f"kernel {kernel.shape} larger than input {x.shape}"
        )
    k, b = kernel.leaf(), bias.leaf()
    oh = (h - kh) // stride + 1
    ow = (w - kw) // stride + 1

    windows = np.lib.stride_tricks.sliding_window_view(x.data, (kh, kw), axis=(2, 3))
    windows = windows[:, :, ::stride, ::stride, :, :]  # (B, C, OH, OW, K, K)
    out = np.einsum("bcijkl,fckl->bfij", windows, k.data, optimize=True)
    out = _checked(out + b.data[None, :, None, None], "conv2d")

    def rule(g):
        gk = np.einsum("bcijkl,bfij->fckl", windows, g, optimize=True)
        gb = g.sum(axis=(0, 2, 3))
        gx = np.zeros_like(x.data)
        for i in range(kh):
            for j in range(kw):
                gx[:, :, i : i + stride * oh : stride, j : j + stride * ow : stride] += np.einsum(
                    "bfij,fc->bcij", g, k.data[:, :, i, j], optimize=True
                )
        return gx, gk, gb

    out_t = Tensor(out, (x, k, b), rule)
    return reshape(out_t, out.shape[1:]) if single else out_t


# ---------------------------------------------------------------------------
# gradient evaluation

def _toposort(root: Tensor):
    order, seen, stack = [], set(), [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            if id(p) not in seen:
                stack.append((p, False))
    return order


def grad_eval(loss: Tensor) -> None:
    """Accumulate d(loss)/d(param) into every reachable Parameter's grad.

    The loss must be scalar.  Internal node gradients are local to this
    call, so calling twice on the same tape doubles the parameter grads.
    """
    if not isinstance(loss, Tensor):
        raise ContractError("grad_eval expects a Tensor loss")
    if loss.data.size != 1:
        raise ContractError(f"loss must be scalar, got shape {loss.data.shape}")
    order = _toposort(loss)
    grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    for node in reversed(order):
        g = grads.pop(id(node), None)
        if g is None:
            continue
        if node.param is not None:
            node.param.grad += g.reshape(node.param.grad.shape)
        if node.backward_rule is None:
            continue
        parent_grads = node.backward_rule(g)
        for parent, pg in zip(node.parents, parent_grads):
            if pg is None:
                continue
            key = id(parent)
            if key in grads:
                grads[key] = grads[key] + pg
            else:
                grads[key] = pg
