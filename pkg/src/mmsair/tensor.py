"""Dense tensors with reverse-mode automatic differentiation.

Define-by-run: every operation on tensors that require gradients records a
node closure, and ``Tensor.backward()`` replays the tape in reverse
topological order. Data lives in row-major numpy arrays; float64 is the
default so finite-difference checks stay meaningful.

Every constructed tensor is checked for NaN/Inf: a non-finite value is an
error state, never silently propagated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DimensionError, NonFiniteError

DEFAULT_DTYPE = np.float64


class Tensor:
    """A dense array plus an optional gradient tape entry.

    ``requires_grad`` on leaves marks trainable parameters; derived tensors
    require grad iff any parent does. ``grad`` is filled by ``backward()``.
    """

    __slots__ = ("data", "requires_grad", "grad", "_parents", "_backward_fn")

    def __init__(self, data, requires_grad=False, dtype=None, _parents=(), _backward=None):
        arr = np.asarray(data, dtype=dtype or DEFAULT_DTYPE)
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError("tensor contains NaN or Inf")
        self.data = arr
        self.requires_grad = bool(requires_grad) or any(p.requires_grad for p in _parents)
        self.grad = None
        self._parents = tuple(_parents) if self.requires_grad else ()
        self._backward_fn = _backward if self.requires_grad else None

    # -- basic introspection -------------------------------------------------

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    def item(self):
        return float(self.data.reshape(()))

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    # -- autodiff ------------------------------------------------------------

    def _accumulate(self, g):
        if not self.requires_grad:
            return
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def backward(self):
        """Backpropagate from this scalar through the recorded graph."""
        if self.data.size != 1:
            raise ContractError(f"backward requires a scalar loss, got shape {self.data.shape}")
        topo = _toposort(self)
        self._accumulate(np.ones_like(self.data))
        for node in reversed(topo):
            if node._backward_fn is not None and node.grad is not None:
                node._backward_fn(node.grad)

    def zero_grad(self):
        self.grad = None

    # -- operator sugar ------------------------------------------------------

    def __add__(self, other):
        return add(self, _as_tensor(other))

    def __radd__(self, other):
        return add(_as_tensor(other), self)

    def __sub__(self, other):
        return sub(self, _as_tensor(other))

    def __rsub__(self, other):
        return sub(_as_tensor(other), self)

    def __mul__(self, other):
        return mul(self, _as_tensor(other))

    def __rmul__(self, other):
        return mul(_as_tensor(other), self)

    def __truediv__(self, scalar):
        if isinstance(scalar, Tensor):
            raise ContractError("tensor/tensor division is not supported")
        return mul(self, _as_tensor(1.0 / scalar))

    def __neg__(self):
        return mul(self, _as_tensor(-1.0))

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, key):
        return slice_(self, key)


def _as_tensor(x):
    return x if isinstance(x, Tensor) else Tensor(x)


def _toposort(root):
    order = []
    seen = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if id(p) not in seen:
                stack.append((p, False))
    return order


def _unbroadcast(grad, shape):
    """Sum ``grad`` down to ``shape`` to undo numpy broadcasting."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


# -- elementwise ops ---------------------------------------------------------


def add(a, b):
    out = Tensor(a.data + b.data, _parents=(a, b), _backward=None)

    def bw(g):
        a._accumulate(_unbroadcast(g, a.data.shape))
        b._accumulate(_unbroadcast(g, b.data.shape))

    out._backward_fn = bw if out.requires_grad else None
    return out


def sub(a, b):
    out = Tensor(a.data - b.data, _parents=(a, b))

    def bw(g):
        a._accumulate(_unbroadcast(g, a.data.shape))
        b._accumulate(-_unbroadcast(g, b.data.shape))

    out._backward_fn = bw if out.requires_grad else None
    return out


def mul(a, b):
    out = Tensor(a.data * b.data, _parents=(a, b))

    def bw(g):
        a._accumulate(_unbroadcast(g * b.data, a.data.shape))
        b._accumulate(_unbroadcast(g * a.data, b.data.shape))

    out._backward_fn = bw if out.requires_grad else None
    return out


def tanh(a):
    y = np.tanh(a.data)
    out = Tensor(y, _parents=(a,))

    def bw(g):
        a._accumulate(g * (1.0 - y * y))

    out._backward_fn = bw if out.requires_grad else None
    return out


def log(a):
    out = Tensor(np.log(a.data), _parents=(a,))

    def bw(g):
        a._accumulate(g / a.data)

    out._backward_fn = bw if out.requires_grad else None
    return out


def exp(a):
    y = np.exp(a.data)
    out = Tensor(y, _parents=(a,))

    def bw(g):
        a._accumulate(g * y)

    out._backward_fn = bw if out.requires_grad else None
    return out


def clip_min(a, minval):
    """Elementwise max(a, minval); gradient is zero where the clamp engaged."""
    mask = a.data > minval
    out = Tensor(np.maximum(a.data, minval), _parents=(a,))

    def bw(g):
        a._accumulate(g * mask)

    out._backward_fn = bw if out.requires_grad else None
    return out


# -- linear algebra ----------------------------------------------------------


def matmul(a, b):
    if a.ndim < 2 or b.ndim < 2:
        raise DimensionError(f"matmul requires rank >= 2 operands, got {a.shape} x {b.shape}")
    if a.data.shape[-1] != b.data.shape[-2]:
        raise DimensionError(f"matmul inner dimensions disagree: {a.shape} x {b.shape}")
    try:
        y = np.matmul(a.data, b.data)
    except ValueError as e:
        raise DimensionError(f"matmul batch dimensions disagree: {a.shape} x {b.shape}") from e
    out = Tensor(y, _parents=(a, b))

    def bw(g):
        a._accumulate(_unbroadcast(np.matmul(g, b.data.swapaxes(-1, -2)), a.data.shape))
        b._accumulate(_unbroadcast(np.matmul(a.data.swapaxes(-1, -2), g), b.data.shape))

    out._backward_fn = bw if out.requires_grad else None
    return out


def linear(x, w, b=None):
    """x @ w.T (+ b), the W·x convention with W stored as [out, in]."""
    y = matmul(x, transpose(w, (1, 0)))
    return y if b is None else add(y, b)


# -- shape ops ---------------------------------------------------------------


def reshape(a, shape):
    out = Tensor(a.data.reshape(shape), _parents=(a,))

    def bw(g):
        a._accumulate(g.reshape(a.data.shape))

    out._backward_fn = bw if out.requires_grad else None
    return out


def transpose(a, axes):
    out = Tensor(np.transpose(a.data, axes), _parents=(a,))
    inverse = np.argsort(axes)

    def bw(g):
        a._accumulate(np.transpose(g, inverse))

    out._backward_fn = bw if out.requires_grad else None
    return out


def slice_(a, key):
    out = Tensor(a.data[key], _parents=(a,))

    def bw(g):
        full = np.zeros_like(a.data)
        full[key] = g
        a._accumulate(full)

    out._backward_fn = bw if out.requires_grad else None
    return out


def concat(tensors, axis):
    tensors = list(tensors)
    out = Tensor(np.concatenate([t.data for t in tensors], axis=axis), _parents=tuple(tensors))
    sizes = [t.data.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def bw(g):
        for t, piece in zip(tensors, np.split(g, splits, axis=axis)):
            t._accumulate(piece)

    out._backward_fn = bw if out.requires_grad else None
    return out


def stack(tensors, axis):
    tensors = list(tensors)
    out = Tensor(np.stack([t.data for t in tensors], axis=axis), _parents=tuple(tensors))

    def bw(g):
        for i, t in enumerate(tensors):
            t._accumulate(np.take(g, i, axis=axis))

    out._backward_fn = bw if out.requires_grad else None
    return out


# -- reductions --------------------------------------------------------------


def sum_(a, axis=None, keepdims=False):
    out = Tensor(a.data.sum(axis=axis, keepdims=keepdims), _parents=(a,))

    def bw(g):
        if axis is None:
            a._accumulate(np.broadcast_to(g, a.data.shape).copy())
        else:
            gg = g if keepdims else np.expand_dims(g, axis)
            a._accumulate(np.broadcast_to(gg, a.data.shape).copy())

    out._backward_fn = bw if out.requires_grad else None
    return out


def mean(a, axis=None, keepdims=False):
    n = a.data.size if axis is None else a.data.shape[axis]
    return mul(sum_(a, axis=axis, keepdims=keepdims), _as_tensor(1.0 / n))


# -- softmax -----------------------------------------------------------------


def softmax(a, axis=-1):
    """Numerically stabilized softmax along ``axis``."""
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=axis, keepdims=True)
    out = Tensor(s, _parents=(a,))

    def bw(g):
        inner = (g * s).sum(axis=axis, keepdims=True)
        a._accumulate(s * (g - inner))

    out._backward_fn = bw if out.requires_grad else None
    return out


def pick(p, labels):
    """out[i] = p[i, labels[i]] for a 2-D batch of rows."""
    if p.ndim != 2:
        raise DimensionError(f"pick expects a 2-D batch, got {p.shape}")
    idx = np.asarray(labels, dtype=np.intp)
    if idx.shape != (p.data.shape[0],):
        raise DimensionError(f"label batch {idx.shape} does not match rows of {p.shape}")
    rows = np.arange(p.data.shape[0])
    out = Tensor(p.data[rows, idx], _parents=(p,))

    def bw(g):
        full = np.zeros_like(p.data)
        np.add.at(full, (rows, idx), g)
        p._accumulate(full)

    out._backward_fn = bw if out.requires_grad else None
    return out


# -- gradient checking -------------------------------------------------------


@dataclass
class GradCheckResult:
    """Outcome of a finite-difference comparison over a parameter set."""

    max_rel_err: float
    worst_param: str | None = None
    worst_index: int | None = None
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures


def finite_difference_check(f, params, eps=1e-5):
    """Compare analytic gradients of ``f()`` against central differences.

    ``f`` is a deterministic closure over ``params`` (a dict name -> Tensor
    leaf with requires_grad) returning a scalar Tensor. Relative error uses
    max(|analytic|, |central|, 1e-12) as the denominator. Non-finite outputs
    during probing are recorded in ``failures`` with the parameter index.

    A central difference cannot resolve derivatives below its own roundoff
    floor, roughly |f| * machine_eps / eps. When both the analytic gradient
    and the central difference fall under that floor — which happens for
    parameters with a structurally zero gradient, e.g. a key-projection bias
    that shifts all attention scores equally and cancels in the softmax —
    the two agree to within the probe's resolution and the entry counts as
    an exact match rather than as amplified noise.
    """
    if eps <= 0:
        raise ContractError("eps must be positive")
    for t in params.values():
        t.zero_grad()
    loss = f()
    loss.backward()
    analytic = {
        name: (t.grad.copy() if t.grad is not None else np.zeros_like(t.data))
        for name, t in params.items()
    }

    result = GradCheckResult(max_rel_err=0.0)
    for name, t in params.items():
        flat = t.data.reshape(-1)
        a_flat = analytic[name].reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            try:
                flat[i] = orig + eps
                f_plus = f().item()
                flat[i] = orig - eps
                f_minus = f().item()
            except NonFiniteError:
                result.failures.append(f"{name}[{i}]: non-finite function output")
                flat[i] = orig
                continue
            finally:
                flat[i] = orig
            central = (f_plus - f_minus) / (2.0 * eps)
            # roundoff floor of the central difference (safety factor 4)
            noise = 4.0 * max(abs(f_plus), abs(f_minus), 1.0) * np.finfo(np.float64).eps / eps
            if abs(a_flat[i]) < noise and abs(central) < noise:
                continue
            denom = max(abs(a_flat[i]), abs(central), 1e-12)
            rel = abs(a_flat[i] - central) / denom
            if rel > result.max_rel_err:
                result.max_rel_err = rel
                result.worst_param = name
                result.worst_index = i
    return result
