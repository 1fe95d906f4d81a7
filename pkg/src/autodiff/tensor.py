"""Module for the reverse-mode automatic differentiation engine.

Every operation creates a new `Tensor` that keeps references to its inputs and a
closure mapping the gradient of the output to the gradients of the inputs. The
graph is built eagerly during the forward pass and released by `backward`.
"""
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit

from src.constants import EXP_CLAMP, LEAKY_SLOPE
from src.exceptions import ContractError, DomainError, ShapeError

BackwardFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]


class Tensor:
    """Dense float64 array participating in a reverse-mode graph.
    ----
    Params:
    - values: array-like
        copied into a C-contiguous float64 array
    - requires_grad: bool
        whether `backward` populates `grad` for this leaf
    """

    def __init__(
        self,
        values: Union[np.ndarray, float, Sequence],
        requires_grad: bool = False,
        parents: Tuple["Tensor", ...] = (),
        op: str = "leaf",
    ):
        self.data: np.ndarray = np.array(values, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.op = op
        self.saturated = 0
        self._parents: Tuple["Tensor", ...] = parents
        self._backward: Optional[BackwardFn] = None

    def __repr__(self):
        return f"Tensor(shape={self.shape}, op={self.op}, requires_grad={self.requires_grad})"  # pylint: disable=line-too-long

    @property
    def shape(self) -> Tuple[int, ...]:
        """Return the dimension sizes."""
        return self.data.shape

    @property
    def values(self) -> np.ndarray:
        """Return the flat view of the underlying buffer."""
        return self.data.reshape(-1)

    @property
    def node(self) -> Optional[Tuple[str, Tuple["Tensor", ...]]]:
        """Return (operation tag, parents) for interior nodes, None for leaves."""
        if self._backward is None:
            return None
        return self.op, self._parents

    def item(self) -> float:
        """Return the value of a one-element tensor as a python float."""
        if self.data.size != 1:
            raise ContractError(f"item() needs one element, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        """Return a copy of the values."""
        return self.data.copy()

    def detach(self) -> "Tensor":
        """Return a leaf holding the same values, cut from the graph."""
        return Tensor(self.data, requires_grad=False)

    def zero_grad(self) -> None:
        """Forget the accumulated gradient."""
        self.grad = None

    # operators
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __neg__(self):
        return scale(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    @property
    def T(self) -> "Tensor":  # pylint: disable=invalid-name
        """Return the transpose of a 2-D tensor."""
        return transpose(self)

    def exp(self) -> "Tensor":
        """Return exp(self) with the input clamped at EXP_CLAMP."""
        return exp(self)

    def log(self) -> "Tensor":
        """Return log(self)."""
        return log(self)

    def relu(self) -> "Tensor":
        """Return max(self, 0)."""
        return relu(self)

    def leaky_relu(self, alpha: float = LEAKY_SLOPE) -> "Tensor":
        """Return the leaky rectifier with negative slope alpha."""
        return leaky_relu(self, alpha)

    def sigmoid(self) -> "Tensor":
        """Return the logistic function of self."""
        return sigmoid(self)

    def sum(self, axis: Optional[int] = None) -> "Tensor":
        """Return the sum over `axis` (all entries when None)."""
        return reduce("sum", self, axis)

    def mean(self, axis: Optional[int] = None) -> "Tensor":
        """Return the mean over `axis` (all entries when None)."""
        return reduce("mean", self, axis)

    def backward(self) -> Dict["Tensor", np.ndarray]:
        """Back-propagate from this scalar; see `backward`."""
        return backward(self)


def as_tensor(value: Union[Tensor, np.ndarray, float, Sequence]) -> Tensor:
    """Wrap constants into a leaf that does not require gradients."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum out the axes that broadcasting expanded so grad matches shape."""
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


def _node(
    data: np.ndarray, parents: Tuple[Tensor, ...], op: str, backward_fn: BackwardFn
) -> Tensor:
    """Create the output node of an operation."""
    requires_grad = any(parent.requires_grad for parent in parents)
    out = Tensor(data, requires_grad=requires_grad, op=op)
    if requires_grad:
        out._parents = parents  # pylint: disable=protected-access
        out._backward = backward_fn  # pylint: disable=protected-access
    return out


def _broadcast_shape(a: Tensor, b: Tensor, op: str) -> None:
    """Check the operands broadcast against each other."""
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError as error:
        raise ShapeError(f"[{op}] cannot broadcast {a.shape} with {b.shape}") from error


def add(a, b) -> Tensor:
    """Return a + b."""
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b, "add")
    return _node(a.data + b.data, (a, b), "add", lambda g: (g, g))


def sub(a, b) -> Tensor:
    """Return a - b."""
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b, "sub")
    return _node(a.data - b.data, (a, b), "sub", lambda g: (g, -g))


def mul(a, b) -> Tensor:
    """Return the componentwise product a * b."""
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b, "mul")
    return _node(
        a.data * b.data, (a, b), "mul", lambda g: (g * b.data, g * a.data)
    )


def scale(a, factor: float) -> Tensor:
    """Return factor * a for a python scalar factor."""
    a = as_tensor(a)
    factor = float(factor)
    return _node(a.data * factor, (a,), "scale", lambda g: (g * factor,))


def matmul(a, b) -> Tensor:
    """Return the matrix product of a [m x k] and b [k x n]."""
    a, b = as_tensor(a), as_tensor(b)
    if a.data.ndim != 2 or b.data.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"[matmul] inner dimensions differ: {a.shape} @ {b.shape}")
    return _node(
        a.data @ b.data,
        (a, b),
        "matmul",
        lambda g: (g @ b.data.T, a.data.T @ g),
    )


def transpose(a) -> Tensor:
    """Return the transpose of a 2-D tensor."""
    a = as_tensor(a)
    if a.data.ndim != 2:
        raise ShapeError(f"[transpose] expected 2-D, got {a.shape}")
    return _node(a.data.T.copy(), (a,), "transpose", lambda g: (g.T,))


def exp(a) -> Tensor:
    """Return exp(min(a, EXP_CLAMP)); clamped entries get a zero adjoint."""
    a = as_tensor(a)
    inside = a.data <= EXP_CLAMP
    out_data = np.exp(np.minimum(a.data, EXP_CLAMP))
    out = _node(out_data, (a,), "exp", lambda g: (g * out_data * inside,))
    out.saturated = int(a.data.size - np.count_nonzero(inside))
    return out


def log(a) -> Tensor:
    """Return the natural logarithm of a strictly positive tensor."""
    a = as_tensor(a)
    if np.any(a.data <= 0):
        raise DomainError("[log] argument must be strictly positive")
    return _node(np.log(a.data), (a,), "log", lambda g: (g / a.data,))


def relu(a) -> Tensor:
    """Return max(a, 0)."""
    a = as_tensor(a)
    active = a.data > 0
    return _node(a.data * active, (a,), "relu", lambda g: (g * active,))


def leaky_relu(a, alpha: float = LEAKY_SLOPE) -> Tensor:
    """Return a where positive and alpha * a elsewhere."""
    a = as_tensor(a)
    slope = np.where(a.data > 0, 1.0, alpha)
    return _node(a.data * slope, (a,), "leaky_relu", lambda g: (g * slope,))


def sigmoid(a) -> Tensor:
    """Return the logistic function 1 / (1 + exp(-a))."""
    a = as_tensor(a)
    out_data = expit(a.data)
    return _node(
        out_data, (a,), "sigmoid", lambda g: (g * out_data * (1.0 - out_data),)
    )


_ELEMENTWISE = {
    "add": add,
    "sub": sub,
    "mul": mul,
    "exp": exp,
    "log": log,
    "scale": scale,
    "leaky_relu": leaky_relu,
    "relu": relu,
    "sigmoid": sigmoid,
}


def elementwise(op: str, *args, **kwargs) -> Tensor:
    """Dispatch an elementwise operation by name."""
    if op not in _ELEMENTWISE:
        raise ContractError(f"[elementwise] unknown operation {op}")
    return _ELEMENTWISE[op](*args, **kwargs)


def reduce(op: str, a, axis: Optional[int] = None) -> Tensor:
    """Return the sum or mean of a over `axis`."""
    a = as_tensor(a)
    if op not in ("sum", "mean"):
        raise ContractError(f"[reduce] unknown operation {op}")
    if axis is not None and not -a.data.ndim <= axis < a.data.ndim:
        raise ContractError(f"[reduce] axis {axis} out of bounds for {a.shape}")
    count = a.data.size if axis is None else a.shape[axis]
    factor = 1.0 if op == "sum" else 1.0 / max(count, 1)
    out_data = a.data.sum(axis=axis) * factor
    shape = a.shape

    def backward_fn(g):
        if axis is not None:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g * factor, shape).copy(),)

    return _node(out_data, (a,), op, backward_fn)


def concat(tensors: List[Tensor], axis: int = 1) -> Tensor:
    """Concatenate 2-D tensors along `axis`."""
    tensors = [as_tensor(t) for t in tensors]
    sizes = [t.shape[axis] for t in tensors]
    bounds = np.cumsum(sizes)[:-1]
    try:
        out_data = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError as error:
        raise ShapeError(f"[concat] {[t.shape for t in tensors]}") from error
    return _node(
        out_data,
        tuple(tensors),
        "concat",
        lambda g: tuple(np.split(g, bounds, axis=axis)),
    )


def take_rows(a, index: np.ndarray) -> Tensor:
    """Return the rows of a selected by an integer index (repeats allowed)."""
    a = as_tensor(a)
    index = np.asarray(index, dtype=np.int64)
    shape = a.shape

    def backward_fn(g):
        grad = np.zeros(shape)
        np.add.at(grad, index, g)
        return (grad,)

    return _node(a.data[index], (a,), "take_rows", backward_fn)


def _topological_order(root: Tensor) -> List[Tensor]:
    """Return the nodes reachable from root, inputs before outputs."""
    order: List[Tensor] = []
    visited = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:  # pylint: disable=protected-access
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(loss: Tensor) -> Dict[Tensor, np.ndarray]:
    """Populate `grad` on every leaf reachable from a scalar loss.
    ----
    Params:
    - loss: Tensor
        one-element tensor
    ----
    Returns:
    - Dict[Tensor, np.ndarray]
        leaf tensor -> accumulated gradient, for leaves with requires_grad
    """
    if loss.data.size != 1:
        raise ContractError(f"[backward] loss must be scalar, got shape {loss.shape}")
    order = _topological_order(loss)
    pending: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    leaves: Dict[Tensor, np.ndarray] = {}
    for node in reversed(order):
        grad = pending.pop(id(node), None)
        if grad is None:
            continue
        if node._backward is None:  # pylint: disable=protected-access
            if node.requires_grad:
                node.grad = grad.copy() if node.grad is None else node.grad + grad
                leaves[node] = node.grad
            continue
        parent_grads = node._backward(grad)  # pylint: disable=protected-access
        for parent, parent_grad in zip(
            node._parents, parent_grads  # pylint: disable=protected-access
        ):
            if parent_grad is None or not parent.requires_grad:
                continue
            parent_grad = _unbroadcast(parent_grad, parent.shape)
            key = id(parent)
            pending[key] = parent_grad if key not in pending else pending[key] + parent_grad
    # graph is single use
    for node in order:
        if node._backward is not None:  # pylint: disable=protected-access
            node._parents = ()  # pylint: disable=protected-access
            node._backward = None  # pylint: disable=protected-access
    return leaves
