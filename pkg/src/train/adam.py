"""Module for the Adam update with decoupled weight decay."""
from typing import List, Sequence, Tuple

import numpy as np

from src.autodiff.tensor import Tensor
from src.exceptions import DivergenceError, ShapeError

DIRECTIONS = ("ascend", "descend")


class AdamState:
    """Class for the first and second moments of a list of parameters."""

    def __init__(self, params: Sequence[Tensor]):
        self.m: List[np.ndarray] = [np.zeros_like(p.data) for p in params]
        self.v: List[np.ndarray] = [np.zeros_like(p.data) for p in params]
        self.step = 0

    def __str__(self):
        return f"AdamState(step={self.step}, tensors={len(self.m)})"


def adam_step(
    params: Sequence[Tensor],
    grads: Sequence[np.ndarray],
    state: AdamState,
    lr: float,
    wd: float = 0.0,
    direction: str = "descend",
    betas: Tuple[float, float] = (0.9, 0.999),
    eps: float = 1e-8,
    decoupled: bool = True,
) -> AdamState:  # pylint: disable=too-many-arguments
    """Apply one Adam update in place and return the advanced state.

    With `decoupled` the parameters first shrink by (1 - lr * wd); otherwise
    wd * param is added to the descent gradient. `ascend` negates the gradient.
    A non-finite gradient raises before any parameter changes.
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"[ADAM] unknown direction {direction}")
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ShapeError(
            f"[ADAM] {len(params)} params, {len(grads)} grads, {len(state.m)} moments"
        )
    for param, grad, moment in zip(params, grads, state.m):
        if param.shape != np.shape(grad) or param.shape != moment.shape:
            raise ShapeError(f"[ADAM] shape mismatch {param.shape} vs {np.shape(grad)}")
        if not np.all(np.isfinite(grad)):
            raise DivergenceError("[ADAM] non-finite gradient")
    beta1, beta2 = betas
    state.step += 1
    correction1 = 1.0 - beta1**state.step
    correction2 = 1.0 - beta2**state.step
    sign = -1.0 if direction == "ascend" else 1.0
    for i, (param, grad) in enumerate(zip(params, grads)):
        grad = sign * np.asarray(grad, dtype=np.float64)
        if decoupled:
            param.data *= 1.0 - lr * wd
        elif wd:
            grad = grad + wd * param.data
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad**2
        m_hat = state.m[i] / correction1
        v_hat = state.v[i] / correction2
        param.data -= lr * m_hat / (np.sqrt(v_hat) + eps)
    return state
