"""Module for finite-difference gradient checks."""
from typing import Callable

import numpy as np

from src.autodiff.tensor import Tensor, backward


def grad_check(f: Callable[[Tensor], Tensor], x: Tensor, eps: float = 1e-5) -> float:
    """Compare backward gradients of f at x with central finite differences.

    `x` is perturbed in place, so `f` may also ignore its argument and read a
    parameter tensor captured elsewhere (e.g. a network weight).
    ----
    Returns:
    - float
        max over coordinates of |ad - fd| / max(1, |ad|, |fd|)
    """
    x.zero_grad()
    backward(f(x))
    analytic = np.zeros(x.data.size) if x.grad is None else x.grad.reshape(-1).copy()
    flat = x.data.reshape(-1)
    worst = 0.0
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + eps
        f_plus = f(x).item()
        flat[i] = original - eps
        f_minus = f(x).item()
        flat[i] = original
        numeric = (f_plus - f_minus) / (2.0 * eps)
        error = abs(analytic[i] - numeric) / max(1.0, abs(analytic[i]), abs(numeric))
        worst = max(worst, error)
    return worst
