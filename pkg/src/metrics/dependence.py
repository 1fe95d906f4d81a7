"""Module for the empirical distance covariance and distance correlation."""
from typing import Optional, Tuple

import numpy as np
from scipy.spatial.distance import pdist, squareform

from src.constants import DC_MAX_ROWS
from src.exceptions import ContractError
from src.utils import make_rng


def _as_matrix(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    return values[:, None] if values.ndim == 1 else values


def _double_centered(values: np.ndarray) -> np.ndarray:
    """Return the double-centered Euclidean distance matrix of the rows."""
    distances = squareform(pdist(values))
    return (
        distances
        - distances.mean(axis=0)[None, :]
        - distances.mean(axis=1)[:, None]
        + distances.mean()
    )


def _dcov_terms(A: np.ndarray, B: np.ndarray) -> Tuple[float, float, float]:
    """Return (dCov^2(A,B), dVar^2(A), dVar^2(B)) as V-statistics."""
    A, B = _as_matrix(A), _as_matrix(B)
    if A.shape[0] != B.shape[0]:
        raise ContractError(f"[DCOR] row counts differ: {A.shape[0]} vs {B.shape[0]}")
    n = A.shape[0]
    if n < 2:
        raise ContractError(f"[DCOR] needs n >= 2, got {n}")
    a, b = _double_centered(A), _double_centered(B)
    return (a * b).sum() / n**2, (a * a).sum() / n**2, (b * b).sum() / n**2


def distance_covariance(A: np.ndarray, B: np.ndarray) -> float:
    """Return the V-statistic distance covariance dCov(A, B)."""
    dcov2, _, _ = _dcov_terms(A, B)
    return float(np.sqrt(max(dcov2, 0.0)))


def distance_correlation(A: np.ndarray, B: np.ndarray) -> float:
    """Return dCor = dCov / sqrt(dVar_A dVar_B), 0 when either sample is constant."""
    dcov2, dvar2_a, dvar2_b = _dcov_terms(A, B)
    denominator = np.sqrt(dvar2_a * dvar2_b)
    if denominator <= 0:
        return 0.0
    return float(np.clip(np.sqrt(max(dcov2, 0.0) / denominator), 0.0, 1.0))


def subsample_rows(
    n: int, max_rows: Optional[int] = DC_MAX_ROWS, seed: int = 0
) -> np.ndarray:
    """Return sorted row indices, at most `max_rows` of them, drawn with a fixed seed."""
    if max_rows is None or n <= max_rows:
        return np.arange(n)
    return np.sort(make_rng(seed).choice(n, size=max_rows, replace=False))
