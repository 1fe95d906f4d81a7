"""Module for the sliced linear dimension reduction baselines (SIR and SAVE)."""
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh

from src.constants import RIDGE_FALLBACK
from src.dataset.dataset import Dataset
from src.exceptions import ContractError
from src.metrics.dependence import distance_correlation, subsample_rows
from src.utils import LOGGER as logger


class SDRResult:
    """Class for the directions found by a sliced method.
    ----
    Params:
    - directions: np.ndarray [d_X x d]
        original-scale directions, orthonormal in the covariance metric
    - standardized_directions: np.ndarray [d_X x d]
        unit-norm, mutually orthogonal directions in the whitened scale
    - eigenvalues: np.ndarray
        all eigenvalues of the kernel matrix, non-increasing
    - n_slices: int
    - mean: np.ndarray
        predictor mean used for centering
    """

    def __init__(
        self,
        directions: np.ndarray,
        standardized_directions: np.ndarray,
        eigenvalues: np.ndarray,
        n_slices: int,
        mean: np.ndarray,
        method: str,
    ):  # pylint: disable=too-many-arguments
        self.directions = directions
        self.standardized_directions = standardized_directions
        self.eigenvalues = eigenvalues
        self.n_slices = n_slices
        self.mean = mean
        self.method = method

    def __str__(self):
        return (
            f"{self.method.upper()}(d={self.directions.shape[1]}, slices={self.n_slices}, "
            f"leading eigenvalue={self.eigenvalues[0]:.4f})"
        )

    def transform(self, X: np.ndarray) -> np.ndarray:
        """Project centered predictors onto the directions."""
        return (np.asarray(X, dtype=np.float64) - self.mean) @ self.directions


def _whitening(X: np.ndarray, method: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (mean, Sigma^{-1/2}, standardized X), ridge-regularized when singular."""
    mean = X.mean(axis=0)
    centered = X - mean
    covariance = np.atleast_2d(np.cov(centered, rowvar=False))
    values, vectors = eigh(covariance)
    if values.min() <= RIDGE_FALLBACK * max(values.max(), 1.0):
        logger.warning(f"[{method.upper()}] Singular covariance, adding ridge 1e-8")
        values = values + RIDGE_FALLBACK
    inverse_root = (vectors / np.sqrt(values)) @ vectors.T
    return mean, inverse_root, centered @ inverse_root


def _slices(y: np.ndarray, n_slices: int) -> List[np.ndarray]:
    """Split row indices into equal-count slices ordered by the first response column."""
    order = np.argsort(y, kind="stable")
    return [part for part in np.array_split(order, n_slices) if len(part)]


def _sir_kernel(Z: np.ndarray, slices: Sequence[np.ndarray]) -> np.ndarray:
    n, p = Z.shape
    kernel = np.zeros((p, p))
    for index in slices:
        m_h = Z[index].mean(axis=0)
        kernel += len(index) / n * np.outer(m_h, m_h)
    return kernel


def _save_kernel(Z: np.ndarray, slices: Sequence[np.ndarray]) -> np.ndarray:
    n, p = Z.shape
    kernel = np.zeros((p, p))
    identity = np.eye(p)
    for index in slices:
        within = np.atleast_2d(np.cov(Z[index], rowvar=False, bias=True))
        gap = identity - within
        kernel += len(index) / n * gap @ gap
    return kernel


def _sliced(
    X: np.ndarray,
    Y: np.ndarray,
    d: int,
    n_slices: int,
    kernel: Callable[[np.ndarray, Sequence[np.ndarray]], np.ndarray],
    method: str,
) -> SDRResult:  # pylint: disable=too-many-arguments
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(Y, dtype=np.float64)
    y = y.reshape(len(X), -1)[:, 0]
    n, p = X.shape
    if n <= p:
        raise ContractError(f"[{method.upper()}] needs n > d_X, got n={n}, d_X={p}")
    if not 1 <= d <= p:
        raise ContractError(f"[{method.upper()}] d must lie in [1, {p}], got {d}")
    if n_slices < 2:
        raise ContractError(f"[{method.upper()}] n_slices must be >= 2, got {n_slices}")
    mean, inverse_root, Z = _whitening(X, method)
    values, vectors = eigh(kernel(Z, _slices(y, n_slices)))
    values, vectors = values[::-1], vectors[:, ::-1]
    standardized = vectors[:, :d]
    return SDRResult(inverse_root @ standardized, standardized, values, n_slices, mean, method)


def sir(X: np.ndarray, Y: np.ndarray, d: int, n_slices: int) -> SDRResult:
    """Sliced inverse regression: top eigenvectors of sum_h p_h m_h m_h'."""
    return _sliced(X, Y, d, n_slices, _sir_kernel, "sir")


def save(X: np.ndarray, Y: np.ndarray, d: int, n_slices: int) -> SDRResult:
    """Sliced average variance estimation: top eigenvectors of sum_h p_h (I - V_h)^2."""
    return _sliced(X, Y, d, n_slices, _save_kernel, "save")


METHODS = {"sir": sir, "save": save}


def select_slices(
    X: np.ndarray,
    Y: np.ndarray,
    d: int,
    candidates: Sequence[int],
    val: Dataset,
    method: str = "sir",
) -> int:  # pylint: disable=too-many-arguments
    """Return the slice count whose projection has the largest validation DC."""
    if not candidates:
        raise ContractError("[SLICES] candidates must be nonempty")
    fit = METHODS[method]
    index = subsample_rows(val.n)
    best, best_dc = candidates[0], -np.inf
    for n_slices in candidates:
        result = fit(X, Y, d, n_slices)
        dc = distance_correlation(val.response()[index], result.transform(val.X[index]))
        logger.info(f"[SLICES] {method.upper()} with {n_slices} slices: validation DC {dc:.4f}")
        if dc > best_dc:
            best, best_dc = n_slices, dc
    return int(best)
