"""Module for conformance checks of a representation against its reference law."""
from typing import Optional

import numpy as np
from scipy import stats

from src.exceptions import ContractError


def ks_uniform(samples: np.ndarray) -> float:
    """Return the Kolmogorov-Smirnov statistic sup_t |F_n(t) - t| against Uniform[0, 1]."""
    samples = np.asarray(samples, dtype=np.float64).reshape(-1)
    if samples.size == 0:
        raise ContractError("[KS] needs at least one sample")
    if samples.min() < 0.0 or samples.max() > 1.0:
        raise ContractError("[KS] samples must lie in [0, 1]")
    return float(stats.kstest(samples, "uniform").statistic)


def silverman_bandwidth(samples: np.ndarray) -> float:
    """Return Silverman's rule 0.9 min(sd, IQR / 1.349) n^(-1/5)."""
    samples = np.asarray(samples, dtype=np.float64).reshape(-1)
    spread = np.std(samples, ddof=1) if samples.size > 1 else 0.0
    iqr = stats.iqr(samples) / 1.349
    scale = min(spread, iqr) if iqr > 0 else spread
    if scale <= 0:
        scale = 1.0
    return float(0.9 * scale * samples.size ** (-0.2))


def kde_1d(
    samples: np.ndarray, bandwidth: Optional[float], grid: np.ndarray
) -> np.ndarray:
    """Return the Gaussian kernel density estimate on `grid` (Silverman when None)."""
    samples = np.asarray(samples, dtype=np.float64).reshape(-1)
    grid = np.asarray(grid, dtype=np.float64)
    bandwidth = silverman_bandwidth(samples) if bandwidth is None else bandwidth
    if bandwidth <= 0:
        raise ContractError(f"[KDE] bandwidth must be > 0, got {bandwidth}")
    kernel = stats.norm.pdf((grid[:, None] - samples[None, :]) / bandwidth)
    return kernel.mean(axis=1) / bandwidth


def reference_density(reference: str, grid: np.ndarray) -> np.ndarray:
    """Return the density of a named reference law on `grid`."""
    grid = np.asarray(grid, dtype=np.float64)
    if reference == "uniform01":
        return ((grid >= 0.0) & (grid <= 1.0)).astype(np.float64)
    if reference == "sine_gaussian":
        inside = np.abs(grid) < 1.0
        density = np.zeros_like(grid)
        u = grid[inside]
        base = np.arcsin(u)
        # sin(Z) = u has the roots asin(u) + 2 pi k and pi - asin(u) + 2 pi k
        shifts = 2.0 * np.pi * np.arange(-4, 5)[:, None]
        roots = np.concatenate([base + shifts, np.pi - base + shifts])
        density[inside] = stats.norm.pdf(roots).sum(axis=0) / np.sqrt(1.0 - u**2)
        return density
    raise ContractError(f"[KDE] unknown reference {reference}")
