"""Module of the synthetic data generators used in the experiments."""
from typing import Optional

import numpy as np
from scipy.special import ndtr

from src.dataset.dataset import Dataset
from src.exceptions import ContractError
from src.utils import LOGGER as logger
from src.utils import make_rng

MODELS = ("I", "II", "III", "IV")
SCENARIOS = ("i", "ii", "iii", "iv")
NOISE_STD = 0.5

# stream keys, so switching the noise off leaves the predictors unchanged
_STREAM_X = 1
_STREAM_NOISE = 2
_STREAM_BETA = 3


def sample_predictors(scenario: str, n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    """Draw X under one of the four predictor laws.
    ----
    Params:
    - scenario: str
        "i": Uniform[-2, 2]^p, "ii": N(0, I_p),
        "iii": 1/4 N(-2, I) + 1/2 Uniform[-2, 2]^p + 1/4 N(2, I),
        "iv": N(0, 0.5 11' + 0.5 I)
    """
    if scenario == "i":
        return rng.uniform(-2.0, 2.0, size=(n, p))
    if scenario == "ii":
        return rng.standard_normal(size=(n, p))
    if scenario == "iii":
        component = rng.choice(3, size=n, p=[0.25, 0.5, 0.25])
        gaussian = rng.standard_normal(size=(n, p))
        uniform = rng.uniform(-2.0, 2.0, size=(n, p))
        X = np.where(component[:, None] == 1, uniform, gaussian)
        X[component == 0] -= 2.0
        X[component == 2] += 2.0
        return X
    if scenario == "iv":
        covariance = 0.5 * np.ones((p, p)) + 0.5 * np.eye(p)
        return rng.standard_normal(size=(n, p)) @ np.linalg.cholesky(covariance).T
    raise ContractError(f"[GENERATOR] unknown scenario {scenario}")


def regression_function(model: str, X: np.ndarray) -> np.ndarray:
    """Return the noiseless response of models I-IV."""
    x1, x2 = X[:, 0], X[:, 1]
    if model == "I":
        return 0.5 * x1 + x2
    if model == "II":
        r = np.sqrt(x1**2 + x2**2)
        # r log r := 0 at r = 0
        return np.where(r > 0, r * np.log(np.where(r > 0, r, 1.0)), 0.0)
    if model == "III":
        return (x1 + x2) ** 2 / (1.0 + np.exp(x1))
    if model == "IV":
        return np.sin(np.pi * (x1 + x2) / 10.0) + x1**2
    raise ContractError(f"[GENERATOR] unknown model {model}")


def gen_model(
    model: str, scenario: str, n: int, p: int = 10, seed: int = 0, noise: bool = True
) -> Dataset:  # pylint: disable=too-many-arguments
    """Generate n rows of Y = f(X) + eps, eps ~ N(0, 0.25)."""
    if p < 2:
        raise ContractError(f"[GENERATOR] models use X1 and X2, got p={p}")
    if n < 1:
        raise ContractError(f"[GENERATOR] n must be >= 1, got {n}")
    X = sample_predictors(scenario, n, p, make_rng(seed, _STREAM_X))
    Y = regression_function(model, X)
    if noise:
        Y = Y + NOISE_STD * make_rng(seed, _STREAM_NOISE).standard_normal(n)
    logger.info(f"[GENERATOR] Model {model} scenario ({scenario}) n={n} p={p} seed={seed}")
    return Dataset(
        X=X,
        Y=Y,
        meta={"source": "simulation", "model": model, "scenario": scenario, "seed": seed},
    )


def sphere_direction(p: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a direction uniformly on the unit sphere of R^p."""
    direction = rng.standard_normal(p)
    return direction / np.linalg.norm(direction)


def gen_toy(n: int, p: int = 10, c: float = 5.0, seed: int = 0) -> Dataset:
    """Generate Y = sign(2 sin(b1'X) + e1) * log|sin(b2'X) + c + e2|."""
    beta_rng = make_rng(seed, _STREAM_BETA)
    beta_1, beta_2 = sphere_direction(p, beta_rng), sphere_direction(p, beta_rng)
    X = make_rng(seed, _STREAM_X).standard_normal(size=(n, p))
    noise = NOISE_STD * make_rng(seed, _STREAM_NOISE).standard_normal(size=(n, 2))
    sign = np.where(2.0 * np.sin(X @ beta_1) + noise[:, 0] >= 0, 1.0, -1.0)
    Y = sign * np.log(np.abs(np.sin(X @ beta_2) + c + noise[:, 1]))
    return Dataset(
        X=X,
        Y=Y,
        meta={
            "source": "toy",
            "seed": seed,
            "c": c,
            "beta_1": beta_1,
            "beta_2": beta_2,
        },
    )


def gen_dim_toy(n: int, seed: int = 0, noise: bool = True, p: int = 10) -> Dataset:
    """Generate Y = Phi(X1) + Phi(X2) eps with eps ~ N(0, 1); true d0 = 2."""
    X = make_rng(seed, _STREAM_X).standard_normal(size=(n, p))
    eps: Optional[np.ndarray] = (
        make_rng(seed, _STREAM_NOISE).standard_normal(n) if noise else np.zeros(n)
    )
    Y = ndtr(X[:, 0]) + ndtr(X[:, 1]) * eps
    return Dataset(X=X, Y=Y, meta={"source": "dim_toy", "seed": seed})
