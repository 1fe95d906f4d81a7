"""Shared fixtures of the test suite."""
import numpy as np
import pytest

from src.classes import MSRLConfig
from src.dataset.dataset import Dataset
from src.nn.mlp import MLPSpec, mlp_init
from src.objective.losses import Batch


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def small_networks():
    """R: 3 -> 2, D: (1 + 2) -> 1, Q: 2 -> 1, all with one hidden layer of 5 units."""
    R = mlp_init(MLPSpec(3, [5], 2), seed=1)
    D = mlp_init(MLPSpec(3, [5], 1), seed=2)
    Q = mlp_init(MLPSpec(2, [5], 1), seed=3)
    return R, D, Q


@pytest.fixture
def small_batch(rng):
    X = rng.standard_normal((4, 3))
    Y = rng.standard_normal((4, 1))
    U = rng.uniform(size=(4, 2))
    return Batch(X, Y=Y, U=U)


@pytest.fixture
def linear_data():
    """Y = X1 + 0.5 X2 + noise, with a train / validation split."""
    data_rng = np.random.default_rng(3)
    X = data_rng.standard_normal((120, 4))
    Y = X[:, 0] + 0.5 * X[:, 1] + 0.1 * data_rng.standard_normal(120)
    return Dataset(X[:90], Y=Y[:90]), Dataset(X[90:], Y=Y[90:])


@pytest.fixture
def tiny_config():
    return MSRLConfig(
        d0=1,
        batch_size=32,
        max_epochs=3,
        patience=3,
        restarts=2,
        r_widths=[8],
        d_widths=[8],
        q_widths=[8],
        log_every=0,
    )
