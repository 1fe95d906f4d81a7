"""Module for reference draws and minibatch streams."""
from typing import Callable, Iterator, Union

import numpy as np

from src.autodiff.tensor import Tensor
from src.dataset.dataset import Dataset
from src.exceptions import ContractError
from src.objective.losses import Batch


def _uniform01(n: int, d0: int, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(0.0, 1.0, size=(n, d0))


def _sine_gaussian(n: int, d0: int, rng: np.random.Generator) -> np.ndarray:
    return np.sin(rng.standard_normal(size=(n, d0)))


REFERENCE_SAMPLERS = {
    "uniform01": _uniform01,
    "sine_gaussian": _sine_gaussian,
}


def sample_reference(
    n: int,
    d0: int,
    rng: np.random.Generator,
    sampler: Union[str, Callable] = "uniform01",
) -> Tensor:
    """Draw n reference rows of dimension d0 from a named law or a callback."""
    if n < 1 or d0 < 1:
        raise ContractError(f"[REFERENCE] n and d0 must be >= 1, got {n}, {d0}")
    draw = REFERENCE_SAMPLERS[sampler] if isinstance(sampler, str) else sampler
    values = np.asarray(draw(n, d0, rng), dtype=np.float64)
    if values.shape != (n, d0):
        raise ContractError(f"[REFERENCE] sampler returned shape {values.shape}")
    return Tensor(values)


def minibatch_iter(
    dataset: Dataset, U: Tensor, batch_size: int, rng: np.random.Generator
) -> Iterator[Batch]:
    """Yield one epoch of minibatches over a joint permutation of (X, Y, U).

    A trailing batch with fewer than 2 rows is dropped.
    """
    n = dataset.n
    if batch_size > n:
        raise ContractError(f"[BATCH] batch_size {batch_size} exceeds n={n}")
    if U.shape[0] != n:
        raise ContractError(f"[BATCH] U has {U.shape[0]} rows for n={n}")
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        index = order[start : start + batch_size]
        if len(index) < 2:
            break
        if dataset.is_categorical:
            yield Batch(dataset.X[index], U=U.data[index], labels=dataset.labels[index])
        else:
            yield Batch(dataset.X[index], Y=dataset.Y[index], U=U.data[index])
