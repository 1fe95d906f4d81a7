"""Module for the Dataset class and sample splitting."""
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.exceptions import ContractError
from src.utils import LOGGER as logger
from src.utils import make_rng


class Dataset:
    """Class for paired predictors X [n x d_X] and a response.
    ----
    Params:
    - X: np.ndarray
        predictor matrix
    - Y: np.ndarray, optional
        continuous response [n x d_Y] (a vector is promoted to one column)
    - labels: np.ndarray, optional
        integer class labels 0..K-1 for a categorical response
    - meta: Dict[str, Any]
        model id, scenario id, seed, column names, ...
    """

    def __init__(
        self,
        X: np.ndarray,
        Y: Optional[np.ndarray] = None,
        labels: Optional[np.ndarray] = None,
        meta: Optional[Dict[str, Any]] = None,
    ):  # pylint: disable=invalid-name
        self.X = np.asarray(X, dtype=np.float64)
        if self.X.ndim == 1:
            self.X = self.X[:, None]
        self.Y = None
        self.labels = None
        if Y is not None:
            self.Y = np.asarray(Y, dtype=np.float64)
            if self.Y.ndim == 1:
                self.Y = self.Y[:, None]
        if labels is not None:
            self.labels = np.asarray(labels, dtype=np.int64).reshape(-1)
        self.meta: Dict[str, Any] = dict(meta or {})
        self.__validate()
        if self.labels is not None:
            # subsets keep the class count of the full sample
            self.meta.setdefault("n_classes", int(self.labels.max()) + 1)

    def __str__(self):
        response = (
            f"{self.n_classes} classes" if self.is_categorical else f"d_Y={self.d_y}"
        )
        return f"Dataset n={self.n} d_X={self.d_x} {response} meta={self.meta.get('source', '-')}"  # pylint: disable=line-too-long

    def __len__(self):
        return self.n

    def __validate(self) -> None:
        """Check the invariants of the dataset."""
        if (self.Y is None) == (self.labels is None):
            raise ContractError("[DATASET] exactly one of Y or labels is required")
        rows = len(self.Y) if self.Y is not None else len(self.labels)
        if self.X.shape[0] != rows:
            raise ContractError(
                f"[DATASET] X has {self.X.shape[0]} rows, response has {rows}"
            )
        if self.X.shape[0] < 1:
            raise ContractError("[DATASET] dataset is empty")
        if np.isnan(self.X).any() or (self.Y is not None and np.isnan(self.Y).any()):
            raise ContractError("[DATASET] NaN values are not allowed")

    @property
    def n(self) -> int:
        """Return the number of rows."""
        return int(self.X.shape[0])

    @property
    def d_x(self) -> int:
        """Return the predictor dimension."""
        return int(self.X.shape[1])

    @property
    def d_y(self) -> int:
        """Return the response dimension (1 for labels)."""
        return 1 if self.Y is None else int(self.Y.shape[1])

    @property
    def is_categorical(self) -> bool:
        """Return True when the response is a label vector."""
        return self.labels is not None

    @property
    def n_classes(self) -> int:
        """Return K for a categorical response."""
        if not self.is_categorical:
            return 0
        return max(int(self.meta["n_classes"]), int(self.labels.max()) + 1)

    def response(self) -> np.ndarray:
        """Return the response as an [n x d_Y] float matrix."""
        if self.is_categorical:
            return self.labels[:, None].astype(np.float64)
        return self.Y

    def class_proportions(self) -> np.ndarray:
        """Return p_k = n_k / n for k = 0..K-1."""
        counts = np.bincount(self.labels, minlength=self.n_classes)
        return counts / self.n

    def subset(self, index: Sequence[int]) -> "Dataset":
        """Return the rows selected by `index`."""
        index = np.asarray(index, dtype=np.int64)
        return Dataset(
            X=self.X[index],
            Y=None if self.Y is None else self.Y[index],
            labels=None if self.labels is None else self.labels[index],
            meta=self.meta,
        )

    def standardized(
        self, mean: Optional[np.ndarray] = None, std: Optional[np.ndarray] = None
    ) -> Tuple["Dataset", np.ndarray, np.ndarray]:
        """Return the z-scored predictors and the (mean, std) that were used."""
        mean = self.X.mean(axis=0) if mean is None else mean
        std = self.X.std(axis=0) if std is None else std
        std = np.where(std > 0, std, 1.0)
        data = Dataset(
            X=(self.X - mean) / std, Y=self.Y, labels=self.labels, meta=self.meta
        )
        return data, mean, std

    def get_info(self) -> Dict[str, Any]:
        """Return the information of the dataset."""
        return {
            "n": self.n,
            "d_x": self.d_x,
            "d_y": self.d_y,
            "categorical": self.is_categorical,
            **{k: v for k, v in self.meta.items() if not isinstance(v, np.ndarray)},
        }


class SplitSpec:
    """Class for a split of the rows into train / validation / test or folds.
    ----
    Params:
    - counts: (train, val, test) row counts, or
    - fractions: (train, val, test) fractions summing to 1, or
    - k_folds: number of disjoint folds
    - seed: int
    """

    def __init__(
        self,
        counts: Optional[Sequence[int]] = None,
        fractions: Optional[Sequence[float]] = None,
        k_folds: Optional[int] = None,
        seed: int = 0,
    ):
        self.counts = None if counts is None else [int(c) for c in counts]
        self.fractions = None if fractions is None else [float(f) for f in fractions]
        self.k_folds = k_folds
        self.seed = seed
        given = [x is not None for x in (self.counts, self.fractions, self.k_folds)]
        if sum(given) != 1:
            raise ContractError("[SPLIT] give exactly one of counts, fractions, k_folds")
        if self.fractions is not None and (
            abs(sum(self.fractions) - 1.0) > 1e-9 or min(self.fractions) < 0
        ):
            raise ContractError(f"[SPLIT] fractions must sum to 1: {self.fractions}")
        if self.counts is not None and min(self.counts) < 0:
            raise ContractError(f"[SPLIT] counts must be non-negative: {self.counts}")
        if self.k_folds is not None and self.k_folds < 2:
            raise ContractError(f"[SPLIT] k_folds must be >= 2, got {self.k_folds}")

    def resolve_counts(self, n: int) -> List[int]:
        """Return the row count of every part for a dataset of n rows."""
        if self.counts is not None:
            if sum(self.counts) > n:
                raise ContractError(
                    f"[SPLIT] requested {sum(self.counts)} rows but only {n} available"
                )
            return list(self.counts)
        if self.fractions is not None:
            counts = [int(np.floor(f * n)) for f in self.fractions]
            counts[0] += n - sum(counts)
            return counts
        return [len(part) for part in np.array_split(np.arange(n), self.k_folds)]


def split(data: Dataset, spec: SplitSpec) -> Union[Tuple[Dataset, ...], List[Dataset]]:
    """Split by a seeded permutation followed by contiguous assignment.
    ----
    Returns:
    - (train, val, test) for counts / fractions, or
    - List[Dataset] of k folds for k_folds
    """
    order = make_rng(spec.seed).permutation(data.n)
    counts = spec.resolve_counts(data.n)
    bounds = np.cumsum([0] + counts)
    parts = [data.subset(order[lo:hi]) if hi > lo else None for lo, hi in zip(bounds[:-1], bounds[1:])]  # pylint: disable=line-too-long
    logger.info(f"[SPLIT] n={data.n} split into {counts} (seed {spec.seed})")
    if spec.k_folds is not None:
        return parts
    return tuple(parts)


def fold_indices(n: int, k_folds: int, seed: int) -> List[np.ndarray]:
    """Return the row indices of k disjoint, exhaustive folds."""
    order = make_rng(seed).permutation(n)
    return [np.sort(part) for part in np.array_split(order, k_folds)]


def split_folds(
    data: Dataset, k_folds: int, seed: int
) -> List[Tuple[Dataset, Dataset]]:
    """Return (complement, fold) pairs for k-fold cross-validation."""
    folds = fold_indices(data.n, k_folds, seed)
    pairs = []
    for t, fold in enumerate(folds):
        if len(fold) < 2:
            raise ContractError(f"[SPLIT] fold {t} has fewer than 2 rows")
        complement = np.setdiff1d(np.arange(data.n), fold)
        pairs.append((data.subset(complement), data.subset(fold)))
    return pairs


def split_real_data(
    data: Dataset, n_val: int = 3000, test_fraction: float = 0.2, seed: int = 0
) -> Tuple[Dataset, Dataset, Dataset]:
    """Hold out `test_fraction` for testing, then draw `n_val` validation rows."""
    n_test = int(round(test_fraction * data.n))
    n_val = min(n_val, (data.n - n_test) // 2)
    n_train = data.n - n_test - n_val
    return split(data, SplitSpec(counts=(n_train, n_val, n_test), seed=seed))
