"""Module for the empirical MSRL losses and the plug-in MI estimate.

Sign convention: the critics D and Q ascend `mi_loss` and `push_loss`; the
representer R descends `total = lam * push_loss - mi_loss`.
"""
from typing import Optional

import numpy as np

from src.autodiff.tensor import Tensor, as_tensor, concat, exp, take_rows
from src.constants import DERANGEMENT_RETRIES, EXACT_U_STAT_MAX_BATCH, EXP_CLAMP, MI_CHUNK_ROWS  # pylint: disable=line-too-long
from src.exceptions import ContractError
from src.nn.mlp import MLP
from src.utils import LOGGER as logger

LOSS_MODES = ("auto", "exact", "permuted")


class Batch:
    """Class for a minibatch of (X, Y or labels, U) rows."""

    def __init__(
        self,
        X: np.ndarray,
        Y: Optional[np.ndarray] = None,
        U: Optional[np.ndarray] = None,
        labels: Optional[np.ndarray] = None,
    ):  # pylint: disable=invalid-name
        self.X = Tensor(X)
        self.Y = None if Y is None else Tensor(np.asarray(Y).reshape(len(X), -1))
        self.U = None if U is None else Tensor(U)
        self.labels = None if labels is None else np.asarray(labels, dtype=np.int64)
        rows = [len(X)] + [
            len(part.data if isinstance(part, Tensor) else part)
            for part in (self.Y, self.U, self.labels)
            if part is not None
        ]
        if len(set(rows)) != 1:
            raise ContractError(f"[BATCH] row counts disagree: {rows}")

    def __len__(self):
        return self.X.shape[0]

    @property
    def m(self) -> int:
        """Return the number of rows."""
        return self.X.shape[0]


class LossReport:
    """Class for the value of the MSRL objective on one batch."""

    def __init__(
        self,
        mi_term: float,
        push_term: float,
        lam: float,
        saturation_count: int = 0,
        loss: Optional[Tensor] = None,
    ):  # pylint: disable=too-many-arguments
        self.mi_term = float(mi_term)
        self.push_term = float(push_term)
        self.total = lam * self.push_term - self.mi_term
        self.saturation_count = int(saturation_count)
        self.loss = loss

    def __str__(self):
        return (
            f"mi={self.mi_term:.6f} push={self.push_term:.6f} "
            f"total={self.total:.6f} saturated={self.saturation_count}"
        )


def resolve_mode(mode: str, m: int) -> str:
    """Map "auto" to exact for m <= 128 and permuted beyond."""
    if mode not in LOSS_MODES:
        raise ContractError(f"[LOSS] unknown mode {mode}")
    if mode == "auto":
        return "exact" if m <= EXACT_U_STAT_MAX_BATCH else "permuted"
    return mode


def sample_derangement(m: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a permutation without fixed points (cycle shift after 20 rejections)."""
    for _ in range(DERANGEMENT_RETRIES):
        sigma = rng.permutation(m)
        if not np.any(sigma == np.arange(m)):
            return sigma
    return (np.arange(m) + 1) % m


def _joint_input(y: Tensor, r: Tensor) -> Tensor:
    return concat([y, r], axis=1)


def mi_dual(D: MLP, y: Tensor, r: Tensor) -> Tensor:
    """Return the U-statistic dual on a response block y and representation r."""
    m = y.shape[0]
    if m < 2:
        raise ContractError(f"[LOSS] the U-statistic needs m >= 2, got {m}")
    joint = D(_joint_input(y, r)).mean()
    rows, cols = np.nonzero(~np.eye(m, dtype=bool))
    cross = D(_joint_input(take_rows(y, rows), take_rows(r, cols)))
    product = exp(cross)
    out = joint - product.mean()
    out.saturated = product.saturated
    return out


def mi_dual_permuted(D: MLP, y: Tensor, r: Tensor, sigma: np.ndarray) -> Tensor:
    """Return the dual with the product term estimated on pairs (y_j, r_sigma(j))."""
    m = y.shape[0]
    if m < 2:
        raise ContractError(f"[LOSS] the permuted surrogate needs m >= 2, got {m}")
    joint = D(_joint_input(y, r)).mean()
    product = exp(D(_joint_input(y, take_rows(r, sigma))))
    out = joint - product.mean()
    out.saturated = product.saturated
    return out


def push_dual(Q: MLP, r: Tensor, U: Tensor) -> Tensor:
    """Return mean Q(r) - mean exp(Q(U))."""
    reference = exp(Q(U))
    out = Q(r).mean() - reference.mean()
    out.saturated = reference.saturated
    return out


def mi_loss(D: MLP, R: MLP, batch: Batch) -> Tensor:
    """Return (1/m) sum D(Y_i, R(X_i)) - 1/(m(m-1)) sum_{i!=j} exp D(Y_i, R(X_j))."""
    if batch.Y is None:
        raise ContractError("[LOSS] mi_loss needs a continuous response")
    return mi_dual(D, batch.Y, R(batch.X))


def mi_loss_permuted(
    D: MLP,
    R: MLP,
    batch: Batch,
    rng: Optional[np.random.Generator] = None,
    sigma: Optional[np.ndarray] = None,
) -> Tensor:
    """Return the permuted-sample surrogate of `mi_loss`.

    A fresh derangement is drawn from `rng` on every call unless `sigma` is given.
    """
    if batch.Y is None:
        raise ContractError("[LOSS] mi_loss_permuted needs a continuous response")
    if sigma is None:
        if rng is None:
            raise ContractError("[LOSS] give either rng or sigma")
        sigma = sample_derangement(batch.m, rng)
    return mi_dual_permuted(D, batch.Y, R(batch.X), sigma)


def push_loss(Q: MLP, R: MLP, batch: Batch) -> Tensor:
    """Return (1/m) sum Q(R(X_i)) - (1/m) sum exp Q(U_i)."""
    if batch.U is None:
        raise ContractError("[LOSS] push_loss needs reference draws U")
    if batch.m < 1:
        raise ContractError("[LOSS] push_loss needs a non-empty batch")
    return push_dual(Q, R(batch.X), batch.U)


def msrl_objective(
    R: MLP,
    D: MLP,
    Q: MLP,
    lam: float,
    batch: Batch,
    mode: str = "auto",
    rng: Optional[np.random.Generator] = None,
    sigma: Optional[np.ndarray] = None,
) -> LossReport:  # pylint: disable=too-many-arguments
    """Return lam * push_loss - mi_loss with the current critics.

    The representation is computed once and shared by both terms, so the
    returned `loss` tensor back-propagates into R, D and Q together.
    """
    if lam < 0:
        raise ContractError(f"[LOSS] lambda must be >= 0, got {lam}")
    if batch.Y is None or batch.U is None:
        raise ContractError("[LOSS] the objective needs Y and U")
    r = R(batch.X)
    if resolve_mode(mode, batch.m) == "exact":
        mi_term = mi_dual(D, batch.Y, r)
    else:
        if sigma is None:
            if rng is None:
                raise ContractError("[LOSS] permuted mode needs rng or sigma")
            sigma = sample_derangement(batch.m, rng)
        mi_term = mi_dual_permuted(D, batch.Y, r, sigma)
    push_term = push_dual(Q, r, batch.U)
    total = push_term * lam - mi_term
    return LossReport(
        mi_term=mi_term.item(),
        push_term=push_term.item(),
        lam=lam,
        saturation_count=mi_term.saturated + push_term.saturated,
        loss=total,
    )


def mi_estimate_from_representation(D: MLP, Y: np.ndarray, r: np.ndarray) -> float:
    """Return the exact U-statistic dual plus one, evaluated in row blocks."""
    Y = np.asarray(Y, dtype=np.float64).reshape(len(r), -1)
    r = np.asarray(r, dtype=np.float64)
    n = len(r)
    if n < 2:
        raise ContractError(f"[MI] the estimate needs n >= 2, got {n}")
    joint = D.predict(np.hstack([Y, r])).mean()
    cross_sum = 0.0
    diagonal_sum = 0.0
    for start in range(0, n, MI_CHUNK_ROWS):
        stop = min(start + MI_CHUNK_ROWS, n)
        block = stop - start
        pairs = np.hstack(
            [np.repeat(Y[start:stop], n, axis=0), np.tile(r, (block, 1))]
        )
        values = np.exp(np.minimum(D.predict(pairs), EXP_CLAMP)).reshape(block, n)
        cross_sum += values.sum()
        diagonal_sum += values[np.arange(block), np.arange(start, stop)].sum()
    product = (cross_sum - diagonal_sum) / (n * (n - 1))
    return float(joint - product + 1.0)


def mi_estimate(D: MLP, R: Optional[MLP], data) -> float:
    """Return the plug-in KL mutual information estimate on a dataset or fold.

    `R` may be None when `data.X` already holds the representation.
    """
    r = data.X if R is None else R.predict(data.X)
    estimate = mi_estimate_from_representation(D, data.response(), r)
    logger.info(f"[MI] Estimate {estimate:.6f} on n={data.n}")
    return estimate
