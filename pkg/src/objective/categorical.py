"""Module for the categorical-response MI objective."""
from typing import List, Sequence

import numpy as np

from src.autodiff.tensor import Tensor, concat, exp
from src.constants import EXP_CLAMP
from src.exceptions import ContractError
from src.nn.mlp import MLP
from src.objective.losses import Batch
from src.utils import LOGGER as logger


def categorical_dual(D_vec: Sequence[MLP], r: Tensor, labels: np.ndarray, p_hat: np.ndarray) -> Tensor:  # pylint: disable=line-too-long
    """Return sum_k p_k { mean_{Y_i=k} D_k(r_i) - mean_i exp D_k(r_i) }.

    A class absent from the batch keeps its exponential term and skips its
    positive term.
    """
    if len(D_vec) != len(p_hat):
        raise ContractError(
            f"[CATEGORICAL] {len(D_vec)} critics for {len(p_hat)} class weights"
        )
    total = None
    saturated = 0
    for k, critic in enumerate(D_vec):
        scores = critic(r)
        product = exp(scores)
        saturated += product.saturated
        term = -product.mean()
        mask = (labels == k).astype(np.float64)[:, None]
        n_k = int(mask.sum())
        if n_k > 0:
            term = (scores * mask).sum() * (1.0 / n_k) + term
        else:
            logger.debug(f"[CATEGORICAL] Class {k} absent from the batch")
        term = term * float(p_hat[k])
        total = term if total is None else total + term
    total.saturated = saturated
    return total


def categorical_mi_loss(
    D_vec: List[MLP], R: MLP, batch: Batch, p_hat: np.ndarray
) -> Tensor:
    """Return the categorical dual for the representation R(X) of a batch."""
    if batch.labels is None:
        raise ContractError("[CATEGORICAL] batch has no labels")
    return categorical_dual(D_vec, R(batch.X), batch.labels, np.asarray(p_hat))


def categorical_mi_loss_onehot(
    D_vec: List[MLP], R: MLP, batch: Batch, p_hat: np.ndarray
) -> Tensor:
    """Return the single-network form (1/n) sum D(R(X_i))'Y~_i - (1/n) sum p' exp D(R(X_i)).

    Agrees with `categorical_mi_loss` when p_hat holds the batch proportions.
    """
    r = R(batch.X)
    scores = concat([critic(r) for critic in D_vec], axis=1)
    onehot = np.eye(len(D_vec))[batch.labels]
    weights = np.asarray(p_hat, dtype=np.float64)[None, :]
    return (scores * onehot).sum(axis=1).mean() - (exp(scores) * weights).sum(axis=1).mean()  # pylint: disable=line-too-long


def categorical_mi_estimate(D_vec: Sequence[MLP], r: np.ndarray, labels: np.ndarray) -> float:
    """Return sum_k p_k KL(P_{r|Y=k} || P_r) estimated with trained critics."""
    p_hat = np.bincount(labels, minlength=len(D_vec)) / len(labels)
    estimate = 0.0
    for k, critic in enumerate(D_vec):
        scores = critic.predict(r)[:, 0]
        members = labels == k
        if members.any():
            product = np.exp(np.minimum(scores, EXP_CLAMP)).mean()
            estimate += p_hat[k] * (scores[members].mean() - product + 1.0)
    return float(estimate)
