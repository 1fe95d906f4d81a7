"""Module for the alternating adversarial training of the representer and critics.

Per minibatch the critics D and Q take one Adam ascent step with the
representation held fixed, then R takes one Adam descent step on
lam * push - mi with the critics held fixed. Each epoch ends with the
validation metric that drives early stopping.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from src.autodiff.tensor import Tensor, backward
from src.classes import EpochRecord, MSRLConfig, TrainedModel
from src.dataset.dataset import Dataset
from src.exceptions import ContractError, DivergenceError
from src.metrics.dependence import (
    distance_correlation,
    distance_covariance,
    subsample_rows,
)
from src.nn.mlp import MLP, MLPSpec, mlp_init
from src.objective.categorical import categorical_dual
from src.objective.losses import (
    Batch,
    mi_dual,
    mi_dual_permuted,
    push_dual,
    resolve_mode,
    sample_derangement,
)
from src.train.adam import AdamState, adam_step
from src.train.sampling import minibatch_iter, sample_reference
from src.utils import LOGGER as logger
from src.utils import make_rng

Critic = Union[MLP, List[MLP]]

# stream keys under make_rng(seed, restart, key)
_KEY_INIT = 0
_KEY_REFERENCE = 1
_KEY_BATCHES = 2
_KEY_DERANGEMENT = 3


def _critics(D: Critic) -> List[MLP]:
    return D if isinstance(D, list) else [D]


def _params(nets: Sequence[MLP]) -> List[Tensor]:
    return [p for net in nets for p in net.parameters()]


def _grads(params: Sequence[Tensor]) -> List[np.ndarray]:
    return [np.zeros_like(p.data) if p.grad is None else p.grad for p in params]


def _zero_grad(params: Sequence[Tensor]) -> None:
    for param in params:
        param.zero_grad()


def response_matrix(data: Dataset, n_classes: Optional[int] = None) -> np.ndarray:
    """Return Y, or the one-hot labels of a categorical response."""
    if data.is_categorical:
        return np.eye(n_classes or data.n_classes)[data.labels]
    return data.Y


def build_networks(
    d_x: int, d_y: int, cfg: MSRLConfig, restart: int = 0, n_classes: int = 0
) -> Tuple[MLP, Critic, MLP]:
    """Initialize R, D (one critic per class when n_classes > 0) and Q."""
    rng = make_rng(cfg.seed, restart, _KEY_INIT)
    seeds = rng.integers(0, 2**32, size=3 + n_classes)
    r_spec = MLPSpec(
        d_x, cfg.r_widths, cfg.d0, cfg.activation, cfg.r_output, cfg.leaky_slope
    )
    q_spec = MLPSpec(cfg.d0, cfg.q_widths, 1, cfg.activation, "identity", cfg.leaky_slope)
    R = mlp_init(r_spec, int(seeds[0]))
    Q = mlp_init(q_spec, int(seeds[2]))
    if n_classes:
        d_spec = MLPSpec(
            cfg.d0, cfg.d_widths, 1, cfg.activation, "identity", cfg.leaky_slope
        )
        D = [mlp_init(d_spec, int(s)) for s in seeds[3:]]
    else:
        d_spec = MLPSpec(
            d_y + cfg.d0, cfg.d_widths, 1, cfg.activation, "identity", cfg.leaky_slope
        )
        D = mlp_init(d_spec, int(seeds[1]))
    return R, D, Q


def _mi_term(
    D: Critic,
    batch: Batch,
    r: Tensor,
    mode: str,
    sigma: Optional[np.ndarray],
    p_hat: Optional[np.ndarray],
) -> Tensor:  # pylint: disable=too-many-arguments
    if isinstance(D, list):
        return categorical_dual(D, r, batch.labels, p_hat)
    if mode == "exact":
        return mi_dual(D, batch.Y, r)
    return mi_dual_permuted(D, batch.Y, r, sigma)


def _check_finite(value: float, what: str) -> None:
    if not np.isfinite(value):
        raise DivergenceError(f"[TRAIN] non-finite {what}")


class _RestartRun:
    """Class for the state of one restart: networks, Adam moments and streams."""

    # pylint: disable=too-many-instance-attributes,invalid-name

    def __init__(self, train: Dataset, cfg: MSRLConfig, restart: int):
        self.cfg = cfg
        self.train = train
        self.restart = restart
        self.n_classes = train.n_classes if train.is_categorical else 0
        self.p_hat = train.class_proportions() if self.n_classes else None
        d_y = 0 if self.n_classes else train.d_y
        self.R, self.D, self.Q = build_networks(
            train.d_x, d_y, cfg, restart, self.n_classes
        )
        self.critic_params = _params(_critics(self.D)) + self.Q.parameters()
        self.r_params = self.R.parameters()
        self.critic_state = AdamState(self.critic_params)
        self.r_state = AdamState(self.r_params)
        self.U = sample_reference(
            train.n, cfg.d0, make_rng(cfg.seed, restart, _KEY_REFERENCE), cfg.reference
        )
        self.batch_rng = make_rng(cfg.seed, restart, _KEY_BATCHES)
        self.sigma_rng = make_rng(cfg.seed, restart, _KEY_DERANGEMENT)

    def _adam(self, params, state, direction: str) -> None:
        adam_step(
            params,
            _grads(params),
            state,
            lr=self.cfg.lr,
            wd=self.cfg.weight_decay,
            direction=direction,
            betas=self.cfg.betas,
            eps=self.cfg.adam_eps,
            decoupled=self.cfg.decoupled_weight_decay,
        )

    def step(self, batch: Batch) -> Tuple[float, float, float, int]:
        """Run the critic ascent then the representer descent on one minibatch."""
        mode = resolve_mode(self.cfg.loss_mode, batch.m)
        sigma = sample_derangement(batch.m, self.sigma_rng) if mode == "permuted" else None
        # critics ascend with R fixed
        r_fixed = Tensor(self.R.predict(batch.X.data))
        mi_fixed = _mi_term(self.D, batch, r_fixed, mode, sigma, self.p_hat)
        critic_value = mi_fixed + push_dual(self.Q, r_fixed, batch.U)
        _check_finite(critic_value.item(), "critic objective")
        _zero_grad(self.critic_params)
        backward(critic_value)
        self._adam(self.critic_params, self.critic_state, "ascend")
        # representer descends with D and Q fixed
        r = self.R(batch.X)
        mi_term = _mi_term(self.D, batch, r, mode, sigma, self.p_hat)
        push_term = push_dual(self.Q, r, batch.U)
        total = push_term * self.cfg.lam - mi_term
        _check_finite(total.item(), "representer objective")
        _zero_grad(self.r_params)
        backward(total)
        self._adam(self.r_params, self.r_state, "descend")
        _zero_grad(self.critic_params)
        saturated = mi_term.saturated + push_term.saturated
        return mi_term.item(), push_term.item(), total.item(), saturated

    def epoch(self, number: int) -> EpochRecord:
        """Run one pass over the training rows and average the batch diagnostics."""
        values = []
        saturated = 0
        for batch in minibatch_iter(self.train, self.U, self.cfg.batch_size, self.batch_rng):
            mi_term, push_term, total, count = self.step(batch)
            values.append((mi_term, push_term, total))
            saturated += count
        if not self.R.is_finite():
            raise DivergenceError("[TRAIN] non-finite representer weights")
        mi_term, push_term, total = np.mean(values, axis=0)
        return EpochRecord(number, mi_term, push_term, total, np.nan, saturated)

    def snapshot(self) -> Tuple[MLP, Critic, MLP]:
        """Return copies of the current networks."""
        D = [c.copy() for c in self.D] if isinstance(self.D, list) else self.D.copy()
        return self.R.copy(), D, self.Q.copy()


def validation_metric(
    R: MLP, val: Dataset, es_metric: str, n_classes: Optional[int] = None
) -> float:
    """Return dCor or dCov between the validation response and R(X_val).

    Validation sets above the evaluation cap are subsampled with a fixed seed.
    """
    index = subsample_rows(val.n)
    response = response_matrix(val, n_classes)[index]
    representation = R.predict(val.X[index])
    if es_metric == "distance_covariance":
        return distance_covariance(response, representation)
    return distance_correlation(response, representation)


def _train_restart(
    train: Dataset, val: Optional[Dataset], cfg: MSRLConfig, restart: int
) -> Optional[Tuple[float, TrainedModel]]:
    """Train one restart; return (selection score, model) or None on divergence."""
    run = _RestartRun(train, cfg, restart)
    history: List[EpochRecord] = []
    best = run.snapshot()
    best_metric = -np.inf
    best_epoch = 0
    waited = 0
    try:
        for number in range(1, cfg.max_epochs + 1):
            record = run.epoch(number)
            if cfg.es_metric != "none":
                record.val_metric = validation_metric(
                    run.R, val, cfg.es_metric, run.n_classes or None
                )
            history.append(record)
            if cfg.log_every and number % cfg.log_every == 0:
                logger.info(f"[TRAIN] Restart {restart} epoch {number}: {record}")
            if cfg.es_metric == "none":
                continue
            if record.val_metric > best_metric:
                best_metric, best_epoch, waited = record.val_metric, number, 0
                best = run.snapshot()
            else:
                waited += 1
                if waited >= cfg.patience:
                    logger.info(
                        f"[TRAIN] Restart {restart} stopped at epoch {number}, "
                        f"best epoch {best_epoch}"
                    )
                    break
    except DivergenceError as error:
        logger.warning(f"[TRAIN] Restart {restart} diverged: {error}")
        return None
    if cfg.es_metric == "none" and history:
        best = run.snapshot()
        best_epoch = len(history)
        best_metric = -history[-1].total
    R, D, Q = best
    model = TrainedModel(
        R,
        D,
        Q,
        history,
        best_epoch,
        restart,
        val_metric=None if best_epoch == 0 else float(best_metric),
    )
    return best_metric, model


def train_msrl(
    train: Dataset, val: Optional[Dataset], cfg: MSRLConfig
) -> TrainedModel:
    """Train `cfg.restarts` independent restarts and return the best one.
    ----
    Params:
    - train: Dataset
        training rows, continuous response or labels
    - val: Dataset
        validation rows, required unless cfg.es_metric is "none"
    - cfg: MSRLConfig
    ----
    Returns:
    - TrainedModel
        restart with the largest validation metric (lowest final objective
        without early stopping); ties go to the lower restart index
    """
    if train.n < 2:
        raise ContractError(f"[TRAIN] training set needs >= 2 rows, got {train.n}")
    if cfg.es_metric != "none" and (val is None or val.n < 2):
        raise ContractError("[TRAIN] early stopping needs a validation set with >= 2 rows")
    if cfg.batch_size > train.n:
        logger.warning(
            f"[TRAIN] batch_size {cfg.batch_size} exceeds n={train.n}, using n"
        )
        cfg = cfg.replace(batch_size=train.n)
    logger.info(f"[TRAIN] {cfg} on {train}")
    restarts = range(cfg.restarts)
    if cfg.n_jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.n_jobs) as pool:
            results = list(
                pool.map(lambda restart: _train_restart(train, val, cfg, restart), restarts)
            )
    else:
        results = [
            _train_restart(train, val, cfg, restart)
            for restart in tqdm(restarts, desc="restarts", disable=cfg.restarts == 1)
        ]
    finished = [result for result in results if result is not None]
    if not finished:
        raise DivergenceError(f"[TRAIN] all {cfg.restarts} restarts diverged")
    scores = [score for score, _ in finished]
    _, model = finished[int(np.argmax(scores))]
    model.restart_metrics = [
        float("nan") if result is None else float(result[0]) for result in results
    ]
    logger.info(f"[TRAIN] Selected {model}")
    return model


def fit_critic(
    data: Dataset,
    R: Optional[MLP],
    cfg: MSRLConfig,
    D: Optional[Critic] = None,
) -> Critic:
    """Train only the MI critic against a frozen representation.

    `R` may be None when `data.X` already holds the representation. A given
    `D` is copied and trained further; otherwise a fresh critic is drawn.
    """
    if data.n < 2:
        raise ContractError(f"[CRITIC] fitting a critic needs n >= 2, got {data.n}")
    representation = data.X if R is None else R.predict(data.X)
    d0 = representation.shape[1]
    rep_data = Dataset(representation, Y=data.Y, labels=data.labels, meta=data.meta)
    n_classes = data.n_classes if data.is_categorical else 0
    cfg = cfg.replace(d0=d0, batch_size=min(cfg.batch_size, data.n))
    if D is None:
        _, D, _ = build_networks(d0, 0 if n_classes else data.d_y, cfg, 0, n_classes)
    else:
        D = [c.copy() for c in D] if isinstance(D, list) else D.copy()
    params = _params(_critics(D))
    state = AdamState(params)
    p_hat = data.class_proportions() if n_classes else None
    batch_rng = make_rng(cfg.seed, _KEY_BATCHES)
    sigma_rng = make_rng(cfg.seed, _KEY_DERANGEMENT)
    dummy_u = Tensor(np.zeros((data.n, 1)))
    for epoch in range(1, cfg.max_epochs + 1):
        for batch in minibatch_iter(rep_data, dummy_u, cfg.batch_size, batch_rng):
            mode = resolve_mode(cfg.loss_mode, batch.m)
            sigma = sample_derangement(batch.m, sigma_rng) if mode == "permuted" else None
            value = _mi_term(D, batch, batch.X, mode, sigma, p_hat)
            _check_finite(value.item(), "critic objective")
            _zero_grad(params)
            backward(value)
            adam_step(
                params,
                _grads(params),
                state,
                lr=cfg.lr,
                wd=cfg.weight_decay,
                direction="ascend",
                betas=cfg.betas,
                eps=cfg.adam_eps,
                decoupled=cfg.decoupled_weight_decay,
            )
        if cfg.log_every and epoch % cfg.log_every == 0:
            logger.info(f"[CRITIC] Epoch {epoch}: dual {value.item():.6f}")
    return D
