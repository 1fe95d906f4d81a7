"""Module for the dichotomy cross-validation choice of the intrinsic dimension.

The interval [LD, UD] starts at [1, d_upper]. A probe at the midpoint u is
accepted when its cross-validated MI stays within a relative tolerance eta of
the current reference MI, in which case UD moves down to u; otherwise LD moves
up to u + 1. The loop ends when the interval collapses.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.classes import MSRLConfig
from src.config import DIM_SELECT_PRESET
from src.dataset.dataset import Dataset, SplitSpec, split, split_folds
from src.exceptions import ContractError
from src.objective.categorical import categorical_mi_estimate
from src.objective.losses import mi_estimate_from_representation
from src.train.trainer import fit_critic, train_msrl
from src.utils import LOGGER as logger


class DimSelectConfig:
    """Class for the settings of a dimension selection run.
    ----
    Params:
    - d_upper: int
        largest candidate dimension d_U, defaults to d_X
    - eta: float
        relative tolerance on the MI drop, in (0, 1)
    - n_folds: int
        number of cross-validation folds T
    - train_cfg: MSRLConfig
        template whose d0 is overridden per probe
    - critic_epochs: int
        extra epochs refitting D on the frozen training representation
    - val_fraction: float
        share of each training complement held out for early stopping
    """

    # pylint: disable=too-many-instance-attributes

    def __init__(
        self,
        d_upper: Optional[int] = None,
        eta: float = 0.2,
        n_folds: int = 5,
        train_cfg: Optional[MSRLConfig] = None,
        critic_epochs: int = 0,
        val_fraction: float = 0.2,
        n_jobs: int = 1,
    ):  # pylint: disable=too-many-arguments
        self.d_upper = d_upper
        self.eta = float(eta)
        self.n_folds = int(n_folds)
        self.train_cfg = train_cfg or MSRLConfig(**DIM_SELECT_PRESET)
        self.critic_epochs = int(critic_epochs)
        self.val_fraction = float(val_fraction)
        self.n_jobs = int(n_jobs)
        if not 0.0 < self.eta < 1.0:
            raise ContractError(f"[DIMSEL] eta must lie in (0, 1), got {self.eta}")
        if self.n_folds < 2:
            raise ContractError(f"[DIMSEL] n_folds must be >= 2, got {self.n_folds}")
        if not 0.0 <= self.val_fraction < 1.0:
            raise ContractError(
                f"[DIMSEL] val_fraction must lie in [0, 1), got {self.val_fraction}"
            )

    def resolve_upper(self, d_x: int) -> int:
        """Return d_upper checked against the predictor dimension."""
        d_upper = d_x if self.d_upper is None else int(self.d_upper)
        if not 1 <= d_upper <= d_x:
            raise ContractError(f"[DIMSEL] d_upper must lie in [1, {d_x}], got {d_upper}")
        return d_upper


class DimSelectTrace:
    """Class for the audit trail of one dimension selection."""

    def __init__(self, d_upper: int, eta: float):
        self.d_upper = d_upper
        self.eta = eta
        self.probes: List[Tuple[int, float]] = []
        self.fold_values: Dict[int, List[float]] = {}
        self.decisions: List[Tuple[int, bool, int, int]] = []
        self.selected: Optional[int] = None
        self.unreliable = False

    def __str__(self):
        return f"DimSelectTrace(selected={self.selected}, probes={len(self.probes)})"

    def replay(self) -> int:
        """Recompute the selection from the recorded probes."""
        if self.unreliable:
            return self.d_upper
        values = dict(self.probes)
        upper, lower = self.d_upper, 1
        reference = max(values[upper], 0.0)
        while upper != lower:
            u = (upper + lower) // 2
            value = max(values[u], 0.0)
            if abs(value - reference) / reference <= self.eta:
                upper, reference = u, value
            else:
                lower = u + 1
        return upper

    def to_report(self) -> str:
        """Return one line per probe: k, per-fold estimates and their mean."""
        lines = []
        for k, value in self.probes:
            folds = " ".join(f"{v:.6f}" for v in self.fold_values.get(k, []))
            lines.append(f"k={k} folds=[{folds}] mean={value:.6f}")
        return "\n".join(lines) + "\n"


def _fold_estimate(
    complement: Dataset, fold: Dataset, k: int, cfg: DimSelectConfig, fold_index: int
) -> float:
    """Train on the complement of a fold and return the MI estimate on the fold."""
    train_cfg = cfg.train_cfg.replace(
        d0=k, seed=cfg.train_cfg.seed + 1000 * fold_index + k
    )
    if cfg.val_fraction > 0 and train_cfg.es_metric != "none":
        n_val = max(2, int(round(cfg.val_fraction * complement.n)))
        train, val = split(
            complement,
            SplitSpec(counts=[complement.n - n_val, n_val], seed=train_cfg.seed),
        )
    else:
        train, val = complement, None
        train_cfg = train_cfg.replace(es_metric="none")
    model = train_msrl(train, val, train_cfg)
    D = model.D
    if cfg.critic_epochs > 0:
        D = fit_critic(
            train, model.R, train_cfg.replace(max_epochs=cfg.critic_epochs, patience=0), D
        )
    r = model.R.predict(fold.X)
    if fold.is_categorical:
        return categorical_mi_estimate(D, r, fold.labels)
    return mi_estimate_from_representation(D, fold.Y, r)


def cv_fold_estimates(data: Dataset, k: int, cfg: DimSelectConfig) -> List[float]:
    """Return the held-out MI estimate of each fold for output dimension k."""
    if not 1 <= k <= data.d_x:
        raise ContractError(f"[DIMSEL] k must lie in [1, {data.d_x}], got {k}")
    folds = split_folds(data, cfg.n_folds, cfg.train_cfg.seed)
    jobs = list(enumerate(folds))
    if cfg.n_jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.n_jobs) as pool:
            return list(
                pool.map(
                    lambda job: _fold_estimate(job[1][0], job[1][1], k, cfg, job[0]),
                    jobs,
                )
            )
    return [_fold_estimate(complement, fold, k, cfg, t) for t, (complement, fold) in jobs]


def cv_mi_estimate(data: Dataset, k: int, cfg: DimSelectConfig) -> float:
    """Return the fold average of held-out MI estimates for output dimension k."""
    return float(np.mean(cv_fold_estimates(data, k, cfg)))


def select_dimension(data: Dataset, cfg: DimSelectConfig) -> Tuple[int, DimSelectTrace]:
    """Run the dichotomy and return (selected dimension, trace).

    Each dimension is trained at most once. Negative estimates count as 0.
    A non-positive MI at d_upper marks the trace unreliable and returns d_upper.
    """
    d_upper = cfg.resolve_upper(data.d_x)
    trace = DimSelectTrace(d_upper, cfg.eta)
    memo: Dict[int, float] = {}

    def probe(k: int) -> float:
        if k not in memo:
            values = cv_fold_estimates(data, k, cfg)
            memo[k] = float(np.mean(values))
            trace.probes.append((k, memo[k]))
            trace.fold_values[k] = values
            logger.info(f"[DIMSEL] Probe k={k}: MI {memo[k]:.6f}")
        return max(memo[k], 0.0)

    upper, lower = d_upper, 1
    reference = probe(upper)
    if reference <= 0:
        logger.warning(
            f"[DIMSEL] MI at d_upper={upper} is not positive, selection unreliable"
        )
        trace.unreliable = True
        trace.selected = upper
        return upper, trace
    while upper != lower:
        u = (upper + lower) // 2
        value = probe(u)
        accepted = abs(value - reference) / reference <= cfg.eta
        if accepted:
            upper, reference = u, value
        else:
            lower = u + 1
        trace.decisions.append((u, accepted, upper, lower))
        logger.info(
            f"[DIMSEL] u={u} {'accepted' if accepted else 'rejected'}, "
            f"interval [{lower}, {upper}]"
        )
    trace.selected = upper
    logger.info(f"[DIMSEL] Selected d0={upper}")
    return upper, trace
