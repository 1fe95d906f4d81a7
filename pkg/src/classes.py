"""Module for classes shared by the training, selection and harness code."""
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from src.constants import LAMBDA_DEFAULT, LEAKY_SLOPE
from src.exceptions import ContractError
from src.nn.mlp import MLP

ReferenceSampler = Callable[[int, int, np.random.Generator], np.ndarray]

REFERENCES = ("uniform01", "sine_gaussian")
ES_METRICS = ("distance_correlation", "distance_covariance", "none")


class MSRLConfig:
    """Class for the hyperparameters of one MSRL training run.
    ----
    Params:
    - lam: float
        weight of the push-forward term, >= 0
    - d0: int
        output dimension of the representer
    - reference: str or callable
        "uniform01", "sine_gaussian" or a sampler (n, d0, rng) -> [n x d0]
    - loss_mode: str
        "auto", "exact" or "permuted"
    - es_metric: str
        "distance_correlation", "distance_covariance" or "none"
    """

    # pylint: disable=too-many-instance-attributes

    def __init__(
        self,
        d0: int = 1,
        lam: float = LAMBDA_DEFAULT,
        batch_size: int = 512,
        lr: float = 1e-3,
        weight_decay: float = 1e-4,
        betas: Sequence[float] = (0.9, 0.999),
        adam_eps: float = 1e-8,
        max_epochs: int = 1000,
        patience: int = 200,
        restarts: int = 10,
        seed: int = 0,
        reference: Union[str, ReferenceSampler] = "uniform01",
        loss_mode: str = "auto",
        es_metric: str = "distance_correlation",
        r_widths: Sequence[int] = (32, 16, 8),
        d_widths: Sequence[int] = (16, 8),
        q_widths: Sequence[int] = (16, 8),
        activation: str = "leaky_relu",
        leaky_slope: float = LEAKY_SLOPE,
        r_output: str = "identity",
        decoupled_weight_decay: bool = True,
        n_jobs: int = 1,
        log_every: int = 50,
    ):  # pylint: disable=too-many-arguments,too-many-locals
        self.d0 = int(d0)
        self.lam = float(lam)
        self.batch_size = int(batch_size)
        self.lr = float(lr)
        self.weight_decay = float(weight_decay)
        self.betas = tuple(float(b) for b in betas)
        self.adam_eps = float(adam_eps)
        self.max_epochs = int(max_epochs)
        self.patience = int(patience)
        self.restarts = int(restarts)
        self.seed = int(seed)
        self.reference = reference
        self.loss_mode = loss_mode
        self.es_metric = es_metric
        self.r_widths = [int(w) for w in r_widths]
        self.d_widths = [int(w) for w in d_widths]
        self.q_widths = [int(w) for w in q_widths]
        self.activation = activation
        self.leaky_slope = float(leaky_slope)
        self.r_output = r_output
        self.decoupled_weight_decay = bool(decoupled_weight_decay)
        self.n_jobs = int(n_jobs)
        self.log_every = int(log_every)
        self.__validate()

    def __str__(self):
        return (
            f"MSRLConfig(d0={self.d0}, lam={self.lam}, batch={self.batch_size}, "
            f"lr={self.lr}, wd={self.weight_decay}, epochs={self.max_epochs}, "
            f"patience={self.patience}, restarts={self.restarts}, seed={self.seed})"
        )

    def __validate(self) -> None:
        if self.lam < 0:
            raise ContractError(f"[CONFIG] lam must be >= 0, got {self.lam}")
        if self.d0 < 1:
            raise ContractError(f"[CONFIG] d0 must be >= 1, got {self.d0}")
        if self.batch_size < 2:
            raise ContractError(f"[CONFIG] batch_size must be >= 2, got {self.batch_size}")
        if self.max_epochs < 0 or self.restarts < 1:
            raise ContractError("[CONFIG] max_epochs must be >= 0 and restarts >= 1")
        if self.patience > self.max_epochs and self.max_epochs > 0:
            raise ContractError(
                f"[CONFIG] patience {self.patience} exceeds max_epochs {self.max_epochs}"
            )
        if not callable(self.reference) and self.reference not in REFERENCES:
            raise ContractError(f"[CONFIG] unknown reference {self.reference}")
        if self.loss_mode not in ("auto", "exact", "permuted"):
            raise ContractError(f"[CONFIG] unknown loss_mode {self.loss_mode}")
        if self.es_metric not in ES_METRICS:
            raise ContractError(f"[CONFIG] unknown es_metric {self.es_metric}")
        if self.r_output not in ("identity", "truncate01", "sigmoid"):
            raise ContractError(f"[CONFIG] unknown r_output {self.r_output}")
        if self.n_jobs < 1:
            raise ContractError(f"[CONFIG] n_jobs must be >= 1, got {self.n_jobs}")

    def replace(self, **changes) -> "MSRLConfig":
        """Return a copy with some fields overridden."""
        fields = self.get_info()
        fields.update(changes)
        return MSRLConfig(**fields)

    def get_info(self) -> Dict[str, Any]:
        """Return the constructor keyword arguments."""
        return {
            "d0": self.d0,
            "lam": self.lam,
            "batch_size": self.batch_size,
            "lr": self.lr,
            "weight_decay": self.weight_decay,
            "betas": self.betas,
            "adam_eps": self.adam_eps,
            "max_epochs": self.max_epochs,
            "patience": self.patience,
            "restarts": self.restarts,
            "seed": self.seed,
            "reference": self.reference,
            "loss_mode": self.loss_mode,
            "es_metric": self.es_metric,
            "r_widths": list(self.r_widths),
            "d_widths": list(self.d_widths),
            "q_widths": list(self.q_widths),
            "activation": self.activation,
            "leaky_slope": self.leaky_slope,
            "r_output": self.r_output,
            "decoupled_weight_decay": self.decoupled_weight_decay,
            "n_jobs": self.n_jobs,
            "log_every": self.log_every,
        }


class EpochRecord:
    """Class for the diagnostics of one training epoch."""

    # pylint: disable=too-few-public-methods

    def __init__(
        self,
        epoch: int,
        mi_term: float,
        push_term: float,
        total: float,
        val_metric: float,
        saturation_count: int = 0,
    ):  # pylint: disable=too-many-arguments
        self.epoch = epoch
        self.mi_term = mi_term
        self.push_term = push_term
        self.total = total
        self.val_metric = val_metric
        self.saturation_count = saturation_count

    def __str__(self):
        return (
            f"{self.epoch} {self.mi_term:.17g} {self.push_term:.17g} "
            f"{self.total:.17g} {self.val_metric:.17g}"
        )


class TrainedModel:
    """Class for the fitted networks of the selected restart and its history.
    ----
    Params:
    - R: MLP
        representer
    - D: MLP or List[MLP]
        MI critic, one critic per class for a categorical response
    - Q: MLP
        push-forward critic
    - history: List[EpochRecord]
    - best_epoch: int
        1-based epoch of the returned weights, 0 when no epoch ran
    - restart_index: int
    """

    # pylint: disable=invalid-name,too-many-instance-attributes

    def __init__(
        self,
        R: MLP,
        D: Union[MLP, List[MLP]],
        Q: MLP,
        history: List[EpochRecord],
        best_epoch: int,
        restart_index: int,
        val_metric: Optional[float] = None,
        restart_metrics: Optional[List[float]] = None,
    ):  # pylint: disable=too-many-arguments
        self.R = R
        self.D = D
        self.Q = Q
        self.history = history
        self.best_epoch = best_epoch
        self.restart_index = restart_index
        self.val_metric = val_metric
        self.restart_metrics = restart_metrics or []

    def __str__(self):
        return (
            f"TrainedModel(restart={self.restart_index}, best_epoch={self.best_epoch}, "
            f"epochs={len(self.history)}, val_metric={self.val_metric})"
        )

    @property
    def is_categorical(self) -> bool:
        """Return True when D holds one critic per class."""
        return isinstance(self.D, list)

    def transform(self, X: np.ndarray) -> np.ndarray:
        """Return R(X) for a plain predictor matrix."""
        return self.R.predict(X)

    def get_info(self) -> Dict[str, Any]:
        """Return the selection summary stored next to the networks."""
        return {
            "best_epoch": self.best_epoch,
            "restart_index": self.restart_index,
            "val_metric": self.val_metric,
            "restart_metrics": list(self.restart_metrics),
            "epochs_run": len(self.history),
        }
