"""Module for the evaluation report of a learned representation."""
from typing import Any, Dict, List, Optional

import numpy as np

from src.metrics.dependence import distance_correlation, subsample_rows
from src.metrics.distribution import ks_uniform
from src.metrics.prediction import ape_linear
from src.utils import LOGGER as logger

CSV_COLUMNS = ["method", "dc", "ape", "ks_max", "n_eval"]


class MetricReport:
    """Class for the test-split metrics of one representation."""

    def __init__(
        self,
        dc: float,
        ape: float,
        per_coordinate_ks: Optional[List[float]] = None,
        n_eval: int = 0,
        method: str = "msrl",
    ):  # pylint: disable=too-many-arguments
        self.dc = float(dc)
        self.ape = float(ape)
        self.per_coordinate_ks = [float(k) for k in per_coordinate_ks or []]
        self.n_eval = int(n_eval)
        self.method = method

    def __str__(self):
        return f"{self.method}: DC={self.dc:.4f} APE={self.ape:.4f} KS={self.per_coordinate_ks}"

    @property
    def ks_max(self) -> float:
        """Return the largest per-coordinate KS statistic, nan when none was computed."""
        return max(self.per_coordinate_ks) if self.per_coordinate_ks else float("nan")

    def to_csv_row(self) -> Dict[str, Any]:
        """Return the row written to the result tables."""
        return {
            "method": self.method,
            "dc": self.dc,
            "ape": self.ape,
            "ks_max": self.ks_max,
            "n_eval": self.n_eval,
        }

    def get_info(self) -> Dict[str, Any]:
        """Return every field, per-coordinate KS included."""
        return {**self.to_csv_row(), "per_coordinate_ks": list(self.per_coordinate_ks)}


def evaluate_representation(
    r_train: np.ndarray,
    y_train: np.ndarray,
    r_test: np.ndarray,
    y_test: np.ndarray,
    method: str = "msrl",
    reference: Optional[str] = "uniform01",
) -> MetricReport:  # pylint: disable=too-many-arguments
    """Return DC and APE on the test rows, and KS per coordinate for a uniform reference.

    The KS check runs on values clipped to [0, 1], which leaves the statistic
    against Uniform[0, 1] unchanged.
    """
    r_test = np.asarray(r_test, dtype=np.float64)
    r_test = r_test[:, None] if r_test.ndim == 1 else r_test
    index = subsample_rows(len(r_test))
    dc = distance_correlation(np.asarray(y_test)[index], r_test[index])
    ape = ape_linear(r_train, y_train, r_test, y_test)
    ks = []
    if reference == "uniform01":
        ks = [ks_uniform(np.clip(r_test[:, j], 0.0, 1.0)) for j in range(r_test.shape[1])]
    report = MetricReport(dc, ape, ks, len(r_test), method)
    logger.info(f"[EVAL] {report}")
    return report
