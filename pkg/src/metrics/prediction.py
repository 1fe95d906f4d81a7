"""Module for the average prediction error of a linear read-out."""
import numpy as np

from src.constants import RIDGE_FALLBACK
from src.exceptions import ContractError
from src.utils import LOGGER as logger


def _design(features: np.ndarray) -> np.ndarray:
    features = np.asarray(features, dtype=np.float64)
    if features.ndim == 1:
        features = features[:, None]
    return np.hstack([np.ones((features.shape[0], 1)), features])


def fit_linear(R_train: np.ndarray, Y_train: np.ndarray) -> np.ndarray:
    """Return OLS coefficients (intercept first); ridge 1e-8 when rank deficient."""
    design = _design(R_train)
    target = np.asarray(Y_train, dtype=np.float64).reshape(design.shape[0], -1)
    if design.shape[0] < design.shape[1]:
        raise ContractError(
            f"[APE] {design.shape[0]} rows cannot fit {design.shape[1]} coefficients"
        )
    if np.linalg.matrix_rank(design) < design.shape[1]:
        logger.warning("[APE] Rank-deficient design, falling back to ridge 1e-8")
        gram = design.T @ design + RIDGE_FALLBACK * np.eye(design.shape[1])
        return np.linalg.solve(gram, design.T @ target)
    coefficients, *_ = np.linalg.lstsq(design, target, rcond=None)
    return coefficients


def predict_linear(coefficients: np.ndarray, R: np.ndarray) -> np.ndarray:
    """Apply fitted coefficients to features."""
    return _design(R) @ coefficients


def ape_linear(
    R_train: np.ndarray, Y_train: np.ndarray, R_test: np.ndarray, Y_test: np.ndarray
) -> float:
    """Return the root-mean-square test error of an OLS fit on the training features."""
    coefficients = fit_linear(R_train, Y_train)
    predictions = predict_linear(coefficients, R_test)
    target = np.asarray(Y_test, dtype=np.float64).reshape(predictions.shape)
    return float(np.sqrt(np.mean(np.sum((target - predictions) ** 2, axis=1))))
