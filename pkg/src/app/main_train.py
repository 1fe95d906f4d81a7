"""Main module for the train, eval and mi-estimate commands."""
import argparse
from typing import Any, Dict

import numpy as np
import pandas as pd

from src import plots
from src.app.experiment import (
    ExperimentSpec,
    config_meta,
    load_splits,
    model_name,
    preset_for,
    resolve_config,
    timestamp_line,
)
from src.classes import TrainedModel
from src.config import DIM_SELECT_PRESET
from src.constants import EXIT_OK, EXIT_UNRELIABLE
from src.dataset.dataset import Dataset
from src.dimsel.dichotomy import DimSelectConfig, select_dimension
from src.etl import Data
from src.exceptions import ContractError
from src.metrics.report import MetricReport, evaluate_representation
from src.nn.serialization import load_networks, save_networks
from src.objective.categorical import categorical_mi_estimate
from src.objective.losses import mi_estimate_from_representation
from src.train.trainer import fit_critic, response_matrix, train_msrl
from src.utils import LOGGER as logger

LOG_HEADER = "# epoch mi_term push_term total val_metric\n"


def write_train_log(path: str, model: TrainedModel) -> None:
    """Write one line per epoch from the training history."""
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        file.write(LOG_HEADER)
        for record in model.history:
            file.write(f"{record}\n")
        file.write(
            f"# selected restart {model.restart_index} best epoch {model.best_epoch}\n"
        )


def _evaluate(
    R_predict, train: Dataset, test: Dataset, reference: Any, method: str = "msrl"
) -> MetricReport:
    y_train = response_matrix(train)
    y_test = response_matrix(test, train.n_classes or None)
    return evaluate_representation(
        R_predict(train.X),
        y_train,
        R_predict(test.X),
        y_test,
        method=method,
        reference=reference if isinstance(reference, str) else None,
    )


def write_report(path: str, report: MetricReport, no_timestamp: bool) -> None:
    """Write a one-row MetricReport table with per-coordinate KS columns."""
    row: Dict[str, Any] = report.to_csv_row()
    for j, value in enumerate(report.per_coordinate_ks):
        row[f"ks_{j + 1}"] = value
    Data.write_table(path, pd.DataFrame([row]), timestamp_line(no_timestamp))


def cmd_train(args: argparse.Namespace) -> int:
    """Train MSRL, then write the model file, the training log and the test report."""
    spec = ExperimentSpec.from_args(args)
    if args.d0 is None and not args.dim_select:
        raise ContractError("[MAIN TRAIN] give --d0 or --dim-select")
    train, val, test, source = load_splits(args)
    status = EXIT_OK
    if args.d0 is None:
        dim_cfg = DimSelectConfig(
            eta=args.eta,
            n_folds=args.n_folds or 5,
            train_cfg=resolve_config(args, {**DIM_SELECT_PRESET, "d0": 1}),
        )
        args.d0, trace = select_dimension(train, dim_cfg)
        logger.info(f"[MAIN TRAIN] Selected d0={args.d0}\n{trace.to_report()}")
        if trace.unreliable:
            status = EXIT_UNRELIABLE
    cfg = resolve_config(args, preset_for(args), model_name(args))
    logger.info(f"[MAIN TRAIN] {cfg}")
    model = train_msrl(train, val, cfg)
    meta = {
        "config": config_meta(cfg),
        "source": source,
        "training": model.get_info(),
        "d_x": train.d_x,
        "n_classes": train.n_classes,
    }
    save_networks(spec.path("model.json"), {"R": model.R, "D": model.D, "Q": model.Q}, meta)
    write_train_log(spec.path("train.log"), model)
    report = _evaluate(model.R.predict, train, test, cfg.reference)
    write_report(spec.path("report.csv"), report, args.no_timestamp)
    print(report)
    return status


def _load_model(path: str):
    networks, meta = load_networks(path)
    return networks["R"], networks["D"], meta


def cmd_eval(args: argparse.Namespace) -> int:
    """Evaluate a saved model on the test split and draw the diagnostic figures."""
    spec = ExperimentSpec.from_args(args)
    R, _, meta = _load_model(args.model_file)
    train, _, test, _ = load_splits(args)
    reference = meta.get("config", {}).get("reference", "uniform01")
    report = _evaluate(R.predict, train, test, reference)
    write_report(spec.path("eval_report.csv"), report, args.no_timestamp)
    r_test = R.predict(test.X)
    y_test = test.response()
    plots.plot_response_scatter(spec.path("response_scatter.svg"), r_test, y_test)
    if reference in ("uniform01", "sine_gaussian"):
        plots.plot_component_kde(spec.path("component_kde.svg"), r_test, reference)
    if r_test.shape[1] >= 2:
        plots.plot_component_pairs(spec.path("component_pairs.svg"), r_test, y_test)
    print(report)
    return EXIT_OK


def cmd_mi_estimate(args: argparse.Namespace) -> int:
    """Refit the MI critic on the training representation and estimate MI on the test rows.

    Without --model-file the predictors themselves are the representation.
    """
    spec = ExperimentSpec.from_args(args)
    train, _, test, _ = load_splits(args)
    R, D = None, None
    if args.model_file:
        R, D, _ = _load_model(args.model_file)
    d0 = train.d_x if R is None else R.spec.output_dim
    cfg = resolve_config(args, preset_for(args)).replace(
        d0=d0, max_epochs=args.critic_epochs, patience=0
    )
    D = fit_critic(train, R, cfg, D)
    r_test = test.X if R is None else R.predict(test.X)
    if test.is_categorical:
        estimate = categorical_mi_estimate(D, r_test, test.labels)
    else:
        estimate = mi_estimate_from_representation(D, test.Y, r_test)
    table = pd.DataFrame([{"mi_estimate": estimate, "n_eval": test.n, "d0": d0}])
    Data.write_table(spec.path("mi_estimate.csv"), table, timestamp_line(args.no_timestamp))
    print(f"mi_estimate={np.format_float_positional(estimate, precision=6)}")
    return EXIT_OK
