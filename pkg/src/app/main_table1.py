"""Main module for the reproduce-table1 command."""
import argparse
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List

import numpy as np
import pandas as pd
from tqdm import tqdm

from src import plots
from src.app.experiment import (
    Experiment,
    ExperimentSpec,
    preset_for,
    resolve_config,
    timestamp_line,
)
from src.baselines.sliced import METHODS, select_slices
from src.constants import EXIT_OK, N_FOLDS_DESK, N_FOLDS_FULL, N_SAMPLES_SIMULATION, SLICE_CANDIDATES  # pylint: disable=line-too-long
from src.dataset.dataset import SplitSpec, split, split_folds
from src.dataset.generators import gen_model
from src.etl import Data
from src.metrics.report import evaluate_representation
from src.train.trainer import train_msrl
from src.utils import LOGGER as logger

TABLE1_COLUMNS = ["model", "scenario", "method", "dc_mean", "dc_se", "ape_mean", "ape_se"]


def _summary(values: List[float]):
    values = np.asarray(values, dtype=np.float64)
    se = values.std(ddof=1) / np.sqrt(len(values)) if len(values) > 1 else 0.0
    return float(values.mean()), float(se)


class Table1Cell:
    """Class for the fold evaluation of every method on one (model, scenario) cell."""

    def __init__(self, args: argparse.Namespace, cell: Dict[str, Any]):
        self.args = args
        self.model = cell["model"]
        self.scenario = cell["scenario"]
        # model preset d0 sits below the config file and flags
        self.cfg = resolve_config(args, preset_for(args), self.model)
        self.d0 = self.cfg.d0
        self.n_folds = N_FOLDS_FULL
        self.n_eval = args.n_folds or (N_FOLDS_FULL if args.preset == "full" else N_FOLDS_DESK)  # pylint: disable=line-too-long
        self.methods = args.methods.split(",")

    def training_config(self, fold: int):
        """Return the MSRL config of one fold, seeded by the fold index."""
        return self.cfg.replace(seed=self.args.seed + fold)

    def run(self) -> List[Dict[str, Any]]:
        """Return one row per (fold, method)."""
        data = gen_model(
            self.model,
            self.scenario,
            self.args.n or N_SAMPLES_SIMULATION,
            p=self.args.p,
            seed=self.args.seed,
        )
        rows = []
        folds = split_folds(data, self.n_folds, self.args.seed)[: self.n_eval]
        for t, (rest, test) in enumerate(folds):
            n_val = rest.n // 5
            train, val = split(
                rest, SplitSpec(counts=[rest.n - n_val, n_val], seed=self.args.seed + t)
            )
            for method in self.methods:
                report = self.__evaluate(method, train, val, test, t)
                rows.append(
                    {"model": self.model, "scenario": self.scenario, "fold": t, **report.to_csv_row()}  # pylint: disable=line-too-long
                )
        return rows

    def __evaluate(self, method, train, val, test, fold: int):
        if method == "msrl":
            cfg = self.training_config(fold)
            fitted = train_msrl(train, val, cfg)
            transform = fitted.R.predict
            reference = cfg.reference
        elif method in METHODS:
            n_slices = select_slices(
                train.X, train.Y, self.d0, SLICE_CANDIDATES, val, method=method
            )
            transform = METHODS[method](train.X, train.Y, self.d0, n_slices).transform
            reference = None
        else:
            raise ValueError(f"[MAIN TABLE1] unknown method {method}")
        logger.info(f"[MAIN TABLE1] Model {self.model} ({self.scenario}) fold {fold} {method}")
        return evaluate_representation(
            transform(train.X),
            train.Y,
            transform(test.X),
            test.Y,
            method=method,
            reference=reference if isinstance(reference, str) else None,
        )


def summarize(rows: List[Dict[str, Any]]) -> pd.DataFrame:
    """Aggregate fold rows into mean and standard error per (model, scenario, method)."""
    summary = []
    df = pd.DataFrame(rows)
    for (model, scenario, method), group in df.groupby(
        ["model", "scenario", "method"], sort=False
    ):
        dc_mean, dc_se = _summary(group["dc"])
        ape_mean, ape_se = _summary(group["ape"])
        summary.append(
            {
                "model": model,
                "scenario": scenario,
                "method": method,
                "dc_mean": dc_mean,
                "dc_se": dc_se,
                "ape_mean": ape_mean,
                "ape_se": ape_se,
            }
        )
    return pd.DataFrame(summary, columns=TABLE1_COLUMNS)


def cmd_reproduce_table1(args: argparse.Namespace) -> int:
    """Run MSRL, SIR and SAVE over the selected cells and write the table."""
    spec = ExperimentSpec.from_args(args)
    experiment = Experiment(Experiment.parse_cells(args.cells) if args.cells else None)
    n_jobs_cells = args.n_jobs or 1
    # restarts inside a cell stay sequential when cells fan out
    if n_jobs_cells > 1:
        args.n_jobs = 1
    cells = [Table1Cell(args, cell) for cell in experiment.get_info_combinations()]
    if n_jobs_cells > 1:
        with ThreadPoolExecutor(max_workers=n_jobs_cells) as pool:
            results = list(pool.map(lambda cell: cell.run(), cells))
    else:
        results = [cell.run() for cell in tqdm(cells, desc="cells")]
    rows = [row for result in results for row in result]
    header = timestamp_line(args.no_timestamp)
    Data.write_table(spec.path("table1_folds.csv"), pd.DataFrame(rows), header)
    table = summarize(rows)
    Data.write_table(spec.path("table1.csv"), table, header)
    for (model, scenario), group in table.groupby(["model", "scenario"], sort=False):
        plots.plot_table_cell(
            spec.path(f"table1_{model}_{scenario}.svg"), group.to_dict("records")
        )
    print(table.to_string(index=False))
    return EXIT_OK
