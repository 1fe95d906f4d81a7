"""Main module for the dim-select and reproduce-table3 commands."""
import argparse
from collections import Counter
from typing import List, Tuple

import pandas as pd
from tqdm import tqdm

from src.app.experiment import (
    ExperimentSpec,
    resolve_config,
    simulate_dataset,
    timestamp_line,
)
from src.config import DIM_SELECT_FULL_PRESET, DIM_SELECT_PRESET
from src.constants import EXIT_OK, EXIT_UNRELIABLE
from src.dataset.dataset import Dataset
from src.dimsel.dichotomy import DimSelectConfig, DimSelectTrace, select_dimension
from src.etl import Data
from src.utils import LOGGER as logger

TABLE3_ETAS = (0.2, 0.1)
TABLE3_N = 2000


def _dim_select_config(args: argparse.Namespace, eta: float) -> DimSelectConfig:
    full = args.preset in ("full", "dim-select-full")
    preset = {**(DIM_SELECT_FULL_PRESET if full else DIM_SELECT_PRESET), "d0": 1}
    return DimSelectConfig(
        d_upper=args.d_upper,
        eta=eta,
        n_folds=args.n_folds or 5,
        train_cfg=resolve_config(args, preset),
        critic_epochs=args.critic_epochs,
        n_jobs=args.n_jobs or 1,
    )


def _load(args: argparse.Namespace, seed: int) -> Dataset:
    if args.data:
        return Data.load_csv(
            args.data,
            args.response_cols.split(","),
            drop_constant=args.drop_constant,
            categorical=args.categorical,
            standardize=args.standardize,
        )
    args.seed = seed
    return simulate_dataset(args, args.n or TABLE3_N)


def _select_over_seeds(
    args: argparse.Namespace, eta: float, seeds: List[int]
) -> List[Tuple[int, int, DimSelectTrace]]:
    runs = []
    for seed in tqdm(seeds, desc=f"eta={eta}", disable=len(seeds) == 1):
        args.seed = seed
        cfg = _dim_select_config(args, eta)
        selected, trace = select_dimension(_load(args, seed), cfg)
        runs.append((seed, selected, trace))
    return runs


def _proportions(eta: float, runs, d_upper: int) -> List[dict]:
    counts = Counter(selected for _, selected, _ in runs)
    return [
        {"eta": eta, "d_hat": k, "proportion": counts.get(k, 0) / len(runs)}
        for k in range(1, d_upper + 1)
    ]


def _write_traces(spec: ExperimentSpec, eta: float, runs) -> None:
    for seed, selected, trace in runs:
        path = spec.path(f"trace_eta{eta}_seed{seed}.txt")
        with open(path, "w", encoding="utf-8", newline="\n") as file:
            file.write(trace.to_report())
            file.write(f"selected={selected} unreliable={trace.unreliable}\n")


def cmd_dim_select(args: argparse.Namespace) -> int:
    """Select d0 for one dataset, or over several seeds with a proportion table."""
    spec = ExperimentSpec.from_args(args)
    runs = _select_over_seeds(args, args.eta, spec.seeds)
    _write_traces(spec, args.eta, runs)
    for seed, selected, trace in runs:
        print(f"seed={seed} selected={selected}")
        print(trace.to_report(), end="")
    if len(runs) > 1:
        d_upper = runs[0][2].d_upper
        table = pd.DataFrame(_proportions(args.eta, runs, d_upper))
        Data.write_table(
            spec.path("dim_select.csv"), table, timestamp_line(args.no_timestamp)
        )
    if any(trace.unreliable for _, _, trace in runs):
        logger.warning("[MAIN DIMSEL] At least one selection is unreliable")
        return EXIT_UNRELIABLE
    return EXIT_OK


def cmd_reproduce_table3(args: argparse.Namespace) -> int:
    """Repeat the selection on the dimension toy model for each tolerance."""
    spec = ExperimentSpec.from_args(args)
    args.generator = "dim_toy"
    args.data = None
    rows = []
    unreliable = False
    for eta in TABLE3_ETAS:
        runs = _select_over_seeds(args, eta, spec.seeds)
        _write_traces(spec, eta, runs)
        rows.extend(_proportions(eta, runs, runs[0][2].d_upper))
        unreliable |= any(trace.unreliable for _, _, trace in runs)
        logger.info(
            f"[MAIN TABLE3] eta={eta}: "
            f"{Counter(selected for _, selected, _ in runs).most_common()}"
        )
    Data.write_table(
        spec.path("table3.csv"), pd.DataFrame(rows), timestamp_line(args.no_timestamp)
    )
    return EXIT_UNRELIABLE if unreliable else EXIT_OK
