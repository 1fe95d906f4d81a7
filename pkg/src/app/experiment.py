"""Module for the experiment plumbing shared by the command runners."""
import argparse
import itertools
import os
from datetime import datetime
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.classes import MSRLConfig
from src.config import MODEL_PRESETS, PRESETS
from src.constants import N_SAMPLES_SIMULATION, SPLIT_COUNTS_SIMULATION
from src.dataset.dataset import Dataset, SplitSpec, split, split_real_data
from src.dataset.generators import MODELS, SCENARIOS, gen_dim_toy, gen_model, gen_toy
from src.etl import Data
from src.exceptions import ContractError
from src.utils import LOGGER as logger

COMMANDS = (
    "simulate",
    "train",
    "eval",
    "dim-select",
    "reproduce-table1",
    "reproduce-table3",
    "mi-estimate",
)

# MSRLConfig fields settable from a config file or a flag, by parser
INT_FIELDS = ("d0", "batch_size", "max_epochs", "patience", "restarts", "seed", "n_jobs", "log_every")  # pylint: disable=line-too-long
FLOAT_FIELDS = ("lam", "lr", "weight_decay", "adam_eps", "leaky_slope")
STR_FIELDS = ("reference", "loss_mode", "es_metric", "activation", "r_output")
WIDTH_FIELDS = ("r_widths", "d_widths", "q_widths")
BOOL_FIELDS = ("decoupled_weight_decay",)


class ExperimentSpec:
    """Class for a validated command invocation.
    ----
    Params:
    - command: str
        one of COMMANDS
    - config_path: str, optional
        flat key=value file layered between the preset and the flags
    - output_dir: str
    - seeds: List[int]
    """

    def __init__(
        self,
        command: str,
        output_dir: str,
        seeds: Sequence[int],
        config_path: Optional[str] = None,
    ):
        if command not in COMMANDS:
            raise ContractError(f"[EXPERIMENT] unknown command {command}")
        self.command = command
        self.config_path = config_path
        self.output_dir = output_dir
        self.seeds = [int(s) for s in seeds]
        os.makedirs(output_dir, exist_ok=True)
        if not os.access(output_dir, os.W_OK):
            raise ContractError(f"[EXPERIMENT] output directory {output_dir} is not writable")

    def __str__(self):
        return f"{self.command} -> {self.output_dir} (seeds {self.seeds})"

    def path(self, name: str) -> str:
        """Return the path of an output file."""
        return os.path.join(self.output_dir, name)

    @staticmethod
    def from_args(args: argparse.Namespace) -> "ExperimentSpec":
        """Build the spec of a parsed command line."""
        seeds = getattr(args, "seeds", None) or [args.seed]
        return ExperimentSpec(args.command, args.output, seeds, args.config)


class Experiment:
    """Class for the grid of (model, scenario) cells of a simulation table."""

    def __init__(self, cells: Optional[Sequence[Tuple[str, str]]] = None):
        self.cells = list(cells) if cells else list(itertools.product(MODELS, SCENARIOS))
        for model, scenario in self.cells:
            if model not in MODELS or scenario not in SCENARIOS:
                raise ContractError(f"[EXPERIMENT] unknown cell {model}:{scenario}")

    @staticmethod
    def parse_cells(text: str) -> List[Tuple[str, str]]:
        """Parse "I:i,IV:ii" into [("I", "i"), ("IV", "ii")]."""
        cells = []
        for item in text.split(","):
            if ":" not in item:
                raise ContractError(f"[EXPERIMENT] cell {item} is not MODEL:SCENARIO")
            model, scenario = item.strip().split(":", 1)
            cells.append((model.strip(), scenario.strip()))
        return cells

    def get_info_combinations(self) -> List[Dict[str, Any]]:
        """Return the cells sorted by (model, scenario) position."""
        return [
            {"model": model, "scenario": scenario, "d0": MODEL_PRESETS[model]["d0"]}
            for model, scenario in sorted(
                self.cells, key=lambda c: (MODELS.index(c[0]), SCENARIOS.index(c[1]))
            )
        ]


def parse_config_values(raw: Dict[str, Any]) -> Dict[str, Any]:
    """Convert config-file strings to typed MSRLConfig keyword arguments."""
    values: Dict[str, Any] = {}
    for key, value in raw.items():
        if value is None:
            continue
        if key in INT_FIELDS:
            values[key] = int(value)
        elif key in FLOAT_FIELDS:
            values[key] = float(value)
        elif key in WIDTH_FIELDS:
            values[key] = (
                [int(w) for w in str(value).split(",") if w.strip()]
                if isinstance(value, str)
                else [int(w) for w in value]
            )
        elif key in BOOL_FIELDS:
            values[key] = str(value).lower() in ("1", "true", "yes")
        elif key in STR_FIELDS:
            values[key] = str(value)
    return values


def resolve_config(
    args: argparse.Namespace, preset: Dict[str, Any], model: Optional[str] = None
) -> MSRLConfig:
    """Layer preset < model preset < config file < flags into an MSRLConfig.

    When max_epochs drops below an inherited patience, patience follows it.
    """
    layered: Dict[str, Any] = dict(preset)
    if model is not None:
        layered.update(MODEL_PRESETS[model])
    explicit = set()
    if getattr(args, "config", None):
        raw = Data.read_config_file(args.config)
        from_file = parse_config_values(raw)
        unknown = set(raw) - set(from_file)
        if unknown:
            logger.warning(f"[CONFIG] Ignoring unknown keys {sorted(unknown)}")
        layered.update(from_file)
        explicit |= set(from_file)
    fields = INT_FIELDS + FLOAT_FIELDS + STR_FIELDS + WIDTH_FIELDS + BOOL_FIELDS
    from_flags = parse_config_values({f: getattr(args, f, None) for f in fields})
    layered.update(from_flags)
    explicit |= set(from_flags)
    if "patience" not in explicit and "max_epochs" in layered:
        layered["patience"] = min(layered.get("patience", 200), layered["max_epochs"])
    return MSRLConfig(**layered)


def config_meta(cfg: MSRLConfig) -> Dict[str, Any]:
    """Return the config as JSON-friendly values."""
    info = cfg.get_info()
    if callable(info["reference"]):
        info["reference"] = getattr(info["reference"], "__name__", "custom")
    info["betas"] = list(info["betas"])
    return info


def json_meta(meta: Dict[str, Any]) -> Dict[str, Any]:
    """Return dataset metadata with arrays converted to lists."""
    return {
        key: value.tolist() if isinstance(value, np.ndarray) else value
        for key, value in meta.items()
    }


def timestamp_line(no_timestamp: bool) -> Optional[str]:
    """Return the header line of result tables, None when suppressed."""
    return None if no_timestamp else f"generated {datetime.now().isoformat(timespec='seconds')}"  # pylint: disable=line-too-long


def simulate_dataset(args: argparse.Namespace, n: Optional[int] = None) -> Dataset:
    """Generate the dataset selected by --generator, --model, --scenario, --p."""
    n = n or args.n or N_SAMPLES_SIMULATION
    if args.generator == "toy":
        return gen_toy(n, p=args.p, c=args.c, seed=args.seed)
    if args.generator == "dim_toy":
        return gen_dim_toy(n, seed=args.seed, noise=not args.noise_off, p=args.p)
    return gen_model(
        args.model, args.scenario, n, p=args.p, seed=args.seed, noise=not args.noise_off
    )


def load_splits(
    args: argparse.Namespace,
) -> Tuple[Dataset, Dataset, Dataset, Dict[str, Any]]:
    """Return (train, val, test, source meta) for a csv file or a simulation.

    Simulations split n rows into 4000 / 1000 / 1000 (scaled to n). Csv data
    uses the real-data split and, when asked, z-scores X with training moments.
    """
    if getattr(args, "data", None):
        data = Data.load_csv(
            args.data,
            args.response_cols.split(","),
            drop_constant=args.drop_constant,
            categorical=args.categorical,
        )
        train, val, test = split_real_data(data, n_val=args.n_val, seed=args.seed)
        source = {"source": "csv", "path": args.data, "seed": args.seed}
        if args.standardize:
            train, mean, std = train.standardized()
            val, _, _ = val.standardized(mean, std)
            test, _, _ = test.standardized(mean, std)
            source.update({"x_mean": mean.tolist(), "x_std": std.tolist()})
        return train, val, test, source
    data = simulate_dataset(args)
    counts = np.array(SPLIT_COUNTS_SIMULATION) * data.n // sum(SPLIT_COUNTS_SIMULATION)
    counts[0] += data.n - counts.sum()
    train, val, test = split(data, SplitSpec(counts=counts.tolist(), seed=args.seed))
    return train, val, test, json_meta(data.meta)


def model_name(args: argparse.Namespace) -> Optional[str]:
    """Return the simulation model whose preset applies, None for other data."""
    if getattr(args, "data", None) or getattr(args, "generator", "model") != "model":
        return None
    return args.model


def preset_for(args: argparse.Namespace) -> Dict[str, Any]:
    """Return the named preset of --preset."""
    if args.preset not in PRESETS:
        raise ContractError(f"[CONFIG] unknown preset {args.preset}")
    return PRESETS[args.preset]
