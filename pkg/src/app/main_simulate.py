"""Main module for the simulate command."""
import argparse

from src.app.experiment import ExperimentSpec, simulate_dataset
from src.constants import EXIT_OK
from src.etl import Data
from src.utils import LOGGER as logger


def cmd_simulate(args: argparse.Namespace) -> int:
    """Write one simulated dataset as csv."""
    spec = ExperimentSpec.from_args(args)
    data = simulate_dataset(args)
    path = spec.path(args.file_name or f"{args.generator}_{args.model}_{args.scenario}_{args.seed}.csv")  # pylint: disable=line-too-long
    Data.write_dataset(path, data)
    logger.info(f"[MAIN SIMULATE] {data} written to {path}")
    return EXIT_OK
