"""Main module of the msrl command line."""
import argparse
import sys
from typing import Callable, Dict, List, Optional

from src.app.main_dim_select import cmd_dim_select, cmd_reproduce_table3
from src.app.main_simulate import cmd_simulate
from src.app.main_table1 import cmd_reproduce_table1
from src.app.main_train import cmd_eval, cmd_mi_estimate, cmd_train
from src.config import PRESETS
from src.constants import EXIT_DIVERGENCE, EXIT_USAGE, PATH_RESULTS
from src.dataset.generators import MODELS, SCENARIOS
from src.exceptions import DivergenceError, MSRLError
from src.utils import LOGGER as logger
from src.utils import set_verbosity

HANDLERS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "simulate": cmd_simulate,
    "train": cmd_train,
    "eval": cmd_eval,
    "dim-select": cmd_dim_select,
    "reproduce-table1": cmd_reproduce_table1,
    "reproduce-table3": cmd_reproduce_table3,
    "mi-estimate": cmd_mi_estimate,
}


def _widths(text: str) -> List[int]:
    return [int(w) for w in text.split(",") if w.strip()]


def _add_common(parser: argparse.ArgumentParser, output: str) -> None:
    parser.add_argument("--config", help="flat key=value file between preset and flags")
    parser.add_argument("--output", default=PATH_RESULTS + output, help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--preset", default="desk", choices=sorted(PRESETS))
    parser.add_argument("--no-timestamp", action="store_true", help="omit the date line in tables")  # pylint: disable=line-too-long
    parser.add_argument("--quiet", action="store_true", help="log warnings only")


def _add_data(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("data")
    group.add_argument("--data", help="csv file; simulate when omitted")
    group.add_argument("--response-cols", default="y", help="comma-separated response columns")
    group.add_argument("--categorical", action="store_true", help="integer class labels")
    group.add_argument("--drop-constant", action="store_true")
    group.add_argument(
        "--standardize",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="z-score csv predictors with training moments",
    )
    group.add_argument("--n-val", type=int, default=3000, help="validation rows of csv data")
    group.add_argument("--generator", default="model", choices=("model", "toy", "dim_toy"))
    group.add_argument("--model", default="I", choices=MODELS)
    group.add_argument("--scenario", default="i", choices=SCENARIOS)
    group.add_argument("--n", type=int, help="simulated rows")
    group.add_argument("--p", type=int, default=10, help="predictor dimension")
    group.add_argument("--c", type=float, default=5.0, help="toy model shift")
    group.add_argument("--noise-off", action="store_true")


def _add_training(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("training (overrides preset and config file)")
    group.add_argument("--d0", type=int)
    group.add_argument("--lam", type=float)
    group.add_argument("--batch-size", type=int)
    group.add_argument("--lr", type=float)
    group.add_argument("--weight-decay", type=float)
    group.add_argument("--max-epochs", type=int)
    group.add_argument("--patience", type=int)
    group.add_argument("--restarts", type=int)
    group.add_argument("--reference", choices=("uniform01", "sine_gaussian"))
    group.add_argument("--loss-mode", choices=("auto", "exact", "permuted"))
    group.add_argument("--es-metric", choices=("distance_correlation", "distance_covariance", "none"))  # pylint: disable=line-too-long
    group.add_argument("--r-widths", type=_widths)
    group.add_argument("--d-widths", type=_widths)
    group.add_argument("--q-widths", type=_widths)
    group.add_argument("--r-output", choices=("identity", "truncate01", "sigmoid"))
    group.add_argument("--n-jobs", type=int)
    group.add_argument("--log-every", type=int)


def _add_dimsel(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("dimension selection")
    group.add_argument("--eta", type=float, default=0.2)
    group.add_argument("--n-folds", type=int)
    group.add_argument("--d-upper", type=int)
    group.add_argument("--critic-epochs", type=int, default=0)
    group.add_argument("--seeds", type=int, nargs="+", help="repeat over seeds")


def build_parser() -> argparse.ArgumentParser:
    """Return the parser of every command."""
    parser = argparse.ArgumentParser(
        prog="msrl", description="Mutual-information sufficient representation learning"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="write a simulated dataset")
    _add_common(simulate, "simulations")
    _add_data(simulate)
    simulate.add_argument("--file-name")

    train = commands.add_parser("train", help="train and evaluate MSRL")
    _add_common(train, "train")
    _add_data(train)
    _add_training(train)
    _add_dimsel(train)
    train.add_argument("--dim-select", action="store_true", help="select d0 first")

    evaluate = commands.add_parser("eval", help="evaluate a model file")
    _add_common(evaluate, "eval")
    _add_data(evaluate)
    evaluate.add_argument("--model-file", required=True)

    dim_select = commands.add_parser("dim-select", help="select the intrinsic dimension")
    _add_common(dim_select, "dim_select")
    _add_data(dim_select)
    _add_training(dim_select)
    _add_dimsel(dim_select)

    table1 = commands.add_parser("reproduce-table1", help="MSRL, SIR and SAVE per cell")
    _add_common(table1, "table1")
    _add_training(table1)
    table1.add_argument("--cells", default="I:i", help='"MODEL:SCENARIO,...", all when empty')
    table1.add_argument("--methods", default="msrl,sir,save")
    table1.add_argument("--n", type=int, help="simulated rows per cell")
    table1.add_argument("--p", type=int, default=10)
    table1.add_argument("--n-folds", type=int, help="folds evaluated out of six")

    table3 = commands.add_parser("reproduce-table3", help="dimension selection frequencies")
    _add_common(table3, "table3")
    _add_data(table3)
    _add_training(table3)
    _add_dimsel(table3)

    mi_estimate = commands.add_parser("mi-estimate", help="refit a critic and estimate MI")
    _add_common(mi_estimate, "mi_estimate")
    _add_data(mi_estimate)
    _add_training(mi_estimate)
    mi_estimate.add_argument("--model-file")
    mi_estimate.add_argument("--critic-epochs", type=int, default=200)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    set_verbosity(not args.quiet)
    try:
        return HANDLERS[args.command](args)
    except DivergenceError as error:
        logger.error(f"[MAIN] Training diverged: {error}")
        return EXIT_DIVERGENCE
    except (MSRLError, ValueError, FileNotFoundError) as error:
        logger.error(f"[MAIN] {error}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
