"""Tests for the msrl command line."""
import os

import pandas as pd
import pytest

from src.app.experiment import Experiment, resolve_config
from src.app.main_dim_select import _dim_select_config
from src.app.main_table1 import Table1Cell
from src.config import PRESETS
from src.constants import EXIT_OK, EXIT_UNRELIABLE, EXIT_USAGE
from src.dimsel import dichotomy
from src.run import build_parser, main

TINY = [
    "--n", "300", "--p", "4", "--max-epochs", "2", "--restarts", "1",
    "--batch-size", "64", "--r-widths", "8", "--d-widths", "8", "--q-widths", "8",
    "--no-timestamp", "--quiet",
]  # fmt: skip


def _read(path):
    with open(path, "rb") as file:
        return file.read()


class TestUsageErrors:
    def test_train_without_dimension(self, tmp_path):
        assert main(["train", "--output", str(tmp_path), *TINY]) == EXIT_USAGE

    def test_eta_out_of_range(self, tmp_path):
        argv = ["train", "--output", str(tmp_path), "--dim-select", "--eta", "1.5", *TINY]
        assert main(argv) == EXIT_USAGE

    def test_missing_data_file(self, tmp_path):
        argv = ["train", "--output", str(tmp_path), "--d0", "1", "--data", "none.csv", *TINY]
        assert main(argv) == EXIT_USAGE

    def test_unknown_cell(self):
        with pytest.raises(ValueError):
            Experiment(Experiment.parse_cells("I:v"))


class TestConfigPrecedence:
    def test_flags_over_file_over_presets(self, tmp_path):
        config = tmp_path / "c.cfg"
        config.write_text("lr=0.1\nbatch_size=64\n")
        args = build_parser().parse_args(
            ["train", "--config", str(config), "--lr", "0.5", "--max-epochs", "10"]
        )
        cfg = resolve_config(args, PRESETS["desk"], "III")
        assert cfg.lr == 0.5
        assert cfg.batch_size == 64
        assert cfg.d0 == 2
        assert cfg.restarts == PRESETS["desk"]["restarts"]
        assert cfg.patience == 10

    def test_model_preset(self):
        args = build_parser().parse_args(["train"])
        cfg = resolve_config(args, PRESETS["desk"], "III")
        assert cfg.lr == pytest.approx(3e-4)

    def test_explicit_patience_is_checked(self):
        args = build_parser().parse_args(["train", "--max-epochs", "5", "--patience", "9"])
        with pytest.raises(ValueError):
            resolve_config(args, PRESETS["desk"])

    def test_sine_toy_preset(self):
        args = build_parser().parse_args(["train", "--generator", "toy", "--preset", "toy-sine"])
        cfg = resolve_config(args, PRESETS[args.preset])
        assert cfg.reference == "sine_gaussian"
        assert list(cfg.r_widths) == [64, 64, 64]
        assert cfg.es_metric == "none"

    def test_table_cell_keeps_flag_dimension(self):
        cell = {"model": "III", "scenario": "i", "d0": 2}
        flagged = Table1Cell(build_parser().parse_args(["reproduce-table1", "--d0", "3"]), cell)
        assert flagged.d0 == 3
        assert flagged.training_config(1).d0 == 3
        assert flagged.training_config(1).seed == 1
        inherited = Table1Cell(build_parser().parse_args(["reproduce-table1"]), cell)
        assert inherited.d0 == 2


class TestTrainAndEvaluate:
    def test_outputs_are_reproducible(self, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        assert main(["train", "--output", str(first), "--d0", "1", *TINY]) == EXIT_OK
        assert main(["train", "--output", str(second), "--d0", "1", *TINY]) == EXIT_OK
        for name in ("model.json", "train.log", "report.csv"):
            assert _read(first / name) == _read(second / name)
        report = pd.read_csv(first / "report.csv")
        assert list(report.columns)[:5] == ["method", "dc", "ape", "ks_max", "n_eval"]
        assert report.loc[0, "n_eval"] == 50

    def test_eval_writes_figures(self, tmp_path):
        trained = tmp_path / "train"
        main(["train", "--output", str(trained), "--d0", "2", *TINY])
        output = tmp_path / "eval"
        argv = ["eval", "--output", str(output), "--model-file", str(trained / "model.json")]
        assert main(argv + ["--n", "300", "--p", "4", "--quiet"]) == EXIT_OK
        for name in ("eval_report.csv", "response_scatter.svg", "component_kde.svg"):
            assert os.path.isfile(output / name)
        assert os.path.isfile(output / "component_pairs.svg")

    def test_mi_estimate(self, tmp_path, capsys):
        argv = ["mi-estimate", "--output", str(tmp_path), "--critic-epochs", "2", *TINY]
        assert main(argv) == EXIT_OK
        assert capsys.readouterr().out.startswith("mi_estimate=")
        assert os.path.isfile(tmp_path / "mi_estimate.csv")

    def test_simulate(self, tmp_path):
        argv = ["simulate", "--output", str(tmp_path), "--n", "50", "--file-name", "s.csv"]
        assert main(argv) == EXIT_OK
        assert pd.read_csv(tmp_path / "s.csv").shape == (50, 11)


class TestDimSelect:
    @pytest.mark.parametrize(
        "preset,epochs,restarts",
        [("desk", 500, 3), ("full", 2000, 10), ("dim-select-full", 2000, 10)],
    )
    def test_candidate_training_preset(self, preset, epochs, restarts):
        args = build_parser().parse_args(["dim-select", "--preset", preset])
        train_cfg = _dim_select_config(args, 0.2).train_cfg
        assert train_cfg.max_epochs == epochs
        assert train_cfg.restarts == restarts
        assert train_cfg.patience == 200

    def test_unreliable_exit_code(self, tmp_path, monkeypatch):
        monkeypatch.setattr(
            dichotomy, "cv_fold_estimates", lambda data, k, cfg: [-1.0] * cfg.n_folds
        )
        argv = ["dim-select", "--output", str(tmp_path), "--n", "100", "--p", "4", "--quiet"]
        assert main(argv) == EXIT_UNRELIABLE
        assert os.path.isfile(tmp_path / "trace_eta0.2_seed0.txt")

    def test_proportion_table(self, tmp_path, monkeypatch):
        monkeypatch.setattr(
            dichotomy,
            "cv_fold_estimates",
            lambda data, k, cfg: [0.5 * min(k, 2)] * cfg.n_folds,
        )
        argv = [
            "dim-select", "--output", str(tmp_path), "--generator", "dim_toy",
            "--n", "100", "--seeds", "0", "1", "--no-timestamp", "--quiet",
        ]  # fmt: skip
        assert main(argv) == EXIT_OK
        table = pd.read_csv(tmp_path / "dim_select.csv")
        assert table.loc[table["d_hat"] == 2, "proportion"].item() == 1.0


@pytest.mark.slow
class TestTable1:
    """Desk-scale runs of the simulation table with the full preset on two folds."""

    def _run(self, tmp_path, cell):
        argv = [
            "reproduce-table1", "--output", str(tmp_path), "--preset", "full",
            "--cells", cell, "--n-folds", "2", "--n-jobs", "4", "--no-timestamp", "--quiet",
        ]  # fmt: skip
        assert main(argv) == EXIT_OK
        table = pd.read_csv(tmp_path / "table1.csv").set_index("method")
        folds = pd.read_csv(tmp_path / "table1_folds.csv")
        return table, folds

    def test_model_one_scenario_one(self, tmp_path):
        table, _ = self._run(tmp_path, "I:i")
        assert table.loc["msrl", "dc_mean"] >= 0.90
        assert table.loc["msrl", "ape_mean"] <= 0.35
        assert 0.22 <= table.loc["sir", "ape_mean"] <= 0.28

    def test_model_four_scenario_two(self, tmp_path):
        table, folds = self._run(tmp_path, "IV:ii")
        assert table.loc["msrl", "dc_mean"] - table.loc["sir", "dc_mean"] >= 0.5
        assert folds.loc[folds["method"] == "msrl", "ks_max"].max() < 0.15
