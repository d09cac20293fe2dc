"""Tests for the CLI module."""

import csv
import json

import pytest
from typer.testing import CliRunner

from dilution_gt import cli
from dilution_gt.cli import app, parse_items
from dilution_gt.config import ConfigManager
from dilution_gt.errors import UsageError
from dilution_gt.formatter import parse_matrix, read_outcomes


def json_payload(output: str) -> dict:
    """The JSON object printed last on stdout."""
    return json.loads(output[output.index("{") :])


@pytest.fixture(autouse=True)
def isolated_config(temp_config_file, monkeypatch):
    """Point every command at a throwaway config file."""
    monkeypatch.setattr(cli, "ConfigManager", lambda: ConfigManager(temp_config_file))
    return temp_config_file


class TestParseItems:
    def test_comma_list(self):
        assert parse_items("3,7, 11") == [3, 7, 11]
        assert parse_items(None) is None

    def test_invalid(self):
        with pytest.raises(UsageError):
            parse_items("3,x")


class TestCLICommands:
    """Test cases for CLI commands."""

    def setup_method(self):
        """Set up test fixtures."""
        self.runner = CliRunner()

    def test_plan_single(self):
        result = self.runner.invoke(app, ["plan", "--n-items", str(2**33), "--d", "1"])
        assert result.exit_code == 0
        data = json_payload(result.output)
        assert data["c"] == 236
        assert data["K"] == 15576
        assert data["h"] == 1

    def test_plan_case(self):
        result = self.runner.invoke(app, ["plan", "--d", "16", "--case", "5"])
        assert result.exit_code == 0
        data = json_payload(result.output)
        assert (data["q"], data["n"], data["r"]) == (2048, 31, 3)
        assert data["t"] == 2_099_294_208

    def test_plan_error(self):
        result = self.runner.invoke(app, ["plan", "--n-items", "1000"])
        assert result.exit_code == 1
        assert "power of 2" in result.output

    def test_plan_partial_rs(self):
        result = self.runner.invoke(app, ["plan", "--d", "2", "--q", "4"])
        assert result.exit_code == 1

    def test_verify_disjunct(self, temp_dir):
        emit = temp_dir / "g.txt"
        result = self.runner.invoke(
            app, ["verify-disjunct", "--q", "4", "--n", "3", "--r", "2", "--emit", str(emit)]
        )
        assert result.exit_code == 0
        assert "2-disjunct" in result.output
        matrix = parse_matrix(emit.read_text())
        assert matrix.shape == (12, 16)

    def test_verify_disjunct_failure(self):
        result = self.runner.invoke(
            app, ["verify-disjunct", "--q", "4", "--n", "3", "--r", "2", "--d", "3"]
        )
        assert result.exit_code == 1
        assert "not 3-disjunct" in result.output

    def test_verify_disjunct_budget(self):
        result = self.runner.invoke(
            app, ["verify-disjunct", "--q", "8", "--n", "7", "--r", "3", "--budget", "100"]
        )
        assert result.exit_code == 1
        assert "too large" in result.output

    def test_gen_matrix(self, temp_dir):
        out = temp_dir / "t.txt"
        result = self.runner.invoke(
            app,
            ["gen-matrix", "--d", "3", "--q", "4", "--n", "3", "--r", "2", "--c", "2", "-o", str(out)],
        )
        assert result.exit_code == 0
        assert parse_matrix(out.read_text()).shape == (12 * 8 * 2, 16)

    def test_gen_matrix_budget(self):
        result = self.runner.invoke(app, ["gen-matrix", "--n-items", str(2**20), "--c", "1"])
        assert result.exit_code == 1
        assert "too large" in result.output

    def test_simulate_and_decode(self, temp_dir):
        out = temp_dir / "y.bin"
        rs = ["--d", "3", "--q", "4", "--n", "3", "--r", "2"]
        result = self.runner.invoke(
            app, ["simulate", *rs, "--defectives", "2,7,11", "--seed", "1", "--out", str(out)]
        )
        assert result.exit_code == 0
        assert read_outcomes(out).layout == (12, 8, 296)

        result = self.runner.invoke(app, ["decode", str(out), *rs])
        assert result.exit_code == 0
        assert set(json_payload(result.output)["defectives"]) >= {2, 7, 11}

    def test_simulate_needs_one_truth_source(self, temp_dir):
        out = temp_dir / "y.bin"
        result = self.runner.invoke(app, ["simulate", "--n-items", "1024", "--out", str(out)])
        assert result.exit_code == 1
        assert not out.exists()

    def test_simulate_random_defectives(self, temp_dir):
        out = temp_dir / "y.bin"
        args = ["simulate", "--n-items", "1024", "--random-defectives", "1", "--theta0", "0", "--theta1", "0"]
        result = self.runner.invoke(app, [*args, "--out", str(out)])
        assert result.exit_code == 0
        decoded = self.runner.invoke(app, ["decode", str(out), "--n-items", "1024"])
        assert len(json_payload(decoded.output)["defectives"]) == 1

    def test_decode_missing_file(self, temp_dir):
        result = self.runner.invoke(app, ["decode", str(temp_dir / "nope.bin"), "--n-items", "8"])
        assert result.exit_code == 1
        assert "not found" in result.output

    def test_decode_bad_file(self, temp_dir):
        bad = temp_dir / "bad.bin"
        bad.write_bytes(b"garbage")
        result = self.runner.invoke(app, ["decode", str(bad), "--n-items", "8"])
        assert result.exit_code == 1

    def test_experiment_count_sweep(self, temp_dir):
        out = temp_dir / "counts.csv"
        result = self.runner.invoke(app, ["experiment", "--sweep", "tests-d1", "--out", str(out)])
        assert result.exit_code == 0
        assert json_payload(result.stdout)["max_K"] == 15576
        with open(out, newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert len(rows) == 20
        assert list(rows[0])[:3] == ["n_items", "d", "delta"]

    def test_experiment_accuracy(self, temp_dir):
        out = temp_dir / "trials.csv"
        args = ["experiment", "--sweep", "accuracy", "--n-items", "1024", "--d", "1"]
        result = self.runner.invoke(app, [*args, "--delta", "0.01", "--trials", "3", "--out", str(out)])
        assert result.exit_code == 0
        summary = json_payload(result.stdout)
        assert summary["trials"] == 3
        with open(out, newline="") as handle:
            assert len(list(csv.DictReader(handle))) == 3

    def test_experiment_budget_refusal(self):
        self.runner.invoke(app, ["config", "--sim-budget", "1000"])
        result = self.runner.invoke(app, ["experiment", "--sweep", "accuracy", "--trials", "1"])
        assert result.exit_code == 1
        assert "too large" in result.output

    def test_decode_infers_items_from_header(self, temp_dir):
        out = temp_dir / "y.bin"
        args = ["simulate", "--n-items", "1024", "--defectives", "700", "--theta0", "0", "--theta1", "0"]
        assert self.runner.invoke(app, [*args, "--out", str(out)]).exit_code == 0
        decoded = self.runner.invoke(app, ["decode", str(out)])
        assert decoded.exit_code == 0
        assert json_payload(decoded.output)["defectives"] == [700]

    def test_simulate_negative_seed(self, temp_dir):
        out = temp_dir / "y.bin"
        args = ["simulate", "--n-items", "1024", "--defectives", "5", "--seed", "-1"]
        result = self.runner.invoke(app, [*args, "--out", str(out)])
        assert result.exit_code == 1
        assert "non-negative" in result.output
        assert "Traceback" not in result.output
        assert not isinstance(result.exception, ValueError)

    def test_experiment_negative_seed(self):
        result = self.runner.invoke(app, ["experiment", "--sweep", "tests-d1", "--seed", "-2"])
        assert result.exit_code == 1
        assert "non-negative" in result.output

    def test_experiment_grid_sizing_only(self, temp_dir):
        out = temp_dir / "grid.csv"
        self.runner.invoke(app, ["config", "--sim-budget", "1000"])
        args = ["experiment", "--sweep", "accuracy", "--grid", "--case", "1", "--d", "3"]
        result = self.runner.invoke(app, [*args, "--out", str(out)])
        assert result.exit_code == 0
        summary = json_payload(result.stdout)
        assert summary["points"] == 2
        assert summary["simulated"] == 0
        with open(out, newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert "simulated" in rows[0]
        assert {row["theta0"] for row in rows} == {"0.002", "0.2"}

    def test_experiment_unknown_sweep(self):
        result = self.runner.invoke(app, ["experiment", "--sweep", "figures"])
        assert result.exit_code == 1

    def test_config_command_show(self):
        result = self.runner.invoke(app, ["config", "--show"])
        assert result.exit_code == 0
        assert "Current Configuration" in result.output
        assert "sim_budget" in result.output

    def test_config_command_update(self, isolated_config):
        result = self.runner.invoke(app, ["config", "--theta0", "0.05", "--workers", "2", "--strict"])
        assert result.exit_code == 0
        assert "Configuration updated" in result.output
        data = json.loads(isolated_config.read_text())
        assert data["theta0"] == 0.05
        assert data["workers"] == 2
        assert data["strict"] is True

    def test_config_command_invalid(self):
        result = self.runner.invoke(app, ["config", "--delta", "3"])
        assert result.exit_code == 1

    def test_config_command_no_changes(self):
        result = self.runner.invoke(app, ["config"])
        assert result.exit_code == 0
        assert "No configuration changes" in result.output

    def test_verbose_flag(self):
        result = self.runner.invoke(app, ["--verbose", "plan", "--n-items", "1024"])
        assert result.exit_code == 0

    def test_help(self):
        result = self.runner.invoke(app, ["--help"])
        assert result.exit_code == 0
        for command in ("plan", "verify-disjunct", "gen-matrix", "simulate", "decode", "experiment"):
            assert command in result.output
