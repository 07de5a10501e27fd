"""Tests for the command-line front end."""

import json
from pathlib import Path

import pytest

from plastiflow.cli import build_parser, main


SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"
PULL = str(SCENARIOS / "exponential_pull.cfg")

NON_CONSTANT_STRESS = """
[scenario]
nx = 32

[right]
kind = linear
amplitude = 1.0

[initial]
sigma_kind = linear
sigma_amplitude = 0.5

[run]
solver = quasistatic
dt = 0.01
t_end = 0.5

[sweep]
alphas = 0.5, 0.2
lambdas = 10.0
"""


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParser:
    def test_overrides_are_typed(self):
        args = build_parser().parse_args(["dynamic", "--scenario", PULL, "--alpha", "0.05", "--nx", "64"])
        assert args.alpha == 0.05
        assert args.nx == 64
        assert args.t_end is None

    def test_rejects_negative_alpha(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["dynamic", "--scenario", PULL, "--alpha", "-1"])

    def test_scenario_is_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["sweep"])


class TestVerifyGeometry:
    def test_interval(self, capsys):
        code, out, _ = run_cli(capsys, "verify-geometry", "--surface", "interval", "--samples", "200")
        assert code == 0
        summary = json.loads(out)
        assert summary["projection"]["valid"]
        assert summary["curvature"]["applicable"] is False
        assert len(summary["digest"]) == 12

    def test_von_mises_writes_report(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, "verify-geometry", "--surface", "von_mises", "--samples", "200",
                             "--out", str(tmp_path))
        assert code == 0
        report = json.loads((tmp_path / "geometry.json").read_text())
        assert report["curvature"]["minQuotient"] == pytest.approx(1.0, rel=1e-3)

    def test_hill_with_wrong_matrix_size(self, capsys):
        code, _, err = run_cli(capsys, "verify-geometry", "--surface", "hill", "--b", "1,0,0,1")
        assert code == 1
        assert "[error]" in err


class TestCommands:
    def test_malformed_option_is_invalid_input(self, capsys):
        code, _, err = run_cli(capsys, "dynamic", "--scenario", PULL, "--nx", "abc")
        assert code == 1
        assert "--nx" in err

    def test_unknown_command_is_invalid_input(self, capsys):
        code, _, _ = run_cli(capsys, "explode")
        assert code == 1

    def test_help_exits_zero(self, capsys):
        code, out, _ = run_cli(capsys, "--help")
        assert code == 0
        assert "plastiflow" in out

    def test_missing_scenario_file(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "dynamic", "--scenario", str(tmp_path / "nope.cfg"))
        assert code == 1
        assert "does not exist" in err

    def test_exact_writes_csv(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "exact", "--scenario", PULL, "--grid", "21", "--out", str(tmp_path))
        assert code == 0
        summary = json.loads(out)
        assert summary["kind"] == "EvolutionaryExact"
        assert summary["audit"]["valid"]
        assert (tmp_path / "exact.csv").exists()
        assert (tmp_path / "exact.json").exists()

    def test_exact_without_closed_form(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "exact", "--scenario", str(SCENARIOS / "quasistatic_ramp.cfg"),
                               "--out", str(tmp_path))
        assert code == 1
        assert "closed form" in err

    def test_dynamic_short_run(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "dynamic", "--scenario", PULL, "--nx", "32", "--t-end", "0.1",
                               "--out", str(tmp_path))
        assert code == 0
        summary = json.loads(out)
        assert summary["supDistance"] == 0.0
        for name in ("trajectory.csv", "probes.csv", "ledger.json"):
            assert (tmp_path / name).exists()

    def test_dynamic_cfl_violation_is_invalid_input(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "dynamic", "--scenario", PULL, "--nx", "32", "--dt", "0.5",
                               "--t-end", "1.0", "--out", str(tmp_path))
        assert code == 1
        assert "exceeds" in err

    def test_quasistatic(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "quasistatic", "--scenario", str(SCENARIOS / "quasistatic_ramp.cfg"),
                               "--t-end", "0.5", "--out", str(tmp_path))
        assert code == 0
        assert json.loads(out)["thetaFinal"] == pytest.approx(0.5, abs=1e-9)
        assert (tmp_path / "quasistatic.csv").exists()

    def test_stationary(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "stationary", "--scenario", str(SCENARIOS / "stationary_plastic.cfg"),
                               "--nx", "101", "--alpha", "0.5", "--out", str(tmp_path))
        assert code == 0
        assert json.loads(out)["sigmaRight"] > 1.0
        assert (tmp_path / "stationary.csv").exists()

    def test_sweep_failure_exits_two(self, capsys, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(NON_CONSTANT_STRESS)
        code, _, err = run_cli(capsys, "sweep", "--scenario", str(cfg), "--out", str(tmp_path / "run"))
        assert code == 2
        assert "constant" in err
        assert (tmp_path / "run" / "report.json").exists()
