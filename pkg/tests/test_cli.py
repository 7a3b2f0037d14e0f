import json
from pathlib import Path

from surgeflow.cli import EXIT_INVALID, EXIT_OK, EXIT_USAGE, run_cli

DATA_DIR = Path(__file__).resolve().parents[1] / "data"
SCENARIO = str(DATA_DIR / "scenario.json")


class TestSolve:
    def test_solve_writes_bundle_and_prints_metrics(self, tmp_path, capsys):
        rc = run_cli(["solve", "--scenario", SCENARIO, "--out", str(tmp_path)])
        assert rc == EXIT_OK
        out = capsys.readouterr().out
        assert "Overflow Reduction" in out
        for name in ("transfers.csv", "census.csv", "metrics.json", "solution.json"):
            assert (tmp_path / name).exists()
        doc = json.loads((tmp_path / "metrics.json").read_text())
        assert 0.0 <= doc["overflow_reduction"] <= 1.0

    def test_solve_then_evaluate_byte_identical_metrics(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run_cli(["solve", "--scenario", SCENARIO, "--out", str(a)]) == EXIT_OK
        assert (
            run_cli(
                [
                    "evaluate",
                    "--scenario", SCENARIO,
                    "--plan", str(a / "transfers.csv"),
                    "--out", str(b),
                ]
            )
            == EXIT_OK
        )
        assert (a / "metrics.json").read_bytes() == (b / "metrics.json").read_bytes()

    def test_repeat_solve_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run_cli(["solve", "--scenario", SCENARIO, "--out", str(a)])
        run_cli(["solve", "--scenario", SCENARIO, "--out", str(b)])
        for name in ("metrics.json", "transfers.csv", "solution.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_gamma_override_enables_robust(self, tmp_path):
        rc = run_cli(
            ["solve", "--scenario", SCENARIO, "--gamma", "2", "--out", str(tmp_path)]
        )
        assert rc == EXIT_OK
        nominal = tmp_path / "nominal"
        run_cli(["solve", "--scenario", SCENARIO, "--out", str(nominal)])
        robust = json.loads((tmp_path / "metrics.json").read_text())
        plain = json.loads((nominal / "metrics.json").read_text())
        assert robust["total_overflow"] >= plain["total_overflow"] - 1e-6


class TestExportLp:
    def test_writes_lp_file(self, tmp_path):
        rc = run_cli(["export-lp", "--scenario", SCENARIO, "--out", str(tmp_path)])
        assert rc == EXIT_OK
        text = (tmp_path / "model.lp").read_text()
        assert text.startswith("\\") or "Minimize" in text
        assert "Subject To" in text and text.rstrip().endswith("End")


class TestErrors:
    def test_unknown_flag_usage_exit(self, capsys):
        rc = run_cli(["solve", "--scenario", SCENARIO, "--frobnicate"])
        assert rc == EXIT_USAGE
        assert "unrecognized" in capsys.readouterr().err

    def test_missing_subcommand(self, capsys):
        assert run_cli([]) == EXIT_USAGE

    def test_bad_gamma_invalid_exit(self, tmp_path, capsys):
        rc = run_cli(
            ["solve", "--scenario", SCENARIO, "--gamma", "99", "--out", str(tmp_path)]
        )
        assert rc == EXIT_INVALID
        assert "gamma" in capsys.readouterr().err

    def test_missing_scenario_file(self, tmp_path, capsys):
        rc = run_cli(
            ["solve", "--scenario", str(tmp_path / "nope.json"), "--out", str(tmp_path)]
        )
        assert rc == EXIT_INVALID


class TestEvaluate:
    def test_empty_plan_gives_baseline(self, tmp_path, capsys):
        plan = tmp_path / "transfers.csv"
        plan.write_text("group,from,to,date,amount\n")
        rc = run_cli(
            ["evaluate", "--scenario", SCENARIO, "--plan", str(plan), "--out", str(tmp_path)]
        )
        assert rc == EXIT_OK
        doc = json.loads((tmp_path / "metrics.json").read_text())
        assert doc["total_overflow"] == doc["baseline_overflow"]
        assert doc["overflow_reduction"] == 0.0
