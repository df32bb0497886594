import json
from pathlib import Path

import pytest

from duelopt.cli import main


def _read_summary(outdir: Path) -> bytes:
    return (outdir / "summary.csv").read_bytes()


class TestCoeffs:
    def test_cauchit_fit_table(self, tmp_path, capsys):
        code = main(["--output", str(tmp_path), "--deterministic", "coeffs",
                     "--link", "cauchit", "--gap-bound", "1", "--tau", "0.5",
                     "--tol", "1e-8"])
        out = capsys.readouterr().out
        assert code == 0
        assert "sup_residual" in out
        assert "c[1] =" in out
        rows = [json.loads(line) for line in
                (tmp_path / "report.jsonl").read_text().splitlines()]
        checks = [r for r in rows if r["record"] == "check"]
        resid = next(r for r in checks if r["check_name"].endswith("sup-residual"))
        assert resid["pass"] is True
        assert resid["estimate"] <= 1e-8

    def test_fit_failure_exit_code(self, tmp_path, capsys):
        code = main(["--output", str(tmp_path), "coeffs", "--link", "cauchit",
                     "--gap-bound", "1", "--tau", "0.5", "--tol", "1e-15",
                     "--max-terms", "8"])
        assert code == 1


class TestEstimateGap:
    def test_small_run(self, tmp_path):
        code = main(["--output", str(tmp_path), "--seed", "3", "--deterministic",
                     "estimate-gap", "--link", "logistic", "--tau", "0.5",
                     "--gap-bound", "1", "--gap", "0.4", "--replicates", "50000"])
        assert code == 0
        summary = (tmp_path / "summary.csv").read_text()
        assert "estimate-gap" in summary
        assert "FAIL" not in summary

    def test_gap_outside_bound_is_config_error(self, tmp_path):
        code = main(["--output", str(tmp_path), "estimate-gap", "--gap", "5",
                     "--gap-bound", "1"])
        assert code == 2


class TestVerifyCommand:
    def test_core_suite_small(self, tmp_path):
        code = main(["--output", str(tmp_path), "--seed", "7", "--deterministic",
                     "verify", "--suite", "core", "--replicates", "30000"])
        assert code == 0
        rows = [json.loads(line) for line in
                (tmp_path / "report.jsonl").read_text().splitlines()]
        checks = [r for r in rows if r["record"] == "check"]
        assert len(checks) >= 30
        assert all(r["pass"] for r in checks)
        assert {r["provenance"] for r in checks} <= {"closed-form", "mc-oracle"}

    def test_deterministic_reports_identical(self, tmp_path):
        args = ["--seed", "7", "--deterministic", "verify", "--suite", "core",
                "--replicates", "20000"]
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["--output", str(out1)] + args) == 0
        assert main(["--output", str(out2)] + args) == 0
        assert _read_summary(out1) == _read_summary(out2)
        assert (out1 / "report.jsonl").read_bytes() == (out2 / "report.jsonl").read_bytes()

    def test_worker_count_does_not_change_bytes(self, tmp_path):
        base = ["--seed", "11", "--deterministic", "verify", "--suite", "core",
                "--replicates", "20000"]
        out1, out4 = tmp_path / "w1", tmp_path / "w4"
        assert main(["--output", str(out1), "--workers", "1"] + base) == 0
        assert main(["--output", str(out4), "--workers", "4"] + base) == 0
        assert _read_summary(out1) == _read_summary(out4)


class TestConfigFile:
    def test_config_drives_command(self, tmp_path):
        cfg = tmp_path / "exp.json"
        cfg.write_text(json.dumps({
            "schema_version": 1,
            "command": "estimate-gap",
            "link": "logistic",
            "tau": 0.5,
            "gap_bound": 1.0,
            "gap": 0.25,
            "replicates": 20000,
            "seed": 5,
            "deterministic": True,
            "output": str(tmp_path / "rep"),
        }))
        assert main(["--config", str(cfg)]) == 0
        assert (tmp_path / "rep" / "summary.csv").exists()

    def test_unknown_key_is_hard_error(self, tmp_path):
        cfg = tmp_path / "exp.json"
        cfg.write_text(json.dumps({"command": "verify", "turbo": True}))
        assert main(["--config", str(cfg)]) == 2

    def test_bad_schema_version(self, tmp_path):
        cfg = tmp_path / "exp.json"
        cfg.write_text(json.dumps({"command": "verify", "schema_version": 99}))
        assert main(["--config", str(cfg)]) == 2

    def test_flag_overrides_config(self, tmp_path):
        cfg = tmp_path / "exp.json"
        cfg.write_text(json.dumps({
            "command": "estimate-gap", "gap": 0.25, "gap_bound": 1.0,
            "replicates": 10000, "output": str(tmp_path / "rep"),
        }))
        # the flag forces an invalid gap; config said a valid one
        assert main(["--config", str(cfg), "estimate-gap", "--gap", "3"]) == 2


class TestOptimizeCommand:
    def test_short_run(self, tmp_path):
        code = main(["--output", str(tmp_path), "--seed", "3", "--deterministic",
                     "optimize", "--objective", "abs1d", "--delta", "0.1",
                     "--epsilon", "0.5", "--T", "300",
                     "--variance-constant", "1.3"])
        assert code == 0
        report = json.loads((tmp_path / "run_report.json").read_text())
        assert report["iterations"] == 300
        assert report["config"]["estimator_path"] == "logistic"
        trace = (tmp_path / "trace.csv").read_text().splitlines()
        assert trace[0] == "t,x0"
        assert len(trace) == 301  # header + every step at this length

    def test_invalid_beta_is_validity_error(self, tmp_path):
        code = main(["--output", str(tmp_path), "optimize", "--objective", "abs1d",
                     "--delta", "0.1", "--epsilon", "0.5", "--T", "10",
                     "--beta", "0.5", "--variance-constant", "1.3"])
        assert code == 1  # beta below alpha: validity guard trips
