import json
import math
import subprocess
import sys

import pytest

from cyclicity.cli import main, parse_polynomial, parse_space
from cyclicity.errors import ArgumentError


def run_cli(tmp_path, command, config, out="out", extra=()):
    cfg = tmp_path / f"{command}.config.json"
    cfg.write_text(json.dumps(config))
    rc = main([command, "--config", str(cfg), "--out", str(tmp_path / out), *extra])
    return rc, tmp_path / out / f"{command}.json"


class TestParsing:
    def test_space_string_form(self):
        spec = parse_space("hardy(2)")
        assert spec.d == 2

    def test_space_preset_object(self):
        spec = parse_space({"preset": "bergman", "d": 1, "maxDegree": 10})
        assert spec.max_degree == 10

    def test_space_rejects_garbage(self):
        with pytest.raises(ArgumentError):
            parse_space("hardy")

    def test_polynomial_forms(self):
        p = parse_polynomial({"coeffs1d": [1, -1]})
        assert p.degree == 1
        q = parse_polynomial([{"exponents": [1, 0], "re": 2.0, "im": -1.0}])
        assert q.d == 2


class TestCommands:
    def test_index_writes_result(self, tmp_path):
        rc, path = run_cli(
            tmp_path,
            "index",
            {"space": "hardy(1)", "function": {"coeffs1d": [1, -1]}, "n": 5},
        )
        assert rc == 0
        payload = json.loads(path.read_text())
        assert payload["schemaVersion"] == 1
        assert payload["result"]["residual"] == pytest.approx(math.sqrt(1 / 7))
        assert payload["config"]["threads"] >= 1

    def test_sweep_csv_squares_to_closed_form(self, tmp_path):
        rc, path = run_cli(
            tmp_path,
            "sweep",
            {"space": "hardy(1)", "function": {"coeffs1d": [1, -1]}, "nMax": 10},
        )
        assert rc == 0
        csv_path = path.with_suffix(".csv")
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "degree,residual,gramCondition,solveMethod"
        for row in lines[1:]:
            degree, residual, _, _ = row.split(",")
            assert float(residual) ** 2 == pytest.approx(
                1.0 / (int(degree) + 2), rel=1e-9
            )

    def test_unit_function_index(self, tmp_path):
        rc, path = run_cli(
            tmp_path,
            "index",
            {"space": "hardy(1)", "function": {"coeffs1d": [1]}, "n": 0},
        )
        assert rc == 0
        assert json.loads(path.read_text())["result"]["residual"] == pytest.approx(
            0.0, abs=1e-12
        )

    def test_capacity_empty_cloud(self, tmp_path):
        rc, path = run_cli(
            tmp_path,
            "capacity",
            {"cloud": {"kind": "points", "d": 1, "points": []}, "alpha": 0.0},
        )
        assert rc == 0
        assert json.loads(path.read_text())["result"]["capacity"] == 0.0

    def test_report_verdict(self, tmp_path):
        rc, path = run_cli(
            tmp_path,
            "report",
            {
                "space": "hardy(1)",
                "function": {"coeffs1d": [0, 1]},
                "nMax": 8,
                "alpha": 0.0,
                "seed": 1,
            },
        )
        assert rc == 0
        assert (
            json.loads(path.read_text())["result"]["verdict"] == "obstruction detected"
        )

    def test_config_round_trip_revalidates(self, tmp_path):
        config = {"space": "hardy(1)", "function": {"coeffs1d": [1, -1]}, "n": 3}
        rc, path = run_cli(tmp_path, "index", config)
        assert rc == 0
        embedded = json.loads(path.read_text())["config"]
        cfg2 = tmp_path / "again.json"
        cfg2.write_text(json.dumps(embedded))
        rc2 = main(["index", "--config", str(cfg2), "--out", str(tmp_path / "again")])
        assert rc2 == 0


class TestValidationAndExitCodes:
    def test_missing_key_exits_two(self, tmp_path):
        rc, _ = run_cli(tmp_path, "index", {"space": "hardy(1)"})
        assert rc == 2

    def test_bad_json_exits_two(self, tmp_path):
        cfg = tmp_path / "broken.json"
        cfg.write_text("{not json")
        assert main(["index", "--config", str(cfg)]) == 2

    def test_missing_file_exits_two(self, tmp_path):
        assert main(["index", "--config", str(tmp_path / "absent.json")]) == 2

    def test_seed_required_for_free_corona(self, tmp_path):
        rc, _ = run_cli(
            tmp_path,
            "corona-check",
            {"mode": "free", "d": 2, "rho": 0.9, "samples": 5, "size": 4},
        )
        assert rc == 2

    def test_schema_version_gate(self, tmp_path):
        rc, _ = run_cli(
            tmp_path,
            "index",
            {
                "schemaVersion": 99,
                "space": "hardy(1)",
                "function": {"coeffs1d": [1]},
                "n": 0,
            },
        )
        assert rc == 2

    def test_numeric_failure_exits_three(self, tmp_path, monkeypatch):
        from cyclicity.errors import NumericFailureError
        import cyclicity.cli as cli_mod

        def boom(config):
            raise NumericFailureError("synthetic")

        monkeypatch.setitem(cli_mod.COMMANDS, "index", boom)
        rc, _ = run_cli(
            tmp_path,
            "index",
            {"space": "hardy(1)", "function": {"coeffs1d": [1]}, "n": 0},
        )
        assert rc == 3


class TestDeterminism:
    def test_subprocess_runs_are_byte_identical(self, tmp_path):
        config = {
            "space": "hardy(1)",
            "function": {"coeffs1d": [1, -1]},
            "nMax": 6,
        }
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(config))
        outputs = []
        for name in ("a", "b"):
            proc = subprocess.run(
                [
                    sys.executable,
                    "-m",
                    "cyclicity",
                    "sweep",
                    "--config",
                    str(cfg),
                    "--out",
                    str(tmp_path / name),
                ],
                capture_output=True,
            )
            assert proc.returncode == 0
            outputs.append((tmp_path / name / "sweep.json").read_bytes())
        assert outputs[0] == outputs[1]
