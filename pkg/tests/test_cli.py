import csv
import json

import pytest

from fdmafl.cli import main
from fdmafl.model import SystemConfig, generate_scenario, scenario_to_text


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSolve:
    def test_csv_output_shape(self, capsys):
        code, out, err = run(capsys, "solve", "--seed", "7", "--config", "/dev/null")
        assert code == 0 and err == ""
        rows = list(csv.DictReader(out.splitlines()))
        assert len(rows) == 50
        assert float(rows[0]["objective"]) > 0

    def test_byte_identical_runs(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        small = tmp_path / "small.cfg"
        small.write_text("num_devices = 4\n")
        for path in (a, b):
            assert main(
                ["solve", "--seed", "7", "--config", str(small), "--out", str(path)]
            ) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_json_format(self, capsys, tmp_path):
        small = tmp_path / "small.cfg"
        small.write_text("num_devices = 3\n")
        code, out, _ = run(
            capsys, "solve", "--seed", "1", "--config", str(small), "--format", "json"
        )
        assert code == 0
        payload = json.loads(out)
        assert len(payload["power_w"]) == 3
        assert payload["converged"] is True

    def test_scenario_file_input(self, capsys, tmp_path):
        sc = generate_scenario(SystemConfig(num_devices=2, rng_seed=3))
        path = tmp_path / "scenario.txt"
        path.write_text(scenario_to_text(sc))
        code, out, _ = run(capsys, "solve", "--scenario", str(path))
        assert code == 0
        assert len(out.splitlines()) == 3

    def test_infeasible_total_time_exits_2(self, capsys, tmp_path):
        small = tmp_path / "small.cfg"
        small.write_text("num_devices = 3\n")
        code, _, err = run(
            capsys, "solve", "--seed", "1", "--config", str(small), "--total-time", "0.001"
        )
        assert code == 2
        assert "infeasible" in err

    def test_malformed_config_exits_1(self, capsys, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("what is this\n")
        code, _, err = run(capsys, "solve", "--config", str(bad))
        assert code == 1
        assert "error" in err

    def test_unknown_config_key_exits_1(self, capsys, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("volume = 11\n")
        code, _, err = run(capsys, "solve", "--config", str(bad))
        assert code == 1
        assert "volume" in err


class TestSweep:
    def test_spec_file_to_csv(self, capsys, tmp_path):
        spec = tmp_path / "spec.cfg"
        spec.write_text(
            "axis = p_max_dbm\nvalues = 12\nrepetitions = 1\n"
            "weight_pairs = 0.5:0.5\nnum_devices = 3\n"
        )
        code, out, _ = run(capsys, "sweep", "--config", str(spec))
        assert code == 0
        rows = list(csv.DictReader(out.splitlines()))
        assert {r["series"] for r in rows} == {"w1=0.5", "benchmark_a", "benchmark_b"}
        assert all(r["axis"] == "p_max_dbm" for r in rows)

    def test_requires_config(self, capsys):
        code, _, err = run(capsys, "sweep")
        assert code == 1
        assert "config" in err


class TestCompare:
    def test_table(self, capsys, tmp_path):
        code, out, _ = run(
            capsys,
            "compare", "--t-values", "150", "--scenarios", "1", "--seed", "0",
        )
        assert code == 0
        rows = list(csv.DictReader(out.splitlines()))
        assert {r["scheme"] for r in rows} == {
            "joint", "comm_only", "comp_only", "random"
        }


class TestOracle:
    def test_small_report(self, capsys):
        code, out, _ = run(capsys, "oracle", "--n", "2", "--trials", "2")
        assert code == 0
        assert "max relative gap" in out

    def test_rejects_large_n(self, capsys):
        code, _, err = run(capsys, "oracle", "--n", "5")
        assert code == 1
        assert "3" in err
