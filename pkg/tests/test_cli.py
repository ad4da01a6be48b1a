import csv
import io
import json
import math

import pytest

from swaproute import cli
from swaproute.graph import build_grid
from swaproute.instance import MqpfInstance, save_instance
from swaproute.noise import save_error_map

from conftest import uniform_error_map


def run_cli(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_random_tiny(capsys):
    code, out, _ = run_cli(["solve", "--layout", "grid:1x2", "--random", "2",
                            "--team-mode", "independent", "--seed", "1",
                            "--mode", "optimal"], capsys)
    assert code == 0
    assert "status=optimal" in out
    assert "depth=0" in out or "depth=1" in out


def test_solve_instance_file(tmp_path, capsys):
    inst = MqpfInstance(sources=((0,), (1,)), destinations=((1,), (0,)))
    f = tmp_path / "inst.txt"
    f.write_text(save_instance(inst))
    out_file = tmp_path / "sol.json"
    code, out, _ = run_cli(["solve", "--layout", "grid:1x2", "--instance", str(f),
                            "--noise", "heron", "--out", str(out_file)], capsys)
    assert code == 0
    doc = json.loads(out_file.read_text())
    assert doc["depth"] == 1
    assert doc["fidelity"] == pytest.approx(math.exp(-doc["cost"]))


def test_solve_noise_file(tmp_path, capsys):
    g = build_grid(1, 2)
    f = tmp_path / "noise.txt"
    f.write_text(save_error_map(uniform_error_map(g, eps=0.001)))
    code, out, _ = run_cli(["solve", "--layout", "grid:1x2", "--random", "2",
                            "--seed", "3", "--noise", str(f),
                            "--error-model", "simple"], capsys)
    assert code == 0


def test_export_lp_no_solve(tmp_path, capsys):
    path = tmp_path / "m.lp"
    code, out, _ = run_cli(["solve", "--layout", "grid:1x2", "--random", "2",
                            "--seed", "1", "--export-lp", str(path)], capsys)
    assert code == 0
    text = path.read_text()
    assert text.startswith("Minimize")
    assert "Binary" in text


def test_unknown_layout_usage_error(capsys):
    code, _, err = run_cli(["solve", "--layout", "nope99", "--random", "1"], capsys)
    assert code == 2
    assert "error" in err


def test_solve_timeout_exit_code(capsys):
    code, _, err = run_cli(["solve", "--layout", "grid:4x4", "--random", "6",
                            "--seed", "0", "--timeout", "0"], capsys)
    assert code == 3
    assert "timed_out" in err


def test_bench_row_counts(capsys):
    code, out, _ = run_cli(["bench", "--layout", "grid:1x3", "--qubits", "1..3",
                            "--instances", "2", "--modes", "optimal",
                            "--timeout", "60", "--seed", "5"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 6
    assert list(rows[0].keys()) == cli.BENCH_COLUMNS


def test_bench_fidelity_definition(capsys):
    code, out, _ = run_cli(["bench", "--layout", "grid:2x2", "--qubits", "2,3",
                            "--instances", "2", "--error-model", "extended",
                            "--seed", "1"], capsys)
    assert code == 0
    for row in csv.DictReader(io.StringIO(out)):
        assert row["status"] == "optimal"
        assert float(row["fidelity"]) == pytest.approx(
            math.exp(-float(row["cost"])), abs=1e-9)


def test_bench_mode_dominance_per_instance(capsys):
    code, out, _ = run_cli(["bench", "--layout", "grid:2x2", "--qubits", "2",
                            "--instances", "5",
                            "--modes", "optimal,near-optimal,feasible",
                            "--seed", "2"], capsys)
    assert code == 0
    by_instance = {}
    for row in csv.DictReader(io.StringIO(out)):
        by_instance.setdefault(row["instance_seed"], {})[row["solver_mode"]] = \
            float(row["cost"])
    for costs in by_instance.values():
        assert costs["optimal"] <= costs["near-optimal"] + 1e-9
        assert costs["near-optimal"] <= costs["feasible"] + 1e-9


def test_bench_deterministic_rows(capsys):
    argv = ["bench", "--layout", "grid:1x3", "--qubits", "2", "--instances", "3",
            "--seed", "9"]
    code1, out1, _ = run_cli(argv, capsys)
    code2, out2, _ = run_cli(argv, capsys)
    assert code1 == code2 == 0

    def strip_runtime(text):
        rows = list(csv.DictReader(io.StringIO(text)))
        for r in rows:
            r.pop("runtime_ms")
        return rows

    assert strip_runtime(out1) == strip_runtime(out2)


def test_oracle_check_zero_mismatches(capsys):
    code, out, _ = run_cli(["oracle-check", "--nodes-max", "5", "--samples", "10",
                            "--seed", "3"], capsys)
    assert code == 0
    assert "0 mismatches / 10 samples" in out


def test_oracle_check_zero_samples(capsys):
    code, out, _ = run_cli(["oracle-check", "--samples", "0"], capsys)
    assert code == 0
    assert "0 mismatches / 0 samples" in out


def test_oracle_check_reproducible(capsys):
    argv = ["oracle-check", "--nodes-max", "5", "--samples", "6", "--seed", "4"]
    _, out1, _ = run_cli(argv, capsys)
    _, out2, _ = run_cli(argv, capsys)
    assert out1 == out2
