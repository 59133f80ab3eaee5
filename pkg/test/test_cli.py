import csv
import io
import json

import pytest

import cli


def _run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def test_solve_demo_with_exact_search(capsys, demo_path):
    code, out = _run(capsys, "solve", demo_path, "--method", "ega", "--epsilon", "0")
    assert code == 0
    payload = json.loads(out)
    assert payload["x_hat"] == pytest.approx([1.0, 0.0])
    assert payload["support"] == [0]
    assert payload["verified"] is True


def test_solve_enumerate_all_reports_uniqueness(capsys, demo_path):
    code, out = _run(capsys, "solve", demo_path, "--method", "ega", "--enumerate-all")
    assert code == 0
    payload = json.loads(out)
    assert payload["all_solutions"] == [[0]]
    assert payload["unique_sparsest"] is True


def test_solve_infeasible_exit_code(capsys, demo_path):
    code, out = _run(capsys, "solve", demo_path, "--method", "ega", "--max-support", "0")
    assert code == 2
    assert json.loads(out)["infeasible"] is True


def test_solve_writes_output_and_trace(tmp_path, capsys, demo_path):
    output = tmp_path / "result.json"
    trace = tmp_path / "trace.csv"
    code, out = _run(
        capsys,
        "solve",
        demo_path,
        "--method",
        "l1l2",
        "--output",
        str(output),
        "--trace",
        str(trace),
    )
    assert code in (0, 2)
    assert out == ""
    payload = json.loads(output.read_text())
    assert payload["method"] == "l1l2"
    assert "solver_reason" in payload["diagnostics"]
    assert trace.read_text().startswith("iteration,objective,primal_res,dual_res")


def test_missing_file_is_an_error(capsys, tmp_path):
    code, out = _run(capsys, "solve", str(tmp_path / "absent.json"))
    assert code == 1
    assert out == ""


def test_malformed_file_is_an_error(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 2, "d": 2, "equations": [{"y": 1, "terms": [{"alpha": [3, 0]}]}]}')
    code, _ = _run(capsys, "solve", str(path))
    assert code == 1


def test_certify_json_and_pretty(capsys, demo_path):
    code, out = _run(capsys, "certify", demo_path, "--k", "1", "--epsilon", "0.1")
    assert code == 0
    payload = json.loads(out)
    assert set(payload["checks"]) >= {"Thm1", "Thm3", "Thm8"}
    assert 0.0 <= payload["mu"] <= 1.0

    code, out = _run(capsys, "certify", demo_path, "--k", "1", "--format", "pretty")
    assert code == 0
    assert out.startswith("Recovery certificate")


def test_lift(capsys):
    code, out = _run(capsys, "lift", "--n", "2", "--d", "2", "--x", "2,3")
    assert code == 0
    payload = json.loads(out)
    assert payload["M"] == 5
    assert payload["phi"] == [2.0, 3.0, 4.0, 6.0, 9.0]
    assert payload["labels"][3] == "x1*x2"


def test_lift_dimension_mismatch(capsys):
    code, _ = _run(capsys, "lift", "--n", "3", "--d", "2", "--x", "1,2")
    assert code == 1


def _csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_bench_explicit_flags(capsys):
    code, out = _run(
        capsys,
        "bench",
        "--n", "4", "--d", "2", "--N", "12", "--k", "1",
        "--trials", "2", "--seed", "3", "--method", "ega", "--method", "aga",
    )
    assert code == 0
    rows = _csv(out)
    assert [r["method"] for r in rows] == ["ega", "aga"]
    assert all(r["success_rate"] == "1" and r["mean_time_s"] == "0" for r in rows)
    assert list(rows[0]) == [
        "experiment_id", "method", "n", "d", "N", "k", "trials", "noise_epsilon",
        "success_rate", "support_rate", "mean_rel_error", "mean_time_s",
    ]


def test_bench_timing_flag(capsys):
    code, out = _run(
        capsys,
        "bench",
        "--n", "4", "--d", "2", "--N", "12", "--k", "1",
        "--trials", "2", "--method", "ega", "--timing",
    )
    assert code == 0
    assert float(_csv(out)[0]["mean_time_s"]) > 0.0


def test_bench_validation_error(capsys):
    code, out = _run(capsys, "bench", "--n", "3", "--d", "2", "--N", "5", "--k", "4")
    assert code == 1
    assert out == ""


def test_bench_needs_dimensions(capsys):
    code, _ = _run(capsys, "bench", "--trials", "1")
    assert code == 1


def test_phase_command(capsys):
    code, out = _run(
        capsys,
        "phase",
        "--n", "4", "--d", "2", "--trials", "1",
        "--deltas", "2", "--kmin", "0", "--kmax", "1", "--method", "aga",
    )
    assert code == 0
    rows = _csv(out)
    assert [(r["k"], r["delta"]) for r in rows] == [("0", "2"), ("1", "2")]
    assert rows[0]["success_rate"] == "1"


def test_phase_one_row_per_degree(capsys):
    code, out = _run(
        capsys,
        "phase",
        "--n", "3", "--d", "2", "--trials", "1", "--degrees", "1,2",
        "--deltas", "3", "--kmin", "0", "--kmax", "1", "--method", "ega",
    )
    assert code == 0
    rows = _csv(out)
    assert [(r["d"], r["k"]) for r in rows] == [("1", "0"), ("1", "1"), ("2", "0"), ("2", "1")]


def test_phase_rejects_experiment_preset(capsys):
    code, _ = _run(capsys, "phase", "--preset", "table1")
    assert code == 1


def test_unknown_method_rejected_by_parser():
    with pytest.raises(SystemExit):
        cli.main(["solve", "x.json", "--method", "magic"])


def test_interrupt_exit_code(monkeypatch, capsys, demo_path):
    def interrupted(*args, **kwargs):
        raise KeyboardInterrupt

    monkeypatch.setattr(cli, "run_method", interrupted)
    code, _ = _run(capsys, "solve", demo_path)
    assert code == 130
