"""Command-line interface: subcommands, exit codes, output files."""

import json

import pytest

from qipm.cli import main
from qipm.experiment import CSV_FIELDS, read_records_csv
from qipm.serialize import read_dataset


def test_gen_writes_deterministic_dataset(tmp_path, capsys):
    out1 = tmp_path / "d1.json"
    out2 = tmp_path / "d2.json"
    args = ["gen", "--n", "4", "--m", "8", "--p", "0.3", "--seed", "7"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    data = read_dataset(out1)
    assert data.n == 4 and data.m == 8
    assert "wrote dataset" in capsys.readouterr().out


def test_solve_dataset_exact(tmp_path, capsys):
    data = tmp_path / "d.json"
    main(["gen", "--n", "3", "--m", "6", "--p", "0.0", "--seed", "3", "--out", str(data)])
    trace = tmp_path / "trace.csv"
    code = main(
        [
            "solve", "--instance", str(data), "--mode", "exact",
            "--epsilon", "0.2", "--seed", "1", "--trace", str(trace),
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "mu=" in out and "iterations=" in out and "residual" in out
    header = trace.read_text().splitlines()[0]
    assert header.startswith("index,mu_before,mu_after")


def test_solve_tomography(tmp_path, capsys):
    data = tmp_path / "d.json"
    main(["gen", "--n", "3", "--m", "6", "--p", "0.2", "--seed", "5", "--out", str(data)])
    code = main(
        ["solve", "--instance", str(data), "--mode", "tomography", "--epsilon", "0.2", "--seed", "2"]
    )
    assert code == 0
    capsys.readouterr()


def test_solve_nonconvergence_exit_code(tmp_path, capsys):
    data = tmp_path / "d.json"
    main(["gen", "--n", "3", "--m", "6", "--p", "0.0", "--seed", "3", "--out", str(data)])
    code = main(
        [
            "solve", "--instance", str(data), "--epsilon", "0.2",
            "--max-iterations", "3",
        ]
    )
    assert code == 2
    assert "did not converge" in capsys.readouterr().out


def test_solve_missing_file_exit_code(tmp_path, capsys):
    assert main(["solve", "--instance", str(tmp_path / "nope.json")]) == 1
    assert "error:" in capsys.readouterr().err


def test_solve_general_instance_without_start(tmp_path, capsys):
    # a raw cone program with no reduction tag cannot construct a start
    from qipm import generate, to_socp
    from qipm.serialize import write_instance

    train, _ = generate(3, 4, 0.0, seed=2)
    inst = to_socp(train, 1.0)
    path = tmp_path / "raw.json"
    write_instance(inst, path)
    doc = json.loads(path.read_text())
    del doc["meta"]
    path.write_text(json.dumps(doc))
    assert main(["solve", "--instance", str(path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_sweep_fit_report_pipeline(tmp_path, capsys):
    csv_path = tmp_path / "runs.csv"
    code = main(
        [
            "sweep", "--n-min", "4", "--n-max", "8", "--per-cell", "2",
            "--epsilon", "0.3", "--seed", "11", "--out", str(csv_path),
        ]
    )
    assert code == 0
    records = read_records_csv(csv_path)
    assert len(records) == 4
    assert csv_path.read_text().splitlines()[0] == ",".join(CSV_FIELDS)

    code = main(["fit", "--in", str(csv_path), "--x", "n", "--y", "cost_metric"])
    assert code == 0
    out = capsys.readouterr().out
    assert "exponent b=" in out and "ci95=[" in out

    report_path = tmp_path / "report.txt"
    assert main(["report", "--in", str(csv_path), "--out", str(report_path)]) == 0
    text = report_path.read_text()
    assert "power-law fits" in text
    assert "2.591" in text  # published reference exponents quoted as context

    # regeneration is byte-identical
    report2 = tmp_path / "report2.txt"
    main(["report", "--in", str(csv_path), "--out", str(report2)])
    assert report_path.read_bytes() == report2.read_bytes()


def test_fit_usage_error(tmp_path, capsys):
    csv_path = tmp_path / "empty.csv"
    csv_path.write_text(",".join(CSV_FIELDS) + "\n")
    assert main(["fit", "--in", str(csv_path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_unknown_command_rejected():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
