import json

import pytest

from dlshor.cli import _SCHEMAS, build_parser, main
from dlshor.numtheory import Adder, enumerate_pairs


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _csv_rows(text):
    lines = text.splitlines()
    assert lines[0].startswith("# dlshor ")
    return lines[1].split(","), [ln.split(",") for ln in lines[2:]]


def test_pairs_csv(capsys):
    code, out, _ = _run(capsys, "pairs", "--budget", "32", "--adder", "qadd")
    header, rows = _csv_rows(out)
    assert code == 0 and header[:2] == ["p", "q"]
    assert len(rows) == len(enumerate_pairs(32, Adder.QADD))


def test_solve_json(capsys):
    code, out, _ = _run(capsys, "solve", "--p", "7", "--q", "3", "--exact", "--seed", "1")
    doc = json.loads(out)
    assert code == 0 and doc["config"]["seed"] == 1
    assert doc["s_recovered"] == doc["s_true"] and 0 < doc["probability"] <= 1


def test_solve_shots(capsys):
    code, out, _ = _run(capsys, "solve", "--p", "5", "--q", "2", "--shots", "200", "--format", "csv")
    header, rows = _csv_rows(out)
    assert code == 0 and dict(zip(header, rows[0]))["mode"] == "shots"


def test_equiv_table_value(capsys):
    code, out, _ = _run(capsys, "equiv", "--metric", "gates_before", "--format", "json")
    row = json.loads(out)["rows"][0]
    assert code == 0 and abs(row["safe_prime_bits"] - 1024.51) < 0.01


def test_same_qubits(capsys):
    code, out, _ = _run(capsys, "same-qubits", "--budget", "6659", "--format", "json")
    doc = json.loads(out)
    assert (doc["bits_p_rounded"], doc["bits_q_rounded"]) == (1479, 1109)


def test_extrapolate(capsys):
    code, out, _ = _run(capsys, "extrapolate", "--bits-p", "2048", "--bits-q", "2047")
    header, rows = _csv_rows(out)
    assert code == 0 and len(rows) == 6


def test_timing_grid_agrees(capsys):
    code, out, _ = _run(capsys, "timing", "--max-L", "12")
    header, rows = _csv_rows(out)
    i, j = header.index("closed_form"), header.index("simulated")
    assert code == 0 and all(r[i] == r[j] for r in rows)


def test_dataset_command(tmp_path):
    data = tmp_path / "rows.csv"
    assert main(["dataset", "--qubits", "12:16", "--per-cell", "2", "--out", str(data)]) == 0
    lines = data.read_text().splitlines()
    assert lines[1].startswith("p,q,bits_p,bits_q,qubits,gates_before")
    assert [ln.split(",")[:2] for ln in lines[2:]] == [["3", "2"], ["5", "2"], ["7", "2"]]


def test_fit_then_extrapolate(tmp_path, capsys):
    from dlshor.estimate import FitParams, ResourceRow, extrapolate, write_rows
    truth = FitParams(3, -1, 2, 5, -4, 7)
    rows = []
    for x in range(4, 14):
        for y in range(2, x):
            v = int(extrapolate(truth, x, y))
            rows.append(ResourceRow(0, 0, x, y, 0, v, v, v, v, v, v))
    data = tmp_path / "rows.csv"
    with open(data, "w") as fh:
        write_rows(rows, fh)
    fit = tmp_path / "fit.json"
    assert main(["fit", "--data", str(data), "--metric", "gates_after", "--format", "json",
                 "--out", str(fit)]) == 0
    doc = json.loads(fit.read_text())
    assert abs(doc["params"]["gates_after"]["a"] - 3) < 1e-6 and doc["cv"]["gates_after"]["cv_rmse"] < 1e-6
    code, out, _ = _run(capsys, "extrapolate", "--params-file", str(fit), "--bits-p", "10",
                        "--bits-q", "4", "--format", "json")
    assert code == 0 and abs(json.loads(out)["rows"][0]["value"] - extrapolate(truth, 10, 4)) < 1e-3


def test_fit_too_few_rows_is_runtime_error(tmp_path, capsys):
    data = tmp_path / "rows.csv"
    assert main(["dataset", "--qubits", "12:18", "--per-cell", "2", "--out", str(data)]) == 0
    assert main(["fit", "--data", str(data), "--folds", "2"]) == 2
    assert "rows" in capsys.readouterr().err


def test_outputs_byte_identical(tmp_path):
    for argv in (["pairs", "--budget", "20"], ["sweep", "--budget", "13", "--shots", "50"],
                 ["metrics", "--p", "7", "--q", "3", "--format", "csv"]):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("argv", [["bogus"], ["pairs"], ["pairs", "--budget", "x"],
                                  ["pairs", "--budget", "10", "--nope"],
                                  ["solve", "--p", "7", "--q", "3", "--exact", "--shots", "3"],
                                  ["pairs", "--budget", "10", "--adder", "fast"]])
def test_usage_errors_exit_1(argv, capsys):
    assert main(argv) == 1
    assert "usage" in capsys.readouterr().err


def test_runtime_error_exit_2(capsys):
    assert main(["solve", "--p", "9", "--q", "2"]) == 2
    assert main(["solve", "--p", "23", "--q", "11", "--cap", "10"]) == 2
    assert "error" in capsys.readouterr().err.lower()


def test_help_documents_schema():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    for name, sp in sub.choices.items():
        text = sp.format_help()
        assert _SCHEMAS[name].split(":")[0] in text
        for action in sp._actions:
            for opt in action.option_strings:
                assert opt in text


def test_cap_flag_does_not_leak(monkeypatch):
    monkeypatch.delenv("DLSHOR_QUBIT_CAP", raising=False)
    import os
    main(["solve", "--p", "5", "--q", "2", "--cap", "11", "--out", os.devnull])
    assert "DLSHOR_QUBIT_CAP" not in os.environ
