import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rlsc.cli import main
from rlsc.construction import identity_code
from rlsc.io import MatrixFormatError, dumps_matrix, load_matrix, loads_matrix, save_matrix
from rlsc.matrix import CodeMatrix, CodeParams


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- matrix files -----------------------------------------------------------

def test_identity_file_layout():
    text = dumps_matrix(identity_code(3, k=2, d=1), comments=["hello"])
    assert text == "RLSC 1\n3 3 2 1 2 1\n100\n010\n001\n# hello\n"


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.integers(1, 9), st.data())
def test_round_trip(t, n, data):
    cols = tuple(data.draw(st.integers(0, 2**t - 1)) for _ in range(n))
    M = CodeMatrix(t, cols)
    back = loads_matrix(dumps_matrix(M))
    assert back.columns == cols and back.t == t and back.params is None
    assert loads_matrix(dumps_matrix(back)) == back


def test_round_trip_with_params(tmp_path):
    M = CodeMatrix(5, (0b10001, 0b00100), CodeParams(k=2, n=2, d=1, w=None, t=5))
    save_matrix(M, tmp_path / "m.rlsc", comments=["seed 1"])
    back = load_matrix(tmp_path / "m.rlsc")
    assert back.columns == M.columns and back.params == M.params
    assert (back.to_array() == M.to_array()).all()


@pytest.mark.parametrize("text,line,column", [
    ("RLSC 2\n1 1 - - - -\n1\n", 1, None),
    ("RLSC 1\n2 2 - - -\n10\n01\n", 2, None),
    ("RLSC 1\n2 x - - - -\n10\n01\n", 2, 3),
    ("RLSC 1\n2 2 - - - -\n10\n0a\n", 4, 2),
    ("RLSC 1\n2 2 - - - -\n10\n011\n", 4, None),
    ("RLSC 1\n3 2 - - - -\n10\n01\n", 4, None),
    ("RLSC 1\n2 2 5 0 - -\n10\n01\n", 2, None),
])
def test_parse_errors_locate_problem(text, line, column):
    with pytest.raises(MatrixFormatError) as exc:
        loads_matrix(text)
    assert exc.value.line == line and exc.value.column == column
    assert f"line {line}" in str(exc.value)


# -- bounds -----------------------------------------------------------------

def test_bounds_worked_example(capsys):
    code, out, _ = run(capsys, "bounds", "-k", "2", "-n", "10", "-d", "2", "-w", "3")
    assert code == 0
    rep = json.loads(out)
    t = {e["method"]: e["t"] for e in rep["result"]["entries"]}
    assert (t["lll"], t["union"], t["agarwal"], t["lower"]) == (13, 14, 24, 4)
    assert rep["params"]["k"] == 2 and rep["version"]


def test_bounds_k1(capsys):
    _, out, _ = run(capsys, "bounds", "-k", "1", "-n", "9", "-d", "3", "-w", "4",
                    "--method", "lll", "union")
    t = {e["method"]: e["t"] for e in json.loads(out)["result"]["entries"]}
    assert t == {"lll": 3 * 3 + 4, "union": 3 * 3 + 4}


def test_bounds_table(capsys):
    code, out, _ = run(capsys, "bounds", "-k", "2", "-n", "10", "-d", "2", "--format", "table")
    assert code == 0 and "lll" in out and "guaranteed" in out


def test_usage_errors(capsys):
    assert run(capsys, "bounds", "-k", "5", "-n", "3")[0] == 2
    assert run(capsys, "bounds", "-k", "0", "-n", "3")[0] == 2
    assert run(capsys)[0] == 2


# -- construct --------------------------------------------------------------

def test_construct_mt(tmp_path, capsys):
    out = tmp_path / "c.rlsc"
    code, text, _ = run(capsys, "construct", "-k", "2", "-n", "10", "-d", "2",
                        "--seed", "7", "-o", str(out))
    assert code == 0
    rep = json.loads(text)
    assert rep["status"] == "pass" and rep["result"]["t"] <= 13
    assert all(c["result"] == "pass" for c in rep["result"]["verification"])
    M = load_matrix(out)
    assert M.shape == (rep["result"]["t"], 10)


def test_construct_identity(tmp_path, capsys):
    out = tmp_path / "identity5.rlsc"
    assert run(capsys, "construct", "--method", "identity", "-k", "3", "-n", "5",
               "-o", str(out))[0] == 0
    assert (load_matrix(out).to_array() == np.eye(5, dtype=np.uint8)).all()
    code, text, _ = run(capsys, "verify", str(out), "-k", "3")
    assert code == 0 and json.loads(text)["status"] == "pass"


def test_construct_below_lower_bound(capsys):
    code, _, err = run(capsys, "construct", "-k", "3", "-n", "20", "-d", "5", "-t", "3", "-w", "1")
    assert code == 2 and "13" in err


def test_construct_budget_exit(capsys):
    code, text, _ = run(capsys, "construct", "-k", "2", "-n", "4", "-d", "0", "-w", "1",
                        "-t", "3", "--seed", "0", "--max-resamples", "5")
    assert code == 3 and json.loads(text)["status"] == "budget_exhausted"


def test_construct_generates_and_echoes_seed(capsys):
    _, text, _ = run(capsys, "construct", "-k", "2", "-n", "6", "-d", "1")
    rep = json.loads(text)
    assert "--seed" in rep["argv"]
    assert rep["params"]["seed"] == int(rep["argv"][rep["argv"].index("--seed") + 1])


# -- verify -----------------------------------------------------------------

def test_verify_gap_witness(tmp_path, capsys):
    path = tmp_path / "gap.rlsc"
    path.write_text("RLSC 1\n5 2 - - - -\n10\n01\n10\n00\n01\n")
    code, text, _ = run(capsys, "verify", str(path), "-k", "1", "-d", "2")
    assert code == 1
    witness = json.loads(text)["result"]["checks"][0]["witness"]
    assert witness["column"] == 0 and witness["rows"] == [0, 2]


def test_verify_property_failure_has_witness(tmp_path, capsys):
    save_matrix(CodeMatrix(3, (0b011, 0b011, 0b100)), tmp_path / "dup.rlsc")
    code, text, _ = run(capsys, "verify", str(tmp_path / "dup.rlsc"), "-k", "2")
    assert code == 1
    assert json.loads(text)["result"]["checks"][-1]["witness"]["i"] == 0


def test_verify_work_limit(tmp_path, capsys, monkeypatch):
    save_matrix(identity_code(40), tmp_path / "big.rlsc")
    monkeypatch.setenv("RLSC_WORK_LIMIT", "1000")
    code, text, _ = run(capsys, "verify", str(tmp_path / "big.rlsc"), "-k", "3")
    rep = json.loads(text)
    assert code == 3 and rep["result"]["work_estimate"] == 40 * 741 * 40
    assert run(capsys, "verify", str(tmp_path / "big.rlsc"), "-k", "3", "--override")[0] == 0


def test_verify_monte_carlo(tmp_path, capsys):
    save_matrix(identity_code(8), tmp_path / "i.rlsc")
    code, text, _ = run(capsys, "verify", str(tmp_path / "i.rlsc"), "-k", "3",
                        "--mode", "monte-carlo", "--trials", "2000", "--seed", "3")
    assert code == 0 and json.loads(text)["status"] == "no_violation_found"


def test_verify_parse_error(tmp_path, capsys):
    (tmp_path / "bad.rlsc").write_text("RLSC 1\n2 2 - - - -\n10\n0x\n")
    code, _, err = run(capsys, "verify", str(tmp_path / "bad.rlsc"), "-k", "2")
    assert code == 2 and "line 4, column 2" in err
    assert run(capsys, "verify", str(tmp_path / "missing.rlsc"), "-k", "2")[0] == 2


# -- simulate ---------------------------------------------------------------

def test_simulate_nagt_empty(tmp_path, capsys):
    save_matrix(identity_code(5), tmp_path / "i.rlsc")
    code, text, _ = run(capsys, "simulate", str(tmp_path / "i.rlsc"), "--mode", "nagt",
                        "-k", "3", "--positives", "-", "--positives", "1,4")
    rep = json.loads(text)
    assert code == 0
    assert [r["recovered"] for r in rep["result"]["reports"]] == [[], [1, 4]]


def test_simulate_two_stage(tmp_path, capsys):
    path = tmp_path / "s.rlsc"
    assert run(capsys, "construct", "-k", "4", "-n", "10", "-d", "2", "-p", "3",
               "--seed", "1", "-o", str(path))[0] == 0
    code, text, _ = run(capsys, "simulate", str(path), "--mode", "two-stage", "-k", "2",
                        "--all-up-to", "2")
    agg = json.loads(text)["result"]["aggregate"]
    t = load_matrix(path).t
    assert code == 0
    assert agg["runs"] == 1 + 10 + 45 and agg["exactness_rate"] == 1.0
    assert agg["max_total_tests"] <= t + 4 and agg["max_candidates"] <= 3


def test_simulate_out_of_range(tmp_path, capsys):
    save_matrix(identity_code(5), tmp_path / "i.rlsc")
    assert run(capsys, "simulate", str(tmp_path / "i.rlsc"), "--mode", "nagt", "-k", "2",
               "--positives", "9")[0] == 2


def test_simulate_refuses_uncertified(tmp_path, capsys):
    save_matrix(CodeMatrix(3, (0b011, 0b011, 0b100)), tmp_path / "dup.rlsc")
    args = ["simulate", str(tmp_path / "dup.rlsc"), "--mode", "nagt", "-k", "2",
            "--positives", "2"]
    assert run(capsys, *args)[0] == 1
    code, text, _ = run(capsys, *args, "--unverified")
    assert code == 0
    assert json.loads(text)["result"]["reports"][0]["flags"] == ["unverified"]
    # item 0 shares its column with item 1, so decoding is not exact
    code, text, _ = run(capsys, *args[:-1], "0", "--unverified")
    assert code == 1 and json.loads(text)["result"]["reports"][0]["recovered"] == [0, 1]


# -- enumerate --------------------------------------------------------------

@pytest.mark.parametrize("t,w,d,lines", [
    (5, 2, 1, ["count 6", "10100", "10010", "01010", "10001", "01001", "00101"]),
    (4, 3, 1, ["count 0"]),
    (3, 0, 2, ["count 1", "000"]),
])
def test_enumerate(capsys, t, w, d, lines):
    code, out, _ = run(capsys, "enumerate", "-t", str(t), "-w", str(w), "-d", str(d))
    assert code == 0 and out.splitlines() == lines


# -- reproducibility --------------------------------------------------------

@pytest.mark.parametrize("argv", [
    ["construct", "-k", "2", "-n", "10", "-d", "2", "-o", "{dir}/m.rlsc"],
    ["construct", "-k", "2", "-n", "8", "-d", "1", "--method", "qary", "-o", "{dir}/m.rlsc"],
    ["bounds", "-k", "3", "-n", "40", "-d", "2"],
    ["enumerate", "-t", "6", "-w", "2", "-d", "1", "--format", "json"],
])
def test_rerun_from_report_is_identical(tmp_path, capsys, argv):
    argv = [a.format(dir=tmp_path) for a in argv] + ["--report", str(tmp_path / "r.json")]
    assert run(capsys, *argv)[0] == 0
    report = (tmp_path / "r.json").read_bytes()
    matrix = (tmp_path / "m.rlsc").read_bytes() if (tmp_path / "m.rlsc").exists() else None
    replay = json.loads(report)["argv"]
    assert run(capsys, *replay)[0] == 0
    assert (tmp_path / "r.json").read_bytes() == report
    if matrix is not None:
        assert (tmp_path / "m.rlsc").read_bytes() == matrix
