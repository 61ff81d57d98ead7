import json

import pytest

from tn_ineq import families
from tn_ineq.cli import EXIT_FALSE, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE, main
from tn_ineq.expr_core import expr_from_json, expr_to_json
from tn_ineq.tn_matrix import factorization_to_json, sample_factorization

from cases import EX1_GE, EX2_LE, KOTEL


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_verify_family(capsys):
    code, out = run(capsys, ["verify", "--family", "gk", "--n", "4", "--l", "2", "--samples", "50"])
    assert code == EXIT_OK
    data = json.loads(out)
    assert [r["weight_bound"] for r in data["runs"]] == [1, 3, 10]
    assert all(r["violations"] == 0 for r in data["runs"])


def test_verify_expr_finds_violation(tmp_path, capsys):
    path = write(tmp_path, "e.json", expr_to_json(EX1_GE.to_expr()))
    code, out = run(capsys, ["verify", "--expr", path, "--samples", "300", "--weight-bound", "3"])
    assert code == EXIT_FALSE
    assert "counterexample" in json.loads(out)["runs"][-1]


def test_decide(tmp_path, capsys):
    code, out = run(capsys, ["decide", "--query", write(tmp_path, "q.json", EX2_LE.to_json())])
    assert code == EXIT_FALSE
    data = json.loads(out)
    assert data["verdict"] == "FAILS" and data["principal_form"]["R1"] == [1, 3, 4, 7, 8, 9]
    code, _ = run(capsys, ["decide", "--query", write(tmp_path, "k.json", KOTEL.to_json()), "--method", "setops"])
    assert code == EXIT_OK


def test_falsify(tmp_path, capsys):
    q = write(tmp_path, "q.json", EX2_LE.to_json())
    code, out = run(capsys, ["falsify", "--query", q, "--principal"])
    assert code == EXIT_FALSE and json.loads(out)["ops"] == "R6,7"
    code, out = run(capsys, ["falsify", "--query", q, "--max-depth", "-1"])
    assert code == EXIT_INCONCLUSIVE and json.loads(out)["witness"] is None
    e = write(tmp_path, "e.json", expr_to_json(EX1_GE.to_expr()))
    code, out = run(capsys, ["falsify", "--expr", e])
    assert code == EXIT_FALSE and json.loads(out)["ops"] == "R1,2"


def test_apply_and_family(tmp_path, capsys):
    params = write(tmp_path, "p.json", {"n": 4, "i": 1, "l": 2})
    out_path = tmp_path / "fam.json"
    assert main(["family", "--name", "laplace-diag", "--params", params, "--out", str(out_path)]) == EXIT_OK
    base = expr_from_json(json.loads(out_path.read_text()))
    assert base.same_as(families.laplace_refined_diag(4, 1, 2))
    applied = tmp_path / "applied.json"
    assert main(["apply", "--expr", str(out_path), "--ops", "R2,1", "--out", str(applied)]) == EXIT_OK
    got = expr_from_json(json.loads(applied.read_text()))
    assert got.same_as(families.laplace_refined_offdiag(4, 1, 2, 2))


def test_oracle(capsys):
    code, out = run(capsys, ["oracle", "--n", "3", "--trials", "5"])
    assert code == EXIT_OK and json.loads(out)["mismatches"] == 0


def test_reduce(tmp_path, capsys):
    code, out = run(capsys, ["reduce", "--query", write(tmp_path, "k.json", KOTEL.to_json())])
    assert code == EXIT_OK
    data = json.loads(out)
    assert set(data) == {"ancestor", "row_ops", "col_ops"}


def test_network(tmp_path, capsys):
    f = write(tmp_path, "f.json", factorization_to_json(sample_factorization(3, 0, 3)))
    code, out = run(capsys, ["network", "--factorization", f])
    assert code == EXIT_OK and out.startswith("digraph")


def test_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["decide"])
    assert exc.value.code == EXIT_USAGE
    assert main(["decide", "--query", str(tmp_path / "missing.json")]) == EXIT_USAGE
    assert main(["decide", "--query", write(tmp_path, "bad.json", {"n": 2})]) == EXIT_USAGE
    assert main(["verify"]) == EXIT_USAGE
    params = write(tmp_path, "p.json", {"n": 3, "l": 0})
    assert main(["family", "--name", "gk", "--params", params]) == EXIT_USAGE
