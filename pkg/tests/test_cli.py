import io
import os

import pytest

from accurate_eval.cli import run
from accurate_eval.dag import extract_polynomial
from accurate_eval.textio import read_algorithm, read_dag
from conftest import CORPUS, P

FIVE_TERM = "x2^8*x3^12 + x1^2*x2^2*x3^16 + x1^8*x3^12 + x1^6*x2^14 + x1^10*x2^6*x3^4"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def keys(text):
    return dict(s.split("=", 1) for s in text.splitlines() if "=" in s and not s.startswith(("node", "op", "dag")))


def test_decide_emits_dag(tmp_path):
    code, out, _ = call("decide", "--field", "c", "--poly", "x1^2 - x2^2", "--out", str(tmp_path / "d.dag"))
    assert code == 0 and keys(out)["status"] == "Evaluable"
    d = read_dag((tmp_path / "d.dag").read_text())
    assert extract_polynomial(d) == P("x1^2 - x2^2")


def test_decide_expect_flag():
    code, out, _ = call("decide", "--poly", "x1^2+x2^2", "--expect", "evaluable")
    assert code == 2 and keys(out)["status"] == "NotEvaluable"
    code, out, _ = call("decide", "--field", "r", "--poly", "x1+x2+x3")
    assert code == 0 and keys(out)["certificate_kind"] == "witness"


def test_simulate_naive_sum(tmp_path):
    code, out, _ = call("simulate", "--dag", os.path.join(CORPUS, "naive_sum.dag"), "--near", "1,1,-2",
                        "--eps", "1e-8", "--csv", str(tmp_path / "w.csv"))
    k = keys(out)
    assert code == 0 and k["worst_rel_err"] == "inf"
    assert (tmp_path / "w.csv").read_text().startswith("rank,rel_err")


def test_simulate_budget_exit(tmp_path):
    code, out, _ = call("compile", "--strategy", "monomial-sum", "--poly", "x1^2+x2^2",
                        "--out", str(tmp_path / "m.dag"))
    assert code == 0
    code, out, _ = call("simulate", "--dag", str(tmp_path / "m.dag"), "--near", "1,1", "--budget", "50",
                        "--target", "1")
    assert code == 3 and keys(out)["budget_exhausted"] == "true"


def test_simulate_is_reproducible(tmp_path):
    code, _, _ = call("compile", "--strategy", "motzkin", "--out", str(tmp_path / "m.prog"))
    assert code == 0
    args = ("simulate", "--dag", str(tmp_path / "m.prog"), "--sampler", "sphere", "--N", "40", "--eta", "1e-6",
            "--seed", "9")
    a, b = call(*args), call(*args)
    assert a == b and keys(a[1])["pass"] == "true"


def test_simulate_plot(tmp_path):
    path = tmp_path / "h.png"
    code, out, _ = call("simulate", "--dag", os.path.join(CORPUS, "naive_sum.dag"), "--sampler", "cube",
                        "--N", "30", "--plot", str(path))
    assert code == 0 and path.stat().st_size > 0


def test_seed_from_environment(monkeypatch, tmp_path):
    args = ("simulate", "--dag", os.path.join(CORPUS, "naive_sum.dag"), "--sampler", "cube", "--N", "5")
    monkeypatch.setenv("ACC_SEED", "4")
    a = call(*args)
    b = call(*args, "--seed", "4")
    assert a == b


def test_dominant_prints_facets(tmp_path):
    code, out, _ = call("dominant", "--poly", FIVE_TERM, "--component", "zero: x1,x2", "--plot", str(tmp_path / "r.png"))
    assert code == 0
    facets = [ln for ln in out.splitlines() if "facet=true" in ln]
    assert {ln.split("lambda=")[1].split()[0] for ln in facets} == {"{(0,8),(2,2)}", "{(2,2),(8,0)}"}
    assert (tmp_path / "r.png").exists()


def test_prune_prune_demo():
    code, out, _ = call("prune", "--dag", os.path.join(CORPUS, "prune_demo.dag"), "--component",
                        "zero: x1; chain: x2=x3=x4", "--eta", "1,1,1")
    k = keys(out)
    assert code == 0 and k["deltas"] == "1,2,3,8,9,10,11,12" and k["subset"] == "true"
    assert P(k["pruned"], 5) == P("x1^2*x2^2 + (x3-x4)^2*x5^2")


def test_compile_strategies(tmp_path):
    for strat, poly in [("product", "x1*(x1-x2)"), ("compensated", "x1+x2+x3"), ("monomial-sum", "x1^3+x2^3")]:
        path = tmp_path / f"{strat}.dag"
        code, out, _ = call("compile", "--strategy", strat, "--poly", poly, "--k", "3", "--out", str(path))
        assert code == 0 and keys(out)["homogeneous"] == "true"
        assert extract_polynomial(read_algorithm(path.read_text())) == P(poly)
    code, _, err = call("compile", "--strategy", "product", "--poly", "x1^2+x2^2")
    assert code == 1 and "remainder" in err


def test_matrix_commands(tmp_path):
    code, out, _ = call("matrix", "toeplitz", "--n", "3")
    assert code == 0 and keys(out)["certificate"] == "true"
    code, out, _ = call("matrix", "gvander", "--n", "3", "--lambda", "2,1")
    assert keys(out)["check"] == "true"
    (tmp_path / "c.txt").write_text("1 0 0 0\n0 1 0 0\n0 0 1 1\n0 0 0 1\n")
    code, out, _ = call("matrix", "pvminor", "--n", "4", "--C", str(tmp_path / "c.txt"), "--i", "2")
    assert "i=2 check=true E=1 F=1" in out and keys(out)["status"] == "NotEvaluable"
    code, out, _ = call("matrix", "pvminor", "--n", "3")
    assert keys(out)["status"] == "Unknown"


def test_error_codes(tmp_path):
    assert call("bogus")[0] == 1
    assert call("decide")[0] == 1
    assert call("simulate", "--dag", str(tmp_path / "missing.dag"))[0] == 1
    bad = tmp_path / "bad.dag"
    bad.write_text("dag x nvars=1\nnode 1 wobble\nout 1\n")
    assert call("simulate", "--dag", str(bad))[0] == 4
    assert call("decide", "--poly", "x1 +")[0] == 1
