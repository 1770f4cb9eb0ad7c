import math
from fractions import Fraction

import pytest

from accurate_eval.accuracy import (INF, LeafMismatchError, Sampler, adversarial_search, relative_error,
                                    sample_accuracy_report)
from accurate_eval.generators import gen_monomial_sum, gen_motzkin, motzkin_polynomial
from accurate_eval.textio import read_dag
from conftest import P, corpus_text


def naive():
    return read_dag(corpus_text("naive_sum.dag"))


def test_relative_error_conventions():
    d = naive()
    p = P("x1+x2+x3")
    e = Fraction(1, 10**8)
    assert relative_error(d, p, (1, 1, -2), {1: e, 2: e}) == INF
    assert relative_error(d, p, (1, 1, -2), {1: 0, 2: e}) == 0
    assert relative_error(d, p, (1, 1, 1), {1: 0, 2: e}) == e
    with pytest.raises(LeafMismatchError):
        relative_error(d, P("x1+x2"), (1, 1, 1), {1: 0, 2: 0})


def test_search_finds_failure():
    rep = adversarial_search(naive(), P("x1+x2+x3"), (1, 1, -2), Fraction(1, 10**6), Fraction(1, 10**8), 1000)
    assert rep.worst_rel_err >= 1
    assert not rep.exhausted


def test_search_is_seeded_and_bounded():
    d = gen_monomial_sum(P("x1^2+x2^2"))
    args = (d, P("x1^2+x2^2"), (1, 1), Fraction(1, 10), Fraction(1, 2**20), 300)
    a = adversarial_search(*args, seed=3)
    b = adversarial_search(*args, seed=3)
    assert a.lines() == b.lines() and a.csv() == b.csv()
    assert a.samples == 300 and a.exhausted
    assert a.worst_rel_err <= (1 + Fraction(1, 2**20)) ** 2 - 1


def test_sampled_report_and_csv():
    m = motzkin_polynomial(1)
    rep = sample_accuracy_report(gen_motzkin(), m, "sphere", Fraction(1, 10**8), Fraction(1, 10**6), 200, seed=1)
    assert rep.passed
    lines = dict(s.split("=", 1) for s in rep.lines())
    assert set(lines) >= {"samples", "eps", "worst_rel_err", "witness_x", "eta", "pass"}
    rows = rep.csv().strip().splitlines()
    assert rows[0] == "rank,rel_err,x,delta" and len(rows) == 101
    errs = [float(r.split(",")[1]) for r in rows[1:]]
    assert errs == sorted(errs, reverse=True)


def test_samplers():
    import random

    rng = random.Random(0)
    x = Sampler.parse("sphere").draw(rng, 3, 0)
    assert abs(math.sqrt(sum(float(v) ** 2 for v in x)) - 1) < 1e-9
    s = Sampler.parse("near:zero: x1; chain: x2=-x3", 3)
    assert s.component.contains(s.draw(rng, 3, 0))
    assert not s.component.contains(s.draw(rng, 3, 1))
    with pytest.raises(ValueError):
        Sampler.parse("ball")


def test_corner_deltas_on_naive_sum_near_cancellation():
    rep = sample_accuracy_report(naive(), P("x1+x2+x3"), "near:chain: x1=x2", Fraction(1, 2**20), None, 60,
                                 delta_mode="corners")
    assert rep.passed is None
    assert rep.worst_rel_err > 0
