import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from accurate_eval.dag import (Comparison, check_homogeneous_algorithm, eval_exact, eval_rounded,
                               extract_polynomial, leaves_of, symbolic_output)
from accurate_eval.decide import HypothesisError
from accurate_eval.generators import (Plan, branching_evaluator, compensated_sum_ops, gen_compensated_sum,
                                      gen_monomial_sum, gen_motzkin, monomial_sum_bound, motzkin_polynomial,
                                      rounding_depth)
from accurate_eval.poly import Polynomial, parse_polynomial
from conftest import P, polys, rationals
from frozen_oracles import MOTZKIN_LEAF_EXPANDED


@given(polys(n=3, coeffs=st.integers(-4, 4)))
@settings(max_examples=40)
def test_monomial_sum_computes_input(p):
    if p.is_zero() or p.constant_term() != 0:
        return
    d = gen_monomial_sum(p)
    assert extract_polynomial(d) == p
    if p.homogeneous_degree() is not None:
        h = check_homogeneous_algorithm(d)
        assert h.ok and h.degree == p.homogeneous_degree()


def test_monomial_sum_shape_and_bound():
    d = gen_monomial_sum(P("x1^2+x2^2"))
    assert d.op_count() == 3 and rounding_depth(d) == 2
    eps = Fraction(1, 2**20)
    assert monomial_sum_bound(P("x1^2+x2^2"), d, eps, 1) == 2 * ((1 + eps) ** 2 - 1)
    with pytest.raises(HypothesisError):
        gen_monomial_sum(P("x1+1"))


def test_positive_monomial_sum_error_within_bound():
    p = P("x1^4 + 3*x1^2*x2^2 + x2^4")
    d = gen_monomial_sum(p)
    eps = Fraction(1, 2**10)
    f = rounding_depth(d)
    rng = random.Random(2)
    for _ in range(50):
        x = [Fraction(rng.randint(-99, 99), 37) for _ in range(2)]
        if p.evaluate(x) == 0:
            continue
        dl = {k: eps * rng.choice([1, -1]) for k in d.delta_indices()}
        err = abs(eval_rounded(d, x, dl) - p.evaluate(x)) / p.evaluate(x)
        assert err <= (1 + eps) ** f - 1


def test_motzkin_leaves():
    m = motzkin_polynomial(1)
    assert m == parse_polynomial(MOTZKIN_LEAF_EXPANDED, 3)
    prog = gen_motzkin(axis_guard=False)
    leaves = leaves_of(prog)
    assert len(leaves) == 8
    for leaf in leaves:
        assert extract_polynomial(leaf) == m
        h = check_homogeneous_algorithm(leaf)
        assert h.ok and h.degree == 6
    assert prog.select((1, 1, 1)).name != prog.select((1, 1, -1)).name
    with pytest.raises(ValueError):
        gen_motzkin(1, k=4)


@pytest.mark.parametrize("j", [1, 2])
def test_motzkin_exact_where_it_vanishes(j):
    prog = gen_motzkin(j)
    rng = random.Random(j)
    idx = sorted({k for leaf in leaves_of(prog) for k in leaf.delta_indices()})
    for _ in range(30):
        a = Fraction(rng.randint(1, 50), rng.randint(1, 50))
        x = [a * rng.choice([1, -1]) for _ in range(3)]
        dl = {k: Fraction(rng.randint(-100, 100), 10**10) for k in idx}
        assert eval_rounded(prog, x, dl) == 0
    for axis in [(1, 0, 0), (0, -3, 0)]:
        assert eval_rounded(prog, axis, {k: Fraction(1, 10**8) for k in idx}) == 0


@pytest.mark.parametrize("k", [1, 2, 3])
def test_compensated_symbolic_form(k):
    summands = [P("x1^2", 2), P("-x2^2", 2), P("x1*x2", 2)]
    d = gen_compensated_sum(summands, k)
    so = symbolic_output(d)
    total = summands[0] + summands[1] + summands[2]
    m = len(so.deltas)
    nv = 2 + m
    prod = Polynomial.constant(nv, 1)
    for j in range(m):
        prod = prod * Polynomial.variable(nv, 2 + j)
    assert so.poly == total.embed(nv) * (1 - (-1) ** k * prod)


def test_compensated_needs_registration():
    summands = [P("x1", 2), P("x2", 2)]
    ops = [op for op in compensated_sum_ops(summands, 2) if op.name != "csum2"]
    with pytest.raises(ValueError, match="csum2"):
        gen_compensated_sum(summands, 2, ops)


def test_branching_evaluator_corrects_leaves():
    p = P("x1^2 + x1*x2^3")
    part = gen_monomial_sum(P("x1^2", 2))
    x1, x2 = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
    prog = branching_evaluator(p, [Plan((Comparison(x2**2, "<=", x1**2),), part, Fraction(1, 2))])
    for x in [(1, 0), (3, 1), (1, 5), (-2, 7)]:
        assert eval_exact(prog, x) == p.evaluate(x)
    with pytest.raises(ValueError):
        branching_evaluator(p, [Plan((Comparison(x2, "<=", x1),), part, Fraction(1, 2)),
                                Plan((Comparison(x2, "<=", x1),), part, Fraction(1, 3))])


@given(st.lists(rationals(), min_size=3, max_size=3))
@settings(max_examples=80)
def test_programs_are_total(x):
    prog = gen_motzkin()
    leaf = prog.select(x)
    assert eval_exact(leaf, x) == motzkin_polynomial(1).evaluate(x)
