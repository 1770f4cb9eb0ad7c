from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from accurate_eval.dag import (BlackBoxOp, Dag, DagBuilder, DeltaAssignment, Node, Ref,
                               check_homogeneous_algorithm, error_expansion, eval_exact, eval_rounded,
                               extract_polynomial, negate_sources, symbolic_output, validate)
from accurate_eval.generators import gen_motzkin
from accurate_eval.poly import Polynomial
from accurate_eval.textio import FormatError, format_algorithm, format_dag, read_algorithm, read_dag
from conftest import P, corpus_text, rationals

# a random DAG: each step picks an op and two earlier refs (possibly negated)
steps = st.lists(st.tuples(st.sampled_from(["add", "sub", "mul"]), st.integers(0, 99), st.integers(0, 99),
                           st.booleans(), st.booleans()), min_size=1, max_size=6)


def build(n, plan):
    b = DagBuilder(n, "random")
    refs = [b.source(i) for i in range(n)]
    for op, i, j, na, nb in plan:
        a, c = refs[i % len(refs)], refs[j % len(refs)]
        refs.append(getattr(b, op)(-a if na else a, -c if nb else c))
    return b.build(refs[-1])


def deltas_for(d, vals):
    idx = d.delta_indices()
    return {k: vals[i % len(vals)] for i, k in enumerate(idx)}


small = rationals(-1, 1, 64).map(lambda v: v / 1000)


@given(steps, st.lists(rationals(), min_size=3, max_size=3), st.lists(small, min_size=1, max_size=8))
@settings(max_examples=60)
def test_symbolic_output_matches_rounded_evaluation(plan, x, dv):
    d = build(3, plan)
    dl = deltas_for(d, dv)
    so = symbolic_output(d)
    assert so.poly.evaluate(list(x) + [dl[k] for k in so.deltas]) == eval_rounded(d, x, dl)
    assert eval_exact(d, x) == extract_polynomial(d).evaluate(x)


@given(steps, st.lists(rationals(), min_size=3, max_size=3), st.lists(small, min_size=1, max_size=8),
       st.tuples(*[st.sampled_from([1, -1])] * 3))
@settings(max_examples=60)
def test_negating_sources_equals_negating_inputs(plan, x, dv, signs):
    d = build(3, plan)
    dl = deltas_for(d, dv)
    flipped = negate_sources(d, signs)
    assert eval_rounded(flipped, x, dl) == eval_rounded(d, [s * v for s, v in zip(signs, x)], dl)


@given(steps)
@settings(max_examples=60)
def test_text_round_trip(plan):
    d = build(2, plan)
    again = read_dag(format_dag(d))
    assert format_dag(again) == format_dag(d)
    assert extract_polynomial(again) == extract_polynomial(d)


@given(steps)
@settings(max_examples=40)
def test_homogeneity_methods_agree(plan):
    d = build(2, plan)
    a = check_homogeneous_algorithm(d)
    b = check_homogeneous_algorithm(d, method="symbolic")
    assert (a.ok, a.degree) == (b.ok, b.degree)


def test_naive_sum_exact_cancellation():
    d = read_dag(corpus_text("naive_sum.dag"))
    e = Fraction(1, 10**8)
    got = eval_rounded(d, (1, 1, -2), {1: e, 2: e})
    assert got == 2 * e * (1 + e)
    assert eval_exact(d, (1, 1, -2)) == 0


def test_error_expansion_first_order():
    d = read_dag(corpus_text("naive_sum.dag"))
    ex = error_expansion(d, order=1)
    terms = {a: str(p) for a, p in ex.terms.items()}
    assert terms[(0, 0)] == str(P("x1+x2+x3"))
    assert terms[(1, 0)] == str(P("x1+x2", 3))
    assert terms[(0, 1)] == str(P("x1+x2+x3"))


def test_validation_reports_problems():
    nodes = (Node(1, "source", var=0), Node(2, "add", (Ref(1), Ref(3)), delta=1),
             Node(3, "mul", (Ref(2), Ref(1)), delta=1))
    codes = {dg.code for dg in validate(Dag(1, nodes, Ref(3)))}
    assert {"cycle", "delta"} <= codes
    bad = (Node(1, "source", var=0, delta=4), Node(2, "bbox", (Ref(1),), op="f", delta=1))
    codes = {dg.code for dg in validate(Dag(1, bad, Ref(2)))}
    assert {"delta", "unknown-op"} <= codes


def test_delta_assignment_bounds():
    with pytest.raises(ValueError):
        DeltaAssignment({1: Fraction(1, 2)}, eps=Fraction(1, 4))
    with pytest.raises(ValueError):
        DeltaAssignment({}, eps=1)


def test_reader_errors():
    with pytest.raises(FormatError):
        read_dag("dag a nvars=1\nnode 1 source x1\n")
    with pytest.raises(FormatError):
        read_dag("dag a nvars=1\nnode 1 source x1\nnode 2 add 1 1 d=1\nnode 3 add 2 2\nout 3\n")
    with pytest.raises(FormatError):
        read_dag("dag a nvars=1\nnode 1 source y\nout 1\n")


def test_black_box_ops_and_exactness():
    text = ("op fma arity=3 poly=x1 + x2*x3\nop plus arity=2 poly=x1+x2 exact\n"
            "dag f nvars=3\nnode 1 source x1\nnode 2 source x2\nnode 3 source x3\n"
            "node 4 bbox fma 1 2 -3\nnode 5 bbox plus 4 1\nout 5\n")
    d = read_dag(text)
    assert d.delta_indices() == [1]
    assert extract_polynomial(d) == P("2*x1 - x2*x3")
    assert eval_rounded(d, (1, 2, 3), {1: Fraction(1, 2)}) == -5 * Fraction(3, 2) + 1
    assert check_homogeneous_algorithm(d).ok is False


def test_program_round_trip_and_selection():
    prog = gen_motzkin()
    again = read_algorithm(format_algorithm(prog))
    assert format_algorithm(again) == format_algorithm(prog)
    for x in [(1, 2, 3), (-1, 2, -3), (0, 1, 0), (1, -1, 1)]:
        assert eval_exact(again, x) == eval_exact(prog, x)


def test_builder_scale_uses_doubling():
    b = DagBuilder(1)
    d = b.build(b.scale(b.source(0), 5))
    assert extract_polynomial(d) == P("5*x1")
    assert all(n.kind in ("source", "add", "sub") for n in d.nodes)
