"""Constructors for accurate evaluation algorithms."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .dag import (Branch, BranchProgram, BlackBoxOp, Comparison, Dag, DagBuilder, Ref,
                  embed_dag, extract_polynomial, leaves_of, negate_sources)
from .decide import HypothesisError
from .poly import Polynomial


# monomial sums

def _check_integer(p: Polynomial) -> None:
    if p.is_zero():
        raise HypothesisError("zero polynomial")
    if not p.has_integer_coefficients():
        raise HypothesisError("monomial sums need integer coefficients")
    if p.constant_term() != 0:
        raise HypothesisError("a nonzero constant cannot be produced without constants")


def _monomial_refs(b: DagBuilder, p: Polynomial) -> list[Ref]:
    refs = []
    for e, c in p.items():
        factors = [b.source(i) for i, k in enumerate(e) for _ in range(k)]
        refs.append(b.scale(b.product(factors), int(c)))
    return refs


def gen_monomial_sum(p: Polynomial, name: str = "monomial_sum") -> Dag:
    """Each monomial by balanced multiplication, its coefficient by doubling,
    then one balanced sum.  Negative coefficients ride on dotted edges."""
    _check_integer(p)
    b = DagBuilder(p.nvars, name)
    return b.build(b.total(_monomial_refs(b, p)))


def rounding_depth(d: Dag) -> int:
    """Largest number of ``(1+delta)`` factors on any single product term of the output.

    Sources count 0, a product node adds both inputs, a sum keeps the larger.
    """
    f: dict[int, int] = {}
    for n in d.order:
        own = 0 if n.delta is None else 1
        ins = [f[r.node] for r in n.inputs]
        if n.kind == "source":
            f[n.id] = 0
        elif n.kind == "mul":
            f[n.id] = own + sum(ins)
        elif n.kind in ("add", "sub"):
            f[n.id] = own + max(ins)
        else:
            f[n.id] = own + sum(ins)  # conservative for black boxes
    return f[d.output.node]


def monomial_sum_bound(p: Polynomial, d: Dag, eps: Fraction, p_min: Fraction) -> Fraction:
    """``sum |c| * ((1+eps)^f - 1) / p_min`` for a monomial-sum DAG on the unit sphere."""
    f = rounding_depth(d)
    return sum(abs(c) for _, c in p) * ((1 + Fraction(eps)) ** f - 1) / Fraction(p_min)


# Motzkin

def _motzkin_case(j: int) -> Dag:
    """The leaf valid when ``x1, x3`` and ``x2, x3`` share signs, written in
    ``a = x1 - x3``, ``b = x2 - x3`` and ``z = x3``."""
    bld = DagBuilder(3, "motzkin_case")
    x1, x2, z = bld.source(0), bld.source(1), bld.source(2)
    a, b = bld.sub(x1, z), bld.sub(x2, z)
    mul, add = bld.mul, bld.add
    a2, b2, ab = mul(a, a), mul(b, b), mul(a, b)
    a3, b3 = mul(a2, a), mul(b2, b)
    a4, b4 = mul(a2, a2), mul(b2, b2)
    ba2, b2a = mul(b, a2), mul(b2, a)
    z2 = mul(z, z)
    z3, z4 = mul(z2, z), mul(z2, z2)
    sc = bld.scale

    c4 = sc(add(add(a2, b2), ab), 4)
    c3 = sc(add(add(add(sc(a3, 2), sc(ba2, 5)), sc(b2a, 5)), sc(b3, 2)), 2)
    c2 = add(add(add(add(a4, sc(mul(b, a3), 8)), sc(mul(b2, a2), 9)), sc(mul(b3, a), 8)), b4)
    c1 = sc(mul(mul(b, a), add(add(add(a3, sc(ba2, 2)), sc(b2a, 2)), b3)), 2)
    c0 = mul(mul(b2, a2), add(a2, b2))
    terms = [mul(z4, c4), mul(z3, c3), mul(z2, c2), mul(z, c1), c0]
    out = terms[0]
    for t in terms[1:]:
        out = add(out, t)
    if j != 1:
        out = sc(out, j)
    return bld.build(out)


def motzkin_polynomial(j: int = 1, k: int | None = None) -> Polynomial:
    k = 3 * j if k is None else k
    x1, x2, x3 = (Polynomial.variable(3, i) for i in range(3))
    return x3**6 * j + x1**2 * x2**2 * (x1**2 * j + x2**2 * j - x3**2 * k)


def gen_motzkin(j: int = 1, k: int | None = None, axis_guard: bool = True) -> BranchProgram:
    """Branching program for ``M_{j,3j}``.

    Tests ``0 <= x3`` and then ``(x_i - x3)^2 <= (x_i + x3)^2`` for i = 1, 2
    pick signs ``s``; the leaf is the sign-matched case applied to ``s * x``.

    ``M`` also vanishes at ``(±1, 0, 0)`` and ``(0, ±1, 0)``, where the sign-matched
    case loses accuracy.  With ``axis_guard`` a first test sends every point with
    ``2*C <= A + B + D`` (``C`` the negative monomial's magnitude, ``A, B, D`` the
    positive ones) to a monomial sum, whose relative error there is at most
    ``3*((1+eps)^f - 1)``.  Without it the program has exactly the eight cases.
    """
    if k is not None and k != 3 * j:
        raise ValueError("the branching algorithm needs k = 3j")
    if j < 1:
        raise ValueError("j must be a positive integer")
    base = _motzkin_case(j)
    x1, x2, x3 = (Polynomial.variable(3, i) for i in range(3))
    zero = Polynomial.zero(3)

    def leaf(s: tuple[int, int, int]) -> Dag:
        tag = "".join("+" if v > 0 else "-" for v in s)
        return negate_sources(base, s, f"motzkin_{tag}")

    def same(xi: Polynomial) -> tuple[Comparison, ...]:
        return (Comparison((xi - x3) ** 2, "<=", (xi + x3) ** 2),)

    def subtree(s3: int) -> Branch:
        def inner(s1: int) -> Branch:
            return Branch(same(x2), leaf((s1, s3, s3)), leaf((s1, -s3, s3)))
        return Branch(same(x1), inner(s3), inner(-s3))

    root = Branch((Comparison(zero, "<=", x3),), subtree(1), subtree(-1))
    if axis_guard:
        m = motzkin_polynomial(j)
        neg = x1**2 * x2**2 * x3**2 * (3 * j)
        guard = Comparison(neg * 2, "<=", m + neg)
        root = Branch((guard,), gen_monomial_sum(m, "motzkin_axes"), root)
    return BranchProgram(3, root, f"motzkin_{j}")


# compensated summation

def compensated_sum_ops(summands: Sequence[Polynomial], k: int) -> list[BlackBoxOp]:
    """``csum<j>(x, y_1..y_{j-1}) = sum p_i(x) - sum y`` for j = 1..k, plus an exact
    ``ysum<k>`` that adds the stage outputs."""
    if not summands:
        raise ValueError("no summands")
    if k < 1:
        raise ValueError("k must be at least 1")
    n = summands[0].nvars
    total = sum(summands[1:], summands[0])
    ops = []
    for j in range(1, k + 1):
        m = n + j - 1
        poly = total.embed(m)
        for i in range(n, m):
            poly = poly - Polynomial.variable(m, i)
        ops.append(BlackBoxOp(f"csum{j}", m, poly))
    ops.append(BlackBoxOp(f"ysum{k}", k, sum((Polynomial.variable(k, i) for i in range(k)),
                                              Polynomial.zero(k)), exact=True))
    return ops


def gen_compensated_sum(summands: Sequence[Polynomial], k: int,
                        ops: Sequence[BlackBoxOp] | None = None) -> Dag:
    """Stage j rounds ``sum p - (y_1 + ... + y_{j-1})``; the stage outputs are
    then added exactly, leaving ``(1 - (-1)^k prod delta) * sum p``."""
    if ops is None:
        ops = compensated_sum_ops(summands, k)
    reg = {op.name: op for op in ops}
    needed = [f"csum{j}" for j in range(1, k + 1)] + [f"ysum{k}"]
    missing = [name for name in needed if name not in reg]
    if missing:
        raise ValueError(f"missing black-box registration: {', '.join(missing)}")
    n = summands[0].nvars
    b = DagBuilder(n, f"compensated_{k}")
    xs = [b.source(i) for i in range(n)]
    ys: list[Ref] = []
    for j in range(1, k + 1):
        ys.append(b.bbox(reg[f"csum{j}"], xs + ys))
    return b.build(b.bbox(reg[f"ysum{k}"], ys), prune_unused=False)


# branching assembly

@dataclass(frozen=True)
class Plan:
    """A region test (conjunction), an evaluator trusted on it, and its closeness ``1/N``."""

    guard: tuple[Comparison, ...]
    evaluator: Dag | BranchProgram
    eps: Fraction = Fraction(1)


def _with_correction(leaf: Dag, p: Polynomial) -> Dag:
    """``leaf + (p - leaf_poly)`` so that the leaf returns ``p`` exactly at delta = 0."""
    rest = p - extract_polynomial(leaf)
    if rest.is_zero():
        return leaf
    b = DagBuilder(p.nvars, leaf.name + "_corrected")
    main = embed_dag(b, leaf)
    extra = b.total(_monomial_refs(b, rest))
    return b.build(b.add(main, extra))


def _corrected(node, p: Polynomial):
    if isinstance(node, Branch):
        return Branch(node.guard, _corrected(node.then, p), _corrected(node.orelse, p))
    return _with_correction(node, p)


def branching_evaluator(p: Polynomial, plans: Sequence[Plan], default: Dag | None = None,
                        name: str = "branching") -> BranchProgram:
    """Try each plan's guard in order; fall back to ``default`` (a monomial sum).

    Leaves computing only a dominant part get the remaining terms added by a
    monomial sum, which keeps the exact answer at delta = 0.
    """
    seen: dict[tuple, Fraction] = {}
    for pl in plans:
        prev = seen.setdefault(pl.guard, pl.eps)
        if prev != pl.eps:
            raise ValueError("two plans share a region test but disagree on its closeness bound")
    node = _with_correction(default, p) if default is not None else gen_monomial_sum(p, "default")
    for pl in reversed(plans):
        ev = pl.evaluator
        sub = _corrected(ev.root if isinstance(ev, BranchProgram) else ev, p)
        node = Branch(pl.guard, sub, node)
    return BranchProgram(p.nvars, node, name)


def product_of(dags: Sequence[Dag], name: str = "product_of") -> Dag:
    """One DAG multiplying the outputs of several DAGs over the same inputs."""
    b = DagBuilder(dags[0].nvars, name)
    return b.build(b.product([embed_dag(b, d) for d in dags]))


def program_polynomials(d: Dag | BranchProgram) -> list[Polynomial]:
    return [extract_polynomial(leaf) for leaf in leaves_of(d)]
