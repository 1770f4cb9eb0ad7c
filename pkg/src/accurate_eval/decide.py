"""Decision procedures for accurate evaluability.

Complex inputs with classical arithmetic: a homogeneous integer polynomial is
evaluable exactly when it factors into ``x_i``, ``x_i + x_j``, ``x_i - x_j``
times an integer.  Affine black boxes enlarge the factor set by their derived
forms.  Over the reals only partial answers exist; a zero of ``p`` in general
position is a certificate of failure.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Iterable, Sequence

from .dag import BlackBoxOp, Dag, DagBuilder, Ref
from .exact import nullspace
from .poly import Polynomial, substitute_linear, support_projection, try_divide_exact

EVALUABLE = "Evaluable"
NOT_EVALUABLE = "NotEvaluable"
UNKNOWN = "Unknown"


class HypothesisError(ValueError):
    """Input violates the hypotheses under which a decision is valid."""


# allowable forms

@dataclass(frozen=True, order=True)
class AllowableForm:
    """``Z`` is ``x_i``, ``S`` is ``x_i + x_j``, ``D`` is ``x_i - x_j`` (0-based, i < j)."""

    kind: str
    i: int
    j: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("Z", "S", "D"):
            raise ValueError(f"unknown form kind {self.kind!r}")
        if self.kind == "Z" and self.j is not None:
            raise ValueError("Z forms take one index")
        if self.kind != "Z" and (self.j is None or not self.i < self.j):
            raise ValueError("S and D forms need indices i < j")

    def poly(self, n: int) -> Polynomial:
        xi = Polynomial.variable(n, self.i)
        if self.kind == "Z":
            return xi
        xj = Polynomial.variable(n, self.j)
        return xi + xj if self.kind == "S" else xi - xj

    def vector(self, n: int) -> list[int]:
        v = [0] * n
        v[self.i] = 1
        if self.kind != "Z":
            v[self.j] = 1 if self.kind == "S" else -1
        return v

    def __str__(self) -> str:
        if self.kind == "Z":
            return f"x{self.i + 1}"
        return f"x{self.i + 1}{'+' if self.kind == 'S' else '-'}x{self.j + 1}"


def allowable_forms(n: int) -> list[AllowableForm]:
    """All ``n + 2*C(n, 2)`` forms: Z's, then S's, then D's."""
    if n < 1:
        raise ValueError("n must be at least 1")
    pairs = list(itertools.combinations(range(n), 2))
    return ([AllowableForm("Z", i) for i in range(n)]
            + [AllowableForm("S", i, j) for i, j in pairs]
            + [AllowableForm("D", i, j) for i, j in pairs])


def as_allowable_form(f: Polynomial) -> AllowableForm | None:
    """Recognise a monic allowable form polynomial."""
    if f.degree() != 1 or f.constant_term() != 0:
        return None
    coeffs = {e.index(1): c for e, c in f.terms.items()}
    idx = sorted(coeffs)
    if len(idx) == 1 and coeffs[idx[0]] == 1:
        return AllowableForm("Z", idx[0])
    if len(idx) == 2 and coeffs[idx[0]] == 1 and coeffs[idx[1]] in (1, -1):
        return AllowableForm("S" if coeffs[idx[1]] == 1 else "D", idx[0], idx[1])
    return None


def monic(f: Polynomial) -> tuple[Fraction, Polynomial]:
    """``(lead, g)`` with ``f == lead * g`` and ``g`` having leading coefficient 1."""
    _, c = f.leading_term()
    return c, f * (1 / c)


# factorization

@dataclass(frozen=True)
class Factorization:
    c: Fraction
    factors: tuple[Polynomial, ...]
    remainder: Polynomial

    def expand(self) -> Polynomial:
        out = self.remainder * self.c
        for f in self.factors:
            out = out * f
        return out

    @property
    def complete(self) -> bool:
        return self.remainder.is_constant()

    def text(self) -> str:
        parts = [str(self.c)] + [f"({f})" for f in self.factors]
        if not self.remainder == 1:
            parts.append(f"[{self.remainder}]")
        return "*".join(parts)


def _sort_key(f: Polynomial) -> str:
    return f.to_text()


def factor_allowable(p: Polynomial, forms: Sequence[Polynomial] | None = None) -> Factorization:
    """Greedy exact extraction of every listed form, as often as it divides.

    The remainder is made monic and its leading coefficient moves into ``c``.
    """
    if p.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    if forms is None:
        forms = [f.poly(p.nvars) for f in allowable_forms(p.nvars)]
    seen: set[Polynomial] = set()
    normalized = []
    for f in forms:
        if f.is_constant():
            continue
        g = monic(f)[1]
        if g not in seen:
            seen.add(g)
            normalized.append(g)
    rem = p
    factors: list[Polynomial] = []
    for f in normalized:
        while rem.degree() >= f.degree():
            q = try_divide_exact(rem, f)
            if q is None:
                break
            factors.append(f)
            rem = q
    c, rem = monic(rem)
    return Factorization(c, tuple(sorted(factors, key=_sort_key)), rem)


# verdicts

@dataclass(frozen=True)
class Verdict:
    status: str
    certificate: str  # factorization | remainder | witness | reason
    factorization: Factorization | None = None
    remainder: Polynomial | None = None
    witness: tuple | None = None
    restriction: Polynomial | None = None
    reason: str = ""
    dag: Dag | None = field(default=None, compare=False)

    def certificate_text(self) -> str:
        if self.certificate == "factorization":
            return self.factorization.text()
        if self.certificate == "remainder":
            return str(self.remainder)
        if self.certificate == "witness":
            return "(" + ",".join(str(v) for v in self.witness) + ")"
        return self.reason


def _check_complex_hypotheses(p: Polynomial) -> None:
    if p.is_zero():
        raise HypothesisError("zero polynomial")
    if not p.has_integer_coefficients():
        raise HypothesisError("coefficients must be integers")
    if p.constant_term() != 0:
        raise HypothesisError("constant term must be zero")


def decide_complex(p: Polynomial) -> Verdict:
    """Exact decision over C^n with addition, subtraction and multiplication."""
    _check_complex_hypotheses(p)
    fac = factor_allowable(p)
    if p.homogeneous_degree() is None:
        return Verdict(NOT_EVALUABLE, "remainder", factorization=fac, remainder=fac.remainder,
                       reason=f"inhomogeneous (degrees {p.min_degree()}..{p.degree()})")
    if not fac.complete:
        return Verdict(NOT_EVALUABLE, "remainder", factorization=fac, remainder=fac.remainder,
                       reason="remainder has a non-allowable variety")
    return Verdict(EVALUABLE, "factorization", factorization=fac,
                   dag=compile_product(fac.c, fac.factors))


# code generation

@dataclass(frozen=True)
class Placement:
    """How a black box yields a form: argument k reads ``sign * x_var`` (or 0)."""

    op: BlackBoxOp
    args: tuple[tuple[int | None, int], ...]
    lead: Fraction  # op(args) == lead * form


def compile_product(c: int | Fraction, factors: Sequence[Polynomial],
                    placements: dict[Polynomial, Placement] | None = None,
                    name: str = "product", constants: bool = False) -> Dag:
    """DAG for ``c * prod(factors)``: balanced product, then repeated addition.

    Factors must be allowable forms, or forms listed in ``placements`` (one
    black-box call each).  ``c`` must be an integer unless ``constants`` admits
    a scaling black box.
    """
    c = Fraction(c)
    if not factors:
        raise ValueError("a constant cannot be computed without inputs")
    placements = placements or {}
    n = factors[0].nvars
    b = DagBuilder(n, name)
    refs: list[Ref] = []
    for f in factors:
        form = as_allowable_form(f)
        if form is not None:
            if form.kind == "Z":
                refs.append(b.source(form.i))
            elif form.kind == "S":
                refs.append(b.add(b.source(form.i), b.source(form.j)))
            else:
                refs.append(b.sub(b.source(form.i), b.source(form.j)))
            continue
        pl = placements.get(f)
        if pl is None:
            raise ValueError(f"factor {f} is neither allowable nor an admitted black-box form")
        args = []
        for var, sign in pl.args:
            if var is None:
                z = b.sub(b.source(0), b.source(0))  # exact zero
                args.append(z)
            else:
                r = b.source(var)
                args.append(-r if sign < 0 else r)
        refs.append(b.bbox(pl.op, args))
        c /= pl.lead
    out = b.product(refs)
    if c.denominator == 1:
        out = b.scale(out, int(c))
    elif constants:
        op = BlackBoxOp(f"scale[{c}]", 1, Polynomial(1, {(1,): c}))
        out = b.bbox(op, [out])
    else:
        raise ValueError("classical arithmetic has no constants; c must be an integer")
    return b.build(out)


# real case

@dataclass(frozen=True)
class Subspace:
    n: int
    forms: tuple[AllowableForm, ...]
    basis: tuple[tuple[Fraction, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def parametrize(self) -> list[Polynomial]:
        """Images ``x_i = sum_j basis[j][i] * s_j`` in ``dim`` parameters."""
        r = self.dim
        return [Polynomial(r, {tuple(int(k == j) for k in range(r)): v[i]
                               for j, v in enumerate(self.basis)}) for i in range(self.n)]

    def contains(self, y: Sequence) -> bool:
        return all(sum(a * b for a, b in zip(f.vector(self.n), y)) == 0 for f in self.forms)


def allow_subspace(x: Sequence) -> Subspace:
    """Intersection of all allowable hyperplanes through ``x``."""
    x = [Fraction(v) for v in x]
    n = len(x)
    forms = [f for f in allowable_forms(n) if sum(a * b for a, b in zip(f.vector(n), x)) == 0]
    basis = nullspace([f.vector(n) for f in forms], n)
    return Subspace(n, tuple(forms), tuple(tuple(v) for v in basis))


@dataclass(frozen=True)
class GeneralPosition:
    flag: bool
    restriction: Polynomial
    subspace: Subspace

    def __bool__(self) -> bool:
        return self.flag


def is_general_position(p: Polynomial, x: Sequence) -> GeneralPosition:
    """Whether ``p`` restricted to Allow(x) is not identically zero."""
    if p.evaluate([Fraction(v) for v in x]) != 0:
        raise ValueError("point is not on the variety")
    sub = allow_subspace(x)
    restriction = substitute_linear(p, sub.parametrize())
    return GeneralPosition(not restriction.is_zero(), restriction, sub)


def real_nonevaluability_witness(p: Polynomial, candidates: Iterable[Sequence]) -> Verdict | None:
    """First candidate zero of ``p`` in general position, as a certificate."""
    for x in candidates:
        x = tuple(Fraction(v) for v in x)
        if len(x) != p.nvars or p.evaluate(x) != 0:
            continue
        gp = is_general_position(p, x)
        if gp:
            return Verdict(NOT_EVALUABLE, "witness", witness=x, restriction=gp.restriction,
                           reason="zero in general position")
    return None


def _divisors(n: int, limit: int = 10**12) -> list[int]:
    n = abs(n)
    if n == 0 or n > limit:
        return []
    out = set()
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            out.update((d, n // d))
    return sorted(out)


def rational_roots(coeffs: Sequence[Fraction]) -> list[Fraction]:
    """Rational roots of ``sum coeffs[k] * s^k`` by the rational root test."""
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) < 2:
        return []
    roots = set()
    lo = 0
    while coeffs[lo] == 0:
        lo += 1
    if lo:
        roots.add(Fraction(0))
    coeffs = coeffs[lo:]
    if len(coeffs) < 2:
        return sorted(roots)
    den = 1
    for c in coeffs:
        den = den * c.denominator // _gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    for a in _divisors(ints[0]):
        for b in _divisors(ints[-1]):
            for s in (Fraction(a, b), Fraction(-a, b)):
                if sum(c * s**k for k, c in enumerate(ints)) == 0:
                    roots.add(s)
    return sorted(roots)


def _gcd(a: int, b: int) -> int:
    from math import gcd
    return gcd(a, b)


def line_zero_candidates(p: Polynomial, seed: int = 0, lines: int = 64, spread: int = 5) -> list[tuple]:
    """Exact rational zeros of ``p`` on random integer lines ``a + s*b``."""
    rng = random.Random(seed)
    n = p.nvars
    out: list[tuple] = []
    for _ in range(lines):
        a = [rng.randint(-spread, spread) for _ in range(n)]
        b = [rng.randint(-spread, spread) for _ in range(n)]
        if not any(b):
            continue
        images = [Polynomial(1, {(0,): a[i], (1,): b[i]}) for i in range(n)]
        r = substitute_linear(p, images)
        if r.is_zero():
            continue
        coeffs = [r.coefficient((k,)) for k in range(r.degree() + 1)]
        for s in rational_roots(coeffs):
            pt = tuple(Fraction(ai) + s * bi for ai, bi in zip(a, b))
            if pt not in out:
                out.append(pt)
    return out


def _positive_even(p: Polynomial) -> bool:
    """Positive coefficients on even monomials: every term is nonnegative, so a
    monomial sum never cancels."""
    return all(c > 0 for _, c in p) and all(k % 2 == 0 for e, _ in p for k in e)


def decide_real(p: Polynomial, candidates: Iterable[Sequence] | None = None, seed: int = 0) -> Verdict:
    """Partial decision over R^n; Unknown is a legitimate outcome."""
    if p.is_zero():
        raise HypothesisError("zero polynomial")
    if p.has_integer_coefficients() and p.constant_term() == 0:
        v = decide_complex(p)
        if v.status == EVALUABLE:
            return v
    if p.constant_term() == 0 and p.has_integer_coefficients() and _positive_even(p):
        from .generators import gen_monomial_sum

        return Verdict(EVALUABLE, "reason", reason="sum of nonnegative monomials",
                       dag=gen_monomial_sum(p))
    pool = list(candidates) if candidates is not None else line_zero_candidates(p, seed)
    w = real_nonevaluability_witness(p, pool)
    if w is not None:
        return w
    return Verdict(UNKNOWN, "reason", reason=f"no general-position zero among {len(pool)} candidates")


# black boxes

@dataclass(frozen=True)
class DerivedVarietySpec:
    """Restriction data ``(T, K_Z, K_D, K_S, K_N)`` over an op's arguments (0-based).

    ``K_D`` pairs ``(a, b)`` impose ``z_b = z_a`` and ``K_S`` pairs impose
    ``z_b = -z_a``; the second variable is the one eliminated.
    """

    T: tuple[int, ...] = ()
    K_Z: tuple[int, ...] = ()
    K_D: tuple[tuple[int, int], ...] = ()
    K_S: tuple[tuple[int, int], ...] = ()
    K_N: tuple[int, ...] = ()


def derived_variety_polynomial(q: BlackBoxOp, spec: DerivedVarietySpec) -> list[Polynomial]:
    """Generators ``q_alpha`` of the derived variety ``V_I(q)``."""
    k = q.arity
    live = set(range(k))

    def check(i: int) -> None:
        if not 0 <= i < k:
            raise ValueError(f"index {i} outside the op's {k} arguments")
        if i not in live:
            raise ValueError(f"variable {i} was already eliminated")

    images = [Polynomial.variable(k, i) for i in range(k)]
    for i in spec.K_Z:
        check(i)
        live.discard(i)
        images[i] = Polynomial.zero(k)
    for pairs, sign in ((spec.K_D, 1), (spec.K_S, -1)):
        for a, b in pairs:
            if a == b:
                raise ValueError("identified variables must be distinct")
            check(a)
            check(b)
            live.discard(b)
            images[b] = images[a] * sign
    for i in spec.T:
        check(i)
    for i in spec.K_N:
        check(i)
        if i in spec.T:
            raise ValueError("negated variables must lie outside T")
    negate = [Polynomial.variable(k, i) * (-1 if i in spec.K_N else 1) for i in range(k)]
    images = [substitute_linear(im, negate) if not im.is_zero() else im for im in images]
    reduced = substitute_linear(q.poly, images)
    if not spec.T:
        return [reduced]
    return list(support_projection(reduced, spec.T).values())


def _affine(op: BlackBoxOp) -> bool:
    return op.poly.degree() <= 1


def derived_forms(op: BlackBoxOp, n: int) -> dict[Polynomial, Placement]:
    """Every nonconstant affine form an affine op yields on ``n`` inputs.

    Each argument reads 0 or ``+-x_i``; this covers zeroing, identification
    and negation in every combination.
    """
    if not _affine(op):
        raise ValueError(f"op {op.name} is not affine")
    if op.arity > 8:
        raise ValueError("arity above 8 is not enumerated")
    a = [op.poly.coefficient(tuple(int(i == j) for i in range(op.arity))) for j in range(op.arity)]
    c0 = op.poly.constant_term()
    states: dict[tuple, tuple] = {(Fraction(0),) * n: ()}
    for aj in a:
        nxt: dict[tuple, tuple] = {}
        for vec, pl in states.items():
            choices = [(None, 1)] + ([(i, s) for i in range(n) for s in (1, -1)] if aj else [])
            for var, s in choices:
                v = list(vec)
                if var is not None:
                    v[var] += s * aj
                nxt.setdefault(tuple(v), pl + ((var, s),))
        states = nxt
    out: dict[Polynomial, Placement] = {}
    for vec, pl in states.items():
        if not any(vec):
            continue
        terms = {tuple(int(i == j) for i in range(n)): vec[j] for j in range(n)}
        terms[(0,) * n] = c0
        lead, form = monic(Polynomial(n, terms))
        out.setdefault(form, Placement(op, pl, lead))
    return out


def _instances(op: BlackBoxOp, n: int) -> dict[Polynomial, Placement]:
    out: dict[Polynomial, Placement] = {}
    if op.arity > n:
        return out
    for perm in itertools.permutations(range(n), op.arity):
        for signs in itertools.product((1, -1), repeat=op.arity):
            images = [Polynomial.variable(n, v) * s for v, s in zip(perm, signs)]
            f = substitute_linear(op.poly, images)
            if f.is_constant():
                continue
            lead, g = monic(f)
            out.setdefault(g, Placement(op, tuple(zip(perm, signs)), lead))
    return out


def decide_blackbox_affine(p: Polynomial, ops: Sequence[BlackBoxOp]) -> Verdict:
    """Complex-case decision with affine black boxes; scaling by any rational is admitted."""
    if p.is_zero():
        raise HypothesisError("zero polynomial")
    n = p.nvars
    classical = [f.poly(n) for f in allowable_forms(n)]
    placements: dict[Polynomial, Placement] = {}
    nonaffine = [op for op in ops if not _affine(op)]
    for op in ops:
        found = derived_forms(op, n) if _affine(op) else _instances(op, n)
        for f, pl in found.items():
            placements.setdefault(f, pl)
    extra = [f for f in placements if f not in set(classical)]
    fac = factor_allowable(p, classical + sorted(extra, key=_sort_key))
    if fac.complete:
        dag = compile_product(fac.c, fac.factors, placements, constants=True) if fac.factors else None
        reason = "" if not nonaffine else "sufficiency via op instances"
        return Verdict(EVALUABLE, "factorization", factorization=fac, dag=dag, reason=reason)
    if nonaffine:
        names = ",".join(op.name for op in nonaffine)
        return Verdict(UNKNOWN, "reason", factorization=fac, remainder=fac.remainder,
                       reason=f"non-affine ops ({names}); only the sufficient test applies")
    return Verdict(NOT_EVALUABLE, "remainder", factorization=fac, remainder=fac.remainder,
                   reason="remainder is not a product of derived affine forms")
