"""Dominant terms near a variety component, and pruning of DAGs onto them.

A component is given by a zero group and sign chains, e.g.
``zero: x1,x2; chain: x3=-x4=x5``.  A standard change of variables maps it to
coordinate form ``x~_block = 0``; the Newton polytope of ``p`` in the block
variables then splits the nonnegative orthant of weights ``eta`` into regions,
each selecting the exponents ``Lambda_j`` that lead along curves
``x_i ~ t^{eta_i}``.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .dag import Comparison, Dag, Node, Ref, remove_unreachable
from .exact import nullspace, primitive, rank, rref
from .poly import Polynomial, substitute_linear, support_projection


# components

@dataclass(frozen=True)
class Chain:
    """``signs[0]*x_members[0] = signs[1]*x_members[1] = ...`` (0-based members)."""

    members: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.members) < 2 or len(self.members) != len(self.signs):
            raise ValueError("a chain needs at least two members, each with a sign")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("chain signs are +1 or -1")

    def __str__(self) -> str:
        head = self.signs[0]
        return "=".join(("" if s * head > 0 else "-") + f"x{m + 1}" for m, s in zip(self.members, self.signs))


@dataclass(frozen=True)
class ComponentSpec:
    zero: tuple[int, ...] = ()
    chains: tuple[Chain, ...] = ()
    nvars: int | None = None

    def __post_init__(self) -> None:
        used = list(self.zero) + [m for c in self.chains for m in c.members]
        if len(set(used)) != len(used):
            raise ValueError("component groups must be disjoint")
        if self.nvars is not None and any(not 0 <= i < self.nvars for i in used):
            raise ValueError("component refers to a variable outside the input range")

    def __str__(self) -> str:
        parts = []
        if self.zero:
            parts.append("zero: " + ",".join(f"x{i + 1}" for i in self.zero))
        parts.extend(f"chain: {c}" for c in self.chains)
        return "; ".join(parts)

    def contains(self, x: Sequence) -> bool:
        if any(x[i] != 0 for i in self.zero):
            return False
        return all(len({s * x[m] for m, s in zip(c.members, c.signs)}) == 1 for c in self.chains)

    def near_point(self, rng: random.Random, n: int, k: int) -> tuple[Fraction, ...]:
        """A point on the component, pushed off by ``10^-r`` with r = k mod 13 (r = 0: on it)."""
        base = [Fraction(rng.randint(-2**20, 2**20), 2**20) for _ in range(n)]
        for i in self.zero:
            base[i] = Fraction(0)
        for c in self.chains:
            v = base[c.members[0]] * c.signs[0]
            for m, s in zip(c.members, c.signs):
                base[m] = s * v
        rung = k % 13
        if rung == 0:
            return tuple(base)
        scale = Fraction(1, 10**rung)
        return tuple(b + scale * Fraction(rng.randint(-2**20, 2**20), 2**20) for b in base)


def parse_component(text: str, nvars: int | None = None) -> ComponentSpec:
    zero: list[int] = []
    chains: list[Chain] = []
    for part in filter(None, (s.strip() for s in text.split(";"))):
        m = re.fullmatch(r"(zero|chain)\s*:\s*(.+)", part)
        if not m:
            raise ValueError(f"bad component clause {part!r}")
        if m.group(1) == "zero":
            for tok in m.group(2).split(","):
                v = re.fullmatch(r"\s*x(\d+)\s*", tok)
                if not v:
                    raise ValueError(f"bad variable {tok!r}")
                zero.append(int(v.group(1)) - 1)
        else:
            members, signs = [], []
            for tok in m.group(2).split("="):
                v = re.fullmatch(r"\s*(-?)\s*x(\d+)\s*", tok)
                if not v:
                    raise ValueError(f"bad chain member {tok!r}")
                members.append(int(v.group(2)) - 1)
                signs.append(-1 if v.group(1) else 1)
            chains.append(Chain(tuple(members), tuple(signs)))
    return ComponentSpec(tuple(zero), tuple(chains), nvars)


# changes of variables

@dataclass(frozen=True)
class Group:
    """One basic change: ``x~_rep = x_rep`` and ``x~_l = x_l - s_rep*s_l*x_rep``.

    ``origin`` is ``chain`` for a chain of the component and ``merged`` for a
    block of zero-group variables tied together by the superset.
    """

    members: tuple[int, ...]
    signs: tuple[int, ...]
    rep: int
    origin: str

    def sign(self, m: int) -> int:
        return self.signs[self.members.index(m)]

    def factor(self, m: int) -> int:
        return self.sign(self.rep) * self.sign(m)


@dataclass(frozen=True)
class ChangeOfVariables:
    nvars: int
    zero: tuple[int, ...]  # zero-group variables kept as coordinates
    groups: tuple[Group, ...]

    @property
    def block(self) -> tuple[int, ...]:
        """Coordinates ``x~_i`` that vanish on the component, sorted."""
        out = set(self.zero)
        for g in self.groups:
            out.update(m for m in g.members if m != g.rep)
            if g.origin == "merged":
                out.add(g.rep)
        return tuple(sorted(out))

    def group_of(self, i: int) -> Group | None:
        return next((g for g in self.groups if i in g.members), None)

    def matrix(self) -> list[list[int]]:
        n = self.nvars
        c = [[int(i == j) for j in range(n)] for i in range(n)]
        for g in self.groups:
            for m in g.members:
                if m != g.rep:
                    c[m][g.rep] = -g.factor(m)
        return c

    def forward(self) -> list[Polynomial]:
        """``x~`` as polynomials in ``x``."""
        n = self.nvars
        return [Polynomial(n, {tuple(int(k == j) for k in range(n)): v for j, v in enumerate(row) if v})
                for row in self.matrix()]

    def inverse(self) -> list[Polynomial]:
        """``x`` as polynomials in ``x~``: ``x_l = x~_l + s*x~_rep``."""
        n = self.nvars
        out = [Polynomial.variable(n, i) for i in range(n)]
        for g in self.groups:
            for m in g.members:
                if m != g.rep:
                    out[m] = out[m] + Polynomial.variable(n, g.rep) * g.factor(m)
        return out

    def to_new(self, p: Polynomial) -> Polynomial:
        return substitute_linear(p, self.inverse())

    def to_old(self, p: Polynomial) -> Polynomial:
        return substitute_linear(p, self.forward())

    def rows(self) -> list[str]:
        out = []
        for i, row in enumerate(self.matrix()):
            terms = []
            for j, v in enumerate(row):
                if v:
                    sign = "-" if v < 0 else ("+" if terms else "")
                    terms.append(f"{sign}x{j + 1}")
            out.append(f"x~{i + 1}=" + "".join(terms))
        return out

    def __str__(self) -> str:
        return ", ".join(self.rows())


def _zero_options(zero: Sequence[int]) -> list[list[Group]]:
    """Every way to tie disjoint blocks (size >= 2) of the zero group into chains."""
    if not zero:
        return [[]]
    first, rest = zero[0], list(zero[1:])
    out = [opt for opt in _zero_options(rest)]
    for size in range(1, len(rest) + 1):
        for others in itertools.combinations(rest, size):
            members = (first,) + others
            remaining = [v for v in rest if v not in others]
            tails = _zero_options(remaining)
            for signs in itertools.product((1, -1), repeat=size):
                sg = (1,) + signs
                for rep in members:
                    g = Group(members, sg, rep, "merged")
                    out.extend([g] + t for t in tails)
    return out


def enumerate_standard_changes(spec: ComponentSpec, nvars: int | None = None) -> list[ChangeOfVariables]:
    """All standard changes: zero-group ties times a representative per chain.

    Chains are never split: a split leaves the component outside coordinate form.
    """
    used = list(spec.zero) + [m for c in spec.chains for m in c.members]
    n = nvars or spec.nvars or (max(used) + 1 if used else 0)
    chain_choices = [[Group(c.members, c.signs, rep, "chain") for rep in c.members] for c in spec.chains]
    out = []
    for zopt in _zero_options(sorted(spec.zero)):
        tied = {m for g in zopt for m in g.members}
        kept = tuple(v for v in sorted(spec.zero) if v not in tied)
        for cgroups in itertools.product(*chain_choices):
            out.append(ChangeOfVariables(n, kept, tuple(zopt) + tuple(cgroups)))
    return out


def identity_change(spec: ComponentSpec, nvars: int, reps: Sequence[int] | None = None) -> ChangeOfVariables:
    """The change that keeps the zero group and uses the given (or first) chain representatives."""
    groups = []
    for k, c in enumerate(spec.chains):
        rep = reps[k] if reps is not None else c.members[0]
        groups.append(Group(c.members, c.signs, rep, "chain"))
    return ChangeOfVariables(nvars, tuple(sorted(spec.zero)), tuple(groups))


# regions

Vec = tuple[int, ...]


def _dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def _argmin(eta: Sequence, lams: Sequence[Vec]) -> frozenset:
    vals = [_dot(eta, lam) for lam in lams]
    m = min(vals)
    return frozenset(lam for lam, v in zip(lams, vals) if v == m)


@dataclass(frozen=True)
class DominanceRegion:
    """The weights selecting ``lam`` (closure: the cone spanned by ``rays``)."""

    block: tuple[int, ...]
    lam: tuple[Vec, ...]
    rays: tuple[Vec, ...]
    eta: Vec
    facet: bool
    support: tuple[Vec, ...] = field(repr=False, default=())

    @property
    def equalities(self) -> list[Vec]:
        a = self.lam[0]
        return [tuple(x - y for x, y in zip(b, a)) for b in self.lam[1:]]

    @property
    def inequalities(self) -> list[Vec]:
        """``v . eta > 0`` for each listed ``v``; with ``eta >= 0``."""
        a = self.lam[0]
        return [tuple(x - y for x, y in zip(b, a)) for b in self.support if b not in self.lam]

    def contains(self, eta: Sequence) -> bool:
        """Strict membership: ``eta >= 0``, nonzero, and ``argmin = lam``."""
        if any(v < 0 for v in eta) or not any(eta):
            return False
        return _argmin(eta, self.support) == frozenset(self.lam)

    def closure_contains(self, eta: Sequence) -> bool:
        """Whether ``eta`` is a nonnegative combination of the rays."""
        eta = [Fraction(v) for v in eta]
        if not any(eta):
            return True
        k = len(eta)
        for size in range(1, min(k, len(self.rays)) + 1):
            for sub in itertools.combinations(self.rays, size):
                if rank(sub) != size:
                    continue
                coeffs = _solve_combination(sub, eta)
                if coeffs is not None and all(c >= 0 for c in coeffs):
                    return True
        return False

    def lam_text(self) -> str:
        return "{" + ",".join("(" + ",".join(map(str, lam)) + ")" for lam in self.lam) + "}"


def _solve_combination(rays: Sequence[Vec], target: Sequence[Fraction]) -> list[Fraction] | None:
    """Coefficients ``c`` with ``sum c_i rays_i = target`` (independent rays), or None."""
    k = len(target)
    m = len(rays)
    aug = [[Fraction(rays[j][i]) for j in range(m)] + [target[i]] for i in range(k)]
    red, piv = rref(aug)
    if m in piv:
        return None
    coeffs = [Fraction(0)] * m
    for row, pc in zip(red, piv):
        coeffs[pc] = row[m]
    return coeffs


def dominance_regions(p: Polynomial, block: Iterable[int], limit: int = 200_000) -> list[DominanceRegion]:
    """Regions of nonnegative weights on ``block`` by leading exponent set.

    Rays are found as one-dimensional intersections of the coordinate
    hyperplanes and the tie hyperplanes ``eta.(l - m) = 0``; a candidate
    exponent set ``F`` is a region when summing the rays whose leading set
    contains ``F`` gives a weight whose leading set is exactly ``F``.
    """
    block = tuple(block)
    if not block:
        raise ValueError("block must be nonempty")
    lams = list(support_projection(p, block))
    k = len(block)
    planes: list[Vec] = [tuple(int(i == j) for i in range(k)) for j in range(k)]
    seen_planes = set(planes)
    for a, b in itertools.combinations(lams, 2):
        v = primitive([x - y for x, y in zip(a, b)])
        if any(v) and v not in seen_planes and tuple(-c for c in v) not in seen_planes:
            seen_planes.add(v)
            planes.append(v)
    rays: set[Vec] = set()
    if k == 1:
        rays.add((1,))
    else:
        count = 0
        for sub in itertools.combinations(planes, k - 1):
            count += 1
            if count > limit:
                raise ValueError("Newton polytope too large for brute-force ray enumeration")
            ns = nullspace(list(sub), k)
            if len(ns) != 1:
                continue
            r = primitive(ns[0])
            if all(c <= 0 for c in r):
                r = tuple(-c for c in r)
            if all(c >= 0 for c in r) and any(r):
                rays.add(r)
    rays_l = sorted(rays)
    lead = {r: _argmin(r, lams) for r in rays_l}
    faces = set(lead.values())
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(list(faces), 2):
            c = a & b
            if c and c not in faces:
                faces.add(c)
                changed = True
    out = []
    for f in faces:
        gens = _extreme(tuple(r for r in rays_l if lead[r] >= f))
        if not gens:
            continue
        eta = tuple(sum(col) for col in zip(*gens))
        if _argmin(eta, lams) != f:
            continue
        facet = rank(gens) == 1
        out.append(DominanceRegion(block, tuple(sorted(f)), gens, eta, facet, tuple(lams)))
    out.sort(key=lambda r: (not r.facet, r.lam))
    return out


def _extreme(rays: tuple[Vec, ...]) -> tuple[Vec, ...]:
    """Drop rays that are nonnegative combinations of the others."""
    keep = list(rays)
    for r in rays:
        others = [q for q in keep if q != r]
        if others and DominanceRegion((), (), tuple(others), (), False).closure_contains(r):
            keep = others
    return tuple(keep)


def region_for(p: Polynomial, block: Sequence[int], eta: Sequence[int]) -> DominanceRegion:
    """The region whose relative interior holds ``eta``."""
    for r in dominance_regions(p, block):
        if r.contains(eta):
            return r
    raise ValueError(f"weight {tuple(eta)} lies in no region")


# dominant terms

@dataclass(frozen=True)
class DominantTerm:
    poly: Polynomial  # original variables
    poly_new: Polynomial  # after the change of variables
    change: ChangeOfVariables
    region: DominanceRegion
    spec: ComponentSpec | None = None


def dominant_term(p: Polynomial, change: ChangeOfVariables, region: DominanceRegion,
                  spec: ComponentSpec | None = None) -> DominantTerm:
    """The ``Lambda_j`` slice of ``p`` in the new variables, mapped back."""
    pn = change.to_new(p)
    proj = support_projection(pn, change.block)
    n = p.nvars
    out = Polynomial.zero(n)
    for lam in region.lam:
        q = proj.get(lam)
        if q is None:
            continue
        exps = [0] * n
        for i, e in zip(change.block, lam):
            exps[i] = e
        out = out + q * Polynomial.monomial(exps)
    return DominantTerm(change.to_old(out), out, change, region, spec)


class ExpCondError(AssertionError):
    """The weight condition held for some generators of a region but not others."""


def _exp_cond(eta_full: dict[int, Fraction], change: ChangeOfVariables) -> bool:
    for g in change.groups:
        nr = eta_full.get(g.rep, 0)
        if any(eta_full.get(m, 0) < nr for m in g.members if m != g.rep):
            return False
    return True


def _full(eta: Sequence, block: Sequence[int]) -> dict[int, Fraction]:
    return {i: Fraction(v) for i, v in zip(block, eta)}


def satisfies_exp_cond(region: DominanceRegion, change: ChangeOfVariables) -> bool:
    """Representative weights never exceed those of their group members.

    Checked on the interior weight and every ray; a mixed answer raises.
    """
    results = {_exp_cond(_full(v, region.block), change) for v in (region.eta,) + region.rays}
    if len(results) > 1:
        raise ExpCondError("weight condition differs across the region")
    return results.pop()


# widened cones and slices

@dataclass(frozen=True)
class WidenedCone:
    """``{eta >= 0 : a . eta >= 0 for a in rows}`` over block coordinates."""

    rows: tuple[Vec, ...]
    k: int

    @classmethod
    def from_slopes(cls, lo: Fraction | None, hi: Fraction | None) -> "WidenedCone":
        """Two-dimensional cone ``lo <= eta2/eta1 <= hi``."""
        rows = []
        if lo is not None:
            lo = Fraction(lo)
            rows.append(primitive([-lo, 1]))
        if hi is not None:
            hi = Fraction(hi)
            rows.append(primitive([hi, -1]))
        return cls(tuple(rows), 2)

    @classmethod
    def around(cls, region: DominanceRegion, facets: Sequence[DominanceRegion]) -> "WidenedCone":
        """Voronoi cell of the region's ray among normalized facet rays on the simplex."""
        if not region.facet:
            raise ValueError("widened cones are built around facet rays")

        def norm(r: Vec) -> list[Fraction]:
            s = sum(r)
            return [Fraction(v, s) for v in r]

        cj = norm(region.rays[0])
        rows = []
        for other in facets:
            if other.rays[0] == region.rays[0]:
                continue
            cl = norm(other.rays[0])
            shift = sum(v * v for v in cl) - sum(v * v for v in cj)
            rows.append(primitive([shift - 2 * (a - b) for a, b in zip(cl, cj)]))
        return cls(tuple(rows), len(cj))

    def contains_weight(self, eta: Sequence) -> bool:
        return all(v >= 0 for v in eta) and all(_dot(a, eta) >= 0 for a in self.rows)

    def power_pairs(self) -> list[tuple[Vec, Vec]]:
        """Each row as ``(pos, neg)`` exponents: ``prod |x|^pos <= prod |x|^neg``."""
        return [(tuple(max(v, 0) for v in a), tuple(max(-v, 0) for v in a)) for a in self.rows]


def slice_membership(x: Sequence, cone: WidenedCone) -> bool:
    """Exact test that ``(-log|x_i|)`` lies in the cone, written as power inequalities.

    ``|x_i| <= 1`` encodes ``eta >= 0``.  Zero coordinates are compared directly
    in the power form (the limiting value of each inequality).
    """
    x = [abs(Fraction(v)) for v in x]
    if len(x) != cone.k:
        raise ValueError("point and cone dimensions differ")
    if any(v > 1 for v in x):
        return False
    for pos, neg in cone.power_pairs():
        lhs = Fraction(1)
        rhs = Fraction(1)
        for v, a, b in zip(x, pos, neg):
            lhs *= v**a
            rhs *= v**b
        if lhs > rhs:
            return False
    return True


def slice_guard(change: ChangeOfVariables, cone: WidenedCone, closeness: int) -> tuple[Comparison, ...]:
    """Exact scale-free tests for a point being in the slice and ``1/closeness`` near.

    With ``u_i = x~_i^2 / R^2`` (``R^2`` the squared norm of the other new
    coordinates) each cone row becomes ``prod u^pos <= prod u^neg`` cleared of
    denominators, and closeness is ``closeness^2 * sum x~_block^2 <= R^2``.
    """
    new = change.forward()
    block = change.block
    rest = [i for i in range(change.nvars) if i not in block]
    n = change.nvars
    r2 = sum((new[i] ** 2 for i in rest), Polynomial.zero(n))
    sq = [new[i] ** 2 for i in block]
    out = []
    for pos, neg in cone.power_pairs():
        lhs = Polynomial.constant(n, 1)
        rhs = Polynomial.constant(n, 1)
        for s, a, b in zip(sq, pos, neg):
            lhs = lhs * s**a
            rhs = rhs * s**b
        lhs = lhs * r2 ** sum(neg)
        rhs = rhs * r2 ** sum(pos)
        out.append(Comparison(lhs, "<=", rhs))
    near = sum(sq, Polynomial.zero(n)) * (closeness**2)
    out.append(Comparison(near, "<=", r2))
    return tuple(out)


def find_dominance_epsilon(p: Polynomial, change: ChangeOfVariables, region: DominanceRegion,
                           tol: Fraction = Fraction(1, 2), samples: int = 64, budget: int = 20,
                           seed: int = 0) -> int | None:
    """Smallest power of two ``N`` such that sampled points ``x~_block ~ t^eta`` with
    ``t <= 1/N`` satisfy ``|p - p_dom| <= tol*|p_dom|``; None when the budget runs out."""
    dom = dominant_term(p, change, region)
    pn, dn = change.to_new(p), dom.poly_new
    rng = random.Random(seed)
    block = change.block
    N = 1
    for _ in range(budget):
        ok = True
        for _ in range(samples):
            x = [Fraction(rng.randint(1, 2**10), 2**10) * rng.choice((1, -1)) for _ in range(p.nvars)]
            t = Fraction(1, N) * Fraction(rng.randint(1, 2**10), 2**10)
            for i, e in zip(block, region.eta):
                x[i] *= t**e
            dv = dn.evaluate(x)
            if dv == 0:
                continue
            if abs(pn.evaluate(x) - dv) > tol * abs(dv):
                ok = False
                break
        if ok:
            return N
        N *= 2
    return None


# pruning

class PruneError(ValueError):
    pass


def prune(d: Dag, change: ChangeOfVariables, eta: Sequence[int],
          region: DominanceRegion | None = None) -> Dag:
    """Keep only the lowest-order part of every node along ``x(t)``.

    Inputs follow ``x_l(t) = t^{n_l} x_l + s*t^{n_rep} x_rep``.  A sum whose
    inputs differ in lowest degree is replaced by the lower input; sources are
    redirected to their signed representative when that strictly lowers the
    degree.  Original rounding indices are kept.
    """
    block = change.block
    if len(eta) != len(block):
        raise PruneError(f"weight has {len(eta)} entries, block has {len(block)}")
    if any(int(v) != v or v < 0 for v in eta):
        raise PruneError("weights must be nonnegative integers")
    weights = {i: int(v) for i, v in zip(block, eta)}
    if region is not None:
        if not region.contains(eta):
            raise PruneError("weight is not inside the given region")
        if not satisfies_exp_cond(region, change):
            raise PruneError("region violates the representative weight condition")
    elif not _exp_cond({i: Fraction(v) for i, v in weights.items()}, change):
        raise PruneError("weight violates the representative weight condition")

    n = d.nvars
    tvar = Polynomial.variable(n + 1, n)

    def w(i: int) -> int:
        return weights.get(i, 0)

    def tpoly(i: int) -> Polynomial:
        base = Polynomial.variable(n + 1, i) * tvar ** w(i)
        g = change.group_of(i)
        if g is not None and g.rep != i:
            base = base + Polynomial.variable(n + 1, g.rep) * tvar ** w(g.rep) * g.factor(i)
        return base

    def low(q: Polynomial) -> int | None:
        return min((e[n] for e, _ in q), default=None)

    def second(q: Polynomial, first: int) -> int | None:
        return min((e[n] for e, _ in q if e[n] > first), default=None)

    # source redirection target, if any
    redirect: dict[int, tuple[int, int]] = {}
    for i in range(n):
        g = change.group_of(i)
        if g is not None and g.rep != i and w(g.rep) < w(i):
            redirect[i] = (g.rep, g.factor(i))

    by_id = d.by_id
    src_of_var = {nd.var: nd.id for nd in d.nodes if nd.kind == "source"}
    next_id = max(nd.id for nd in d.nodes) + 1
    extra: list[Node] = []

    def source_ref(var: int) -> Ref:
        nonlocal next_id
        if var not in src_of_var:
            src_of_var[var] = next_id
            extra.append(Node(next_id, "source", (), var, None, None))
            next_id += 1
        return Ref(src_of_var[var])

    def redirected(r: Ref) -> Ref:
        nd = by_id[r.node]
        if nd.kind == "source" and nd.var in redirect:
            rep, s = redirect[nd.var]
            base = source_ref(rep)
            return Ref(base.node, r.neg != (s < 0))
        return r

    alias: dict[int, Ref] = {}  # deleted node -> replacement
    deg: dict[int, int] = {}
    new_inputs: dict[int, tuple[Ref, ...]] = {}

    def resolve(r: Ref) -> Ref:
        while r.node in alias:
            a = alias[r.node]
            r = Ref(a.node, a.neg != r.neg)
        return r

    def is_source(r: Ref) -> bool:
        return by_id[r.node].kind == "source"

    def value_t(r: Ref) -> Polynomial:
        q = tpoly(by_id[r.node].var)
        return -q if r.neg else q

    for nd in d.order:
        if nd.kind == "source":
            deg[nd.id] = w(redirect[nd.var][0]) if nd.var in redirect else low(tpoly(nd.var))
            continue
        if nd.kind not in ("add", "sub", "mul"):
            raise PruneError(f"node {nd.id} is not a classical operation")
        a, b = (resolve(r) for r in nd.inputs)
        if nd.kind == "sub":
            b = Ref(b.node, not b.neg)
        if nd.kind == "mul":
            a2, b2 = redirected(a), redirected(b)
            new_inputs[nd.id] = (a2, b2)
            deg[nd.id] = deg[a.node] + deg[b.node]
            continue
        da, db = deg[a.node], deg[b.node]
        if a.node != b.node and da != db:
            keep = a if da < db else b
            alias[nd.id] = redirected(keep)
            deg[nd.id] = min(da, db)
            continue
        if is_source(a) and is_source(b):
            va, vb = value_t(a), value_t(b)
            s = va + vb
            la, lb = low(va), low(vb)
            if la == lb and low(s) is not None and low(s) > la:
                sa, sb = second(va, la), second(vb, lb)
                if sa is None or sb is None or sa == sb:
                    ins = (a, b)
                elif sa < sb:
                    ins = (a, redirected(b))
                else:
                    ins = (redirected(a), b)
            else:
                ins = (redirected(a), redirected(b))
        else:
            ins = (redirected(a), redirected(b))
        new_inputs[nd.id] = ins
        deg[nd.id] = _node_low(ins, by_id, extra, tpoly, low, deg, n)

    nodes: list[Node] = []
    for nd in d.nodes:
        if nd.id in alias:
            continue
        if nd.kind == "source":
            nodes.append(nd)
            continue
        ins = new_inputs[nd.id]
        kind = nd.kind
        if kind == "sub":
            kind = "add"
        nodes.append(Node(nd.id, kind, ins, nd.var, nd.op, nd.delta))
    nodes.extend(extra)
    out = resolve(d.output)
    out_node = next((x for x in nodes if x.id == out.node), None)
    if out_node is not None and out_node.kind == "source":
        out = redirected(out)
    pruned = Dag(n, tuple(nodes), out, d.name + "_pruned", d.ops)
    return _restore_subs(remove_unreachable(pruned))


def _node_low(ins, by_id, extra, tpoly, low, deg, n) -> int:
    """Lowest t-degree of a sum node; exact for two sources, the common degree otherwise."""
    srcs = {x.id: x for x in extra}
    srcs.update({k: v for k, v in by_id.items() if v.kind == "source"})
    if all(r.node in srcs for r in ins):
        total = Polynomial.zero(n + 1)
        for r in ins:
            q = tpoly(srcs[r.node].var)
            total = total + (-q if r.neg else q)
        v = low(total)
        return v if v is not None else 10**9
    return min(deg.get(r.node, 0) if r.node in deg else low(tpoly(srcs[r.node].var)) for r in ins)


def _restore_subs(d: Dag) -> Dag:
    """Write ``a + (-b)`` back as ``a - b`` for readability."""
    nodes = []
    for nd in d.nodes:
        if nd.kind == "add" and nd.inputs[1].neg and not nd.inputs[0].neg:
            nodes.append(Node(nd.id, "sub", (nd.inputs[0], Ref(nd.inputs[1].node)), nd.var, nd.op, nd.delta))
        else:
            nodes.append(nd)
    return Dag(d.nvars, tuple(nodes), d.output, d.name, d.ops)
