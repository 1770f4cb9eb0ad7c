"""Rounded-arithmetic algorithms as DAGs, plus branching programs over them.

Every non-source node computes its exact operation and multiplies the result
by ``(1 + delta_i)`` for its own index ``i``.  Negation lives on edges (a
``Ref`` with ``neg=True``) and is exact.  Black-box nodes evaluate a fixed
polynomial of their inputs with one rounding, unless the op is marked exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence, Union

from .poly import Polynomial, substitute_linear

CLASSICAL = ("add", "sub", "mul")
KINDS = ("source",) + CLASSICAL + ("bbox",)


@dataclass(frozen=True)
class Ref:
    """An edge endpoint: node id plus an exact-negation flag."""

    node: int
    neg: bool = False

    def __neg__(self) -> "Ref":
        return Ref(self.node, not self.neg)

    def __str__(self) -> str:
        return f"-{self.node}" if self.neg else str(self.node)


@dataclass(frozen=True)
class Node:
    id: int
    kind: str
    inputs: tuple[Ref, ...] = ()
    var: int | None = None  # 0-based, sources only
    op: str | None = None  # black-box name
    delta: int | None = None


@dataclass(frozen=True)
class BlackBoxOp:
    """A fixed polynomial offered as one primitive operation."""

    name: str
    arity: int
    poly: Polynomial
    exact: bool = False  # exact ops carry no rounding error

    def __post_init__(self) -> None:
        if self.poly.nvars != self.arity:
            raise ValueError(f"op {self.name}: polynomial has {self.poly.nvars} variables, arity is {self.arity}")


@dataclass(frozen=True)
class Dag:
    nvars: int
    nodes: tuple[Node, ...]
    output: Ref
    name: str = "dag"
    ops: tuple[BlackBoxOp, ...] = ()

    @cached_property
    def by_id(self) -> dict[int, Node]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def registry(self) -> dict[str, BlackBoxOp]:
        return {op.name: op for op in self.ops}

    @cached_property
    def order(self) -> list[Node]:
        """Nodes in a topological order (raises on cycles)."""
        return _toposort(self)

    def delta_indices(self) -> list[int]:
        return sorted(n.delta for n in self.nodes if n.delta is not None)

    def rounded_nodes(self) -> list[Node]:
        return [n for n in self.nodes if n.delta is not None]

    def reachable(self) -> set[int]:
        seen: set[int] = set()
        stack = [self.output.node]
        while stack:
            k = stack.pop()
            if k in seen or k not in self.by_id:
                continue
            seen.add(k)
            stack.extend(r.node for r in self.by_id[k].inputs)
        return seen

    def op_count(self) -> int:
        """Number of rounded operations reachable from the output."""
        live = self.reachable()
        return sum(1 for n in self.nodes if n.id in live and n.delta is not None)

    def with_output(self, out: Ref) -> "Dag":
        return Dag(self.nvars, self.nodes, out, self.name, self.ops)


def _toposort(d: Dag) -> list[Node]:
    by_id = d.by_id
    state: dict[int, int] = {}
    out: list[Node] = []
    for start in by_id:
        if start in state:
            continue
        stack = [(start, 0)]
        while stack:
            k, i = stack.pop()
            if i == 0:
                if state.get(k) == 2:
                    continue
                if state.get(k) == 1:
                    raise ValueError(f"cycle through node {k}")
                state[k] = 1
            node = by_id[k]
            if i < len(node.inputs):
                stack.append((k, i + 1))
                child = node.inputs[i].node
                if child not in by_id:
                    raise ValueError(f"node {k} references unknown node {child}")
                if state.get(child) == 1:
                    raise ValueError(f"cycle through node {child}")
                if state.get(child) != 2:
                    stack.append((child, 0))
            else:
                state[k] = 2
                out.append(node)
    return out


# validation

@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


def validate(d: Dag, registry: Mapping[str, BlackBoxOp] | None = None) -> list[Diagnostic]:
    """Structural checks; returns an empty list for a valid DAG."""
    reg = dict(d.registry)
    if registry:
        reg.update(registry)
    diags: list[Diagnostic] = []
    ids = [n.id for n in d.nodes]
    if len(set(ids)) != len(ids):
        diags.append(Diagnostic("duplicate-id", "node ids are not unique"))
    known = set(ids)
    deltas: dict[int, int] = {}
    for n in d.nodes:
        if n.kind not in KINDS:
            diags.append(Diagnostic("kind", f"node {n.id} has unknown kind {n.kind!r}"))
            continue
        for r in n.inputs:
            if r.node not in known:
                diags.append(Diagnostic("dangling", f"node {n.id} references unknown node {r.node}"))
            if r.node == n.id:
                diags.append(Diagnostic("cycle", f"node {n.id} feeds itself"))
        if n.kind == "source":
            if n.inputs:
                diags.append(Diagnostic("arity", f"source node {n.id} has inputs"))
            if n.var is None or not 0 <= n.var < d.nvars:
                diags.append(Diagnostic("variable", f"source node {n.id} has bad variable index"))
            if n.delta is not None:
                diags.append(Diagnostic("delta", f"source node {n.id} carries a rounding error"))
            continue
        if n.kind in CLASSICAL and len(n.inputs) != 2:
            diags.append(Diagnostic("arity", f"{n.kind} node {n.id} has {len(n.inputs)} inputs, expected 2"))
        exact = False
        if n.kind == "bbox":
            op = reg.get(n.op or "")
            if op is None:
                diags.append(Diagnostic("unknown-op", f"node {n.id} uses unregistered black box {n.op!r}"))
            else:
                exact = op.exact
                if len(n.inputs) != op.arity:
                    diags.append(Diagnostic(
                        "arity", f"black box {op.name} at node {n.id} has {len(n.inputs)} inputs, arity is {op.arity}"))
        if exact:
            if n.delta is not None:
                diags.append(Diagnostic("delta", f"exact node {n.id} carries a rounding error"))
        elif n.delta is None:
            diags.append(Diagnostic("delta", f"node {n.id} has no rounding index"))
        else:
            if n.delta in deltas:
                diags.append(Diagnostic("delta", f"rounding index {n.delta} used by nodes {deltas[n.delta]} and {n.id}"))
            deltas[n.delta] = n.id
    if d.output.node not in known:
        diags.append(Diagnostic("output", f"output references unknown node {d.output.node}"))
    if not any(dg.code in ("dangling", "cycle") for dg in diags):
        try:
            _toposort(d)
        except ValueError as exc:
            diags.append(Diagnostic("cycle", str(exc)))
    return diags


def ensure_valid(d: Dag) -> None:
    diags = validate(d)
    if diags:
        raise ValueError("invalid DAG: " + "; ".join(map(str, diags)))


# evaluation

Number = Union[int, Fraction, float]


@dataclass(frozen=True)
class DeltaAssignment:
    """Rounding errors keyed by node index, all bounded by ``eps``."""

    values: Mapping[int, Number]
    eps: Number = Fraction(1, 2)

    def __post_init__(self) -> None:
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        for k, v in self.values.items():
            if abs(v) > self.eps:
                raise ValueError(f"|delta_{k}| = {abs(v)} exceeds eps = {self.eps}")

    def __getitem__(self, k: int) -> Number:
        return self.values[k]

    @classmethod
    def zero(cls, d: "Dag | BranchProgram", eps: Number = Fraction(1, 2)) -> "DeltaAssignment":
        return cls({k: Fraction(0) for k in all_delta_indices(d)}, eps)


def _run(d: Dag, source: Callable[[int], object], rounded: Callable[[Node, object], object],
         bbox: Callable[[BlackBoxOp, list], object], post: Callable[[object], object] = lambda v: v) -> object:
    vals: dict[int, object] = {}
    reg = d.registry

    def arg(r: Ref) -> object:
        v = vals[r.node]
        return -v if r.neg else v

    for n in d.order:
        if n.kind == "source":
            vals[n.id] = source(n.var)
            continue
        if n.kind == "add":
            v = arg(n.inputs[0]) + arg(n.inputs[1])
        elif n.kind == "sub":
            v = arg(n.inputs[0]) - arg(n.inputs[1])
        elif n.kind == "mul":
            v = post(arg(n.inputs[0]) * arg(n.inputs[1]))
        elif n.kind == "bbox":
            op = reg.get(n.op or "")
            if op is None:
                raise KeyError(f"black box {n.op!r} is not registered")
            v = bbox(op, [arg(r) for r in n.inputs])
        else:
            raise ValueError(f"unknown node kind {n.kind!r}")
        vals[n.id] = post(rounded(n, v)) if n.delta is not None else v
    return arg(d.output)


def eval_rounded(d: "Dag | BranchProgram", x: Sequence[Number], delta: DeltaAssignment | Mapping[int, Number]) -> Number:
    """Value computed with each rounded node's result scaled by ``1 + delta``."""
    if isinstance(d, BranchProgram):
        return eval_rounded(d.select(x), x, delta)
    if len(x) != d.nvars:
        raise ValueError(f"point has {len(x)} coordinates, DAG has {d.nvars} inputs")
    vals = delta.values if isinstance(delta, DeltaAssignment) else delta

    def rounded(n: Node, v: object) -> object:
        if n.delta not in vals:
            raise KeyError(f"missing rounding error for index {n.delta}")
        return v * (1 + vals[n.delta])

    return _run(d, lambda i: x[i], rounded, lambda op, args: op.poly.evaluate(args))


def eval_exact(d: "Dag | BranchProgram", x: Sequence[Number]) -> Number:
    if isinstance(d, BranchProgram):
        d = d.select(x)
    return _run(d, lambda i: x[i], lambda n, v: v, lambda op, args: op.poly.evaluate(args))


def extract_polynomial(d: Dag) -> Polynomial:
    """The polynomial computed when every rounding error is zero."""
    n = d.nvars
    return _run(d, lambda i: Polynomial.variable(n, i), lambda node, v: v,
                lambda op, args: substitute_linear(op.poly, args))


@dataclass(frozen=True)
class SymbolicOutput:
    """Rounded output as one polynomial in ``x`` followed by the deltas."""

    poly: Polynomial
    nvars: int
    deltas: tuple[int, ...]  # delta index for each trailing variable

    def delta_support(self) -> set[tuple[tuple[int, int], ...]]:
        """Delta monomials that occur, as sorted (index, power) tuples."""
        out = set()
        for e, _ in self.poly:
            out.add(tuple((self.deltas[j], k) for j, k in enumerate(e[self.nvars:]) if k))
        return out

    def relabel(self, deltas: Sequence[int]) -> Polynomial:
        """The polynomial re-homed onto the delta index list ``deltas``."""
        pos = list(range(self.nvars)) + [self.nvars + list(deltas).index(k) for k in self.deltas]
        return self.poly.embed(self.nvars + len(deltas), pos)


def symbolic_output(d: Dag, order: int | None = None) -> SymbolicOutput:
    """Expand the rounded output with symbolic deltas, optionally truncated."""
    deltas = tuple(d.delta_indices())
    n, m = d.nvars, len(deltas)
    total = n + m
    slot = {k: n + j for j, k in enumerate(deltas)}
    dvars = range(n, total)

    def post(v: object) -> object:
        return v.truncate(dvars, order) if order is not None else v

    def rounded(node: Node, v: object) -> object:
        return v * (1 + Polynomial.variable(total, slot[node.delta]))

    poly = _run(d, lambda i: Polynomial.variable(total, i), rounded,
                lambda op, args: substitute_linear(op.poly, args), post)
    return SymbolicOutput(poly, n, deltas)


@dataclass(frozen=True)
class ErrorExpansion:
    """Coefficient polynomials ``p_alpha(x)`` of the rounded output in the deltas."""

    deltas: tuple[int, ...]
    order: int | None
    terms: dict[tuple[int, ...], Polynomial]

    def __getitem__(self, alpha: Sequence[int]) -> Polynomial:
        alpha = tuple(alpha)
        return self.terms.get(alpha, Polynomial.zero(self.nvars))

    @property
    def nvars(self) -> int:
        return next(iter(self.terms.values())).nvars if self.terms else 0

    def support(self) -> set[tuple[int, ...]]:
        return {a for a in self.terms if any(a)}


def error_expansion(d: Dag, order: int | None = None) -> ErrorExpansion:
    """Group the symbolic rounded output by delta monomial.

    The zero multi-index holds the exact polynomial; every other entry is the
    matching coefficient of ``p_comp - p``.
    """
    if order is not None and order < 1:
        raise ValueError("order must be at least 1")
    so = symbolic_output(d, order)
    n = so.nvars
    groups: dict[tuple[int, ...], dict] = {}
    for e, c in so.poly:
        groups.setdefault(tuple(e[n:]), {})[tuple(e[:n])] = c
    return ErrorExpansion(so.deltas, order, {a: Polynomial(n, t) for a, t in sorted(groups.items())})


# homogeneity

@dataclass(frozen=True)
class HomogeneityVerdict:
    ok: bool
    degree: int | None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _node_degree_ranges(d: Dag) -> dict[int, tuple[int, int] | None]:
    """Exact (min, max) x-degree of each node's output with symbolic deltas.

    ``None`` marks an identically zero output.  With per-node deltas no two
    distinct non-source nodes can cancel, so a sum's degree set is the union
    of its inputs' sets except for a node combined with itself (or two sources
    of the same variable), where the signed coefficient decides.
    """
    out: dict[int, tuple[int, int] | None] = {}
    by_id = d.by_id
    for n in d.order:
        if n.kind == "source":
            out[n.id] = (1, 1)
            continue
        if n.kind == "bbox":
            out[n.id] = _bbox_degree_range(d.registry[n.op].poly, [out[r.node] for r in n.inputs])
            continue
        if n.kind not in CLASSICAL:
            raise ValueError(f"node {n.id} is not a classical operation")
        a, b = n.inputs
        ra, rb = out[a.node], out[b.node]
        if n.kind == "mul":
            out[n.id] = None if ra is None or rb is None else (ra[0] + rb[0], ra[1] + rb[1])
            continue
        na, nb = by_id[a.node], by_id[b.node]
        same = a.node == b.node or (na.kind == nb.kind == "source" and na.var == nb.var)
        if same and ra is not None:
            sa = -1 if a.neg else 1
            sb = (-1 if b.neg else 1) * (-1 if n.kind == "sub" else 1)
            out[n.id] = None if sa + sb == 0 else ra
            continue
        live = [r for r in (ra, rb) if r is not None]
        out[n.id] = (min(r[0] for r in live), max(r[1] for r in live)) if live else None
    return out


def _bbox_degree_range(q: Polynomial, ins: list) -> tuple[int, int] | None:
    """Degree bounds of ``q`` applied to inputs with the given ranges.

    Monomials touching an identically zero input drop out; cancellation
    between the remaining monomials is not detected, so the range may be wide.
    """
    lo = hi = None
    for e, _ in q.items():
        if any(a and r is None for a, r in zip(e, ins)):
            continue
        a_lo = sum(a * r[0] for a, r in zip(e, ins) if a)
        a_hi = sum(a * r[1] for a, r in zip(e, ins) if a)
        lo = a_lo if lo is None else min(lo, a_lo)
        hi = a_hi if hi is None else max(hi, a_hi)
    return None if lo is None else (lo, hi)


def check_homogeneous_algorithm(d: Dag, method: str = "structural") -> HomogeneityVerdict:
    """Every node homogeneous in x, none above the output degree d.

    ``method="symbolic"`` expands each node with symbolic deltas instead; it
    is exponentially slower and serves as a cross-check on small DAGs.
    """
    if method == "symbolic":
        ranges = _symbolic_degree_ranges(d)
    elif method == "structural":
        ranges = _node_degree_ranges(d)
    else:
        raise ValueError(f"unknown method {method!r}")
    live = d.reachable()
    r_out = ranges[d.output.node]
    if r_out is None:
        return HomogeneityVerdict(False, None, "output is identically zero")
    if r_out[0] != r_out[1]:
        return HomogeneityVerdict(False, None, f"output mixes degrees {r_out[0]}..{r_out[1]}")
    deg = r_out[0]
    for n in d.order:
        if n.id not in live:
            continue
        r = ranges[n.id]
        if r is None:
            continue
        if r[0] != r[1]:
            return HomogeneityVerdict(False, None, f"node {n.id} mixes degrees {r[0]}..{r[1]}")
        if r[1] > deg:
            return HomogeneityVerdict(False, None, f"node {n.id} has degree {r[1]} > {deg}")
    return HomogeneityVerdict(True, deg)


def _symbolic_degree_ranges(d: Dag) -> dict[int, tuple[int, int] | None]:
    ranges: dict[int, tuple[int, int] | None] = {}
    for n in d.order:
        sub = Dag(d.nvars, d.nodes, Ref(n.id), d.name, d.ops)
        so = symbolic_output(sub)
        if so.poly.is_zero():
            ranges[n.id] = None
            continue
        degs = [sum(e[: d.nvars]) for e, _ in so.poly]
        ranges[n.id] = (min(degs), max(degs))
    return ranges


# building

class DagBuilder:
    """Incremental DAG construction with automatic rounding indices."""

    def __init__(self, nvars: int, name: str = "dag", ops: Iterable[BlackBoxOp] = ()):
        self.nvars = nvars
        self.name = name
        self.ops = {op.name: op for op in ops}
        self.nodes: list[Node] = []
        self._sources: dict[int, Ref] = {}
        self._next_delta = 1

    def _new(self, kind: str, inputs: Sequence[Ref] = (), var: int | None = None,
             op: str | None = None, rounded: bool = True) -> Ref:
        nid = len(self.nodes) + 1
        delta = None
        if rounded:
            delta = self._next_delta
            self._next_delta += 1
        self.nodes.append(Node(nid, kind, tuple(inputs), var, op, delta))
        return Ref(nid)

    def source(self, i: int) -> Ref:
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range")
        if i not in self._sources:
            self._sources[i] = self._new("source", var=i, rounded=False)
        return self._sources[i]

    def add(self, a: Ref, b: Ref) -> Ref:
        return self._new("add", (a, b))

    def sub(self, a: Ref, b: Ref) -> Ref:
        return self._new("sub", (a, b))

    def mul(self, a: Ref, b: Ref) -> Ref:
        return self._new("mul", (a, b))

    def bbox(self, op: BlackBoxOp, args: Sequence[Ref]) -> Ref:
        if len(args) != op.arity:
            raise ValueError(f"black box {op.name} takes {op.arity} arguments")
        self.ops.setdefault(op.name, op)
        return self._new("bbox", args, op=op.name, rounded=not op.exact)

    def product(self, refs: Sequence[Ref]) -> Ref:
        """Balanced multiplication tree."""
        if not refs:
            raise ValueError("empty product")
        level = list(refs)
        while len(level) > 1:
            nxt = [self.mul(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
            if len(level) % 2:
                nxt.append(level[-1])
            level = nxt
        return level[0]

    def total(self, refs: Sequence[Ref]) -> Ref:
        """Balanced summation tree (negated refs subtract exactly)."""
        if not refs:
            raise ValueError("empty sum")
        level = list(refs)
        while len(level) > 1:
            nxt = [self.add(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
            if len(level) % 2:
                nxt.append(level[-1])
            level = nxt
        return level[0]

    def scale(self, r: Ref, c: int) -> Ref:
        """``c * r`` by repeated addition (doubling), sign on the edge."""
        if not isinstance(c, int) or c == 0:
            raise ValueError("scale factor must be a nonzero integer")
        k = abs(c)
        acc: Ref | None = None
        power = r
        while True:
            if k & 1:
                acc = power if acc is None else self.add(acc, power)
            k >>= 1
            if not k:
                break
            power = self.add(power, power)
        return -acc if c < 0 else acc

    def build(self, out: Ref, prune_unused: bool = True) -> Dag:
        d = Dag(self.nvars, tuple(self.nodes), out, self.name, tuple(self.ops.values()))
        return remove_unreachable(d) if prune_unused else d


def remove_unreachable(d: Dag) -> Dag:
    live = d.reachable()
    nodes = tuple(n for n in d.nodes if n.id in live)
    used_ops = {n.op for n in nodes if n.kind == "bbox"}
    return Dag(d.nvars, nodes, d.output, d.name, tuple(op for op in d.ops if op.name in used_ops))


def embed_dag(b: DagBuilder, d: Dag, var_map: Sequence[Ref] | None = None) -> Ref:
    """Copy ``d`` into builder ``b``; returns the ref of its output."""
    refs: dict[int, Ref] = {}

    def get(r: Ref) -> Ref:
        base = refs[r.node]
        return -base if r.neg else base

    for n in d.order:
        if n.kind == "source":
            refs[n.id] = var_map[n.var] if var_map is not None else b.source(n.var)
        elif n.kind == "bbox":
            refs[n.id] = b.bbox(d.registry[n.op], [get(r) for r in n.inputs])
        else:
            refs[n.id] = getattr(b, n.kind)(get(n.inputs[0]), get(n.inputs[1]))
    return get(d.output)


def negate_sources(d: Dag, signs: Sequence[int], name: str | None = None) -> Dag:
    """Same DAG with input ``x_i`` read through a dotted edge when ``signs[i] < 0``."""
    flip = {n.id for n in d.nodes if n.kind == "source" and signs[n.var] < 0}
    nodes = []
    for n in d.nodes:
        ins = tuple(Ref(r.node, r.neg != (r.node in flip)) for r in n.inputs)
        nodes.append(Node(n.id, n.kind, ins, n.var, n.op, n.delta))
    out = Ref(d.output.node, d.output.neg != (d.output.node in flip))
    return Dag(d.nvars, tuple(nodes), out, name or d.name, d.ops)


# branching programs

CMPS = ("<", "<=", "=")


@dataclass(frozen=True)
class Comparison:
    """Exact test ``lhs cmp rhs`` between polynomials of the inputs."""

    lhs: Polynomial
    cmp: str
    rhs: Polynomial

    def __post_init__(self) -> None:
        if self.cmp not in CMPS:
            raise ValueError(f"comparator must be one of {CMPS}")

    def holds(self, x: Sequence[Number]) -> bool:
        a, b = self.lhs.evaluate(x), self.rhs.evaluate(x)
        return a < b if self.cmp == "<" else a <= b if self.cmp == "<=" else a == b


@dataclass(frozen=True)
class Branch:
    guard: tuple[Comparison, ...]  # conjunction
    then: "Dag | Branch"
    orelse: "Dag | Branch"


@dataclass(frozen=True)
class BranchProgram:
    nvars: int
    root: "Dag | Branch"
    name: str = "program"

    def select(self, x: Sequence[Number]) -> Dag:
        node = self.root
        while isinstance(node, Branch):
            node = node.then if all(c.holds(x) for c in node.guard) else node.orelse
        return node

    def leaves(self) -> list[Dag]:
        out: list[Dag] = []
        stack: list = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Branch):
                stack.extend([node.orelse, node.then])
            else:
                out.append(node)
        return out


def all_delta_indices(d: "Dag | BranchProgram") -> list[int]:
    if isinstance(d, Dag):
        return d.delta_indices()
    return sorted({k for leaf in d.leaves() for k in leaf.delta_indices()})


def leaves_of(d: "Dag | BranchProgram") -> list[Dag]:
    return d.leaves() if isinstance(d, BranchProgram) else [d]

