"""Line-oriented text formats for DAGs, branching programs and black-box ops.

DAG records, one per line (``#`` starts a comment)::

    op fma arity=3 poly=x1 + x2*x3
    dag naive_sum nvars=3
    node 1 source x1
    node 4 add 1 2 d=1
    node 5 add 4 -3 d=2
    out 5

``d=<k>`` names the rounding index; when every rounded node omits it the
indices are assigned in file order.  Branching programs wrap DAG blocks::

    program motzkin nvars=3
    if 0 <= x3 and (x1-x3)^2 <= (x1+x3)^2 then
      dag ... out ...
    else
      ...
    end
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping

from .dag import Branch, BranchProgram, BlackBoxOp, Comparison, Dag, Node, Ref
from .poly import PolynomialSyntaxError, parse_polynomial


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def _lines(text: str) -> list[tuple[int, str]]:
    out = []
    for k, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if s:
            out.append((k, s))
    return out


def _ref(tok: str, line: int) -> Ref:
    m = re.fullmatch(r"(-?)(\d+)", tok)
    if not m:
        raise FormatError(f"bad node reference {tok!r}", line)
    return Ref(int(m.group(2)), m.group(1) == "-")


# black-box ops

def parse_op_line(s: str, line: int | None = None) -> BlackBoxOp:
    m = re.fullmatch(r"op\s+(\S+)\s+arity=(\d+)\s+poly=(.*?)(\s+exact)?", s)
    if not m:
        raise FormatError(f"malformed op record {s!r}", line)
    name, arity = m.group(1), int(m.group(2))
    try:
        poly = parse_polynomial(m.group(3), arity)
    except PolynomialSyntaxError as exc:
        raise FormatError(f"op {name}: {exc}", line) from exc
    return BlackBoxOp(name, arity, poly, exact=bool(m.group(4)))


def read_ops(text: str) -> list[BlackBoxOp]:
    return [parse_op_line(s, k) for k, s in _lines(text)]


def format_op(op: BlackBoxOp) -> str:
    return f"op {op.name} arity={op.arity} poly={op.poly}" + (" exact" if op.exact else "")


# DAGs

def _parse_dag(lines: list[tuple[int, str]], pos: int, registry: dict[str, BlackBoxOp]) -> tuple[Dag, int]:
    k, s = lines[pos]
    m = re.fullmatch(r"dag\s+(\S+)\s+nvars=(\d+)", s)
    if not m:
        raise FormatError("expected 'dag <name> nvars=<n>'", k)
    name, nvars = m.group(1), int(m.group(2))
    pos += 1
    raw: list[tuple[int, int, str, tuple[Ref, ...], int | None, str | None, int | None]] = []
    out: Ref | None = None
    while pos < len(lines):
        k, s = lines[pos]
        toks = s.split()
        if toks[0] == "out":
            if len(toks) != 2:
                raise FormatError("expected 'out <ref>'", k)
            out = _ref(toks[1], k)
            pos += 1
            break
        if toks[0] != "node" or len(toks) < 3:
            raise FormatError(f"unexpected record {s!r}", k)
        try:
            nid = int(toks[1])
        except ValueError:
            raise FormatError(f"node id must be an integer, got {toks[1]!r}", k) from None
        delta = None
        if toks[-1].startswith("d="):
            try:
                delta = int(toks[-1][2:])
            except ValueError:
                raise FormatError(f"bad rounding index {toks[-1]!r}", k) from None
            toks = toks[:-1]
        kind = toks[2]
        if kind == "source":
            vm = re.fullmatch(r"x(\d+)", toks[3]) if len(toks) == 4 else None
            if not vm:
                raise FormatError("expected 'node <id> source x<i>'", k)
            raw.append((k, nid, "source", (), int(vm.group(1)) - 1, None, None))
        elif kind in ("add", "sub", "mul"):
            raw.append((k, nid, kind, tuple(_ref(t, k) for t in toks[3:]), None, None, delta))
        elif kind == "bbox":
            if len(toks) < 4:
                raise FormatError("expected 'node <id> bbox <op> <ref>...'", k)
            raw.append((k, nid, "bbox", tuple(_ref(t, k) for t in toks[4:]), None, toks[3], delta))
        else:
            raise FormatError(f"unknown node kind {kind!r}", k)
        pos += 1
    if out is None:
        raise FormatError(f"dag {name} has no 'out' record", lines[-1][0])

    def is_rounded(kind: str, op: str | None) -> bool:
        if kind == "source":
            return False
        if kind == "bbox" and op in registry and registry[op].exact:
            return False
        return True

    rounded = [r for r in raw if is_rounded(r[2], r[5])]
    explicit = [r for r in rounded if r[6] is not None]
    if explicit and len(explicit) != len(rounded):
        raise FormatError("either every rounded node carries d=<k> or none does", rounded[0][0])
    auto = not explicit
    nodes = []
    counter = 0
    for (k, nid, kind, ins, var, op, delta) in raw:
        if auto and is_rounded(kind, op):
            counter += 1
            delta = counter
        if not is_rounded(kind, op):
            delta = None
        nodes.append(Node(nid, kind, ins, var, op, delta))
    used = {n.op for n in nodes if n.kind == "bbox"}
    ops = tuple(registry[o] for o in sorted(used) if o in registry)
    return Dag(nvars, tuple(nodes), out, name, ops), pos


def read_dag(text: str, registry: Mapping[str, BlackBoxOp] | None = None) -> Dag:
    reg = dict(registry or {})
    lines = _lines(text)
    pos = 0
    while pos < len(lines) and lines[pos][1].startswith("op "):
        op = parse_op_line(lines[pos][1], lines[pos][0])
        reg[op.name] = op
        pos += 1
    if pos >= len(lines):
        raise FormatError("no dag record found")
    d, pos = _parse_dag(lines, pos, reg)
    if pos != len(lines):
        raise FormatError("trailing records after 'out'", lines[pos][0])
    return d


def format_dag(d: Dag, with_ops: bool = True) -> str:
    out = []
    if with_ops:
        out.extend(format_op(op) for op in d.ops)
    out.append(f"dag {d.name} nvars={d.nvars}")
    for n in d.nodes:
        if n.kind == "source":
            out.append(f"node {n.id} source x{n.var + 1}")
            continue
        head = f"node {n.id} {n.kind}" + (f" {n.op}" if n.kind == "bbox" else "")
        body = " ".join(str(r) for r in n.inputs)
        tail = f" d={n.delta}" if n.delta is not None else ""
        out.append(f"{head} {body}{tail}")
    out.append(f"out {d.output}")
    return "\n".join(out) + "\n"


# branching programs

_CMP = re.compile(r"\s(<=|<|=)\s")


def parse_comparison(s: str, nvars: int, line: int | None = None) -> Comparison:
    parts = _CMP.split(s)
    if len(parts) != 3:
        raise FormatError(f"expected '<poly> <cmp> <poly>', got {s!r}", line)
    try:
        return Comparison(parse_polynomial(parts[0], nvars), parts[1], parse_polynomial(parts[2], nvars))
    except PolynomialSyntaxError as exc:
        raise FormatError(str(exc), line) from exc


def _parse_block(lines, pos, nvars, reg):
    k, s = lines[pos]
    if s.startswith("dag "):
        return _parse_dag(lines, pos, reg)
    m = re.fullmatch(r"if\s+(.*)\s+then", s)
    if not m:
        raise FormatError("expected 'if ... then' or 'dag ...'", k)
    guard = tuple(parse_comparison(c.strip(), nvars, k) for c in re.split(r"\s+and\s+", m.group(1)))
    then, pos = _parse_block(lines, pos + 1, nvars, reg)
    if pos >= len(lines) or lines[pos][1] != "else":
        raise FormatError("expected 'else'", lines[min(pos, len(lines) - 1)][0])
    orelse, pos = _parse_block(lines, pos + 1, nvars, reg)
    if pos >= len(lines) or lines[pos][1] != "end":
        raise FormatError("expected 'end'", lines[min(pos, len(lines) - 1)][0])
    return Branch(guard, then, orelse), pos + 1


def read_program(text: str, registry: Mapping[str, BlackBoxOp] | None = None) -> BranchProgram:
    reg = dict(registry or {})
    lines = _lines(text)
    pos = 0
    while pos < len(lines) and lines[pos][1].startswith("op "):
        op = parse_op_line(lines[pos][1], lines[pos][0])
        reg[op.name] = op
        pos += 1
    if pos >= len(lines):
        raise FormatError("empty program")
    m = re.fullmatch(r"program\s+(\S+)\s+nvars=(\d+)", lines[pos][1])
    if not m:
        raise FormatError("expected 'program <name> nvars=<n>'", lines[pos][0])
    nvars = int(m.group(2))
    root, pos = _parse_block(lines, pos + 1, nvars, reg)
    if pos != len(lines):
        raise FormatError("trailing records", lines[pos][0])
    return BranchProgram(nvars, root, m.group(1))


def format_comparison(c: Comparison) -> str:
    return f"{c.lhs} {c.cmp} {c.rhs}"


def format_program(prog: BranchProgram) -> str:
    ops: dict[str, BlackBoxOp] = {}
    for leaf in prog.leaves():
        for op in leaf.ops:
            ops.setdefault(op.name, op)
    out = [format_op(op) for op in ops.values()]
    out.append(f"program {prog.name} nvars={prog.nvars}")

    def emit(node, indent: str) -> None:
        if isinstance(node, Branch):
            out.append(f"{indent}if {' and '.join(format_comparison(c) for c in node.guard)} then")
            emit(node.then, indent + "  ")
            out.append(f"{indent}else")
            emit(node.orelse, indent + "  ")
            out.append(f"{indent}end")
        else:
            out.extend(indent + line for line in format_dag(node, with_ops=False).splitlines())

    emit(prog.root, "")
    return "\n".join(out) + "\n"


def read_algorithm(text: str, registry: Mapping[str, BlackBoxOp] | None = None) -> Dag | BranchProgram:
    """Read either a DAG file or a program file."""
    for _, s in _lines(text):
        if s.startswith("op "):
            continue
        return read_program(text, registry) if s.startswith("program ") else read_dag(text, registry)
    raise FormatError("empty input")


def format_algorithm(d: Dag | BranchProgram) -> str:
    return format_program(d) if isinstance(d, BranchProgram) else format_dag(d)


def format_points(points: Iterable) -> str:
    return "\n".join(",".join(str(v) for v in p) for p in points) + "\n"


def read_points(text: str) -> list[tuple]:
    """Comma-separated exact rationals, one point per line."""
    from fractions import Fraction

    pts = []
    for k, s in _lines(text):
        try:
            pts.append(tuple(Fraction(v.strip()) for v in s.split(",")))
        except ValueError as exc:
            raise FormatError(f"bad point {s!r}", k) from exc
    return pts


__all__ = [
    "FormatError", "read_ops", "format_op", "read_dag", "format_dag", "read_program",
    "format_program", "read_algorithm", "format_algorithm", "read_points", "format_points",
    "parse_comparison", "parse_op_line",
]
