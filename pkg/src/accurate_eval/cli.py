"""Command line front end.

Reports are ``key=value`` lines.  Exit codes: 0 success, 1 usage or IO
error, 2 NotEvaluable under ``--expect evaluable``, 3 search budget spent
without reaching ``--target``, 4 malformed input file.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import accuracy, decide, dominance, generators, structured
from .dag import BranchProgram, check_homogeneous_algorithm, extract_polynomial, leaves_of, symbolic_output
from .poly import Polynomial, max_variable_index, parse_polynomial
from .textio import FormatError, format_algorithm, read_algorithm, read_ops, read_points

EXIT_OK, EXIT_USAGE, EXIT_NOT_EVALUABLE, EXIT_BUDGET, EXIT_FORMAT = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 by default
        raise UsageError(message)


def _poly(text: str, nvars: int | None) -> Polynomial:
    n = nvars or max(1, max_variable_index(text))
    return parse_polynomial(text, n)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except ValueError as exc:
        raise UsageError(f"not a number: {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers: {text!r}") from exc


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(out, lines: Sequence[str]) -> None:
    for s in lines:
        print(s, file=out)


def _write_algorithm(args, d, out) -> None:
    text = format_algorithm(d)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"written={args.out}", file=out)
    else:
        print(file=out)
        out.write(text)


# subcommands

def cmd_decide(args, out) -> int:
    p = _poly(args.poly, args.nvars)
    if args.ops:
        v = decide.decide_blackbox_affine(p, read_ops(_read(args.ops)))
    elif args.field == "c":
        v = decide.decide_complex(p)
    else:
        cands = read_points(_read(args.candidates)) if args.candidates else None
        v = decide.decide_real(p, cands, seed=args.seed)
    lines = [f"status={v.status}", f"certificate_kind={v.certificate}", f"certificate={v.certificate_text()}"]
    if v.restriction is not None:
        lines.append(f"restriction={v.restriction}")
    if v.reason and v.certificate != "reason":
        lines.append(f"note={v.reason}")
    _emit(out, lines)
    if v.dag is not None:
        print(f"ops={v.dag.op_count()}", file=out)
        _write_algorithm(args, v.dag, out)
    if args.expect == "evaluable" and v.status == decide.NOT_EVALUABLE:
        return EXIT_NOT_EVALUABLE
    return EXIT_OK


def _compile(args):
    strat = args.strategy
    if strat == "motzkin":
        j = args.j
        if args.poly:
            p = _poly(args.poly, 3)
            j = int(p.coefficient((0, 0, 6)))
            if j < 1 or p != generators.motzkin_polynomial(j):
                raise UsageError("the motzkin strategy needs x3^6*j + x1^2*x2^2*(j*x1^2 + j*x2^2 - 3*j*x3^2)")
        return generators.gen_motzkin(j, axis_guard=not args.no_axis_guard), generators.motzkin_polynomial(j)
    if not args.poly:
        raise UsageError("--poly is required")
    p = _poly(args.poly, args.nvars)
    if strat == "monomial-sum":
        return generators.gen_monomial_sum(p), p
    if strat == "product":
        v = decide.decide_complex(p)
        if v.dag is None:
            raise UsageError(f"not a product of allowable forms; remainder {v.certificate_text()}")
        return v.dag, p
    summands = [Polynomial(p.nvars, {e: c}) for e, c in p.items()]
    return generators.gen_compensated_sum(summands, args.k), p


def cmd_compile(args, out) -> int:
    d, p = _compile(args)
    lines = [f"strategy={args.strategy}", f"poly={p}"]
    if isinstance(d, BranchProgram):
        lines.append(f"leaves={len(leaves_of(d))}")
    else:
        lines.append(f"ops={d.op_count()}")
    deg = p.homogeneous_degree()
    if deg is not None:
        hv = [check_homogeneous_algorithm(leaf) for leaf in leaves_of(d)]
        lines.append("homogeneous=" + ("true" if all(h.ok and h.degree == deg for h in hv) else "false"))
    _emit(out, lines)
    _write_algorithm(args, d, out)
    return EXIT_OK


def _target_poly(args, d) -> Polynomial:
    if args.poly:
        return _poly(args.poly, d.nvars)
    return extract_polynomial(leaves_of(d)[0])


def cmd_simulate(args, out) -> int:
    d = read_algorithm(_read(args.dag))
    p = _target_poly(args, d)
    eps = _fraction(args.eps)
    eta = _fraction(args.eta) if args.eta else None
    code = EXIT_OK
    if args.near:
        center = [_fraction(v) for v in args.near.split(",")]
        if len(center) != d.nvars:
            raise UsageError(f"--near has {len(center)} coordinates, the algorithm takes {d.nvars}")
        rep = accuracy.adversarial_search(d, p, center, _fraction(args.radius), eps, args.budget, seed=args.seed)
        rep.eta = eta
        lines = ["mode=search", *rep.lines(), f"budget={args.budget}"]
        if args.target is not None and not rep.worst_rel_err >= _fraction(args.target):
            lines.append("budget_exhausted=true")
            code = EXIT_BUDGET
    else:
        rep = accuracy.sample_accuracy_report(d, p, args.sampler, eps, eta, args.N, seed=args.seed,
                                              delta_mode=args.delta_mode, threads=args.threads)
        lines = ["mode=sample", *rep.lines()]
    _emit(out, lines)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(rep.csv())
        print(f"csv={args.csv}", file=out)
    if args.plot:
        from .plotting import plot_report

        print(f"plot={plot_report(rep, args.plot)}", file=out)
    return code


def _change(spec, nvars: int, index: int | None):
    if index is None:
        return dominance.identity_change(spec, nvars)
    changes = dominance.enumerate_standard_changes(spec, nvars)
    if not 0 <= index < len(changes):
        raise UsageError(f"--change must lie in 0..{len(changes) - 1}")
    return changes[index]


def cmd_prune(args, out) -> int:
    d = read_algorithm(_read(args.dag))
    if isinstance(d, BranchProgram):
        raise UsageError("prune takes a single DAG, not a branching program")
    spec = dominance.parse_component(args.component, d.nvars)
    ch = _change(spec, d.nvars, args.change)
    pruned = dominance.prune(d, ch, _ints(args.eta))
    before = symbolic_output(d).delta_support()
    after = symbolic_output(pruned).delta_support()
    _emit(out, [
        f"block={','.join(f'x{i + 1}' for i in ch.block)}",
        f"original={extract_polynomial(d)}",
        f"pruned={extract_polynomial(pruned)}",
        "deltas=" + ",".join(map(str, pruned.delta_indices())),
        "subset=" + ("true" if after <= before else "false"),
    ])
    _write_algorithm(args, pruned, out)
    return EXIT_OK


def cmd_dominant(args, out) -> int:
    p = _poly(args.poly, args.nvars)
    spec = dominance.parse_component(args.component, p.nvars)
    changes = dominance.enumerate_standard_changes(spec, p.nvars)
    picks = range(len(changes)) if args.all_changes else [args.change]
    lines = [f"changes={len(changes)}"]
    first = None
    for ci in picks:
        if not 0 <= ci < len(changes):
            raise UsageError(f"--change must lie in 0..{len(changes) - 1}")
        ch = changes[ci]
        pn = ch.to_new(p)
        regions = dominance.dominance_regions(pn, ch.block)
        first = first or (pn, ch, regions)
        lines.append(f"change={ci} block={','.join(f'x{i + 1}' for i in ch.block)} map={'; '.join(ch.rows())}")
        for ri, r in enumerate(regions):
            dt = dominance.dominant_term(p, ch, r, spec)
            try:
                cond = "true" if dominance.satisfies_exp_cond(r, ch) else "false"
            except dominance.ExpCondError:
                cond = "mixed"
            lines.append(
                f"region={ci}.{ri} lambda={r.lam_text()} facet={'true' if r.facet else 'false'} "
                f"rays={';'.join(','.join(map(str, v)) for v in r.rays)} eta={','.join(map(str, r.eta))} "
                f"exp_cond={cond} dominant={dt.poly}")
    _emit(out, lines)
    if args.plot and first is not None:
        from .plotting import plot_regions

        pn, ch, regions = first
        print(f"plot={plot_regions(pn, ch.block, regions, args.plot)}", file=out)
    return EXIT_OK


def _read_matrix(path: str) -> list[list[Fraction]]:
    rows = []
    for k, line in enumerate(_read(path).splitlines(), 1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        try:
            rows.append([Fraction(v) for v in s.replace(",", " ").split()])
        except ValueError as exc:
            raise FormatError(f"bad matrix row {s!r}", k) from exc
    return rows


def _complex_status(p: Polynomial) -> str:
    try:
        return decide.decide_complex(p).status
    except decide.HypothesisError as exc:
        return f"{decide.UNKNOWN} ({exc})"


def cmd_matrix(args, out) -> int:
    n, kind = args.n, args.kind
    lines = [f"kind={kind}", f"n={n}"]
    if kind == "toeplitz":
        det = structured.toeplitz_det(n)
        cert = structured.toeplitz_certificate(n, det)
        lines += [f"det={det}", f"terms={len(det.terms)}",
                  f"diagonal_power={'true' if cert.has_diagonal_power else 'false'}",
                  "corner_coefficients=" + ",".join(f"{j}:{c}" for j, c in cert.corner_monomials),
                  f"affine_in_last={'true' if cert.affine_in_last else 'false'}",
                  f"certificate={'true' if cert.ok else 'false'}",
                  f"status={_complex_status(det)}"]
    elif kind == "vandermonde":
        det = structured.det_poly(structured.generalized_vandermonde((), n))
        lines += [f"det={det}", f"status={_complex_status(det)}"]
    elif kind == "gvander":
        lam = _ints(args.lam) if args.lam else []
        chk = structured.generalized_vandermonde_check(lam, n)
        lines += [f"lambda={','.join(map(str, lam))}", f"schur={structured.schur_function(lam, n)}",
                  f"check={'true' if chk else 'false'}"]
        if not chk:
            lines.append(f"residual={chk.residual}")
    else:
        C = _read_matrix(args.C) if args.C else [[int(i == j) for j in range(n)] for i in range(n)]
        rows = [args.i] if args.i else range(1, n + 1)
        for i in rows:
            chk = structured.poly_vandermonde_minor_check(C, n, i)
            lines.append(f"i={i} check={'true' if chk else 'false'} E={chk.E} F={chk.F}")
        E, F = structured.minor_constants(C, n)
        v = structured.minor_evaluability_verdict(n, E, F)
        lines += [f"status={v.status}", f"certificate={v.certificate_text()}"]
    _emit(out, lines)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    default_seed = int(os.environ.get("ACC_SEED", "0"))
    ap = _Parser(prog="accurate-eval", description="Decide, build and test accurate polynomial evaluation.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def common(s):
        s.add_argument("--seed", type=int, default=default_seed)
        s.add_argument("--nvars", type=int)
        return s

    s = common(sub.add_parser("decide", help="evaluability verdict with certificate"))
    s.add_argument("--field", choices=("c", "r"), default="c")
    s.add_argument("--poly", required=True)
    s.add_argument("--ops", help="black-box op file")
    s.add_argument("--candidates", help="candidate zeros, one comma-separated point per line")
    s.add_argument("--expect", choices=("evaluable",))
    s.add_argument("--out")
    s.set_defaults(func=cmd_decide)

    s = common(sub.add_parser("compile", help="emit an evaluation algorithm"))
    s.add_argument("--strategy", choices=("monomial-sum", "motzkin", "product", "compensated"), required=True)
    s.add_argument("--poly")
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--j", type=int, default=1)
    s.add_argument("--no-axis-guard", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_compile)

    s = common(sub.add_parser("simulate", help="empirical relative errors"))
    s.add_argument("--dag", required=True)
    s.add_argument("--poly", help="target polynomial (default: the algorithm's exact output)")
    s.add_argument("--near")
    s.add_argument("--radius", default="1e-6")
    s.add_argument("--budget", type=int, default=100_000)
    s.add_argument("--target", help="exit 3 if the search ends below this worst error")
    s.add_argument("--sampler", default="sphere")
    s.add_argument("--N", type=int, default=1000)
    s.add_argument("--eta")
    s.add_argument("--eps", default="1e-8")
    s.add_argument("--delta-mode", choices=("uniform", "corners"), default="uniform")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--csv")
    s.add_argument("--plot")
    s.set_defaults(func=cmd_simulate)

    s = common(sub.add_parser("prune", help="prune a DAG toward a dominant term"))
    s.add_argument("--dag", required=True)
    s.add_argument("--component", required=True)
    s.add_argument("--eta", required=True)
    s.add_argument("--change", type=int, help="index into the standard changes (default: identity)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_prune)

    s = common(sub.add_parser("dominant", help="dominance regions and dominant terms"))
    s.add_argument("--poly", required=True)
    s.add_argument("--component", required=True)
    s.add_argument("--change", type=int, default=0, help="index into the standard changes")
    s.add_argument("--all-changes", action="store_true")
    s.add_argument("--plot")
    s.set_defaults(func=cmd_dominant)

    s = common(sub.add_parser("matrix", help="structured determinants"))
    s.add_argument("kind", choices=("toeplitz", "vandermonde", "gvander", "pvminor"))
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--lambda", dest="lam")
    s.add_argument("--C")
    s.add_argument("--i", type=int)
    s.set_defaults(func=cmd_matrix)
    return ap


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        print(f"error={exc}", file=err)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"error={exc}", file=err)
        return EXIT_FORMAT
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"error={exc}", file=err)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
