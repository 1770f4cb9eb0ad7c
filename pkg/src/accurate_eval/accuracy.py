"""Empirical accuracy: relative errors, adversarial search and sampled reports.

All arithmetic is exact.  Sample points are dyadic rationals and rounding
errors are multiples of ``eps / 2^20``, so a fixed seed replays bit for bit.
"""

from __future__ import annotations

import csv
import io
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .dag import BranchProgram, Dag, all_delta_indices, eval_rounded, extract_polynomial, leaves_of
from .poly import Polynomial

INF = math.inf
ErrValue = Union[Fraction, float]  # float only for INF
Algorithm = Union[Dag, BranchProgram]

_DELTA_GRID = 2**20
_X_BITS = 40


class LeafMismatchError(ValueError):
    """A leaf of the algorithm does not compute the target polynomial."""


def check_leaves(d: Algorithm, p: Polynomial) -> None:
    for leaf in leaves_of(d):
        got = extract_polynomial(leaf)
        if got != p:
            raise LeafMismatchError(f"leaf {leaf.name} computes {got}, expected {p}")


def relative_error(d: Algorithm, p: Polynomial, x: Sequence, delta, check: bool = True) -> ErrValue:
    """``|p_comp - p| / |p|``; infinite when only ``p`` vanishes, 0 when both do."""
    if check:
        check_leaves(d, p)
    exact = p.evaluate(x)
    comp = eval_rounded(d, x, delta)
    if exact == 0:
        return Fraction(0) if comp == 0 else INF
    return abs(Fraction(comp) - exact) / abs(exact)


# reports

@dataclass(frozen=True)
class Witness:
    err: ErrValue
    x: tuple[Fraction, ...]
    delta: tuple[tuple[int, Fraction], ...]

    def key(self) -> tuple:
        return (self.x, self.delta)


def _better(a: Witness, b: Witness | None) -> bool:
    if b is None:
        return True
    if a.err != b.err:
        return a.err > b.err
    return a.key() < b.key()


@dataclass
class AccuracyReport:
    samples: int
    eps: Fraction
    worst: Witness | None
    eta: Fraction | None = None
    sampler: str = ""
    top: list[Witness] = field(default_factory=list)
    errors: list[float] = field(default_factory=list)
    trace: list[float] = field(default_factory=list)
    exhausted: bool = False

    @property
    def worst_rel_err(self) -> ErrValue:
        return self.worst.err if self.worst else Fraction(0)

    @property
    def passed(self) -> bool | None:
        if self.eta is None:
            return None
        return self.worst_rel_err <= self.eta

    def lines(self) -> list[str]:
        w = self.worst
        out = [f"samples={self.samples}", f"eps={_fmt(self.eps)}", f"worst_rel_err={_fmt(self.worst_rel_err)}"]
        if self.sampler:
            out.append(f"sampler={self.sampler}")
        if w is not None:
            out.append("witness_x=" + ",".join(str(v) for v in w.x))
            out.append("witness_delta=" + ",".join(f"{k}:{v}" for k, v in w.delta))
        if self.eta is not None:
            out.append(f"eta={_fmt(self.eta)}")
            out.append(f"pass={'true' if self.passed else 'false'}")
        return out

    def csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["rank", "rel_err", "x", "delta"])
        for k, w in enumerate(self.top, 1):
            wr.writerow([k, _fmt(w.err), " ".join(str(v) for v in w.x),
                         " ".join(f"{i}:{v}" for i, v in w.delta)])
        return buf.getvalue()


def _fmt(v: ErrValue) -> str:
    if v == INF:
        return "inf"
    return f"{float(v):.6e}"


def _keep_top(top: list[Witness], w: Witness, size: int = 100) -> None:
    top.append(w)
    if len(top) > 2 * size:
        _trim(top, size)


def _trim(top: list[Witness], size: int = 100) -> None:
    top.sort(key=lambda w: (-w.err if w.err != INF else -INF, w.key()))
    del top[size:]


# random rationals

def _dyadic(v: float, bits: int = _X_BITS) -> Fraction:
    return Fraction(round(v * 2**bits), 2**bits)


def _delta_value(rng: random.Random, eps: Fraction, mode: str) -> Fraction:
    if mode == "corners":
        return eps if rng.random() < 0.5 else -eps
    return eps * Fraction(rng.randint(-_DELTA_GRID, _DELTA_GRID), _DELTA_GRID)


def _lhs_deltas(rng: random.Random, idx: Sequence[int], eps: Fraction, count: int) -> list[dict[int, Fraction]]:
    """Latin-hypercube batch over ``[-eps, eps]^m``."""
    cols = {}
    for k in idx:
        perm = list(range(count))
        rng.shuffle(perm)
        cols[k] = [eps * (Fraction(2 * perm[i] * _DELTA_GRID + rng.randint(0, 2 * _DELTA_GRID),
                                    count * _DELTA_GRID) - 1) for i in range(count)]
    return [{k: cols[k][i] for k in idx} for i in range(count)]


def _ball_point(rng: random.Random, center: Sequence[Fraction], radius: Fraction) -> tuple[Fraction, ...]:
    n = len(center)
    g = [rng.gauss(0, 1) for _ in range(n)]
    norm = math.sqrt(sum(t * t for t in g)) or 1.0
    r = float(radius) * rng.random() ** (1 / n)
    bits = _X_BITS + max(0, -math.frexp(float(radius))[1])
    return tuple(c + _dyadic(r * t / norm, bits) for c, t in zip(center, g))


# adversarial search

def adversarial_search(d: Algorithm, p: Polynomial, center: Sequence, radius, eps, budget: int,
                       seed: int = 0, batch: int = 16) -> AccuracyReport:
    """Worst relative error found near ``center``.

    Order: the center itself, then random ball points paired with Latin-hypercube
    rounding errors, then sign climbing on the best errors so far.  Stops early
    on an infinite error.  ``budget`` counts evaluations.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    check_leaves(d, p)
    eps, radius = Fraction(eps), Fraction(radius)
    center = tuple(Fraction(v) for v in center)
    rng = random.Random(seed)
    idx = all_delta_indices(d)
    rep = AccuracyReport(0, eps, None, sampler=f"ball(r={radius})")
    best: Witness | None = None

    def run(x: tuple, dl: dict[int, Fraction]) -> Witness:
        nonlocal best
        e = relative_error(d, p, x, dl, check=False)
        w = Witness(e, x, tuple(sorted(dl.items())))
        rep.samples += 1
        if _better(w, best):
            best = w
        _keep_top(rep.top, w)
        rep.trace.append(float(best.err) if best.err != INF else INF)
        return w

    # the center with every error at +eps, then a Latin-hypercube batch
    run(center, {k: eps for k in idx})
    explore = max(1, budget // 2)
    while rep.samples < explore and best.err != INF:
        for dl in _lhs_deltas(rng, idx, eps, batch):
            if rep.samples >= explore or best.err == INF:
                break
            x = center if rep.samples < batch else _ball_point(rng, center, radius)
            run(x, dl)
    # sign climbing from the current best
    while rep.samples < budget and best.err != INF:
        start = best
        for k in idx:
            if rep.samples >= budget or best.err == INF:
                break
            dl = dict(best.delta)
            dl[k] = -eps if dl[k] > 0 else eps
            run(best.x, dl)
        if best is start:
            if rep.samples >= budget:
                break
            x = _ball_point(rng, best.x, radius / 4)
            run(x, dict(best.delta))
    rep.worst = best
    rep.exhausted = rep.samples >= budget and best.err != INF
    _trim(rep.top)
    return rep


# sampled reports

@dataclass(frozen=True)
class Sampler:
    kind: str  # sphere | cube | near
    component: object | None = None

    @classmethod
    def parse(cls, text: str, nvars: int | None = None) -> "Sampler":
        text = text.strip()
        if text in ("sphere", "unit-sphere"):
            return cls("sphere")
        if text == "cube":
            return cls("cube")
        if text.startswith("near:"):
            from .dominance import parse_component

            return cls("near", parse_component(text[5:], nvars))
        raise ValueError(f"unknown sampler {text!r}")

    def __str__(self) -> str:
        if self.kind == "near":
            return f"near:{self.component}"
        return self.kind

    def draw(self, rng: random.Random, n: int, k: int) -> tuple[Fraction, ...]:
        if self.kind == "sphere":
            g = [rng.gauss(0, 1) for _ in range(n)]
            norm = math.sqrt(sum(t * t for t in g)) or 1.0
            return tuple(_dyadic(t / norm) for t in g)
        if self.kind == "cube":
            return tuple(_dyadic(rng.uniform(-1, 1)) for _ in range(n))
        return self.component.near_point(rng, n, k)


def _eval_chunk(args) -> list[Witness]:
    d, p, pairs = args
    out = []
    for x, dl in pairs:
        e = relative_error(d, p, x, dl, check=False)
        out.append(Witness(e, x, tuple(sorted(dl.items()))))
    return out


def sample_accuracy_report(d: Algorithm, p: Polynomial, sampler: Sampler | str, eps, eta, N: int,
                           seed: int = 0, delta_mode: str = "uniform", threads: int = 1) -> AccuracyReport:
    """``N`` sampled points, each with its own random rounding errors; pass iff worst <= eta."""
    if isinstance(sampler, str):
        sampler = Sampler.parse(sampler, p.nvars)
    if delta_mode not in ("uniform", "corners"):
        raise ValueError("delta mode is 'uniform' or 'corners'")
    check_leaves(d, p)
    eps = Fraction(eps)
    rng = random.Random(seed)
    idx = all_delta_indices(d)
    pairs = []
    for k in range(N):
        x = sampler.draw(rng, p.nvars, k)
        pairs.append((x, {i: _delta_value(rng, eps, delta_mode) for i in idx}))
    if threads > 1 and N > 1:
        size = -(-N // (threads * 4))
        chunks = [(d, p, pairs[i:i + size]) for i in range(0, N, size)]
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = [w for part in ex.map(_eval_chunk, chunks) for w in part]
    else:
        results = _eval_chunk((d, p, pairs))
    rep = AccuracyReport(N, eps, None, Fraction(eta) if eta is not None else None, str(sampler))
    for w in results:
        if _better(w, rep.worst):
            rep.worst = w
        _keep_top(rep.top, w)
        rep.errors.append(float(w.err) if w.err != INF else INF)
    _trim(rep.top)
    return rep
