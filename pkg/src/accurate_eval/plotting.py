"""Figures for accuracy reports and dominance regions (matplotlib, Agg backend)."""

from __future__ import annotations

import math
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .accuracy import AccuracyReport  # noqa: E402
from .dominance import DominanceRegion  # noqa: E402
from .poly import Polynomial  # noqa: E402


def _log10(v: float, floor: float) -> float:
    if v == math.inf:
        return math.nan
    return math.log10(max(v, floor))


def plot_report(rep: AccuracyReport, path: str, title: str = "") -> str:
    """Histogram of log10 relative errors, or the running worst error for a search."""
    fig, ax = plt.subplots(figsize=(6, 4))
    floor = 1e-300
    if rep.trace:
        ys = [_log10(v, floor) for v in rep.trace]
        ax.plot(range(1, len(ys) + 1), ys, lw=1)
        ax.set_xlabel("evaluations")
        ax.set_ylabel("log10 worst relative error so far")
        if any(v == math.inf for v in rep.trace):
            ax.axvline(next(i for i, v in enumerate(rep.trace, 1) if v == math.inf), color="r", ls="--",
                       label="infinite error")
            ax.legend()
    else:
        finite = [v for v in rep.errors if v != math.inf and v > 0]
        if finite:
            ax.hist([math.log10(v) for v in finite], bins=50)
        ax.set_xlabel("log10 relative error")
        ax.set_ylabel("count")
        zeros = sum(1 for v in rep.errors if v == 0)
        infinite = sum(1 for v in rep.errors if v == math.inf)
        ax.text(0.02, 0.95, f"exact: {zeros}  infinite: {infinite}", transform=ax.transAxes, va="top")
        if rep.eta is not None:
            ax.axvline(math.log10(float(rep.eta)), color="r", ls="--", label="eta")
            ax.legend()
    ax.set_title(title or f"eps = {float(rep.eps):.1e}")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_regions(p_new: Polynomial, block: Sequence[int], regions: Sequence[DominanceRegion],
                 path: str, title: str = "") -> str:
    """Block exponents of ``p`` (after the change of variables) with facet normals.

    Only two-variable blocks are drawn; larger blocks raise ValueError.
    """
    if len(block) != 2:
        raise ValueError("region plots need a block of two variables")
    pts = sorted({tuple(e[i] for i in block) for e, _ in p_new.items()})
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter([a for a, _ in pts], [b for _, b in pts], color="k", zorder=3)
    for r in regions:
        if r.facet:
            xs = [lam[0] for lam in r.lam]
            ys = [lam[1] for lam in r.lam]
            ax.plot(xs, ys, lw=2, label=r.lam_text())
        else:
            (a, b), = r.lam
            ax.annotate(f"({a},{b})", (a, b), textcoords="offset points", xytext=(4, 4))
    ax.set_xlabel(f"exponent of x{block[0] + 1}")
    ax.set_ylabel(f"exponent of x{block[1] + 1}")
    ax.set_aspect("equal", adjustable="datalim")
    if any(r.facet for r in regions):
        ax.legend(fontsize="small")
    ax.set_title(title or "leading exponent sets")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
