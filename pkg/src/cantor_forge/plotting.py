"""Number-line pictures of interval sets: SVG via matplotlib, or plain text."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO

import matplotlib
from matplotlib.figure import Figure

from .analyzer import rank_report
from .constructions import admits, realize
from .intervals import Interval, IntervalSet
from .numerics import Dyadic, format_extended, pow2
from .tree import Cluster, Tree, Union, child_map

CUTOFF = pow2(-14)  # blocks shorter than this are drawn as 1-pixel ticks
DPI = 100

_RC = {"svg.hashsalt": "cantor-forge", "svg.fonttype": "none"}


@dataclass
class NumberLine:
    """What to draw: the set, marked limit points and per-point labels."""

    intervals: IntervalSet
    limits: list[Dyadic] = field(default_factory=list)
    labels: list[tuple[Dyadic, str]] = field(default_factory=list)
    title: str = ""

    def span(self) -> Interval:
        h = self.intervals.hull
        if h is None:
            return Interval(0, 1)
        if h.is_point:
            return Interval(h.lo - 1, h.hi + 1)
        return h


def _limits(t: Tree, d: int, a: Dyadic, b: Dyadic, out: list[Dyadic]) -> None:
    if isinstance(t, Union):
        for p in t.parts:
            _limits(p, d, a, b, out)
    elif isinstance(t, Cluster):
        out.append(a * t.limit + b)
        k = 0
        while True:
            ca, cb = child_map(t, k)
            if not admits(k, a * ca, d):
                break
            tpl = t.template_at(k)
            if tpl is not None:
                _limits(tpl, d, a * ca, a * cb + b, out)
            k += 1


def tree_picture(t: Tree, depth: int, bound: int, title: str = "") -> NumberLine:
    """Stage-``depth`` realization with cluster limits and the ranks of
    interior-bearing components. Components closer together than 1/64 of the
    span share one label showing the largest rank among them."""
    limits: list[Dyadic] = []
    _limits(t, depth, Dyadic(1), Dyadic(0), limits)
    picture = NumberLine(realize(t, depth), sorted(set(limits)), [], title)
    gap = picture.span().length.shift(-6)
    groups: list[list] = []  # [start, best position, best rank]
    for c in rank_report(t, bound, listing=depth).components:
        if not c.has_interior:
            continue
        x = (c.span.lo + c.span.hi).shift(-1)
        if groups and x - groups[-1][0] < gap:
            if c.rank > groups[-1][2]:
                groups[-1][1:] = [x, c.rank]
        else:
            groups.append([x, x, c.rank])
    picture.labels = [(x, format_extended(r)) for _, x, r in groups]
    return picture


def render_svg(picture: NumberLine, out: IO[bytes] | str) -> None:
    """Write an SVG number line; output is byte-stable for equal input."""
    span = picture.span()
    pad = float(span.length) * 0.03
    fig = Figure(figsize=(10, 2), dpi=DPI)
    ax = fig.add_subplot(1, 1, 1)
    ax.set_xlim(float(span.lo) - pad, float(span.hi) + pad)
    ax.set_ylim(-1, 1.6)
    ax.get_yaxis().set_visible(False)
    for side in ("left", "right", "top"):
        ax.spines[side].set_visible(False)
    ax.axhline(0, color="0.7", linewidth=0.5, zorder=0)

    px = 72 / DPI  # one pixel in points
    small = 0
    for iv in picture.intervals:
        if iv.is_point:
            continue
        if iv.length < CUTOFF:
            small += 1
            ax.vlines(float(iv.lo), -0.3, 0.3, colors="tab:blue", linewidth=px)
        else:
            ax.hlines(0, float(iv.lo), float(iv.hi), colors="tab:blue", linewidth=8)
    for iv in picture.intervals:
        if iv.is_point and iv.lo not in picture.limits:
            ax.plot([float(iv.lo)], [0], marker="|", color="tab:blue", markersize=8)
    if picture.limits:
        ax.plot([float(x) for x in picture.limits], [0] * len(picture.limits), "o", color="tab:red", markersize=3)
    for x, text in picture.labels:
        ax.annotate(text, (float(x), 0.35), ha="center", fontsize=7)
    if small:
        ax.text(1.0, 0.98, f"+{small} blocks < 2^-14 drawn as ticks", transform=ax.transAxes, ha="right", va="top", fontsize=7)
    if picture.title:
        ax.set_title(picture.title, fontsize=9)
    with matplotlib.rc_context(_RC):
        fig.savefig(out, format="svg", metadata={"Date": None})


def ascii_line(s: IntervalSet, width: int = 72, span: Interval | None = None) -> str:
    """One character per cell: ``#`` where a block meets the cell, ``.`` for bare points."""
    if span is None:
        span = NumberLine(s).span()
    lo, length = span.lo.to_fraction(), span.length.to_fraction()
    ivs = [(iv.lo.to_fraction(), iv.hi.to_fraction(), iv.is_point) for iv in s]
    cells = []
    for i in range(width):
        a, b = lo + length * Fraction(i, width), lo + length * Fraction(i + 1, width)
        hits = [point for x, y, point in ivs if y >= a and x <= b]
        cells.append(" " if not hits else "." if all(hits) else "#")
    return f"{''.join(cells)}\n{span.lo} .. {span.hi}"
