"""Randomized incremental lower envelope of affine functions, and crossings of the first bisector by later prefix cells"""
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import TripleIntersectionError
from .geometry import Box, Line, Point
from .prefix_cells import Ordering, PrefixCellSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AffineFunction:
    slope: float
    intercept: float

    def __call__(self, t: float) -> float:
        return self.slope * t + self.intercept


@dataclass(frozen=True)
class EnvelopePiece:
    """Function index attaining the envelope on [start, end]"""
    index: int
    start: float
    end: float


@dataclass(frozen=True)
class EnvelopeTrace:
    new_vertices: tuple[int, ...]
    envelope_sizes: tuple[int, ...]
    cumulative: tuple[int, ...]

    @property
    def total(self) -> int:
        return self.cumulative[-1] if self.cumulative else 0


def _below(g: AffineFunction, f: AffineFunction, a: float, b: float) -> tuple[float, float] | None:
    """Sub-interval of [a, b] where g < f, if any"""
    ga, gb, fa, fb = g(a), g(b), f(a), f(b)
    below_a, below_b = ga < fa, gb < fb
    if below_a and below_b:
        return a, b
    if not (below_a or below_b) or g.slope == f.slope:
        return None
    t = (f.intercept - g.intercept) / (g.slope - f.slope)
    t = min(max(t, a), b)
    return (a, t) if below_a else (t, b)


def _insert(pieces: list[EnvelopePiece], functions: Sequence[AffineFunction], k: int,
            lo: float, hi: float) -> tuple[list[EnvelopePiece], int]:
    """Insert function k; returns the new envelope and the number of vertices it created"""
    g = functions[k]
    if not pieces:
        return [EnvelopePiece(k, lo, hi)], 0
    spans = [s for p in pieces if (s := _below(g, functions[p.index], p.start, p.end)) is not None]
    if not spans:
        return pieces, 0
    #g minus the envelope is convex, so g wins on one interval
    start = min(s[0] for s in spans)
    end = max(s[1] for s in spans)
    if end <= start:
        return pieces, 0

    tol = 1e-12 * max(1.0, abs(lo), abs(hi))
    breaks = [p.end for p in pieces[:-1]]
    created = 0
    for t in (start, end):
        if lo + tol < t < hi - tol:
            if any(abs(t - b) <= tol for b in breaks):
                raise TripleIntersectionError(f"function {k} meets the envelope at a vertex (t={t:g})")
            created += 1

    result: list[EnvelopePiece] = []
    for p in pieces:
        if p.start < start:
            result.append(EnvelopePiece(p.index, p.start, min(p.end, start)))
    result.append(EnvelopePiece(k, start, end))
    for p in pieces:
        if p.end > end:
            result.append(EnvelopePiece(p.index, max(p.start, end), p.end))
    return [p for p in result if p.end > p.start], created


def lower_envelope(functions: Sequence[AffineFunction], interval: tuple[float, float]) -> list[EnvelopePiece]:
    lo, hi = interval
    pieces: list[EnvelopePiece] = []
    for k in range(len(functions)):
        pieces, _ = _insert(pieces, functions, k, lo, hi)
    return pieces


def ric_envelope_overlay(functions: Sequence[AffineFunction], perm: Sequence[int] | None = None,
                         interval: tuple[float, float] = (-1e6, 1e6)) -> EnvelopeTrace:
    """Insert functions in perm order, recording the envelope vertices each insertion creates"""
    lo, hi = interval
    order = list(perm) if perm is not None else list(range(len(functions)))
    if sorted(order) != list(range(len(functions))):
        raise ValueError("perm must be a permutation of the function indices")
    pieces: list[EnvelopePiece] = []
    new_vertices, sizes, cumulative = [], [], []
    running = 0
    for k in order:
        pieces, created = _insert(pieces, functions, k, lo, hi)
        running += created
        new_vertices.append(created)
        sizes.append(len(pieces) - 1)
        cumulative.append(running)
    return EnvelopeTrace(tuple(new_vertices), tuple(sizes), tuple(cumulative))


def random_lines(n: int, gen: np.random.Generator) -> list[AffineFunction]:
    """Lines with standard normal slopes and intercepts"""
    coeffs = gen.standard_normal((n, 2))
    return [AffineFunction(float(a), float(b)) for a, b in coeffs]


def bisector_line(ord: Ordering) -> Line:
    """Unweighted bisector of the ranks 1 and 2 sites"""
    p, q = ord.site(1).location, ord.site(2).location
    dx, dy = q.x - p.x, q.y - p.y
    d = math.hypot(dx, dy)
    return Line(Point((p.x + q.x) / 2.0, (p.y + q.y) / 2.0), (-dy / d, dx / d))


def _clip_line(ell: Line, box: Box) -> tuple[float, float]:
    """Parameter range of ell inside box"""
    lo, hi = -math.inf, math.inf
    for origin, step, a, b in ((ell.point.x, ell.direction[0], box.xmin, box.xmax),
                               (ell.point.y, ell.direction[1], box.ymin, box.ymax)):
        if step == 0:
            continue
        t0, t1 = sorted(((a - origin) / step, (b - origin) / step))
        lo, hi = max(lo, t0), min(hi, t1)
    return lo, hi


def bisector_crossing_count(cells: PrefixCellSet, ell: Line | None = None) -> int:
    """Crossings of ell with the boundaries of prefix cells 3..n (frame edges excluded)"""
    ord = cells.ordering
    if len(ord) < 3:
        return 0
    ell = ell if ell is not None else bisector_line(ord)
    ux, uy = ell.direction

    def side(v: Point) -> bool:
        #Zero offset counts with the negative side
        return (v.x - ell.point.x) * -uy + (v.y - ell.point.y) * ux > 0

    count = 0
    for cell in cells.cells[2:]:
        for p, q in cell.interior_edges():
            count += side(p) != side(q)
    return count


def bisector_envelope_trace(ord: Ordering, box: Box) -> EnvelopeTrace:
    """Squared distances along the first bisector, minus the common t^2, inserted in rank order 1, 3, ..., n

    Its total equals bisector_crossing_count on the same box.
    """
    ell = bisector_line(ord)
    m, (dx, dy) = ell.point, ell.direction
    functions = []
    for rank in (1, *range(3, len(ord) + 1)):
        p = ord.site(rank).location
        ox, oy = m.x - p.x, m.y - p.y
        functions.append(AffineFunction(2.0 * (dx * ox + dy * oy), ox * ox + oy * oy))
    trace = ric_envelope_overlay(functions, interval=_clip_line(ell, box))
    logger.debug("bisector envelope: n=%d crossings=%d", len(ord), trace.total)
    return trace
