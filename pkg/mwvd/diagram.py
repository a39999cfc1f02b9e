"""The multiplicative weighted Voronoi diagram: brute-force oracle, candidate-set construction, point location"""
import logging
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Literal, Sequence

import numpy as np
import shapely

from .config import BOX_FACTOR, DEDUP_TOL, REL_TOL
from .errors import BoundaryQueryError, OutsideWorldBoxError
from .geometry import Point, triple_equidistant_points
from .overlay import CandidateSet, OverlayArrangement, build_overlay, decompose
from .prefix_cells import Ordering, build_prefix_cells

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiagramVertex:
    location: Point
    triple: tuple[int, int, int]
    distance: float


@dataclass(frozen=True)
class DiagramCounts:
    """E and F are None when they cannot be derived (repeated weights)"""
    V: int
    E: int | None
    F: int | None


@dataclass(frozen=True)
class MWVDiagram:
    vertices: tuple[DiagramVertex, ...]
    cell_nonempty: tuple[bool, ...]
    counts: DiagramCounts
    provenance: Literal["oracle", "fast"]
    near_degenerate: int = 0
    arrangement: OverlayArrangement | None = None


@dataclass(frozen=True)
class QueryResult:
    rank: int
    value: float
    candidates: CandidateSet | None = None


def nearest_weighted_site(x: Point, ord: Ordering) -> QueryResult:
    """Exhaustive argmin of w_i * |x - p_i|; exact ties go to the lower rank"""
    locs = ord.locations
    f = ord.weights * np.hypot(locs[:, 0] - x.x, locs[:, 1] - x.y)
    i = int(np.argmin(f))
    return QueryResult(i + 1, float(f[i]))


def nearest_weighted_ranks(points: np.ndarray, ord: Ordering, chunk: int = 4096) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized exhaustive argmin for an (m, 2) array: (ranks, values)"""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    locs, w = ord.locations, ord.weights
    ranks = np.empty(len(points), dtype=int)
    values = np.empty(len(points))
    for start in range(0, len(points), chunk):
        block = points[start:start + chunk]
        f = w[None, :] * np.hypot(block[:, None, 0] - locs[None, :, 0], block[:, None, 1] - locs[None, :, 1])
        i = np.argmin(f, axis=1)
        ranks[start:start + chunk] = i + 1
        values[start:start + chunk] = f[np.arange(len(block)), i]
    return ranks, values


def _check_vertex(x: Point, triple: tuple[int, int, int], others: np.ndarray, ord: Ordering) -> tuple[float, str]:
    """Weighted distance at x and a verdict: 'ok', 'near' (within 10x tolerance) or 'beaten'"""
    locs, w = ord.locations, ord.weights
    idx = np.array(triple) - 1
    d = float(np.mean(w[idx] * np.hypot(locs[idx, 0] - x.x, locs[idx, 1] - x.y)))
    rest = others[~np.isin(others, idx)]
    if rest.size == 0:
        return d, "ok"
    nearest = float(np.min(w[rest] * np.hypot(locs[rest, 0] - x.x, locs[rest, 1] - x.y)))
    margin = (nearest - d) / d
    if margin < -REL_TOL:
        return d, "beaten"
    if margin <= 10.0 * REL_TOL:
        return d, "near"
    return d, "ok"


def _is_duplicate(x: Point, existing: list[DiagramVertex], scale: float) -> bool:
    tol = DEDUP_TOL * max(scale, abs(x.x), abs(x.y))
    return any(v.location.distance(x) <= tol for v in existing)


def _derive_counts(ord: Ordering, V: int) -> DiagramCounts:
    n = len(ord)
    if n == 1:
        return DiagramCounts(0, 0, 1)
    #All arcs are bounded when weights are distinct: the lightest site owns everything far away
    if len(np.unique(ord.weights)) == n:
        return DiagramCounts(V, 3 * V // 2, V // 2 + 2)
    return DiagramCounts(V, None, None)


def _cells_nonempty(ord: Ordering) -> tuple[bool, ...]:
    ranks, _ = nearest_weighted_ranks(ord.locations, ord)
    return tuple(bool(r == i + 1) for i, r in enumerate(ranks))


def _collect(found: dict[tuple[int, int, int], list[DiagramVertex]]) -> tuple[DiagramVertex, ...]:
    flat = [v for vs in found.values() for v in vs]
    return tuple(sorted(flat, key=lambda v: (v.location.x, v.location.y, v.triple)))


def brute_force_diagram(ord: Ordering) -> MWVDiagram:
    """All C(n, 3) triples, each validated against every site"""
    everyone = np.arange(len(ord))
    found: dict[tuple[int, int, int], list[DiagramVertex]] = defaultdict(list)
    near = 0
    for triple in combinations(range(1, len(ord) + 1), 3):
        for x in triple_equidistant_points(*(ord.site(r) for r in triple)):
            d, verdict = _check_vertex(x, triple, everyone, ord)
            if verdict == "beaten" or _is_duplicate(x, found[triple], ord.scale):
                continue
            near += verdict == "near"
            found[triple].append(DiagramVertex(x, triple, d))
    vertices = _collect(found)
    logger.debug("brute force diagram: n=%d V=%d near-degenerate=%d", len(ord), len(vertices), near)
    return MWVDiagram(vertices, _cells_nonempty(ord), _derive_counts(ord, len(vertices)), "oracle", near)


def fast_diagram(ord: Ordering, box_factor: float = BOX_FACTOR) -> MWVDiagram:
    """Candidate-set construction: triples are only drawn from the candidate set of each decomposed cell"""
    A = build_overlay(build_prefix_cells(ord, box_factor))
    pieces_of = defaultdict(list)
    for piece in decompose(A):
        pieces_of[piece.face_id].append(piece)

    #Snap rounding can leave a vertex shared by several faces just outside all of them
    reach = DEDUP_TOL * ord.scale + 4.0 * A.grid
    everyone = np.arange(len(ord))
    triple_points: dict[tuple[int, int, int], tuple[Point, ...]] = {}
    found: dict[tuple[int, int, int], list[DiagramVertex]] = defaultdict(list)
    near = 0
    for face in A.faces:
        ranks = face.candidates.ranks
        if len(ranks) < 3:
            continue
        members = np.array(ranks) - 1
        pieces = pieces_of[face.id]
        for triple in combinations(ranks, 3):
            pts = triple_points.get(triple)
            if pts is None:
                pts = triple_points[triple] = triple_equidistant_points(*(ord.site(r) for r in triple))
            for x in pts:
                if _is_duplicate(x, found[triple], ord.scale):
                    continue
                inside = any(p.contains(x) for p in pieces)
                if not inside and not shapely.dwithin(face.polygon, shapely.Point(x.x, x.y), reach):
                    continue
                #Points only near the face are checked against every site
                d, verdict = _check_vertex(x, triple, members if inside else everyone, ord)
                if verdict == "beaten":
                    continue
                near += verdict == "near"
                found[triple].append(DiagramVertex(x, triple, d))

    vertices = _collect(found)
    logger.debug("fast diagram: n=%d V=%d from %d faces (%d triples evaluated)",
                 len(ord), len(vertices), len(A.faces), len(triple_points))
    return MWVDiagram(vertices, _cells_nonempty(ord), _derive_counts(ord, len(vertices)), "fast", near, A)


def same_vertices(a: MWVDiagram, b: MWVDiagram, tol: float) -> bool:
    """Equal vertex counts and a one-to-one matching of locations within tol"""
    if len(a.vertices) != len(b.vertices):
        return False
    unused = list(b.vertices)
    for v in a.vertices:
        hit = next((k for k, u in enumerate(unused) if u.location.distance(v.location) <= tol), None)
        if hit is None:
            return False
        unused.pop(hit)
    return True


def _argmin_over(x: float, y: float, ranks: tuple[int, ...], ord: Ordering) -> tuple[int, float]:
    idx = np.array(ranks) - 1
    locs = ord.locations
    f = ord.weights[idx] * np.hypot(locs[idx, 0] - x, locs[idx, 1] - y)
    k = int(np.argmin(f))
    return ranks[k], float(f[k])


def locate(x: Point, A: OverlayArrangement, ord: Ordering) -> QueryResult:
    """Weighted nearest site found through the face's candidate set only"""
    box = A.box
    if not (box.xmin < x.x < box.xmax and box.ymin < x.y < box.ymax):
        raise OutsideWorldBoxError()
    hits = A.face_tree.query(shapely.Point(x.x, x.y), predicate="within")
    if len(hits) != 1:
        raise BoundaryQueryError()
    face = A.faces[int(hits[0])]
    rank, value = _argmin_over(x.x, x.y, face.candidates.ranks, ord)
    return QueryResult(rank, value, face.candidates)


def locate_many(points: np.ndarray | Sequence[Point], A: OverlayArrangement, ord: Ordering) -> list[QueryResult]:
    """Bulk locate(); every point must lie strictly inside one face"""
    pts = np.array([p.as_tuple() if isinstance(p, Point) else p for p in points], dtype=float).reshape(-1, 2)
    box = A.box
    inside = (pts[:, 0] > box.xmin) & (pts[:, 0] < box.xmax) & (pts[:, 1] > box.ymin) & (pts[:, 1] < box.ymax)
    if not inside.all():
        raise OutsideWorldBoxError(f"{int((~inside).sum())} query points outside the world box")
    which, faces = A.face_tree.query(shapely.points(pts), predicate="within")
    face_of = np.full(len(pts), -1)
    counts = np.bincount(which, minlength=len(pts))
    if (counts != 1).any():
        raise BoundaryQueryError(f"{int((counts != 1).sum())} query points on face boundaries")
    face_of[which] = faces

    results: list[QueryResult | None] = [None] * len(pts)
    locs, w = ord.locations, ord.weights
    for face_id in np.unique(face_of):
        face = A.faces[int(face_id)]
        sel = np.flatnonzero(face_of == face_id)
        idx = np.array(face.candidates.ranks) - 1
        f = w[None, idx] * np.hypot(pts[sel, None, 0] - locs[None, idx, 0], pts[sel, None, 1] - locs[None, idx, 1])
        best = np.argmin(f, axis=1)
        for k, q in enumerate(sel):
            results[q] = QueryResult(face.candidates.ranks[best[k]], float(f[k, best[k]]), face.candidates)
    return results
