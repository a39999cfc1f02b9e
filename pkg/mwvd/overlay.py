"""Overlay arrangement of the prefix cells, candidate sets, and vertical decomposition"""
import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import shapely
from shapely.geometry import LineString, Polygon

from .config import REL_TOL
from .errors import AmbiguousCandidateSetError, DegeneracyError
from .geometry import Box, Point
from .prefix_cells import Ordering, PrefixCellSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CandidateSet:
    """Ranks that are strict prefix minima of a point's unweighted distance sequence"""
    ranks: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.ranks)

    def __len__(self) -> int:
        return len(self.ranks)

    def __iter__(self):
        return iter(self.ranks)

    def __contains__(self, rank: int) -> bool:
        return rank in self.ranks


def _prefix_minima(distances: np.ndarray) -> np.ndarray:
    """Boolean mask of strict prefix minima along the last axis"""
    running = np.minimum.accumulate(distances, axis=-1)
    mask = np.empty(distances.shape, dtype=bool)
    mask[..., 0] = True
    mask[..., 1:] = distances[..., 1:] < running[..., :-1]
    return mask


def candidate_set_of_point(x: Point, ord: Ordering) -> CandidateSet:
    """Ranks i with |x - s_i| < min over j < i of |x - s_j|"""
    locs = ord.locations
    d = np.hypot(locs[:, 0] - x.x, locs[:, 1] - x.y)
    minima = _prefix_minima(d)
    if len(ord) > 1:
        #Site holding the running minimum before each later site
        holder = np.maximum.accumulate(np.where(minima, np.arange(len(ord)), 0))[:-1]
        later = locs[1:]
        gap = later - locs[holder]
        #Signed distance of x from the bisector of each later site and the holder, affine in x
        mid = (later + locs[holder]) / 2.0
        norm = np.hypot(gap[:, 0], gap[:, 1])
        along = (x.x - mid[:, 0]) * gap[:, 0] + (x.y - mid[:, 1]) * gap[:, 1]
        #Coincident locations tie everywhere
        offset = np.divide(along, norm, out=np.zeros_like(along), where=norm > 0)
        #A tie with the running minimum is the only kind that decides membership
        if (np.abs(offset) <= REL_TOL * ord.scale).any():
            raise AmbiguousCandidateSetError()
    return CandidateSet(tuple(int(i) + 1 for i in np.flatnonzero(minima)))


def candidate_masks(points: np.ndarray, ord: Ordering, chunk: int = 8192) -> np.ndarray:
    """Candidate-set membership for many points at once, as an (m, n) boolean array"""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    locs = ord.locations
    out = np.empty((len(points), len(ord)), dtype=bool)
    for start in range(0, len(points), chunk):
        block = points[start:start + chunk]
        d = np.hypot(block[:, None, 0] - locs[None, :, 0], block[:, None, 1] - locs[None, :, 1])
        out[start:start + chunk] = _prefix_minima(d)
    return out


@dataclass(frozen=True)
class OverlayFace:
    id: int
    polygon: Polygon
    representative: Point
    candidates: CandidateSet


@dataclass(frozen=True)
class OverlayComplexity:
    """Counts without frame-only features and without the outer face"""
    V: int
    E: int
    F: int

    @property
    def total(self) -> int:
        return self.V + self.E + self.F


@dataclass(frozen=True)
class OverlayArrangement:
    ordering: Ordering
    box: Box
    vertices: tuple[Point, ...]
    vertex_on_frame: tuple[bool, ...]
    edges: tuple[tuple[int, int], ...]
    edge_on_frame: tuple[bool, ...]
    faces: tuple[OverlayFace, ...]
    components: int
    complexity: OverlayComplexity
    grid: float

    @cached_property
    def face_tree(self) -> shapely.STRtree:
        return shapely.STRtree([f.polygon for f in self.faces])

    @property
    def max_candidate_size(self) -> int:
        return max(f.candidates.size for f in self.faces)


@dataclass(frozen=True)
class DecomposedCell:
    """Vertical trapezoid x0 <= x <= x1 between two face edges (a triangle when a side collapses)"""
    face_id: int
    candidates: CandidateSet
    x0: float
    x1: float
    lo: tuple[float, float]
    hi: tuple[float, float]

    @property
    def vertices(self) -> tuple[Point, ...]:
        corners = [Point(self.x0, self.lo[0]), Point(self.x1, self.lo[1]),
                   Point(self.x1, self.hi[1]), Point(self.x0, self.hi[0])]
        kept: list[Point] = []
        for p in corners:
            if not kept or p != kept[-1]:
                kept.append(p)
        if len(kept) > 1 and kept[-1] == kept[0]:
            kept.pop()
        return tuple(kept)

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * ((self.hi[0] - self.lo[0]) + (self.hi[1] - self.lo[1])) / 2.0

    @property
    def diameter(self) -> float:
        return math.hypot(self.x1 - self.x0, max(self.hi) - min(self.lo))

    def _bounds_at(self, x: float) -> tuple[float, float]:
        t = (x - self.x0) / (self.x1 - self.x0)
        return (self.lo[0] + t * (self.lo[1] - self.lo[0]), self.hi[0] + t * (self.hi[1] - self.hi[0]))

    def contains(self, p: Point, tol: float = 0.0) -> bool:
        if not self.x0 - tol <= p.x <= self.x1 + tol:
            return False
        low, high = self._bounds_at(min(max(p.x, self.x0), self.x1))
        return low - tol <= p.y <= high + tol

    def sample(self, gen: np.random.Generator, k: int) -> np.ndarray:
        """k uniform points of the trapezoid"""
        h0 = self.hi[0] - self.lo[0]
        h1 = self.hi[1] - self.lo[1]
        u = gen.random(k)
        if abs(h1 - h0) <= 1e-12 * max(h0, h1):
            t = u
        else:
            #Inverse CDF of the linearly varying height
            t = (np.sqrt(h0 * h0 + u * (h1 * h1 - h0 * h0)) - h0) / (h1 - h0)
        x = self.x0 + t * (self.x1 - self.x0)
        low = self.lo[0] + t * (self.lo[1] - self.lo[0])
        high = self.hi[0] + t * (self.hi[1] - self.hi[0])
        y = low + gen.random(k) * (high - low)
        return np.column_stack([x, y])


def _boundary_lines(cells: PrefixCellSet) -> np.ndarray:
    box = cells.box
    ring = [c.as_tuple() for c in box.corners()]
    segments = [[p.as_tuple(), q.as_tuple()] for cell in cells.cells for p, q in cell.interior_edges() if p != q]
    lines = [LineString(ring + ring[:1])]
    if segments:
        lines.extend(shapely.linestrings(np.array(segments, dtype=float)))
    return np.array(lines, dtype=object)


def _count_components(n_vertices: int, edges: list[tuple[int, int]]) -> int:
    parent = list(range(n_vertices))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    return len({find(a) for a in range(n_vertices)})


def _sites_touching(geometry, cells: PrefixCellSet) -> tuple[int, ...]:
    """Ranks whose cell boundary passes near a problem geometry"""
    tol = 1e-6 * cells.ordering.scale
    ranks = []
    for rank, cell in enumerate(cells.cells, start=1):
        edges = cell.interior_edges()
        if edges and any(LineString([p.as_tuple(), q.as_tuple()]).distance(geometry) <= tol for p, q in edges):
            ranks.append(rank)
    return tuple(ranks)


def build_overlay(cells: PrefixCellSet) -> OverlayArrangement:
    """Planar subdivision induced by all prefix-cell boundaries, with a candidate set per face"""
    box = cells.box
    ord = cells.ordering
    #Snap rounding merges the near-coincident crossings left by independent clipping
    noded = shapely.union_all(_boundary_lines(cells), grid_size=cells.grid)
    parts = shapely.get_parts(noded)

    polygons, cuts, dangles, invalid = shapely.polygonize_full(parts)
    problems = shapely.union_all([cuts, dangles, invalid])
    if not problems.is_empty:
        raise DegeneracyError("overlay boundaries do not close into faces", _sites_touching(problems, cells))

    #Explode the noded lines into straight edges between distinct nodes
    coords, owner = shapely.get_coordinates(parts, return_index=True)
    index: dict[tuple[float, float], int] = {}
    vertices: list[Point] = []
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for k in range(len(coords)):
        key = (float(coords[k, 0]), float(coords[k, 1]))
        if key not in index:
            index[key] = len(vertices)
            vertices.append(Point(*key))
        if k and owner[k] == owner[k - 1]:
            u = index[(float(coords[k - 1, 0]), float(coords[k - 1, 1]))]
            v = index[key]
            if u != v and (min(u, v), max(u, v)) not in seen:
                seen.add((min(u, v), max(u, v)))
                edges.append((u, v))

    frame_tol = cells.grid
    side = []
    for p in vertices:
        side.append(frozenset(
            name for name, gap in (("l", p.x - box.xmin), ("r", box.xmax - p.x), ("b", p.y - box.ymin), ("t", box.ymax - p.y))
            if abs(gap) <= frame_tol
        ))
    vertex_on_frame = tuple(bool(s) for s in side)
    edge_on_frame = tuple(bool(side[u] & side[v]) for u, v in edges)

    face_polys = list(shapely.get_parts(polygons))
    components = _count_components(len(vertices), edges)
    if len(vertices) - len(edges) + len(face_polys) + 1 != 1 + components:
        raise DegeneracyError(
            f"Euler relation fails: V={len(vertices)} E={len(edges)} F={len(face_polys) + 1} components={components}"
        )
    face_area = float(sum(p.area for p in face_polys))
    if abs(face_area - box.area) > 1e-9 * box.area + 2.0 * cells.grid * (box.width + box.height):
        raise DegeneracyError(f"faces cover {face_area} of box area {box.area}")

    reps = shapely.get_coordinates(shapely.point_on_surface(face_polys))
    membership = np.zeros((len(face_polys), len(ord)), dtype=bool)
    for i, cell in enumerate(cells.cells):
        if not cell.is_empty:
            poly = Polygon([v.as_tuple() for v in cell.vertices])
            membership[:, i] = shapely.contains_xy(poly, reps[:, 0], reps[:, 1])

    faces = tuple(
        OverlayFace(k, face_polys[k], Point(float(reps[k, 0]), float(reps[k, 1])),
                    CandidateSet(tuple(int(i) + 1 for i in np.flatnonzero(membership[k]))))
        for k in range(len(face_polys))
    )
    complexity = OverlayComplexity(
        V=sum(1 for f in vertex_on_frame if not f),
        E=sum(1 for f in edge_on_frame if not f),
        F=len(faces),
    )
    arrangement = OverlayArrangement(ord, box, tuple(vertices), vertex_on_frame, tuple(edges),
                                     edge_on_frame, faces, components, complexity, cells.grid)

    #Cell membership at the representative must agree with the prefix-minima definition
    for face_id, cs in face_candidate_sets(arrangement, ord).items():
        if cs != faces[face_id].candidates:
            odd = tuple(sorted(set(cs.ranks) ^ set(faces[face_id].candidates.ranks)))
            raise DegeneracyError(f"face {face_id} candidate set disagrees with its cells", odd)

    logger.debug("overlay: n=%d V=%d E=%d F=%d components=%d", len(ord), complexity.V, complexity.E,
                 complexity.F, components)
    return arrangement


def face_candidate_sets(A: OverlayArrangement, ord: Ordering, verify_samples: int = 0,
                        gen: np.random.Generator | None = None) -> dict[int, CandidateSet]:
    """Candidate set of each face, evaluated at its representative point

    With verify_samples > 0, that many uniform interior points of every face are
    checked against the representative's set; points within two snap grids of the
    face boundary are skipped.
    """
    result: dict[int, CandidateSet] = {}
    for face in A.faces:
        try:
            result[face.id] = candidate_set_of_point(face.representative, ord)
        except AmbiguousCandidateSetError:
            raise DegeneracyError(f"representative of face {face.id} lies on a bisector") from None
    if verify_samples > 0:
        gen = gen if gen is not None else np.random.default_rng(0)
        for face in A.faces:
            pts = sample_face_points(A, face.id, verify_samples, gen)
            pts = pts[shapely.distance(face.polygon.boundary, shapely.points(pts)) > 2.0 * A.grid]
            masks = candidate_masks(pts, ord)
            expected = np.zeros(len(ord), dtype=bool)
            expected[np.array(result[face.id].ranks) - 1] = True
            if not (masks == expected).all():
                raise DegeneracyError(f"candidate set varies inside face {face.id}", result[face.id].ranks)
    return result


def _face_edges(polygon: Polygon) -> list[tuple[float, float, float, float]]:
    """Non-vertical boundary edges as (x_left, y_left, x_right, y_right)"""
    edges = []
    for ring in (polygon.exterior, *polygon.interiors):
        c = np.asarray(ring.coords)
        for k in range(len(c) - 1):
            x0, y0 = float(c[k, 0]), float(c[k, 1])
            x1, y1 = float(c[k + 1, 0]), float(c[k + 1, 1])
            if x0 == x1:
                continue
            if x0 > x1:
                x0, y0, x1, y1 = x1, y1, x0, y0
            edges.append((x0, y0, x1, y1))
    return edges


def _y_at(edge: tuple[float, float, float, float], x: float) -> float:
    x0, y0, x1, y1 = edge
    if x == x0:
        return y0
    if x == x1:
        return y1
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def decompose_face(face: OverlayFace) -> list[DecomposedCell]:
    """Vertical decomposition of one face: walls from every vertex up and down to the nearest edge"""
    edges = _face_edges(face.polygon)
    xs = sorted({e[0] for e in edges} | {e[2] for e in edges})
    cells: list[DecomposedCell] = []
    opened: dict[tuple[int, int], float] = {}

    def close(pair: tuple[int, int], x0: float, x1: float):
        lo, hi = edges[pair[0]], edges[pair[1]]
        cells.append(DecomposedCell(face.id, face.candidates, x0, x1,
                                    (_y_at(lo, x0), _y_at(lo, x1)), (_y_at(hi, x0), _y_at(hi, x1))))

    for xa, xb in zip(xs, xs[1:]):
        xm = (xa + xb) / 2.0
        spanning = sorted((k for k, e in enumerate(edges) if e[0] <= xa and e[2] >= xb),
                          key=lambda k: _y_at(edges[k], xm))
        if len(spanning) % 2:
            raise DegeneracyError(f"face {face.id} boundary is not closed at x={xm}", face.candidates.ranks)
        pairs = list(zip(spanning[0::2], spanning[1::2]))
        #A trapezoid continues while the same two edges bound it
        for pair in [p for p in opened if p not in pairs]:
            close(pair, opened.pop(pair), xa)
        for pair in pairs:
            opened.setdefault(pair, xa)
    for pair, x0 in opened.items():
        close(pair, x0, xs[-1])
    return cells


def decompose(A: OverlayArrangement) -> list[DecomposedCell]:
    cells = [cell for face in A.faces for cell in decompose_face(face)]
    logger.debug("decomposition: %d faces -> %d cells", len(A.faces), len(cells))
    return cells


def sample_face_points(A: OverlayArrangement, face_id: int, k: int, gen: np.random.Generator) -> np.ndarray:
    """k uniform interior points of a face, drawn through its decomposition"""
    pieces = decompose_face(A.faces[face_id])
    areas = np.array([c.area for c in pieces])
    picks = gen.choice(len(pieces), size=k, p=areas / areas.sum())
    return np.vstack([pieces[i].sample(gen, 1) for i in picks])


def overlay_complexity(A: OverlayArrangement) -> OverlayComplexity:
    return A.complexity
