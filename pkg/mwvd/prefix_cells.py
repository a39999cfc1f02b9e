"""Prefix Voronoi cells of the weight ordering, and the world box that contains every feature"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .config import BOX_FACTOR, HORIZON, SNAP_TOL
from .geometry import Box, ConvexRegion, HalfPlane, Point, Site, clip_region, clip_to_box

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Ordering:
    """Sites sorted by (weight, tiebreak); sites[i] has rank i + 1"""
    sites: tuple[Site, ...]

    def __post_init__(self):
        for i, s in enumerate(self.sites):
            if s.rank != i + 1:
                raise ValueError(f"site at position {i + 1} carries rank {s.rank}")
            if i and (self.sites[i - 1].weight, self.sites[i - 1].tiebreak) >= (s.weight, s.tiebreak):
                raise ValueError(f"(weight, tiebreak) not strictly increasing at rank {s.rank}")

    @classmethod
    def from_sites(cls, sites: Iterable[Site]) -> "Ordering":
        ranked = sorted(sites, key=lambda s: (s.weight, s.tiebreak))
        return cls(tuple(Site(s.location, s.weight, i + 1, s.tiebreak) for i, s in enumerate(ranked)))

    def __len__(self) -> int:
        return len(self.sites)

    def site(self, rank: int) -> Site:
        return self.sites[rank - 1]

    @cached_property
    def locations(self) -> np.ndarray:
        return np.array([[s.location.x, s.location.y] for s in self.sites], dtype=float).reshape(-1, 2)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([s.weight for s in self.sites], dtype=float)

    @cached_property
    def scale(self) -> float:
        """Diameter of the site bounding box (1.0 for a single site)"""
        if len(self.sites) < 2:
            return 1.0
        span = self.locations.max(axis=0) - self.locations.min(axis=0)
        return float(np.hypot(*span)) or 1.0

    def with_weights_scaled(self, factor: float) -> "Ordering":
        return Ordering(tuple(Site(s.location, s.weight * factor, s.rank, s.tiebreak) for s in self.sites))

    def with_locations(self, locations: Sequence[Point]) -> "Ordering":
        return Ordering(tuple(Site(p, s.weight, s.rank, s.tiebreak) for s, p in zip(self.sites, locations)))


@dataclass(frozen=True)
class PrefixCellSet:
    """cells[i - 1] is the unweighted Voronoi cell of rank i among ranks 1..i, clipped to box

    grid is the snap-rounding size used when the cell boundaries are noded together.
    """
    ordering: Ordering
    cells: tuple[ConvexRegion, ...]
    box: Box
    grid: float

    @property
    def vertex_total(self) -> int:
        return sum(len(c.vertices) for c in self.cells)


def _prefix_region(i: int, ord: Ordering, start: ConvexRegion) -> ConvexRegion:
    """Clip start by the bisector half-planes of rank i against ranks 1..i-1"""
    region = start
    if i == 1:
        return region
    locs = ord.locations
    here = ord.site(i).location
    gaps = np.hypot(locs[: i - 1, 0] - here.x, locs[: i - 1, 1] - here.y)
    reach = max(here.distance(v) for v in region.vertices)
    for j in np.argsort(gaps, kind="stable"):
        #A bisector at distance gap/2 cannot cut a region inside the disk of radius reach
        if gaps[j] / 2.0 >= reach:
            break
        clipped = clip_region(region, HalfPlane.closer_to(here, ord.sites[j].location))
        if clipped is region:
            continue
        region = clipped
        if region.is_empty:
            break
        reach = max(here.distance(v) for v in region.vertices)
    return region


def prefix_cell(i: int, ord: Ordering, box: Box) -> ConvexRegion:
    """V-bar_i: where rank i is the unweighted nearest among ranks 1..i, clipped to box"""
    if not 1 <= i <= len(ord):
        raise IndexError(f"prefix index {i} outside 1..{len(ord)}")
    return _prefix_region(i, ord, ConvexRegion.from_box(box))


def all_prefix_cells(ord: Ordering, box: Box) -> PrefixCellSet:
    cells = tuple(prefix_cell(i, ord, box) for i in range(1, len(ord) + 1))
    result = PrefixCellSet(ord, cells, box, box.snap_grid(SNAP_TOL))
    logger.debug("prefix cells: n=%d, %d vertices in total", len(ord), result.vertex_total)
    return result


def _apollonius_extent(ord: Ordering) -> np.ndarray:
    """Corner points of the bounding squares of every pairwise Apollonius circle"""
    p, w = ord.locations, ord.weights
    i, j = np.triu_indices(len(ord), k=1)
    distinct = w[i] != w[j]
    i, j = i[distinct], j[distinct]
    if i.size == 0:
        return np.empty((0, 2))
    wi2, wj2 = w[i] ** 2, w[j] ** 2
    denom = (wi2 - wj2)[:, None]
    centers = (wi2[:, None] * p[i] - wj2[:, None] * p[j]) / denom
    radii = w[i] * w[j] * np.hypot(*(p[i] - p[j]).T) / np.abs(denom[:, 0])
    return np.vstack([centers - radii[:, None], centers + radii[:, None]])


def _crossings(segments: np.ndarray) -> np.ndarray:
    """Pairwise proper intersection points of segments given as an (m, 2, 2) array"""
    if len(segments) < 2:
        return np.empty((0, 2))
    p = segments[:, 0, :]
    d = segments[:, 1, :] - p
    i, j = np.triu_indices(len(segments), k=1)
    denom = d[i, 0] * d[j, 1] - d[i, 1] * d[j, 0]
    ok = np.abs(denom) > 1e-300
    i, j, denom = i[ok], j[ok], denom[ok]
    w = p[j] - p[i]
    t = (w[:, 0] * d[j, 1] - w[:, 1] * d[j, 0]) / denom
    u = (w[:, 0] * d[i, 1] - w[:, 1] * d[i, 0]) / denom
    hit = (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)
    return p[i[hit]] + t[hit, None] * d[i[hit]]


def world_box(ord: Ordering, factor: float = BOX_FACTOR) -> tuple[Box, float, tuple[ConvexRegion, ...]]:
    """A grid-aligned box holding every bounded feature, its snap grid, and the first-pass horizon cells

    Features: site locations, Apollonius circles, prefix-cell vertices and the crossings of
    unbounded prefix-cell edges; weighted diagram vertices lie on circles or at prefix-cell
    vertices, so they are covered as well.
    """
    base_points = np.vstack([ord.locations, _apollonius_extent(ord)])
    base = Box.around(map(tuple, base_points), 1.0, floor=ord.scale / 2.0)
    reach = max(HORIZON * ord.scale, 4.0 * factor * max(base.width, base.height))
    c = base.center
    horizon = Box(c.x - reach, c.y - reach, c.x + reach, c.y + reach)

    start = ConvexRegion.from_box(horizon)
    horizon_cells = tuple(_prefix_region(i, ord, start) for i in range(1, len(ord) + 1))

    features = [base_points]
    unbounded = []
    for cell in horizon_cells:
        m = len(cell.vertices)
        for k in range(m):
            if cell.frame_edges[k]:
                continue
            p, q = cell.vertices[k], cell.vertices[(k + 1) % m]
            p_free = not cell.frame_edges[k - 1]
            q_free = not cell.frame_edges[(k + 1) % m]
            if p_free:
                features.append(np.array([[p.x, p.y]]))
            if not (p_free and q_free):
                unbounded.append([[p.x, p.y], [q.x, q.y]])
    features.append(_crossings(np.array(unbounded, dtype=float).reshape(-1, 2, 2)))
    pts = np.vstack(features)

    box = Box.around(map(tuple, pts), factor, floor=ord.scale / 2.0)
    inner = box.intersection(horizon)
    if inner != box:
        logger.warning("world box clamped to the first-pass horizon (n=%d)", len(ord))
    grid = inner.snap_grid(SNAP_TOL)
    inner = inner.on_grid(grid)
    logger.debug("world box %s from %d feature points", inner, len(pts))
    return inner, grid, horizon_cells


def build_prefix_cells(ord: Ordering, factor: float = BOX_FACTOR) -> PrefixCellSet:
    """Prefix cells clipped to the instance's world box"""
    box, grid, horizon_cells = world_box(ord, factor)
    cells = tuple(clip_to_box(c, box) for c in horizon_cells)
    result = PrefixCellSet(ord, cells, box, grid)
    logger.debug("prefix cells: n=%d, %d vertices in total", len(ord), result.vertex_total)
    return result
