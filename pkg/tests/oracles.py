"""Independent reference computations the tests compare against"""
import math

import numpy as np

from mwvd.geometry import Point
from mwvd.harness import build_instance
from mwvd.models import Rng, parse_model
from mwvd.prefix_cells import Ordering, PrefixCellSet


def random_ordering(n: int, seed: int, model: str = "iid:uniform:1:2") -> Ordering:
    return build_instance(n, parse_model(model), Rng(seed).generator())


def prefix_nearest(points: np.ndarray, ord: Ordering, i: int, band: float) -> tuple[np.ndarray, np.ndarray]:
    """(inside, decided): s_i is the unweighted nearest of s_1..s_i, and the margin exceeds band"""
    locs = ord.locations[:i]
    d = np.hypot(points[:, None, 0] - locs[None, :, 0], points[:, None, 1] - locs[None, :, 1])
    if i == 1:
        return np.ones(len(points), dtype=bool), np.ones(len(points), dtype=bool)
    others = d[:, : i - 1].min(axis=1)
    return d[:, i - 1] < others, np.abs(d[:, i - 1] - others) > band


def weighted_labels(points: np.ndarray, ord: Ordering) -> np.ndarray:
    f = ord.weights[None, :] * np.hypot(points[:, None, 0] - ord.locations[None, :, 0],
                                        points[:, None, 1] - ord.locations[None, :, 1])
    return np.argmin(f, axis=1) + 1


def labels_around(x: Point, radius: float, ord: Ordering, k: int = 720) -> set[int]:
    """Weighted-nearest ranks seen on a small circle around x"""
    angles = np.linspace(0.0, 2.0 * math.pi, k, endpoint=False)
    pts = np.column_stack([x.x + radius * np.cos(angles), x.y + radius * np.sin(angles)])
    return set(int(r) for r in weighted_labels(pts, ord))


def _segment_hit(s, t, tol):
    (px, py), (qx, qy) = s
    (rx, ry), (sx, sy) = t
    dx, dy = qx - px, qy - py
    ex, ey = sx - rx, sy - ry
    denom = dx * ey - dy * ex
    if abs(denom) <= 1e-14 * math.hypot(dx, dy) * math.hypot(ex, ey):
        return None
    wx, wy = rx - px, ry - py
    a = (wx * ey - wy * ex) / denom
    b = (wx * dy - wy * dx) / denom
    ea = tol / math.hypot(dx, dy)
    eb = tol / math.hypot(ex, ey)
    if -ea <= a <= 1 + ea and -eb <= b <= 1 + eb:
        return min(max(a, 0.0), 1.0), min(max(b, 0.0), 1.0)
    return None


def naive_overlay_counts(cells: PrefixCellSet) -> tuple[int, int, int]:
    """Interior (V, E, F) from all-pairs segment intersection and a half-edge face walk"""
    box = cells.box
    scale = cells.ordering.scale

    def tol_at(x, y):
        return 1e-9 * max(abs(x), abs(y), scale)

    segments = [(p.as_tuple(), q.as_tuple()) for cell in cells.cells for p, q in cell.interior_edges()]
    corners = [c.as_tuple() for c in box.corners()]
    segments += [(corners[k], corners[(k + 1) % 4]) for k in range(4)]

    params = [[0.0, 1.0] for _ in segments]
    for a in range(len(segments)):
        for b in range(a + 1, len(segments)):
            hit = _segment_hit(segments[a], segments[b], tol_at(*segments[a][0]))
            if hit is not None:
                params[a].append(hit[0])
                params[b].append(hit[1])

    vertices: list[tuple[float, float]] = []

    def vertex_id(x, y):
        tol = tol_at(x, y)
        for k, (vx, vy) in enumerate(vertices):
            if abs(vx - x) <= tol and abs(vy - y) <= tol:
                return k
        vertices.append((x, y))
        return len(vertices) - 1

    edges = set()
    for ((px, py), (qx, qy)), ts in zip(segments, params):
        ids = []
        for t in sorted(ts):
            v = vertex_id(px + t * (qx - px), py + t * (qy - py))
            if not ids or ids[-1] != v:
                ids.append(v)
        for u, v in zip(ids, ids[1:]):
            if u != v:
                edges.add((min(u, v), max(u, v)))

    neighbors: dict[int, list[int]] = {k: [] for k in range(len(vertices))}
    for u, v in edges:
        neighbors[u].append(v)
        neighbors[v].append(u)
    for u, ns in neighbors.items():
        ux, uy = vertices[u]
        ns.sort(key=lambda w: math.atan2(vertices[w][1] - uy, vertices[w][0] - ux))

    #Walk faces: from half-edge u->v continue with the neighbor of v just clockwise of u
    seen = set()
    cycles = 0
    for u, v in edges:
        for start in ((u, v), (v, u)):
            if start in seen:
                continue
            cycles += 1
            he = start
            while he not in seen:
                seen.add(he)
                a, b = he
                ns = neighbors[b]
                he = (b, ns[(ns.index(a) - 1) % len(ns)])

    parent = list(range(len(vertices)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edges:
        parent[find(u)] = find(v)
    components = len({find(k) for k in range(len(vertices))})

    def sides(k):
        x, y = vertices[k]
        return {s for s, gap in (("l", x - box.xmin), ("r", box.xmax - x), ("b", y - box.ymin), ("t", box.ymax - y))
                if abs(gap) <= tol_at(x, y)}

    V = sum(1 for k in range(len(vertices)) if not sides(k))
    E = sum(1 for u, v in edges if not (sides(u) & sides(v)))
    return V, E, cycles - components
