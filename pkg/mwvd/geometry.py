"""Planar primitives: weighted distance, Apollonius bisectors, curve intersection, half-plane clipping"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .config import REL_TOL
from .errors import DegenerateSitePairError


@dataclass(frozen=True, slots=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinate ({self.x}, {self.y})")

    def distance(self, other: "Point") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True, slots=True)
class Site:
    """A weighted point site; rank is its 1-based position in the weight ordering"""
    location: Point
    weight: float
    rank: int = 0
    tiebreak: float = 0.0

    def __post_init__(self):
        if not self.weight > 0:
            raise ValueError(f"site weight must be positive, got {self.weight}")
        if not 0.0 <= self.tiebreak < 1.0:
            raise ValueError(f"tiebreak must lie in [0, 1), got {self.tiebreak}")


@dataclass(frozen=True, slots=True)
class Line:
    point: Point
    direction: tuple[float, float]


@dataclass(frozen=True, slots=True)
class Circle:
    center: Point
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"circle radius must be positive, got {self.radius}")


BisectorCurve = Line | Circle


class Coincidence(Enum):
    IDENTICAL = "identical curves"


IDENTICAL_CURVES = Coincidence.IDENTICAL


@dataclass(frozen=True, slots=True)
class HalfPlane:
    """The closed half-plane a*x + b*y <= c"""
    a: float
    b: float
    c: float

    def __post_init__(self):
        if self.a == 0 and self.b == 0:
            raise ValueError("half-plane normal must be nonzero")

    @classmethod
    def closer_to(cls, p: Point, q: Point) -> "HalfPlane":
        """Points at least as close to p as to q"""
        a = q.x - p.x
        b = q.y - p.y
        #Written against the midpoint so far-apart sites keep a well-conditioned offset
        c = a * (p.x + q.x) / 2.0 + b * (p.y + q.y) / 2.0
        return cls(a, b, c)

    def value(self, p: Point) -> float:
        return self.a * p.x + self.b * p.y - self.c

    def slack(self, p: Point) -> float:
        """Rounding allowance for evaluating value() at p"""
        return 1e-12 * (abs(self.a * p.x) + abs(self.b * p.y) + abs(self.c)) + 1e-300

    def contains(self, p: Point) -> bool:
        return self.value(p) <= self.slack(p)

    def meet(self, other: "HalfPlane") -> Point:
        """Intersection of the two boundary lines (assumed non-parallel)"""
        #Axis-aligned boundaries give exact coordinates so frame points stay on the frame
        if self.b == 0:
            x = self.c / self.a
            return Point(x, (other.c - other.a * x) / other.b)
        if self.a == 0:
            y = self.c / self.b
            return Point((other.c - other.b * y) / other.a, y)
        if other.b == 0 or other.a == 0:
            return other.meet(self)
        det = self.a * other.b - other.a * self.b
        return Point(
            (self.c * other.b - other.c * self.b) / det,
            (self.a * other.c - other.a * self.c) / det,
        )


@dataclass(frozen=True, slots=True)
class Box:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError(f"empty box {self}")

    @classmethod
    def around(cls, points: Iterable[tuple[float, float]], factor: float = 1.0, floor: float = 0.0) -> "Box":
        """Bounding box of the points, inflated by factor around its center"""
        pts = list(points)
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        cx = (min(xs) + max(xs)) / 2.0
        cy = (min(ys) + max(ys)) / 2.0
        hx = (max(xs) - min(xs)) / 2.0
        hy = (max(ys) - min(ys)) / 2.0
        #Degenerate extents fall back to a fraction of the other side, then to the floor
        floor = max(floor, 1e-3 * max(hx, hy), 1e-300)
        hx = max(hx, floor) * factor
        hy = max(hy, floor) * factor
        return cls(cx - hx, cy - hy, cx + hx, cy + hy)

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> Point:
        return Point((self.xmin + self.xmax) / 2.0, (self.ymin + self.ymax) / 2.0)

    def snap_grid(self, rel: float) -> float:
        """Largest power of two not above rel * diameter"""
        return 2.0 ** math.floor(math.log2(rel * self.diameter))

    def on_grid(self, grid: float) -> "Box":
        """Smallest enclosing box with corners on multiples of grid"""
        return Box(math.floor(self.xmin / grid) * grid, math.floor(self.ymin / grid) * grid,
                   math.ceil(self.xmax / grid) * grid, math.ceil(self.ymax / grid) * grid)

    def intersection(self, other: "Box") -> "Box":
        return Box(max(self.xmin, other.xmin), max(self.ymin, other.ymin),
                   min(self.xmax, other.xmax), min(self.ymax, other.ymax))

    def contains(self, p: Point) -> bool:
        return self.xmin <= p.x <= self.xmax and self.ymin <= p.y <= self.ymax

    def on_frame(self, x: float, y: float) -> bool:
        return x in (self.xmin, self.xmax) or y in (self.ymin, self.ymax)

    def corners(self) -> tuple[Point, Point, Point, Point]:
        """Counterclockwise from the lower-left corner"""
        return (Point(self.xmin, self.ymin), Point(self.xmax, self.ymin),
                Point(self.xmax, self.ymax), Point(self.xmin, self.ymax))

    def halfplanes(self) -> tuple[HalfPlane, HalfPlane, HalfPlane, HalfPlane]:
        """Frame half-planes; halfplanes()[i] supports the edge leaving corners()[i]"""
        return (HalfPlane(0.0, -1.0, -self.ymin), HalfPlane(1.0, 0.0, self.xmax),
                HalfPlane(0.0, 1.0, self.ymax), HalfPlane(-1.0, 0.0, -self.xmin))


@dataclass(frozen=True)
class ConvexRegion:
    """Counterclockwise convex polygon; edge i runs from vertices[i] to vertices[i+1]"""
    vertices: tuple[Point, ...]
    frame_edges: tuple[bool, ...] = ()
    supports: tuple[HalfPlane, ...] = field(default=(), repr=False)

    @classmethod
    def empty(cls) -> "ConvexRegion":
        return cls(())

    @classmethod
    def from_box(cls, box: Box) -> "ConvexRegion":
        return cls(box.corners(), (True, True, True, True), box.halfplanes())

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) < 3

    @property
    def touches_frame(self) -> bool:
        return any(self.frame_edges)

    def edges(self) -> list[tuple[Point, Point, bool]]:
        m = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % m], self.frame_edges[i]) for i in range(m)]

    def interior_edges(self) -> list[tuple[Point, Point]]:
        return [(p, q) for p, q, on_frame in self.edges() if not on_frame]

    @property
    def area(self) -> float:
        return polygon_area(self.vertices)

    @property
    def diameter(self) -> float:
        if self.is_empty:
            return 0.0
        xs = [v.x for v in self.vertices]
        ys = [v.y for v in self.vertices]
        return math.hypot(max(xs) - min(xs), max(ys) - min(ys))

    def contains(self, p: Point, tol: float = 0.0) -> bool:
        """Closed containment, widened by tol (an absolute distance)"""
        if self.is_empty:
            return False
        m = len(self.vertices)
        for i in range(m):
            u = self.vertices[i]
            v = self.vertices[(i + 1) % m]
            ex, ey = v.x - u.x, v.y - u.y
            length = math.hypot(ex, ey)
            if length == 0:
                continue
            #Signed distance of p to the left of edge u->v
            if (ex * (p.y - u.y) - ey * (p.x - u.x)) / length < -tol:
                return False
        return True

    def is_convex(self) -> bool:
        m = len(self.vertices)
        if m < 3:
            return True
        scale = max(self.diameter, 1e-300)
        for i in range(m):
            if orientation(self.vertices[i], self.vertices[(i + 1) % m], self.vertices[(i + 2) % m]) < -1e-9 * scale * scale:
                return False
        return True


def polygon_area(vertices: Sequence[Point]) -> float:
    """Signed shoelace area (positive for counterclockwise)"""
    m = len(vertices)
    if m < 3:
        return 0.0
    total = 0.0
    for i in range(m):
        p = vertices[i]
        q = vertices[(i + 1) % m]
        total += p.x * q.y - q.x * p.y
    return total / 2.0


def orientation(p: Point, q: Point, r: Point) -> float:
    """Twice the signed area of triangle pqr; positive for a left turn"""
    return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)


def weighted_distance(s: Site, x: Point) -> float:
    """Multiplicative weighted distance w * |x - p|"""
    return s.weight * math.hypot(x.x - s.location.x, x.y - s.location.y)


def apollonius_bisector(s: Site, r: Site) -> BisectorCurve:
    """The locus w_s|x - p_s| = w_r|x - p_r|: a line for equal weights, otherwise an Apollonius circle"""
    ps, pr = s.location, r.location
    dx, dy = pr.x - ps.x, pr.y - ps.y
    d = math.hypot(dx, dy)
    if d == 0:
        raise DegenerateSitePairError()
    if s.weight == r.weight:
        return Line(Point((ps.x + pr.x) / 2.0, (ps.y + pr.y) / 2.0), (-dy / d, dx / d))
    ws2, wr2 = s.weight * s.weight, r.weight * r.weight
    denom = ws2 - wr2
    center = Point((ws2 * ps.x - wr2 * pr.x) / denom, (ws2 * ps.y - wr2 * pr.y) / denom)
    return Circle(center, s.weight * r.weight * d / abs(denom))


def _curve_scale(*curves: BisectorCurve) -> float:
    scale = 0.0
    for c in curves:
        if isinstance(c, Circle):
            scale = max(scale, abs(c.center.x), abs(c.center.y), c.radius)
        else:
            scale = max(scale, abs(c.point.x), abs(c.point.y))
    return scale if scale > 0 else 1.0


def _line_line(l1: Line, l2: Line, tol: float) -> tuple[Point, ...] | Coincidence:
    (ux, uy), (vx, vy) = l1.direction, l2.direction
    cross = ux * vy - uy * vx
    wx, wy = l2.point.x - l1.point.x, l2.point.y - l1.point.y
    if abs(cross) <= 1e-12:
        #Parallel: identical iff l2's anchor sits on l1
        if abs(ux * wy - uy * wx) <= tol:
            return IDENTICAL_CURVES
        return ()
    t = (wx * vy - wy * vx) / cross
    return (Point(l1.point.x + t * ux, l1.point.y + t * uy),)


def _line_circle(line: Line, circle: Circle, tol: float) -> tuple[Point, ...]:
    ux, uy = line.direction
    cx, cy = circle.center.x - line.point.x, circle.center.y - line.point.y
    #Foot of the perpendicular from the center
    t0 = cx * ux + cy * uy
    fx, fy = line.point.x + t0 * ux, line.point.y + t0 * uy
    h = math.hypot(circle.center.x - fx, circle.center.y - fy)
    r = circle.radius
    if h > r + tol:
        return ()
    if abs(h - r) <= tol:
        return (Point(fx, fy),)
    half = math.sqrt(r * r - h * h)
    return (Point(fx - half * ux, fy - half * uy), Point(fx + half * ux, fy + half * uy))


def _circle_circle(c1: Circle, c2: Circle, tol: float) -> tuple[Point, ...] | Coincidence:
    dx, dy = c2.center.x - c1.center.x, c2.center.y - c1.center.y
    d = math.hypot(dx, dy)
    r1, r2 = c1.radius, c2.radius
    if d <= tol:
        return IDENTICAL_CURVES if abs(r1 - r2) <= tol else ()
    if d > r1 + r2 + tol or d < abs(r1 - r2) - tol:
        return ()
    ux, uy = dx / d, dy / d
    if abs(d - (r1 + r2)) <= tol:
        return (Point(c1.center.x + r1 * ux, c1.center.y + r1 * uy),)
    if abs(d - abs(r1 - r2)) <= tol:
        sign = 1.0 if r1 >= r2 else -1.0
        return (Point(c1.center.x + sign * r1 * ux, c1.center.y + sign * r1 * uy),)
    a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    h = math.sqrt(max(r1 * r1 - a * a, 0.0))
    mx, my = c1.center.x + a * ux, c1.center.y + a * uy
    return (Point(mx - h * uy, my + h * ux), Point(mx + h * uy, my - h * ux))


def curve_intersection(b1: BisectorCurve, b2: BisectorCurve, tol: float | None = None) -> tuple[Point, ...] | Coincidence:
    """Common points of two bisector curves (at most two), or IDENTICAL_CURVES"""
    if tol is None:
        tol = REL_TOL * _curve_scale(b1, b2)
    if isinstance(b1, Line) and isinstance(b2, Line):
        return _line_line(b1, b2, tol)
    if isinstance(b1, Line):
        return _line_circle(b1, b2, tol)
    if isinstance(b2, Line):
        return _line_circle(b2, b1, tol)
    return _circle_circle(b1, b2, tol)


def triple_equidistant_points(si: Site, sj: Site, sk: Site) -> tuple[Point, ...]:
    """Points at equal weighted distance from three sites, sorted by (x, y)"""
    hits = curve_intersection(apollonius_bisector(si, sj), apollonius_bisector(si, sk))
    if hits is IDENTICAL_CURVES:
        return ()
    found: list[Point] = []
    for x in hits:
        fj, fk = weighted_distance(sj, x), weighted_distance(sk, x)
        #Revalidate against the third site; tangency collapses can drift off the locus
        if abs(fj - fk) > 1e-6 * max(fj, fk):
            continue
        if any(x.distance(y) <= 1e-9 * max(abs(x.x), abs(x.y), 1.0) for y in found):
            continue
        found.append(x)
    return tuple(sorted(found, key=Point.as_tuple))


def _dedupe(vertices: list[Point], supports: list[HalfPlane], frames: list[bool]):
    """Drop zero-length edges, keeping the support of the edge that follows"""
    changed = True
    while changed and len(vertices) >= 3:
        changed = False
        m = len(vertices)
        for i in range(m):
            p, q = vertices[i], vertices[(i + 1) % m]
            scale = max(abs(p.x), abs(p.y), abs(q.x), abs(q.y), 1e-300)
            if p.distance(q) <= 1e-13 * scale:
                del vertices[i], supports[i], frames[i]
                changed = True
                break


def clip_region(region: ConvexRegion, hp: HalfPlane, on_frame: bool = False) -> ConvexRegion:
    """Intersect a convex region with one half-plane (a single Sutherland-Hodgman pass)"""
    if region.is_empty:
        return region
    verts = region.vertices
    m = len(verts)
    values = [hp.value(v) for v in verts]
    slacks = [hp.slack(v) for v in verts]
    inside = [values[i] <= slacks[i] for i in range(m)]
    if all(inside):
        return region
    if not any(inside):
        return ConvexRegion.empty()

    out_v: list[Point] = []
    out_s: list[HalfPlane] = []
    out_f: list[bool] = []
    for i in range(m):
        j = (i + 1) % m
        if inside[i]:
            out_v.append(verts[i])
            if inside[j]:
                out_s.append(region.supports[i])
                out_f.append(region.frame_edges[i])
            elif values[i] < -slacks[i]:
                #Leaving: keep the original edge up to the crossing, then follow the new boundary
                out_s.append(region.supports[i])
                out_f.append(region.frame_edges[i])
                out_v.append(region.supports[i].meet(hp))
                out_s.append(hp)
                out_f.append(on_frame)
            else:
                out_s.append(hp)
                out_f.append(on_frame)
        elif inside[j] and values[j] < -slacks[j]:
            out_v.append(region.supports[i].meet(hp))
            out_s.append(region.supports[i])
            out_f.append(region.frame_edges[i])

    _dedupe(out_v, out_s, out_f)
    if len(out_v) < 3 or polygon_area(out_v) <= 0:
        return ConvexRegion.empty()
    return ConvexRegion(tuple(out_v), tuple(out_f), tuple(out_s))


def clip_to_box(region: ConvexRegion, box: Box) -> ConvexRegion:
    """Clip to a box; the new edges are flagged as frame edges"""
    for hp in box.halfplanes():
        region = clip_region(region, hp, on_frame=True)
    return region


def halfplane_intersection(hs: Iterable[HalfPlane], box: Box) -> ConvexRegion:
    """Convex region of points of the box satisfying every half-plane"""
    region = ConvexRegion.from_box(box)
    for hp in hs:
        region = clip_region(region, hp)
        if region.is_empty:
            break
    return region
