import itertools
import math

import numpy as np
import pytest

from mwvd.errors import DegenerateSitePairError
from mwvd.geometry import (
    IDENTICAL_CURVES,
    Box,
    Circle,
    ConvexRegion,
    HalfPlane,
    Line,
    Point,
    Site,
    apollonius_bisector,
    clip_region,
    curve_intersection,
    halfplane_intersection,
    triple_equidistant_points,
    weighted_distance,
)


def site(x, y, w=1.0):
    return Site(Point(x, y), w)


def close(p: Point, q: Point, tol=1e-9) -> bool:
    return p.distance(q) <= tol


def test_weighted_distance():
    assert weighted_distance(site(0, 0, 3), Point(4, 0)) == 12
    assert weighted_distance(site(1, 1, 2), Point(4, 5)) == pytest.approx(10)
    assert weighted_distance(site(7, -2), Point(7, -2)) == 0


def test_site_rejects_bad_weight_and_tiebreak():
    with pytest.raises(ValueError):
        site(0, 0, 0.0)
    with pytest.raises(ValueError):
        Site(Point(0, 0), 1.0, tiebreak=1.0)


def test_point_rejects_non_finite():
    with pytest.raises(ValueError):
        Point(math.inf, 0.0)


def test_equal_weights_give_perpendicular_bisector():
    b = apollonius_bisector(site(0, 0), site(2, 0))
    assert isinstance(b, Line)
    assert close(b.point, Point(1, 0))
    assert abs(b.direction[0]) < 1e-12 and abs(abs(b.direction[1]) - 1) < 1e-12


@pytest.mark.parametrize("s, r, center, radius", [
    (site(0, 0, 2), site(3, 0, 1), Point(-1, 0), 2.0),
    (site(0, 0, 1), site(3, 0, 2), Point(4, 0), 2.0),
])
def test_apollonius_circle_examples(s, r, center, radius):
    c = apollonius_bisector(s, r)
    assert isinstance(c, Circle)
    assert close(c.center, center)
    assert c.radius == pytest.approx(radius)
    for t in np.linspace(0, 2 * math.pi, 20, endpoint=False):
        x = Point(c.center.x + c.radius * math.cos(t), c.center.y + c.radius * math.sin(t))
        assert weighted_distance(s, x) == pytest.approx(weighted_distance(r, x), abs=1e-9)


def test_coincident_sites_raise():
    with pytest.raises(DegenerateSitePairError, match="degenerate site pair"):
        apollonius_bisector(site(1, 1, 1), site(1, 1, 2))


def test_random_circles_enclose_heavier_site_and_are_symmetric():
    gen = np.random.default_rng(7)
    for _ in range(50):
        (x1, y1, x2, y2), (w1, w2) = gen.random(4), 1 + gen.random(2)
        s, r = site(x1, y1, w1), site(x2, y2, w2)
        c = apollonius_bisector(s, r)
        heavy, light = (s, r) if w1 > w2 else (r, s)
        assert c.center.distance(heavy.location) < c.radius
        assert c.center.distance(light.location) > c.radius
        for t in np.linspace(0, 2 * math.pi, 100, endpoint=False):
            x = Point(c.center.x + c.radius * math.cos(t), c.center.y + c.radius * math.sin(t))
            assert abs(weighted_distance(s, x) - weighted_distance(r, x)) <= 1e-7 * max(1.0, c.radius)
        back = apollonius_bisector(r, s)
        assert close(back.center, c.center, 1e-8 * max(1.0, c.radius))
        assert back.radius == pytest.approx(c.radius)


def test_curve_intersection_examples():
    vertical = Line(Point(1, 0), (0.0, 1.0))
    horizontal = Line(Point(0, 2), (1.0, 0.0))
    (p,) = curve_intersection(vertical, horizontal)
    assert close(p, Point(1, 2))
    assert curve_intersection(Circle(Point(0, 0), 1), Circle(Point(3, 0), 1)) == ()
    (t,) = curve_intersection(Circle(Point(0, 0), 1), Circle(Point(2, 0), 1))
    assert close(t, Point(1, 0))


def test_identical_curves_are_marked():
    assert curve_intersection(Circle(Point(1, 1), 2), Circle(Point(1, 1), 2)) is IDENTICAL_CURVES
    assert curve_intersection(Line(Point(0, 0), (1.0, 0.0)), Line(Point(5, 0), (-1.0, 0.0))) is IDENTICAL_CURVES
    assert curve_intersection(Line(Point(0, 0), (1.0, 0.0)), Line(Point(0, 1), (1.0, 0.0))) == ()


def test_line_circle_points_lie_on_both():
    circle = Circle(Point(0, 0), 5)
    line = Line(Point(0, 3), (1.0, 0.0))
    hits = curve_intersection(line, circle)
    assert len(hits) == 2
    for p in hits:
        assert p.y == pytest.approx(3)
        assert math.hypot(p.x, p.y) == pytest.approx(5)


def test_triple_points_examples():
    (c,) = triple_equidistant_points(site(0, 0), site(4, 0), site(0, 4))
    assert close(c, Point(2, 2))
    assert triple_equidistant_points(site(0, 0), site(1, 0), site(2, 0)) == ()


def test_weighted_triple_points_are_equidistant_and_order_free():
    sites = [site(0, 0, 2), site(3, 0, 1), site(0, 3, 1)]
    points = triple_equidistant_points(*sites)
    assert 1 <= len(points) <= 2
    for x in points:
        d = [weighted_distance(s, x) for s in sites]
        assert max(d) - min(d) <= 1e-9 * max(d)
    for perm in itertools.permutations(sites):
        other = triple_equidistant_points(*perm)
        assert len(other) == len(points)
        assert all(any(close(p, q, 1e-9) for q in other) for p in points)


def test_halfplane_intersection_examples():
    box = Box(-10, -10, 10, 10)
    whole = halfplane_intersection([], box)
    assert whole.area == pytest.approx(400)
    assert all(whole.frame_edges)

    unit = halfplane_intersection([HalfPlane(-1, 0, 0), HalfPlane(1, 0, 1), HalfPlane(0, -1, 0), HalfPlane(0, 1, 1)], box)
    assert unit.area == pytest.approx(1)
    assert not unit.touches_frame

    assert halfplane_intersection([HalfPlane(-1, 0, -1), HalfPlane(1, 0, 0)], box).is_empty


def test_adding_halfplanes_never_grows_region():
    gen = np.random.default_rng(3)
    box = Box(-1, -1, 2, 2)
    hs = []
    area = halfplane_intersection(hs, box).area
    for _ in range(30):
        p, q = Point(*gen.random(2)), Point(*gen.random(2))
        hs.append(HalfPlane.closer_to(p, q))
        region = halfplane_intersection(hs, box)
        assert region.area <= area + 1e-12
        assert region.is_convex()
        area = region.area


def test_clipped_frame_points_stay_on_frame():
    box = Box(0, 0, 10, 10)
    region = clip_region(ConvexRegion.from_box(box), HalfPlane.closer_to(Point(2, 3), Point(7, 4)))
    for v, on_frame in zip(region.vertices, region.frame_edges):
        if on_frame:
            assert box.on_frame(v.x, v.y)


def test_box_around_inflates_about_center():
    box = Box.around([(0, 0), (2, 4)], factor=2.0)
    assert (box.xmin, box.ymin, box.xmax, box.ymax) == (-1, -2, 3, 6)
