import math

import numpy as np
import pytest
import shapely
from shapely.geometry import Polygon

from mwvd.geometry import Box, Point, Site
from mwvd.models import ordering_from_weights
from mwvd.prefix_cells import Ordering, all_prefix_cells, build_prefix_cells, prefix_cell, world_box
from oracles import prefix_nearest, random_ordering

BOX = Box(-10, -10, 10, 10)


def ordering(*points):
    """Sites inserted in the given order (weights 1, 2, 3, ...)"""
    return ordering_from_weights([Point(*p) for p in points], list(range(1, len(points) + 1)))


def polygon(region):
    return Polygon([v.as_tuple() for v in region.vertices])


def test_ordering_sorts_by_weight_then_tiebreak():
    ord = Ordering.from_sites([Site(Point(0, 0), 2.0, tiebreak=0.1), Site(Point(1, 0), 1.0),
                               Site(Point(2, 0), 2.0, tiebreak=0.05)])
    assert [s.location.x for s in ord.sites] == [1, 2, 0]
    assert [s.rank for s in ord.sites] == [1, 2, 3]
    assert ord.site(2).location == Point(2, 0)


def test_ordering_rejects_unsorted_sites():
    with pytest.raises(ValueError):
        Ordering((Site(Point(0, 0), 2.0, 1), Site(Point(1, 0), 1.0, 2)))


def test_scale_is_site_bbox_diameter():
    assert ordering((0, 0), (3, 4)).scale == pytest.approx(5)
    assert ordering((5, 5)).scale == 1.0


def test_first_cell_is_the_whole_box():
    cell = prefix_cell(1, random_ordering(6, seed=1), BOX)
    assert cell.area == pytest.approx(BOX.area)
    assert all(cell.frame_edges)


def test_second_cell_is_the_far_halfplane():
    cell = prefix_cell(2, ordering((0, 0), (2, 0)), BOX)
    assert cell.area == pytest.approx(9 * 20)
    assert min(v.x for v in cell.vertices) == pytest.approx(1)
    assert sum(not f for f in cell.frame_edges) == 1


def test_three_site_cell_is_wedge_above_both_bisectors():
    cell = prefix_cell(3, ordering((0, 0), (4, 0), (0, 4)), BOX)
    #{y >= 2} and {y >= x} inside the box
    assert cell.area == pytest.approx(128)
    assert cell.contains(Point(-5, 5))
    assert not cell.contains(Point(5, 4))
    assert not cell.contains(Point(0, 1))


def test_prefix_index_out_of_range():
    ord = random_ordering(3, seed=2)
    with pytest.raises(IndexError):
        prefix_cell(0, ord, BOX)
    with pytest.raises(IndexError):
        prefix_cell(4, ord, BOX)


@pytest.mark.parametrize("n, seed", [(4, 11), (4, 12), (9, 13)])
def test_cells_match_nearest_neighbor_sampling(n, seed):
    ord = random_ordering(n, seed)
    cells = build_prefix_cells(ord)
    box = cells.box
    gen = np.random.default_rng(seed)
    #Sample near the sites as well as across the whole box
    pts = np.vstack([
        np.column_stack([gen.uniform(box.xmin, box.xmax, 5000), gen.uniform(box.ymin, box.ymax, 5000)]),
        gen.uniform(-0.5, 1.5, (5000, 2)),
    ])
    pts = pts[(pts[:, 0] > box.xmin) & (pts[:, 0] < box.xmax) & (pts[:, 1] > box.ymin) & (pts[:, 1] < box.ymax)]
    for i in range(1, n + 1):
        inside, decided = prefix_nearest(pts, ord, i, band=1e-6 * ord.scale)
        hits = shapely.contains_xy(polygon(cells.cells[i - 1]), pts[decided, 0], pts[decided, 1]) \
            if not cells.cells[i - 1].is_empty else np.zeros(decided.sum(), dtype=bool)
        assert (hits == inside[decided]).all()


def test_cells_are_convex_and_inside_the_box():
    cells = build_prefix_cells(random_ordering(30, seed=5))
    box = cells.box
    for cell in cells.cells:
        assert cell.is_convex()
        assert all(box.contains(v) for v in cell.vertices)
        for p, q, on_frame in cell.edges():
            if on_frame:
                assert box.on_frame(p.x, p.y) and box.on_frame(q.x, q.y)


def test_world_box_holds_every_feature_and_sits_on_its_grid():
    ord = random_ordering(12, seed=8)
    box, grid, horizon_cells = world_box(ord)
    assert grid == 2.0 ** round(math.log2(grid))
    for coord in (box.xmin, box.ymin, box.xmax, box.ymax):
        assert coord / grid == int(coord / grid)
    assert all(box.contains(s.location) for s in ord.sites)
    for cell in horizon_cells:
        for k, v in enumerate(cell.vertices):
            #Vertices where two bisector edges meet are bounded features
            if not cell.frame_edges[k] and not cell.frame_edges[k - 1]:
                assert box.contains(v)


def test_explicit_box_cells_keep_that_box():
    ord = random_ordering(5, seed=3)
    cells = all_prefix_cells(ord, BOX)
    assert cells.box == BOX
    assert len(cells.cells) == 5
    assert cells.vertex_total == sum(len(c.vertices) for c in cells.cells)
    assert cells.grid <= 1e-9 * BOX.diameter
