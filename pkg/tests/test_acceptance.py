"""Desk-scale statistical checks; run with --runslow"""
import math

import numpy as np
import pytest

from mwvd.diagram import brute_force_diagram, fast_diagram, nearest_weighted_ranks, same_vertices
from mwvd.envelope import random_lines, ric_envelope_overlay
from mwvd.harness import run_experiment
from mwvd.models import harmonic_number, two_row_lower_bound
from mwvd.overlay import build_overlay, candidate_masks, face_candidate_sets
from mwvd.prefix_cells import build_prefix_cells
from mwvd.report import emit_report
from mwvd.schemas import build_config
from oracles import random_ordering

pytestmark = pytest.mark.slow


def mean_by_n(records, field):
    means = {}
    for n in sorted({r.n for r in records}):
        means[n] = float(np.mean([getattr(r, field) for r in records if r.n == n]))
    return means


def test_prefix_minima_mean_is_harmonic():
    cfg = build_config(kind="minima", n_values=[1000], trials=1000, seed=1, timing=False)
    z = [r.minima_z for r in run_experiment(cfg)]
    assert abs(np.mean(z) - harmonic_number(1000)) <= 0.25


def test_candidate_sets_stay_logarithmic():
    cfg = build_config(kind="candidate", n_values=[500], trials=50, model="iid:uniform:1:2", seed=2, timing=False)
    sizes = np.array([r.max_candidate for r in run_experiment(cfg)])
    assert sizes.max() <= 8 * math.log(500)
    assert np.percentile(sizes, 99) <= 4 * math.log(500)


def test_weighted_winner_is_always_a_candidate():
    for seed in range(20):
        ord = random_ordering(100, seed=100 + seed)
        pts = np.random.default_rng(seed).uniform(0, 1, (100_000, 2))
        ranks, _ = nearest_weighted_ranks(pts, ord)
        masks = candidate_masks(pts, ord)
        assert masks[np.arange(len(pts)), ranks - 1].all()


def test_candidate_sets_are_constant_on_faces():
    for seed in range(20):
        A = build_overlay(build_prefix_cells(random_ordering(200, seed=200 + seed)))
        sets = face_candidate_sets(A, A.ordering, verify_samples=10, gen=np.random.default_rng(seed))
        assert sets == {f.id: f.candidates for f in A.faces}


def test_fast_diagram_matches_brute_force():
    gen = np.random.default_rng(5)
    for seed in range(100):
        ord = random_ordering(int(gen.integers(3, 26)), seed=300 + seed)
        fast, brute = fast_diagram(ord), brute_force_diagram(ord)
        assert fast.counts.V == brute.counts.V
        assert same_vertices(fast, brute, 1e-6 * ord.scale)


def test_lower_bound_instance_grows_faster_than_linear():
    cfg = build_config(kind="lowerbound", n_values=[64, 128, 256], trials=20, seed=6, timing=False)
    means = mean_by_n(run_experiment(cfg), "overlay_total")
    assert means[128] / means[64] >= 2.05
    assert means[256] / means[128] >= 2.05
    for n, mean in means.items():
        assert mean >= max(two_row_lower_bound(n), 0.0)


def test_random_weight_diagram_is_subquadratic():
    cfg = build_config(kind="diagram", n_values=[64, 128, 256], trials=20, model="iid:uniform:1:2",
                       seed=7, timing=False)
    means = mean_by_n(run_experiment(cfg), "diagram_v")
    assert means[128] / means[64] <= 3.0
    assert means[256] / means[128] <= 3.0


def test_envelope_step_law():
    lines = random_lines(50, np.random.default_rng(8))
    gen = np.random.default_rng(9)
    traces = [ric_envelope_overlay(lines, gen.permutation(50)) for _ in range(10_000)]
    for i in (5, 20, 50):
        created = np.array([t.new_vertices[i - 1] for t in traces], dtype=float)
        expected = np.array([2.0 * t.envelope_sizes[i - 1] / i for t in traces])
        diff = created - expected
        assert abs(diff.mean()) <= 3 * diff.std(ddof=1) / math.sqrt(len(diff))


def test_box_doubling_leaves_counts_unchanged():
    for seed in range(10):
        ord = random_ordering(40, seed=400 + seed)
        small = build_overlay(build_prefix_cells(ord, 2.0)).complexity
        large = build_overlay(build_prefix_cells(ord, 4.0)).complexity
        assert small == large
        assert fast_diagram(ord, 2.0).counts.V == fast_diagram(ord, 4.0).counts.V


def test_master_seed_reproduces_csv_bytes(tmp_path):
    fields = dict(kind="overlay", n_values=[16, 32, 64], trials=3, model="iid:uniform:1:2", seed=10,
                  timing=False, plot=False)
    for stem in ("a", "b"):
        cfg = build_config(out=str(tmp_path / stem), **fields)
        emit_report(run_experiment(cfg), None, cfg)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
