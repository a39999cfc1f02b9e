"""Desk-scale acceptance run for mwvd"""
import math
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from mwvd.diagram import brute_force_diagram, fast_diagram, nearest_weighted_ranks, same_vertices
from mwvd.envelope import random_lines, ric_envelope_overlay
from mwvd.harness import build_instance, run_experiment
from mwvd.models import Rng, harmonic_number, parse_model, two_row_lower_bound
from mwvd.overlay import build_overlay, candidate_masks, face_candidate_sets
from mwvd.prefix_cells import build_prefix_cells
from mwvd.report import emit_report
from mwvd.schemas import build_config

#Parallel trial processes for the experiment-backed checks
WORKERS = int(os.getenv("MWVD_ACCEPTANCE_WORKERS", "1"))
SEED = int(os.getenv("MWVD_ACCEPTANCE_SEED", "20240601"))


def instance(n, seed):
    return build_instance(n, parse_model("iid:uniform:1:2"), Rng(SEED, (n, seed)).generator())


def means_by_n(records, field):
    return {n: float(np.mean([getattr(r, field) for r in records if r.n == n])) for n in sorted({r.n for r in records})}


def check_prefix_minima():
    cfg = build_config(kind="minima", n_values=[1000], trials=1000, seed=SEED, timing=False, workers=WORKERS)
    mean = float(np.mean([r.minima_z for r in run_experiment(cfg)]))
    target = harmonic_number(1000)
    return abs(mean - target) <= 0.25, f"mean Z = {mean:.4f}, H_1000 = {target:.4f}"


def check_candidate_sets():
    cfg = build_config(kind="candidate", n_values=[500], trials=50, model="iid:uniform:1:2", seed=SEED,
                       timing=False, workers=WORKERS)
    sizes = np.array([r.max_candidate for r in run_experiment(cfg)])
    p99 = float(np.percentile(sizes, 99))
    ok = sizes.max() <= 8 * math.log(500) and p99 <= 4 * math.log(500)
    return ok, f"max {sizes.max()} (limit {8 * math.log(500):.1f}), p99 {p99:.1f} (limit {4 * math.log(500):.1f})"


def check_winner_in_candidates():
    violations = 0
    for k in range(20):
        ord = instance(100, k)
        pts = np.random.default_rng(k).uniform(0, 1, (100_000, 2))
        ranks, _ = nearest_weighted_ranks(pts, ord)
        violations += int((~candidate_masks(pts, ord)[np.arange(len(pts)), ranks - 1]).sum())
    return violations == 0, f"{violations} violations in 2,000,000 queries"


def check_face_uniformity():
    faces = 0
    for k in range(20):
        A = build_overlay(build_prefix_cells(instance(200, k)))
        #Raises DegeneracyError when a face's samples disagree
        face_candidate_sets(A, A.ordering, verify_samples=10, gen=np.random.default_rng(k))
        faces += len(A.faces)
    return True, f"{faces} faces over 20 instances, 10 samples each"


def check_fast_diagram():
    gen = np.random.default_rng(SEED)
    mismatches = 0
    for k in range(100):
        ord = instance(int(gen.integers(3, 26)), k)
        fast, brute = fast_diagram(ord), brute_force_diagram(ord)
        if fast.counts.V != brute.counts.V or not same_vertices(fast, brute, 1e-6 * ord.scale):
            mismatches += 1
    return mismatches == 0, f"{mismatches} of 100 instances differ from brute force"


def check_lower_bound():
    cfg = build_config(kind="lowerbound", n_values=[64, 128, 256], trials=20, seed=SEED, timing=False,
                       workers=WORKERS)
    means = means_by_n(run_experiment(cfg), "overlay_total")
    ratios = [means[128] / means[64], means[256] / means[128]]
    ok = all(r >= 2.05 for r in ratios) and all(m >= two_row_lower_bound(n) for n, m in means.items())
    return ok, "means " + ", ".join(f"{m:.1f}" for m in means.values()) + ", ratios " + ", ".join(f"{r:.3f}" for r in ratios)


def check_diagram_growth():
    cfg = build_config(kind="diagram", n_values=[64, 128, 256], trials=20, model="iid:uniform:1:2", seed=SEED,
                       timing=False, workers=WORKERS)
    means = means_by_n(run_experiment(cfg), "diagram_v")
    ratios = [means[128] / means[64], means[256] / means[128]]
    return all(r <= 3.0 for r in ratios), "ratios " + ", ".join(f"{r:.3f}" for r in ratios)


def check_envelope_law():
    lines = random_lines(50, np.random.default_rng(SEED))
    gen = np.random.default_rng(SEED + 1)
    traces = [ric_envelope_overlay(lines, gen.permutation(50)) for _ in range(10_000)]
    worst = 0.0
    for i in (5, 20, 50):
        diff = np.array([t.new_vertices[i - 1] - 2.0 * t.envelope_sizes[i - 1] / i for t in traces])
        se = diff.std(ddof=1) / math.sqrt(len(diff))
        worst = max(worst, abs(diff.mean()) / se if se > 0 else 0.0)
    return worst <= 3.0, f"largest deviation {worst:.2f} standard errors"


def check_robustness():
    changed = 0
    for k in range(10):
        ord = instance(40, k)
        if build_overlay(build_prefix_cells(ord, 2.0)).complexity != build_overlay(build_prefix_cells(ord, 4.0)).complexity:
            changed += 1
        elif fast_diagram(ord, 2.0).counts.V != fast_diagram(ord, 4.0).counts.V:
            changed += 1
    with tempfile.TemporaryDirectory() as tmp:
        csvs = []
        for stem in ("a", "b"):
            cfg = build_config(kind="overlay", n_values=[16, 32, 64], trials=3, model="iid:uniform:1:2",
                               seed=SEED, out=str(Path(tmp) / stem), timing=False, plot=False)
            csvs.append(emit_report(run_experiment(cfg), None, cfg)["csv"].read_bytes())
    same = csvs[0] == csvs[1]
    return changed == 0 and same, f"{changed} of 10 instances changed under box doubling, CSV identical: {same}"


CHECKS = [
    ("Prefix-minima expectation", check_prefix_minima),
    ("Candidate-set size bound", check_candidate_sets),
    ("Weighted winner lies in the candidate set", check_winner_in_candidates),
    ("Candidate sets constant on faces", check_face_uniformity),
    ("Fast diagram against brute force", check_fast_diagram),
    ("Two-row lower-bound growth", check_lower_bound),
    ("Random-weight diagram growth", check_diagram_growth),
    ("Envelope step law", check_envelope_law),
    ("Box doubling and seed reproducibility", check_robustness),
]


def check_acceptance():
    """Run every acceptance check and print a summary"""
    print("=" * 60)
    print("MWVD Acceptance Check")
    print("=" * 60)
    print()

    passed = 0
    for k, (title, check) in enumerate(CHECKS, start=1):
        print(f"{'' if k == 1 else chr(10)}[{k}/{len(CHECKS)}] {title}...")
        start = time.perf_counter()
        try:
            ok, detail = check()
        except Exception as e:
            ok, detail = False, f"{type(e).__name__}: {e}"
        elapsed = time.perf_counter() - start
        print(f"{'✓' if ok else '✗'} {detail} ({elapsed:.1f} s)")
        passed += ok

    #Summary
    print("\n" + "=" * 60)
    print("Acceptance Summary")
    print("=" * 60)
    print(f"Seed: {SEED}")
    print(f"Status: {'✓ PASSED' if passed == len(CHECKS) else '✗ FAILED'}")
    print(f"Checks: {passed}/{len(CHECKS)} passed")
    print()
    return passed == len(CHECKS)


if __name__ == "__main__":
    success = check_acceptance()
    sys.exit(0 if success else 1)
