"""Experiment driver: per-trial pipelines, jitter retries, and growth-law fitting"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Sequence

import numpy as np

from .config import JITTER_RETRIES
from .diagram import brute_force_diagram, fast_diagram
from .envelope import random_lines, ric_envelope_overlay
from .errors import (
    AmbiguousCandidateSetError,
    DegeneracyError,
    ExperimentConfigError,
    TripleIntersectionError,
)
from .models import (
    Rng,
    WeightModel,
    jitter_ordering,
    parse_model,
    prefix_minima_count,
    sample_ordering,
    two_row_instance,
    uniform_locations,
)
from .overlay import build_overlay
from .prefix_cells import Ordering, build_prefix_cells
from .schemas import ExperimentConfig, GrowthFit, GrowthLawFit, TrialRecord, check_feasible

logger = logging.getLogger(__name__)

RETRYABLE = (DegeneracyError, AmbiguousCandidateSetError, TripleIntersectionError)

GROWTH_LAWS = {
    "n": lambda n: n,
    "n log n": lambda n: n * np.log(n),
    "n log^2 n": lambda n: n * np.log(n) ** 2,
    "n^2": lambda n: n * n,
}


class NearDegenerateDiagram(DegeneracyError):
    def __init__(self, count: int):
        super().__init__(f"{count} diagram vertices within 10x tolerance of a fourth site")


def build_instance(n: int, model: WeightModel, gen: np.random.Generator, lowerbound: bool = False) -> Ordering:
    """Ordering of a fresh instance: unit-square locations, or the two-row lower-bound layout"""
    locations = two_row_instance(n) if lowerbound else uniform_locations(n, gen)
    return sample_ordering(locations, model, gen)


def _minima(n: int, model: WeightModel, gen: np.random.Generator) -> int:
    #Prefix minima of the ranks in site order, with tiebreaks deciding equal weights
    weights = model.draw(n, gen)
    tiebreaks = gen.random(n)
    ranks = np.empty(n, dtype=int)
    ranks[np.lexsort((tiebreaks, weights))] = np.arange(n)
    return prefix_minima_count(ranks)


def _measure(cfg: ExperimentConfig, ord: Ordering) -> dict:
    """Counts one trial's instance contributes for cfg.kind"""
    if cfg.kind == "diagram":
        D = brute_force_diagram(ord) if cfg.oracle else fast_diagram(ord, cfg.box_factor)
        if D.near_degenerate:
            raise NearDegenerateDiagram(D.near_degenerate)
        A = D.arrangement if D.arrangement is not None else build_overlay(build_prefix_cells(ord, cfg.box_factor))
        c = A.complexity
        return dict(overlay_v=c.V, overlay_e=c.E, overlay_f=c.F, max_candidate=A.max_candidate_size,
                    diagram_v=D.counts.V)
    A = build_overlay(build_prefix_cells(ord, cfg.box_factor))
    if cfg.kind == "candidate":
        return dict(max_candidate=A.max_candidate_size)
    c = A.complexity
    return dict(overlay_v=c.V, overlay_e=c.E, overlay_f=c.F, max_candidate=A.max_candidate_size)


def run_trial(cfg: ExperimentConfig, n: int, trial: int) -> TrialRecord:
    rng = Rng(cfg.seed).for_trial(n, trial)
    gen = rng.generator()
    model = parse_model(cfg.model)
    start = time.perf_counter()

    if cfg.kind == "minima":
        counts = dict(minima_z=_minima(n, model, gen))
    elif cfg.kind == "envelope":
        lines = random_lines(n, gen)
        counts = dict(overlay_v=ric_envelope_overlay(lines, gen.permutation(n)).total)
    else:
        ord = build_instance(n, model, gen, lowerbound=cfg.kind == "lowerbound")
        if cfg.jitter:
            ord = jitter_ordering(ord, cfg.jitter * ord.scale, rng.child(0))
        attempt = 0
        while True:
            try:
                counts = _measure(cfg, ord)
                break
            except RETRYABLE as e:
                attempt += 1
                if attempt > JITTER_RETRIES:
                    raise
                magnitude = 1e-9 * ord.scale * 10 ** (attempt - 1)
                logger.warning("n=%d trial=%d: %s; retry %d/%d with jitter %g",
                               n, trial, e, attempt, JITTER_RETRIES, magnitude)
                ord = jitter_ordering(ord, magnitude, rng.child(attempt))

    wall_ms = round((time.perf_counter() - start) * 1000.0, 3) if cfg.timing else 0.0
    return TrialRecord(trial=trial, n=n, model=cfg.model, seed=rng.seed, wall_ms=wall_ms, **counts)


def _run_task(cfg: ExperimentConfig, task: tuple[int, int]) -> TrialRecord:
    return run_trial(cfg, *task)


def run_experiment(cfg: ExperimentConfig) -> list[TrialRecord]:
    """All trials for every n, ordered by (n, trial) however they were scheduled"""
    check_feasible(cfg)
    tasks = [(n, trial) for n in cfg.n_values for trial in range(1, cfg.trials + 1)]
    logger.info("experiment %s: n=%s trials=%d model=%s seed=%d workers=%d",
                cfg.kind, cfg.n_values, cfg.trials, cfg.model, cfg.seed, cfg.workers)

    run = partial(_run_task, cfg)
    records: list[TrialRecord] = []
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = pool.map(run, tasks, chunksize=max(1, len(tasks) // (4 * cfg.workers)))
            for record in results:
                records.append(record)
                _progress(cfg, records)
    else:
        for task in tasks:
            records.append(run(task))
            _progress(cfg, records)
    return records


def _progress(cfg: ExperimentConfig, records: list[TrialRecord]):
    last = records[-1]
    if last.trial == cfg.trials:
        logger.info("n=%d done (%d trials)", last.n, cfg.trials)


def fit_growth(records: Sequence[TrialRecord], field: str) -> GrowthFit:
    """Least-squares fit of log mean count against each candidate growth law"""
    by_n: dict[int, list[float]] = {}
    for r in records:
        v = r.value(field)
        if v is not None:
            by_n.setdefault(r.n, []).append(float(v))
    n_values = sorted(by_n)
    if len(n_values) < 3:
        raise ExperimentConfigError(f"growth fit needs at least 3 distinct n values with '{field}', got {n_values}")
    if n_values[0] < 2:
        raise ExperimentConfigError("growth fit needs n >= 2")

    n_arr = np.array(n_values, dtype=float)
    means = np.array([np.mean(by_n[n]) for n in n_values])
    if (means <= 0).any():
        return GrowthFit(field=field, n_values=n_values, means=means.tolist(), laws=[], degenerate=True,
                         doubling_ratios=[])
    ratios = [float(b / a) for a, b in zip(means, means[1:])]

    laws = []
    for name, law in GROWTH_LAWS.items():
        r = np.log(means) - np.log(law(n_arr))
        laws.append(GrowthLawFit(law=name, coefficient=float(np.exp(r.mean())),
                                 residual=float(np.sum((r - r.mean()) ** 2))))
    constant = bool(np.ptp(means) <= 1e-12 * np.max(means))
    best = None if constant else min(laws, key=lambda f: f.residual).law
    return GrowthFit(field=field, n_values=n_values, means=means.tolist(), laws=laws, best_law=best,
                     degenerate=constant, doubling_ratios=ratios)
