"""experiment and lowerbound commands"""
import argparse
import logging

from ..config import BOX_FACTOR, MASTER_SEED, WORKERS
from ..harness import build_instance, fit_growth, run_experiment
from ..models import Rng, isolated_insertions, parse_model, two_row_lower_bound
from ..report import emit_report
from ..schemas import ExperimentConfig, build_config
from .common import n_list

logger = logging.getLogger(__name__)


def _add_run_arguments(parser: argparse.ArgumentParser, model_default: str):
    parser.add_argument("--n", type=n_list, required=True, help="ascending n values, e.g. 64,128,256")
    parser.add_argument("--trials", type=int, default=1, help="trials per n")
    parser.add_argument("--model", default=model_default, help="weight model spec")
    parser.add_argument("--seed", type=int, default=MASTER_SEED, help="master seed")
    parser.add_argument("--out", help="output stem; .csv, .json and .svg are appended")
    parser.add_argument("--jitter", type=float, default=0.0, help="up-front jitter relative to the site diameter")
    parser.add_argument("--box-factor", type=float, default=BOX_FACTOR, help="world box inflation")
    parser.add_argument("--workers", type=int, default=WORKERS, help="parallel trial processes")
    parser.add_argument("--no-plot", action="store_true", help="skip the SVG plot")
    parser.add_argument("--no-timing", action="store_true", help="write wall_ms as 0 for byte-stable CSV")


def register(subparsers):
    experiment = subparsers.add_parser("experiment", help="run trials and report complexity statistics")
    experiment.add_argument("--kind", required=True,
                            choices=["overlay", "diagram", "candidate", "minima", "lowerbound", "envelope"])
    experiment.add_argument("--oracle", action="store_true", help="diagram kind: use the brute-force oracle")
    _add_run_arguments(experiment, "permuted:linear")
    experiment.set_defaults(func=experiment_command)

    lowerbound = subparsers.add_parser("lowerbound", help="overlay complexity of the two-row lower-bound instance")
    _add_run_arguments(lowerbound, "iid:discrete:1")
    lowerbound.set_defaults(func=lowerbound_command, kind="lowerbound", oracle=False)


def _config(args: argparse.Namespace) -> ExperimentConfig:
    return build_config(
        kind=args.kind,
        n_values=args.n,
        trials=args.trials,
        model=args.model,
        seed=args.seed,
        out=args.out,
        jitter=args.jitter,
        box_factor=args.box_factor,
        workers=args.workers,
        oracle=args.oracle,
        plot=not args.no_plot,
        timing=not args.no_timing,
    )


def _run(cfg: ExperimentConfig):
    records = run_experiment(cfg)
    #A fit needs three n values of at least 2
    fit = None
    if len(cfg.n_values) >= 3 and cfg.n_values[0] >= 2:
        fit = fit_growth(records, cfg.fit_field)
    paths = emit_report(records, fit, cfg)
    return records, fit, paths


def experiment_command(args: argparse.Namespace) -> int:
    """Run an experiment and write its CSV/JSON/SVG report"""
    cfg = _config(args)
    records, fit, paths = _run(cfg)
    print(f"{len(records)} trials written to {paths['csv']}")
    if fit is not None:
        verdict = fit.best_law if fit.best_law else "none (degenerate)"
        print(f"best growth law for {fit.field}: {verdict}")
        print("doubling ratios: " + ", ".join(f"{r:.3f}" for r in fit.doubling_ratios))
    return 0


def lowerbound_command(args: argparse.Namespace) -> int:
    """Lower-bound instance experiment, printed next to the analytic bound"""
    cfg = _config(args)
    records, fit, paths = _run(cfg)
    for n in cfg.n_values:
        totals = [r.overlay_total for r in records if r.n == n]
        mean = sum(totals) / len(totals)
        #Trial 1's instance, rebuilt from its seed before any jitter
        gen = Rng(cfg.seed).for_trial(n, 1).generator()
        isolated = isolated_insertions(build_instance(n, parse_model(cfg.model), gen, lowerbound=True), n)
        print(f"n={n}: mean overlay complexity {mean:.1f}, bound {two_row_lower_bound(n):.3f}, "
              f"isolated insertions in trial 1: {len(isolated)}")
    if fit is not None:
        print("doubling ratios: " + ", ".join(f"{r:.3f}" for r in fit.doubling_ratios))
    print(f"report: {paths['csv']}")
    return 0
