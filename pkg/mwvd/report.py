"""CSV, JSON summary and SVG plot output for an experiment"""
import csv
import logging
import math
from pathlib import Path
from typing import Optional, Sequence

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from .errors import ReportError
from .harness import GROWTH_LAWS
from .schemas import CSV_COLUMNS, COUNT_FIELDS, ExperimentConfig, ExperimentSummary, GrowthFit, NSummary, TrialRecord

logger = logging.getLogger(__name__)

#SVG group ids, one per plotted series
LAW_GIDS = {"n": "law-n", "n log n": "law-n-log-n", "n log^2 n": "law-n-log2-n", "n^2": "law-n2"}


def summarize(records: Sequence[TrialRecord], cfg: ExperimentConfig, fit: Optional[GrowthFit]) -> ExperimentSummary:
    """Per-n means and standard errors of every count the records carry"""
    per_n = []
    for n in sorted({r.n for r in records}):
        rows = [r for r in records if r.n == n]
        means, stderr = {}, {}
        for field in COUNT_FIELDS:
            values = np.array([v for r in rows if (v := r.value(field)) is not None], dtype=float)
            if values.size == 0:
                continue
            means[field] = float(values.mean())
            stderr[field] = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
        per_n.append(NSummary(n=n, trials=len(rows), means=means, stderr=stderr))
    return ExperimentSummary(config=cfg, per_n=per_n, fit=fit)


def write_csv(path: Path, records: Sequence[TrialRecord]):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow(r.csv_row())


def write_plot(path: Path, fit: GrowthFit, title: str):
    """Log-log plot of the mean count with every fitted law overlaid"""
    n = np.array(fit.n_values, dtype=float)
    grid = np.geomspace(n[0], n[-1], 64)
    fig = Figure(figsize=(6, 4.5))
    ax = fig.subplots()
    #Fixed salt and no date keep the SVG bytes reproducible
    with matplotlib.rc_context({"svg.hashsalt": "mwvd"}):
        (series,) = ax.loglog(n, fit.means, "o-", color="black", label=f"mean {fit.field}")
        series.set_gid("series-mean")
        for law in fit.laws:
            (line,) = ax.loglog(grid, law.coefficient * GROWTH_LAWS[law.law](grid), "--", label=f"{law.coefficient:.3g}·{law.law}")
            line.set_gid(LAW_GIDS[law.law])
        ax.set_xlabel("n")
        ax.set_ylabel(fit.field)
        ax.set_title(title)
        ax.legend(fontsize="small")
        fig.savefig(path, format="svg", metadata={"Date": None})


def emit_report(records: Sequence[TrialRecord], fit: Optional[GrowthFit], cfg: ExperimentConfig) -> dict[str, Path]:
    """Write <out>.csv, <out>.json and, when a fit exists and plotting is on, <out>.svg"""
    if not records:
        raise ReportError("no trial records to report")
    stem = Path(cfg.out or f"mwvd-{cfg.kind}")
    paths = {"csv": stem.with_suffix(".csv"), "json": stem.with_suffix(".json")}
    if cfg.plot and fit is not None and fit.laws:
        paths["svg"] = stem.with_suffix(".svg")
    try:
        stem.parent.mkdir(parents=True, exist_ok=True)
        write_csv(paths["csv"], records)
        paths["json"].write_text(summarize(records, cfg, fit).model_dump_json(indent=2) + "\n")
        if "svg" in paths:
            write_plot(paths["svg"], fit, f"{cfg.kind}: {cfg.model}")
    except OSError as e:
        raise ReportError(f"cannot write report at {stem}: {e}") from None
    for kind, path in paths.items():
        logger.info("wrote %s report %s", kind, path)
    return paths
