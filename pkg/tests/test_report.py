import csv
import json

import pytest

from mwvd.errors import ReportError
from mwvd.harness import fit_growth
from mwvd.report import LAW_GIDS, emit_report, summarize
from mwvd.schemas import CSV_COLUMNS, ExperimentSummary, TrialRecord, build_config


def records():
    rows = []
    for n in (8, 16, 32):
        for trial in (1, 2):
            rows.append(TrialRecord(trial=trial, n=n, model="iid:uniform:1:2", seed=trial,
                                    overlay_v=n * trial, overlay_e=2 * n * trial, overlay_f=n, max_candidate=3))
    return rows


def test_csv_has_fixed_columns_and_blank_missing_counts(tmp_path):
    cfg = build_config(kind="overlay", n_values=[8, 16, 32], out=str(tmp_path / "run"), plot=False)
    paths = emit_report(records(), None, cfg)
    with open(paths["csv"], newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == CSV_COLUMNS
    assert rows[0] == ["trial", "n", "model", "seed", "overlay_v", "overlay_e", "overlay_f",
                       "max_candidate", "diagram_v", "minima_z", "wall_ms"]
    assert len(rows) == 7
    assert rows[1] == ["1", "8", "iid:uniform:1:2", "1", "8", "16", "8", "3", "", "", "0.000"]


def test_summary_json_loads_back(tmp_path):
    cfg = build_config(kind="overlay", n_values=[8, 16, 32], out=str(tmp_path / "run"), plot=False)
    recs = records()
    fit = fit_growth(recs, "overlay_total")
    paths = emit_report(recs, fit, cfg)
    summary = ExperimentSummary.model_validate_json(paths["json"].read_text())
    assert summary.config == cfg
    assert [s.n for s in summary.per_n] == [8, 16, 32]
    first = summary.per_n[0]
    assert first.trials == 2
    assert first.means["overlay_total"] == pytest.approx((32 + 56) / 2)
    assert first.stderr["max_candidate"] == 0
    assert "diagram_v" not in first.means
    assert summary.fit.field == "overlay_total"
    assert json.loads(paths["json"].read_text())["fit"]["best_law"] == fit.best_law


def test_svg_carries_series_and_law_ids(tmp_path):
    cfg = build_config(kind="overlay", n_values=[8, 16, 32], out=str(tmp_path / "plots" / "run"))
    recs = records()
    paths = emit_report(recs, fit_growth(recs, "overlay_total"), cfg)
    svg = paths["svg"].read_text()
    assert 'id="series-mean"' in svg
    for gid in LAW_GIDS.values():
        assert f'id="{gid}"' in svg


def test_no_svg_without_fit_or_with_plot_off(tmp_path):
    recs = records()
    off = build_config(kind="overlay", n_values=[8, 16, 32], out=str(tmp_path / "off"), plot=False)
    assert "svg" not in emit_report(recs, fit_growth(recs, "overlay_total"), off)
    assert not (tmp_path / "off.svg").exists()
    unfitted = build_config(kind="overlay", n_values=[8, 16, 32], out=str(tmp_path / "unfitted"))
    assert "svg" not in emit_report(recs, None, unfitted)


def test_default_stem_follows_the_kind(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = build_config(kind="candidate", n_values=[8, 16, 32], plot=False)
    paths = emit_report(records(), None, cfg)
    assert paths["csv"].name == "mwvd-candidate.csv"
    assert (tmp_path / "mwvd-candidate.json").exists()


def test_unwritable_stem_is_a_report_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    cfg = build_config(kind="overlay", n_values=[8], out=str(blocker / "run"), plot=False)
    with pytest.raises(ReportError, match="cannot write report"):
        emit_report(records(), None, cfg)


def test_empty_records_are_a_report_error(tmp_path):
    cfg = build_config(kind="overlay", n_values=[8], out=str(tmp_path / "run"))
    with pytest.raises(ReportError):
        emit_report([], None, cfg)


def test_summarize_skips_absent_counts():
    cfg = build_config(kind="minima", n_values=[4])
    recs = [TrialRecord(trial=1, n=4, model="m", seed=0, minima_z=2),
            TrialRecord(trial=2, n=4, model="m", seed=1, minima_z=3)]
    (row,) = summarize(recs, cfg, None).per_n
    assert row.means == {"minima_z": 2.5}
    assert row.stderr["minima_z"] == pytest.approx(0.5)
