"""CSV export and re-import of traces, KPIs, suites, and frontiers."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .experiments import FrontierPoint, SuiteReport
from .model import ROLES, DayRecord, KpiReport, Role
from .panel import CostRating, Evaluation, SpeedRating

TRACE_COLUMNS = ["day", "entity", "on_hand", "backorders", "on_order", "demand",
                 "fulfilled", "holding_cost", "backorder_cost", "premium_cost"]
KPI_COLUMNS = ["label", "seed", "total_cost", "holding_cost", "backorder_cost",
               "premium_cost", "service_level", "total_demand", "total_fulfilled"] + [
    f"holding_{role.value.lower()}" for role in ROLES]
SUITE_COLUMNS = ["scenario", "policy", "mean_cost", "std_cost", "mean_service",
                 "std_service", "n"]
FRONTIER_COLUMNS = ["strategy", "total_cost", "service_level", "cost_rating", "speed_rating"]
EVALUATION_COLUMNS = ["strategy", "cost_rating", "speed_rating"]


class ExportError(OSError):
    pass


@dataclass(frozen=True)
class LabeledKpi:
    label: str
    seed: int
    report: KpiReport


def _write(path: Path, header: list[str], rows: Iterable[list]) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc.strerror or exc}") from None
    return path


def write_trace(trace: list[DayRecord], path: Path) -> Path:
    return _write(path, TRACE_COLUMNS, (
        [r.day, r.entity.value, r.on_hand, r.backorders, r.on_order, r.demand,
         r.fulfilled, r.holding_cost, r.backorder_cost, r.premium_cost]
        for r in trace
    ))


def write_kpis(kpis: list[LabeledKpi], path: Path) -> Path:
    return _write(path, KPI_COLUMNS, (
        [k.label, k.seed, k.report.total_cost, k.report.holding_cost, k.report.backorder_cost,
         k.report.premium_cost, k.report.service_level, k.report.total_demand,
         k.report.total_fulfilled] + [k.report.holding_by_role[role] for role in ROLES]
        for k in kpis
    ))


def write_suite(suite: SuiteReport, path: Path) -> Path:
    return _write(path, SUITE_COLUMNS, (
        [c.scenario, c.policy, c.stats.mean_cost, c.stats.std_cost, c.stats.mean_service,
         c.stats.std_service, c.stats.n]
        for c in suite.cells
    ))


def write_frontier(points: list[FrontierPoint], path: Path) -> Path:
    return _write(path, FRONTIER_COLUMNS, (
        [p.strategy_name, p.total_cost, p.service_level, p.cost_rating.label, p.speed_rating.label]
        for p in points
    ))


def write_evaluations(evaluations: list[Evaluation], path: Path) -> Path:
    return _write(path, EVALUATION_COLUMNS, (
        [e.strategy_name, e.cost.label, e.speed.label] for e in evaluations
    ))


def export_reports(out_dir: str | Path, *, trace: list[DayRecord] | None = None,
                   kpis: list[LabeledKpi] | None = None, suite: SuiteReport | None = None,
                   frontier: list[FrontierPoint] | None = None,
                   evaluations: list[Evaluation] | None = None) -> list[Path]:
    """Write whichever outputs are given into ``out_dir``; returns the paths written."""
    out = Path(out_dir)
    if out.exists() and not out.is_dir():
        raise ExportError(f"not a directory: {out}")
    written = []
    if trace is not None:
        written.append(write_trace(trace, out / "trace.csv"))
    if kpis is not None:
        written.append(write_kpis(kpis, out / "kpi.csv"))
    if suite is not None:
        written.append(write_suite(suite, out / "suite.csv"))
    if frontier is not None:
        written.append(write_frontier(frontier, out / "frontier.csv"))
    if evaluations is not None:
        written.append(write_evaluations(evaluations, out / "evaluations.csv"))
    return written


def _rows(path: Path, header: list[str]) -> list[dict[str, str]]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != header:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return list(reader)


def read_trace(path: str | Path) -> list[DayRecord]:
    return [
        DayRecord(
            day=int(r["day"]), entity=Role.parse(r["entity"]), on_hand=int(r["on_hand"]),
            backorders=int(r["backorders"]), on_order=int(r["on_order"]),
            demand=int(r["demand"]), fulfilled=int(r["fulfilled"]),
            holding_cost=float(r["holding_cost"]), backorder_cost=float(r["backorder_cost"]),
            premium_cost=float(r["premium_cost"]),
        )
        for r in _rows(Path(path), TRACE_COLUMNS)
    ]


def read_suite(path: str | Path) -> list[dict[str, float | int | str]]:
    return [
        {"scenario": r["scenario"], "policy": r["policy"],
         "mean_cost": float(r["mean_cost"]), "std_cost": float(r["std_cost"]),
         "mean_service": float(r["mean_service"]), "std_service": float(r["std_service"]),
         "n": int(r["n"])}
        for r in _rows(Path(path), SUITE_COLUMNS)
    ]


def read_frontier(path: str | Path) -> list[FrontierPoint]:
    return [
        FrontierPoint(r["strategy"], float(r["total_cost"]), float(r["service_level"]),
                      CostRating.from_label(r["cost_rating"]),
                      SpeedRating.from_label(r["speed_rating"]))
        for r in _rows(Path(path), FRONTIER_COLUMNS)
    ]


def read_evaluations(path: str | Path) -> list[tuple[str, CostRating, SpeedRating]]:
    return [
        (r["strategy"], CostRating.from_label(r["cost_rating"]),
         SpeedRating.from_label(r["speed_rating"]))
        for r in _rows(Path(path), EVALUATION_COLUMNS)
    ]
