"""Model x parameterization sensitivity grid, summary statistics and reports.

Written files and their fixed headers::

    grid.csv        event_id,model,method,status,direct,domestic_indirect,global_indirect,unit
    stats.csv       event_id,scope,n,mean,sample_std,min,max,unit,note
    dispersion.csv  event_id,model,n,std_across_methods,mean_total,pct_of_mean,unit
    rankings.csv    event_id,model,method,rank,region,sector,loss,pct_of_sector_output,unit
    validation.csv  event_id,model,method,label,internal,external,ratio,pct_diff,unit   (only with estimates)
    comparison.svg  internal vs external bars (only when "svg" is requested)

Floats are written with ``repr`` so a re-read reproduces them bit for bit.
"""

from __future__ import annotations

import csv
import logging
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

from .errors import InsufficientCells, IoFailure, OutageIOError
from .ingest import ScenarioConfig, scenario_shock
from .models import MODELS, ImpactResult, run_model
from .mrio import MrioTable
from .shocks import METHODS, DemandShock

log = logging.getLogger(__name__)

SCOPES = ("domestic_total", "domestic_indirect", "global_indirect", "global_total")

GRID_HEADER = ["event_id", "model", "method", "status", "direct", "domestic_indirect", "global_indirect", "unit"]
STATS_HEADER = ["event_id", "scope", "n", "mean", "sample_std", "min", "max", "unit", "note"]
DISPERSION_HEADER = ["event_id", "model", "n", "std_across_methods", "mean_total", "pct_of_mean", "unit"]
RANKINGS_HEADER = ["event_id", "model", "method", "rank", "region", "sector", "loss", "pct_of_sector_output", "unit"]
VALIDATION_HEADER = ["event_id", "model", "method", "label", "internal", "external", "ratio", "pct_diff", "unit"]

SCOPE_NOTES = {
    "domestic_total": "direct + domestic indirect per cell",
    "domestic_indirect": "indirect only; range upper bound matches published domestic tables",
    "global_indirect": "indirect only",
    "global_total": "direct + global indirect per cell",
}

MODEL_LABELS = {"leontief_ghosh": "LGM", "critical_input": "CIM", "inoperability": "IIM"}


@dataclass
class GridCell:
    model: str
    method: str
    direct: float = 0.0
    domestic_indirect: float = 0.0
    global_indirect: float = 0.0
    available: bool = False
    error: str | None = None
    result: ImpactResult | None = None

    def value(self, scope: str) -> float:
        if scope == "domestic_total":
            return self.direct + self.domestic_indirect
        if scope == "domestic_indirect":
            return self.domestic_indirect
        if scope == "global_indirect":
            return self.global_indirect
        if scope == "global_total":
            return self.direct + self.global_indirect
        raise ValueError(f"unknown scope {scope!r}; expected one of {SCOPES}")

    @property
    def status(self) -> str:
        if self.available:
            return "ok"
        return "error" if self.error and not self.error.startswith("unavailable") else "unavailable"


@dataclass
class SensitivityGrid:
    event_id: str
    cells: dict[tuple[str, str], GridCell]
    shocks: dict[str, DemandShock] = field(default_factory=dict)

    def cell(self, model: str, method: str) -> GridCell:
        return self.cells[(model, method)]

    def available(self) -> list[GridCell]:
        return [self.cells[(m, p)] for m in MODELS for p in METHODS if self.cells[(m, p)].available]

    def unavailable(self) -> list[GridCell]:
        return [self.cells[(m, p)] for m in MODELS for p in METHODS if not self.cells[(m, p)].available]

    @classmethod
    def empty(cls, event_id: str) -> "SensitivityGrid":
        return cls(event_id, {(m, p): GridCell(m, p) for m in MODELS for p in METHODS})

    @classmethod
    def from_values(
        cls,
        event_id: str,
        direct: dict[str, float],
        domestic_indirect: dict[tuple[str, str], float],
        global_indirect: dict[tuple[str, str], float] | None = None,
    ) -> "SensitivityGrid":
        """Grid from already-computed numbers, keyed ``(model, method)``.

        Cells absent from ``domestic_indirect`` stay unavailable.  Missing global
        values default to the domestic ones.
        """
        grid = cls.empty(event_id)
        global_indirect = global_indirect or {}
        for key, dom in domestic_indirect.items():
            cell = grid.cells[key]
            cell.direct = float(direct[key[1]])
            cell.domestic_indirect = float(dom)
            cell.global_indirect = float(global_indirect.get(key, dom))
            cell.available = True
        return grid


def _threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("OUTAGE_IO_THREADS", "0") or 0)
    if threads <= 0:
        threads = min(len(MODELS) * len(METHODS), os.cpu_count() or 1)
    return threads


def run_grid(table: MrioTable, scenario: ScenarioConfig, threads: int | None = None) -> SensitivityGrid:
    """Run every available (model, method) pair; a failing cell does not stop the others."""
    grid = SensitivityGrid.empty(scenario.event_id)
    jobs = []
    for method in METHODS:
        if not scenario.method_available(method):
            for model in MODELS:
                grid.cells[(model, method)].error = f"unavailable: scenario has no {method} inputs"
            continue
        try:
            shock = scenario_shock(scenario, method)
        except OutageIOError as exc:
            for model in MODELS:
                grid.cells[(model, method)].error = f"{type(exc).__name__}: {exc}"
            continue
        grid.shocks[method] = shock
        jobs.extend((model, method, shock) for model in MODELS)

    try:
        # factorise once up front instead of racing inside the workers
        table.leontief, table.ghosh
    except OutageIOError:
        pass

    def work(job):
        model, method, shock = job
        try:
            return job, run_model(model, table, shock), None
        except OutageIOError as exc:
            return job, None, f"{type(exc).__name__}: {exc}"

    with ThreadPoolExecutor(max_workers=_threads(threads)) as pool:
        outcomes = list(pool.map(work, jobs))

    for (model, method, _), result, err in outcomes:
        cell = grid.cells[(model, method)]
        if err is not None:
            cell.error = err
            continue
        cell.direct = result.direct
        cell.domestic_indirect = result.domestic_indirect
        cell.global_indirect = result.global_indirect
        cell.available = True
        cell.result = result
    return grid


@dataclass(frozen=True)
class SummaryStats:
    scope: str
    mean: float
    sample_std: float
    min: float
    max: float
    n: int


def summary_stats(grid: SensitivityGrid, scope: str = "domestic_total", ddof: int = 1) -> SummaryStats:
    """Mean, standard deviation and range over the available cells.

    ``ddof=1`` gives the sample deviation; ``ddof=0`` the population one.
    """
    values = [c.value(scope) for c in grid.available()]
    if len(values) < 2:
        raise InsufficientCells(f"{len(values)} available cell(s); at least 2 are needed")
    std = statistics.stdev(values) if ddof == 1 else statistics.pstdev(values)
    return SummaryStats(scope, statistics.fmean(values), std, min(values), max(values), len(values))


@dataclass(frozen=True)
class DispersionRow:
    model: str
    std_across_methods: float
    mean_total: float
    pct_of_mean: float
    n: int


def parameterization_dispersion(
    grid: SensitivityGrid, ddof: int = 1, skip_insufficient: bool = False
) -> list[DispersionRow]:
    """Spread of each model's global indirect loss across parameterizations.

    The percentage is taken against the mean of ``global_indirect + direct``.
    """
    rows = []
    for model in MODELS:
        cells = [grid.cells[(model, m)] for m in METHODS if grid.cells[(model, m)].available]
        if len(cells) < 2:
            if skip_insufficient:
                continue
            raise InsufficientCells(f"model {model} has {len(cells)} available method(s); at least 2 are needed")
        values = [c.global_indirect for c in cells]
        std = statistics.stdev(values) if ddof == 1 else statistics.pstdev(values)
        mean_total = statistics.fmean(c.global_indirect + c.direct for c in cells)
        pct = std / mean_total if mean_total else 0.0
        rows.append(DispersionRow(model, std, mean_total, pct, len(cells)))
    return rows


@dataclass(frozen=True)
class ValidationRow:
    model: str
    method: str
    label: str
    internal: float | None
    external: float
    ratio: float | None
    pct_diff: float | None

    @property
    def available(self) -> bool:
        return self.internal is not None


def compare_validation(grid: SensitivityGrid, estimates) -> list[ValidationRow]:
    """Each cell's domestic indirect loss against each external estimate."""
    rows = []
    for label, external in estimates:
        for model in MODELS:
            for method in METHODS:
                cell = grid.cells[(model, method)]
                if not cell.available:
                    rows.append(ValidationRow(model, method, label, None, external, None, None))
                    continue
                internal = cell.domestic_indirect
                ratio = internal / external
                rows.append(ValidationRow(model, method, label, internal, external, ratio, (ratio - 1.0) * 100.0))
    return rows


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def all_stats(grid: SensitivityGrid, ddof: int = 1) -> list[SummaryStats]:
    out = []
    for scope in SCOPES:
        try:
            out.append(summary_stats(grid, scope, ddof))
        except InsufficientCells:
            pass
    return out


def render_svg(grid: SensitivityGrid, estimates=(), width: int = 1000) -> str:
    """Horizontal bar chart of domestic indirect losses next to external estimates.

    Bar length is ``value / max_value * width`` pixels.
    """
    bars = [
        (f"{MODEL_LABELS[c.model]} / {c.method}", c.domestic_indirect, "internal", c.model, c.method)
        for c in grid.available()
    ]
    bars += [(label, value, "external", "", "") for label, value in estimates]
    left, right, top, bar_h, gap = 220, 120, 50, 18, 8
    vmax = max((v for _, v, *_ in bars), default=0.0) or 1.0
    height = top + len(bars) * (bar_h + gap) + 30
    colours = {"internal": "#3b6ea5", "external": "#d08c2f"}
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{left + width + right}" '
        f'height="{height}" viewBox="0 0 {left + width + right} {height}">',
        f'<text x="{left}" y="24" font-family="sans-serif" font-size="15">'
        f"{escape(grid.event_id)}: domestic indirect loss (US$)</text>",
        f'<g id="bars" data-scale-width="{width}" data-max-value="{vmax!r}">',
    ]
    for i, (label, value, kind, model, method) in enumerate(bars):
        y = top + i * (bar_h + gap)
        w = value / vmax * width
        out.append(
            f'<rect x="{left}" y="{y}" width="{w:.3f}" height="{bar_h}" fill="{colours[kind]}" '
            f'data-kind="{kind}" data-model="{model}" data-method="{method}" data-value="{value!r}"/>'
        )
        out.append(
            f'<text x="{left - 6}" y="{y + bar_h - 5}" text-anchor="end" font-family="sans-serif" '
            f'font-size="12">{escape(label)}</text>'
        )
        out.append(
            f'<text x="{left + w + 6:.3f}" y="{y + bar_h - 5}" font-family="sans-serif" '
            f'font-size="11">{value / 1e6:,.1f} Mn</text>'
        )
    out.append("</g>")
    legend_y = height - 10
    out.append(f'<rect x="{left}" y="{legend_y - 10}" width="10" height="10" fill="{colours["internal"]}"/>')
    out.append(f'<text x="{left + 14}" y="{legend_y}" font-family="sans-serif" font-size="11">Internal estimate</text>')
    out.append(f'<rect x="{left + 140}" y="{legend_y - 10}" width="10" height="10" fill="{colours["external"]}"/>')
    out.append(
        f'<text x="{left + 154}" y="{legend_y}" font-family="sans-serif" font-size="11">External estimate</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_report(
    grid: SensitivityGrid,
    stats: list[SummaryStats] | None,
    out_dir,
    formats=("csv", "svg"),
    estimates=(),
    top_n: int = 10,
) -> list[Path]:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise IoFailure(f"cannot write to {out}: {exc}") from None
    if stats is None:
        stats = all_stats(grid)
    ev = grid.event_id
    written = []
    try:
        if "csv" in formats:
            rows = []
            for model in MODELS:
                for method in METHODS:
                    c = grid.cells[(model, method)]
                    vals = [c.direct, c.domestic_indirect, c.global_indirect] if c.available else [None] * 3
                    rows.append([ev, model, method, c.status, *map(_fmt, vals), "USD"])
            _write_csv(out / "grid.csv", GRID_HEADER, rows)

            rows = [
                [ev, s.scope, s.n, _fmt(s.mean), _fmt(s.sample_std), _fmt(s.min), _fmt(s.max), "USD", SCOPE_NOTES[s.scope]]
                for s in stats
            ]
            _write_csv(out / "stats.csv", STATS_HEADER, rows)

            rows = [
                [ev, d.model, d.n, _fmt(d.std_across_methods), _fmt(d.mean_total), _fmt(d.pct_of_mean), "USD"]
                for d in parameterization_dispersion(grid, skip_insufficient=True)
            ]
            _write_csv(out / "dispersion.csv", DISPERSION_HEADER, rows)

            rows = []
            for c in grid.available():
                if c.result is None:
                    continue
                for rank, s in enumerate(c.result.sector_rankings[:top_n], start=1):
                    rows.append([ev, c.model, c.method, rank, s.region, s.sector, _fmt(s.loss), _fmt(s.pct_of_output), "USD"])
            _write_csv(out / "rankings.csv", RANKINGS_HEADER, rows)
            written += [out / f for f in ("grid.csv", "stats.csv", "dispersion.csv", "rankings.csv")]

            if estimates:
                rows = [
                    [ev, r.model, r.method, r.label, _fmt(r.internal), _fmt(r.external), _fmt(r.ratio), _fmt(r.pct_diff), "USD"]
                    for r in compare_validation(grid, estimates)
                ]
                _write_csv(out / "validation.csv", VALIDATION_HEADER, rows)
                written.append(out / "validation.csv")
        if "svg" in formats:
            (out / "comparison.svg").write_text(render_svg(grid, estimates), encoding="utf-8")
            written.append(out / "comparison.svg")
    except OSError as exc:
        raise IoFailure(f"writing report to {out} failed: {exc}") from None
    return written


def read_grid_csv(path) -> SensitivityGrid:
    """Rebuild a grid (without per-sector detail) from a written grid.csv."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise InsufficientCells(f"{path} has no rows")
    grid = SensitivityGrid.empty(rows[0]["event_id"])
    for r in rows:
        cell = grid.cells[(r["model"], r["method"])]
        if r["status"] == "ok":
            cell.direct = float(r["direct"])
            cell.domestic_indirect = float(r["domestic_indirect"])
            cell.global_indirect = float(r["global_indirect"])
            cell.available = True
        else:
            cell.error = r["status"]
    return grid
