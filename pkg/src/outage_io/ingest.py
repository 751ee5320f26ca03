"""Loaders for MRIO bundles, outage time series and scenario files.

Bundle directory layout::

    sectors.csv         index,region,sector_name,gross_output   (optional sector_id column)
    A.csv | T.csv       n rows of n comma-separated numbers, no header (.csv.gz accepted)
    final_demand.csv    index,value
    value_added.csv     index,value
    meta.json           optional: base_year, currency_scale, tolerances, on_inconsistency, compression

Every loader fails on the first bad file/row/column and never reorders input.
"""

from __future__ import annotations

import csv
import gzip
import io
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

import jsonschema
import numpy as np

from .errors import (
    AmbiguousMatrixSource,
    BadCount,
    BadTimestamp,
    ConsistencyViolation,
    Disorder,
    EmptySeries,
    IndexGap,
    MethodUnavailable,
    MissingFile,
    MissingParameterization,
    NegativeCount,
    NotProductive,
    SchemaViolation,
    ShapeMismatch,
)
from .mrio import CONSISTENCY_TOL, IDENTITY_TOL, MrioTable, build_technical_coefficients, productiveness_check
from .raster import BoundingBox, MaskAOI, load_grid, percent_loss
from .shocks import (
    METHODS,
    DemandShock,
    OutageSeries,
    ShockConstants,
    derive_value_per_consumer_hour,
    household_shock,
    integrate_consumer_hours,
    kwh_shock,
    luminosity_shock,
)

log = logging.getLogger(__name__)

SECTOR_COLUMNS = ("index", "region", "sector_name", "gross_output")
VECTOR_COLUMNS = ("index", "value")
REQUIRED_FILES = ("sectors.csv", "final_demand.csv", "value_added.csv")


# ---------------------------------------------------------------------------
# MRIO bundle
# ---------------------------------------------------------------------------


def _number(token: str, where: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise SchemaViolation(where, f"{token!r} is not a number") from None


def _open_text(path: Path):
    if path.suffix == ".gz":
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8", newline="")
    return open(path, newline="", encoding="utf-8")


def _read_indexed(path: Path, columns: tuple[str, ...]) -> list[dict]:
    with _open_text(path) as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in columns if c not in (reader.fieldnames or [])]
        if missing:
            raise SchemaViolation(path.name, f"missing column(s) {', '.join(missing)}")
        rows = list(reader)
    for expected, row in enumerate(rows):
        where = f"{path.name}:{expected + 2}"
        try:
            idx = int(row["index"])
        except (TypeError, ValueError):
            raise SchemaViolation(where, f"index {row['index']!r} is not an integer") from None
        if idx != expected:
            raise IndexGap(f"{where}: index {idx} where {expected} was expected")
    return rows


def _read_vector(path: Path, n: int) -> np.ndarray:
    rows = _read_indexed(path, VECTOR_COLUMNS)
    if len(rows) != n:
        raise ShapeMismatch(f"{path.name}: {len(rows)} entries, sectors.csv declares {n}")
    return np.array([_number(r["value"], f"{path.name}:{i + 2}:value") for i, r in enumerate(rows)])


def _read_matrix(path: Path, n: int) -> np.ndarray:
    M = np.empty((n, n))
    with _open_text(path) as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) != n:
        raise ShapeMismatch(f"{path.name}: {len(rows)} rows, expected {n}")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ShapeMismatch(f"{path.name}:{i + 1}: {len(row)} columns, expected {n}")
        M[i] = [_number(tok, f"{path.name}:{i + 1}:{j + 1}") for j, tok in enumerate(row)]
    return M


def _matrix_file(bundle: Path, stem: str) -> Path | None:
    for name in (f"{stem}.csv", f"{stem}.csv.gz"):
        if (bundle / name).is_file():
            return bundle / name
    return None


@dataclass(frozen=True)
class BundleDiagnostics:
    n: int
    regions: list[str]
    matrix_source: str
    max_col_sum: float
    spectral_radius: float
    productive: bool
    consistency_residual: float
    value_added_residual: float
    consistency_tol: float
    warnings: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def load_mrio_bundle(directory, with_diagnostics: bool = False):
    """Load and validate a bundle directory.

    Returns the :class:`MrioTable`, or ``(table, diagnostics)`` when
    ``with_diagnostics`` is set.
    """
    bundle = Path(directory)
    if not bundle.is_dir():
        raise MissingFile(f"bundle directory not found: {bundle}")
    for name in REQUIRED_FILES:
        if not (bundle / name).is_file():
            raise MissingFile(f"bundle is missing {name}")
    a_path, t_path = _matrix_file(bundle, "A"), _matrix_file(bundle, "T")
    if a_path and t_path:
        raise AmbiguousMatrixSource("bundle has both A.csv and T.csv; supply exactly one")
    if not (a_path or t_path):
        raise MissingFile("bundle is missing A.csv (or T.csv)")

    meta = {}
    if (bundle / "meta.json").is_file():
        try:
            meta = json.loads((bundle / "meta.json").read_text())
        except json.JSONDecodeError as exc:
            raise SchemaViolation("meta.json", str(exc)) from None
    tolerances = meta.get("tolerances", {})
    consistency_tol = float(tolerances.get("consistency", CONSISTENCY_TOL))
    identity_tol = float(tolerances.get("identity", IDENTITY_TOL))

    sector_rows = _read_indexed(bundle / "sectors.csv", SECTOR_COLUMNS)
    n = len(sector_rows)
    if n == 0:
        raise ShapeMismatch("sectors.csv lists no sectors")
    labels = []
    x = np.empty(n)
    for i, r in enumerate(sector_rows):
        labels.append((r["region"], r.get("sector_id") or r["sector_name"], r["sector_name"]))
        x[i] = _number(r["gross_output"], f"sectors.csv:{i + 2}:gross_output")

    if a_path:
        A = _read_matrix(a_path, n)
    else:
        A = build_technical_coefficients(_read_matrix(t_path, n), x)
    F = _read_vector(bundle / "final_demand.csv", n)
    v = _read_vector(bundle / "value_added.csv", n)

    report = productiveness_check(A)
    if not report.passed:
        raise NotProductive(
            f"technical coefficients are not productive: spectral radius {report.spectral_radius:.6g}, "
            f"max column sum {report.max_col_sum:.6g}"
        )

    table = MrioTable(
        region_sectors=tuple(labels),
        A=A,
        F=F,
        x=x,
        v=v,
        base_year=meta.get("base_year"),
        currency_scale=float(meta.get("currency_scale", 1.0)),
        identity_tol=identity_tol,
        consistency_tol=consistency_tol,
        meta=meta,
    )

    warnings = []
    residual = table.consistency_residual()
    va_residual = table.value_added_residual()
    for label, value in (("x - (Ax + F)", residual), ("v - x(1 - colsum A)", va_residual)):
        if value > consistency_tol:
            msg = f"balance residual {label} is {value:.3g}, above tolerance {consistency_tol:.3g}"
            if meta.get("on_inconsistency", "error") == "warn":
                log.warning(msg)
                warnings.append(msg)
            else:
                raise ConsistencyViolation(msg)
    zero = int(table.zero_output.sum())
    if zero:
        warnings.append(f"{zero} sector(s) have zero gross output and are excluded from B/A*")

    if not with_diagnostics:
        return table
    diag = BundleDiagnostics(
        n=n,
        regions=table.regions,
        matrix_source=(a_path or t_path).name,
        max_col_sum=report.max_col_sum,
        spectral_radius=report.spectral_radius,
        productive=report.passed,
        consistency_residual=residual,
        value_added_residual=va_residual,
        consistency_tol=consistency_tol,
        warnings=warnings,
    )
    return table, diag


def write_mrio_bundle(table: MrioTable, directory, compression: str | None = None) -> Path:
    """Write ``table`` in bundle form; numbers use shortest round-trip formatting."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sectors.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "region", "sector_id", "sector_name", "gross_output"])
        for i, (region, sector, name) in enumerate(table.region_sectors):
            w.writerow([i, region, sector, name, repr(float(table.x[i]))])
    for fname, vec in (("final_demand.csv", table.F), ("value_added.csv", table.v)):
        with open(out / fname, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(VECTOR_COLUMNS)
            for i, val in enumerate(vec):
                w.writerow([i, repr(float(val))])
    body = "".join(",".join(repr(float(a)) for a in row) + "\n" for row in table.A)
    if compression == "gzip":
        with gzip.open(out / "A.csv.gz", "wt", encoding="utf-8") as fh:
            fh.write(body)
    else:
        (out / "A.csv").write_text(body)
    meta = dict(table.meta)
    meta.update(
        base_year=table.base_year,
        currency_scale=table.currency_scale,
        tolerances={"consistency": table.consistency_tol, "identity": table.identity_tol},
    )
    if compression:
        meta["compression"] = compression
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return out


# ---------------------------------------------------------------------------
# Outage series
# ---------------------------------------------------------------------------


def parse_timestamp(text: str, where: str = "") -> datetime:
    s = text.strip()
    if s.endswith("Z"):
        s = s[:-1] + "+00:00"
    try:
        return datetime.fromisoformat(s)
    except ValueError:
        raise BadTimestamp(f"{where}: {text!r} is not an ISO-8601 timestamp") from None


def load_outage_series(path, window_start: datetime | None = None, window_end: datetime | None = None) -> OutageSeries:
    """Read a ``timestamp,customers`` CSV.  Rows must already be in time order."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"outage series not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames[:2]] != ["timestamp", "customers"]:
            raise SchemaViolation(path.name, "header must be 'timestamp,customers'")
        samples = []
        for lineno, row in enumerate(reader, start=2):
            where = f"{path.name}:{lineno}"
            ts = parse_timestamp(row["timestamp"] or "", where)
            raw = (row["customers"] or "").strip()
            try:
                value = float(raw)
            except ValueError:
                raise BadCount(f"{where}: customers {raw!r} is not a number") from None
            if value < 0:
                raise NegativeCount(f"{where}: customers {raw!r} is negative")
            if value != int(value):
                raise BadCount(f"{where}: customers {raw!r} is not a whole number")
            if samples and not ts > samples[-1][0]:
                raise Disorder(f"{where}: {ts.isoformat()} is not after {samples[-1][0].isoformat()}")
            samples.append((ts, int(value)))
    if not samples:
        raise EmptySeries(f"{path.name}: no samples after the header")
    return OutageSeries.from_samples(samples, window_start, window_end)


# ---------------------------------------------------------------------------
# Scenarios
# ---------------------------------------------------------------------------

_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}

SCENARIO_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "event_id": {"type": "string"},
        "shocked_region": {"type": "string"},
        "utilities_sector_id": {"type": "string"},
        "description": {"type": "string"},
        "household": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "series_path": {"type": "string"},
                "total_consumer_hours": _NONNEG,
                "window_start": {"type": "string"},
                "window_end": {"type": "string"},
                "integration": {"enum": ["step", "trapezoid"]},
            },
        },
        "kwh": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"kwh_lost": _NONNEG},
        },
        "luminosity": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "baseline_grid": {"type": "string"},
                "event_grid": {"type": "string"},
                "aoi": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4},
                "aoi_mask": {"type": "string"},
                "pct_loss": {"type": "number", "minimum": 0, "maximum": 1},
                "scaling": _NONNEG,
                "signed": {"type": "boolean"},
            },
        },
        "constants": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "f_utilities": _POS,
                "population": _POS,
                "hours_per_year": _POS,
                "net_generation_kwh": _POS,
                "residential_share": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "value_per_consumer_hour": _POS,
            },
        },
        "validation_estimates": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["label", "value"],
                "properties": {"label": {"type": "string"}, "value": _POS},
            },
        },
    },
}

DEFAULT_REGION = "USA"
DEFAULT_UTILITIES_SECTOR = "Electricity, Gas and Water"


@dataclass(frozen=True)
class ScenarioConfig:
    event_id: str
    shocked_region: str
    utilities_sector_id: str
    household: dict | None
    kwh: dict | None
    luminosity: dict | None
    constants: ShockConstants
    validation_estimates: list[tuple[str, float]]
    base_dir: Path = Path(".")

    @property
    def target(self) -> tuple[str, str]:
        return (self.shocked_region, self.utilities_sector_id)

    def method_available(self, method: str) -> bool:
        block = getattr(self, method)
        if block is None:
            return False
        if method == "household":
            return "series_path" in block or "total_consumer_hours" in block
        if method == "kwh":
            return "kwh_lost" in block
        return ("baseline_grid" in block and "event_grid" in block) or "pct_loss" in block

    @property
    def available_methods(self) -> list[str]:
        return [m for m in METHODS if self.method_available(m)]

    def path(self, rel: str) -> Path:
        return (self.base_dir / rel).resolve()


def _schema_error(exc: jsonschema.ValidationError) -> SchemaViolation:
    path = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in exc.absolute_path)
    return SchemaViolation(path, exc.message)


def parse_scenario(doc: dict, base_dir=".") -> ScenarioConfig:
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        raise _schema_error(errors[0])
    base_dir = Path(base_dir)
    constants = ShockConstants(**doc.get("constants", {}))
    cfg = ScenarioConfig(
        event_id=doc.get("event_id", "event"),
        shocked_region=doc.get("shocked_region", DEFAULT_REGION),
        utilities_sector_id=doc.get("utilities_sector_id", DEFAULT_UTILITIES_SECTOR),
        household=doc.get("household"),
        kwh=doc.get("kwh"),
        luminosity=doc.get("luminosity"),
        constants=constants,
        validation_estimates=[(e["label"], float(e["value"])) for e in doc.get("validation_estimates", [])],
        base_dir=base_dir,
    )
    if not cfg.available_methods:
        raise MissingParameterization("scenario provides no usable household, kwh or luminosity inputs")
    for block, keys in (("household", ("series_path",)), ("luminosity", ("baseline_grid", "event_grid", "aoi_mask"))):
        for key in keys:
            rel = (getattr(cfg, block) or {}).get(key)
            if rel is not None and not cfg.path(rel).is_file():
                raise MissingFile(f"$.{block}.{key}: {cfg.path(rel)} does not exist")
    for key in ("window_start", "window_end"):
        value = (cfg.household or {}).get(key)
        if value is not None:
            parse_timestamp(value, f"$.household.{key}")
    return cfg


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"scenario not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaViolation("$", f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaViolation("$", "scenario must be a JSON object")
    return parse_scenario(doc, path.parent)


def scenario_shock(scenario: ScenarioConfig, method: str) -> DemandShock:
    """Build the demand shock for one parameterization of ``scenario``."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if not scenario.method_available(method):
        raise MethodUnavailable(f"scenario {scenario.event_id!r} has no inputs for the {method} method")
    c = scenario.constants
    target = scenario.target

    if method == "household":
        block = scenario.household
        extra = {}
        hours = None
        if "total_consumer_hours" in block:
            hours = float(block["total_consumer_hours"])
        if "series_path" in block:
            start = parse_timestamp(block["window_start"]) if "window_start" in block else None
            end = parse_timestamp(block["window_end"]) if "window_end" in block else None
            series = load_outage_series(scenario.path(block["series_path"]), start, end)
            rule = block.get("integration", "step")
            integrated = integrate_consumer_hours(series, rule)
            extra = {
                "series_path": block["series_path"],
                "integration": rule,
                "samples": len(series.customers),
                "series_consumer_hours": integrated,
            }
            # a reported total, when given, takes precedence over the integrated series
            if hours is None:
                hours = integrated
        shock = household_shock(hours, derive_value_per_consumer_hour(c), target, scenario.event_id, c)
        shock.assumptions.update(extra)
        return shock

    if method == "kwh":
        return kwh_shock(float(scenario.kwh["kwh_lost"]), c, target, scenario.event_id)

    block = scenario.luminosity
    extra = {}
    if "baseline_grid" in block and "event_grid" in block:
        baseline = load_grid(scenario.path(block["baseline_grid"]))
        event = load_grid(scenario.path(block["event_grid"]))
        aoi = None
        if "aoi_mask" in block:
            aoi = MaskAOI(load_grid(scenario.path(block["aoi_mask"])))
        elif "aoi" in block:
            aoi = BoundingBox(*block["aoi"])
        signed = bool(block.get("signed", False))
        pct = percent_loss(baseline, event, aoi, signed=signed)
        extra = {
            "baseline_grid": block["baseline_grid"],
            "event_grid": block["event_grid"],
            "aoi": block.get("aoi") or block.get("aoi_mask"),
            "signed": signed,
        }
    else:
        pct = float(block["pct_loss"])
    shock = luminosity_shock(
        pct, c.f_utilities, target, float(block.get("scaling", 1.0)), scenario.event_id, c
    )
    shock.assumptions.update(extra)
    return shock
