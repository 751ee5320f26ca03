"""Synthetic desk-scale data shipped with the package.

``python -m outage_io.fixtures DIR`` regenerates everything under ``DIR``
(the package keeps a copy in ``outage_io/data``).  The tables are built balanced
by construction: ``x = (I - A)^-1 F`` and ``v = x (1 - colsum A)``.
"""

from __future__ import annotations

import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .ingest import write_mrio_bundle
from .mrio import MrioTable
from .raster import LuminosityGrid, write_grid

UTILITIES = "Electricity, Gas and Water"
SECTORS = ("Agriculture", "Mining and Quarrying", "Manufacturing", UTILITIES, "Services")

# Hurricane Ian customer outages, point-in-time situation reports (daily reports at noon).
IAN_OUTAGES = (
    ("2022-09-28T16:00", 846000),
    ("2022-09-29T08:00", 2600000),
    ("2022-09-29T17:00", 2700000),
    ("2022-09-30T17:00", 2114000),
    ("2022-10-01T10:00", 1787000),
    ("2022-10-01T13:00", 1414000),
    ("2022-10-02T09:00", 919000),
    ("2022-10-02T16:00", 820000),
    ("2022-10-03T09:00", 575000),
    ("2022-10-03T15:00", 556000),
    ("2022-10-04T09:00", 423000),
    ("2022-10-04T15:00", 394000),
    ("2022-10-05T09:00", 302000),
    ("2022-10-05T15:00", 293000),
    ("2022-10-06T12:00", 208000),
    ("2022-10-07T12:00", 141000),
    ("2022-10-08T12:00", 69000),
    ("2022-10-09T12:00", 48000),
)
IAN_WINDOW = ("2022-09-28T16:00", "2022-10-10T00:00")


def data_dir() -> Path:
    return Path(str(resources.files("outage_io") / "data"))


def two_sector_table() -> MrioTable:
    """The 2-sector textbook economy: A=[[.2,.3],[.4,.1]], x=[105,80], F=[60,30]."""
    A = np.array([[0.2, 0.3], [0.4, 0.1]])
    x = np.array([105.0, 80.0])
    F = np.array([60.0, 30.0])
    v = np.array([42.0, 48.0])
    labels = (("R1", "utilities", "Utilities"), ("R1", "manufacturing", "Manufacturing"))
    return MrioTable(labels, A, F, x, v, base_year=2017, currency_scale=1.0)


_DOMESTIC_BLOCK = np.array(
    [
        [0.10, 0.02, 0.08, 0.01, 0.02],
        [0.02, 0.08, 0.10, 0.12, 0.01],
        [0.12, 0.10, 0.25, 0.06, 0.08],
        [0.04, 0.05, 0.04, 0.10, 0.03],
        [0.10, 0.08, 0.12, 0.09, 0.22],
    ]
)
_CROSS_BLOCK = np.full((5, 5), 0.01) + 0.01 * np.eye(5)

# final demand in US$ Mn; the USA utilities entry is the 533 Bn used by the shocks
_F_USA = np.array([180_000.0, 95_000.0, 2_400_000.0, 533_000.0, 14_800_000.0])
_F_ROW = np.array([1_900_000.0, 800_000.0, 9_500_000.0, 1_600_000.0, 38_000_000.0])


def two_region_table(coupled: bool = True) -> MrioTable:
    """USA + rest-of-world, 5 sectors each, values in US$ Mn.

    With ``coupled=False`` the off-diagonal regional blocks are zero.
    """
    cross = _CROSS_BLOCK if coupled else np.zeros((5, 5))
    A = np.block([[_DOMESTIC_BLOCK, cross], [cross, _DOMESTIC_BLOCK * 0.9]])
    F = np.concatenate([_F_USA, _F_ROW])
    x = np.linalg.solve(np.eye(10) - A, F)
    v = x * (1.0 - A.sum(axis=0))
    labels = tuple((r, s, s) for r in ("USA", "ROW") for s in SECTORS)
    meta = {"description": "synthetic two-region desk fixture", "final_demand_categories": ["all"]}
    return MrioTable(labels, A, F, x, v, base_year=2017, currency_scale=1e6, meta=meta)


def blackout_grids(n: int = 10, hole: int = 3, level: float = 10.0) -> tuple[LuminosityGrid, LuminosityGrid]:
    """Uniform baseline with a ``hole`` x ``hole`` block going dark in the event grid."""
    base = np.full((n, n), level)
    event = base.copy()
    r0 = (n - hole) // 2
    event[r0 : r0 + hole, r0 : r0 + hole] = 0.0
    kw = dict(ncols=n, nrows=n, x_origin=-82.0, y_origin=26.0, cellsize=0.1, nodata_value=-9999.0)
    return LuminosityGrid(cells=base, **kw), LuminosityGrid(cells=event, **kw)


def ian_grids() -> tuple[LuminosityGrid, LuminosityGrid]:
    """Synthetic Fort Myers-area grids tuned so the lost share is 161/533000.

    Column 0 is NODATA (open water); one cell brightens and is clamped away.
    """
    nrows, ncols, level = 40, 51, 20.0
    base = np.full((nrows, ncols), level)
    base[:, 0] = -9999.0
    event = base.copy()
    valid = nrows * (ncols - 1)
    lost = 161.0 / 533_000.0 * valid * level
    event[20, 25] = level - lost
    event[5, 40] = level + 3.0
    kw = dict(ncols=ncols, nrows=nrows, x_origin=-82.55, y_origin=26.0, cellsize=0.02, nodata_value=-9999.0)
    return LuminosityGrid(cells=base, **kw), LuminosityGrid(cells=event, **kw)


def _scenarios() -> dict[str, dict]:
    return {
        "fixture.json": {
            "event_id": "fixture",
            "shocked_region": "R1",
            "utilities_sector_id": "utilities",
            "household": {"total_consumer_hours": 600.0},
            "kwh": {"kwh_lost": 25.0},
            "luminosity": {
                "baseline_grid": "../grids/blackout_baseline.asc",
                "event_grid": "../grids/blackout_event.asc",
                "aoi": [-82.0, 26.0, -81.0, 27.0],
            },
            "constants": {
                "f_utilities": 60.0,
                "population": 1.0,
                "net_generation_kwh": 1000.0,
                "residential_share": 0.5,
                "value_per_consumer_hour": 0.01,
            },
        },
        "fixture_kwh_only.json": {
            "event_id": "fixture-kwh",
            "shocked_region": "R1",
            "utilities_sector_id": "utilities",
            "kwh": {"kwh_lost": 25.0},
            "constants": {"f_utilities": 60.0, "net_generation_kwh": 1000.0, "residential_share": 0.5},
        },
        "ian.json": {
            "event_id": "ian-2022",
            "description": "Hurricane Ian (2022) blackouts",
            "shocked_region": "USA",
            "utilities_sector_id": UTILITIES,
            "household": {
                "series_path": "../ian_outages.csv",
                "window_start": IAN_WINDOW[0],
                "window_end": IAN_WINDOW[1],
                "integration": "step",
                "total_consumer_hours": 237e6,
            },
            "kwh": {"kwh_lost": 3.95e8},
            "luminosity": {
                "baseline_grid": "../grids/ian_baseline.asc",
                "event_grid": "../grids/ian_event.asc",
                "aoi": [-82.55, 26.0, -81.53, 26.8],
            },
            "validation_estimates": [{"label": "Texas 2021 indirect cost (comparable consumer-hours)", "value": 664e6}],
        },
        "texas.json": {
            "event_id": "texas-2021",
            "description": "2021 Texas blackouts",
            "shocked_region": "USA",
            "utilities_sector_id": UTILITIES,
            "household": {"total_consumer_hours": 227e6},
            "kwh": {"kwh_lost": 3.97e9},
            "luminosity": {"pct_loss": 148e6 / 533e9},
            "validation_estimates": [{"label": "Indirect cost estimate", "value": 664e6}],
        },
        "isaias.json": {
            "event_id": "isaias-2020",
            "description": "Tropical Storm Isaias (2020) blackouts",
            "shocked_region": "USA",
            "utilities_sector_id": UTILITIES,
            "household": {"total_consumer_hours": 281e6},
            "kwh": {"kwh_lost": 3.51e8},
            "luminosity": {"pct_loss": 142.2e6 / 533e9},
            "validation_estimates": [{"label": "Indirect cost estimate (comparable consumer-hours)", "value": 664e6}],
        },
    }


def write_all(root) -> Path:
    root = Path(root)
    write_mrio_bundle(two_sector_table(), root / "bundles" / "two_sector")
    write_mrio_bundle(two_region_table(True), root / "bundles" / "two_region")
    write_mrio_bundle(two_region_table(False), root / "bundles" / "two_region_block")

    (root / "grids").mkdir(parents=True, exist_ok=True)
    base, event = blackout_grids()
    write_grid(base, root / "grids" / "blackout_baseline.asc")
    write_grid(event, root / "grids" / "blackout_event.asc")
    base, event = ian_grids()
    write_grid(base, root / "grids" / "ian_baseline.asc")
    write_grid(event, root / "grids" / "ian_event.asc")

    lines = ["timestamp,customers"] + [f"{t},{c}" for t, c in IAN_OUTAGES]
    (root / "ian_outages.csv").write_text("\n".join(lines) + "\n")

    (root / "scenarios").mkdir(parents=True, exist_ok=True)
    for name, doc in _scenarios().items():
        (root / "scenarios" / name).write_text(json.dumps(doc, indent=2) + "\n")
    return root


if __name__ == "__main__":
    write_all(sys.argv[1] if len(sys.argv) > 1 else data_dir())
