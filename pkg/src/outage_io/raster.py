"""Nighttime radiance grids: ESRI ASCII I/O, clipping, normalisation and loss.

Grids are row-major with row 0 at the north edge, as in the ASCII format.
Cells equal to ``nodata_value`` (or NaN) are invalid throughout.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import (
    EmptyIntersection,
    GridMismatch,
    MalformedHeader,
    MissingFile,
    NonNumericCell,
    NoValidCells,
    RowLengthMismatch,
    ZeroBaseline,
)

log = logging.getLogger(__name__)

HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "NODATA_value")
DEFAULT_NODATA = -9999.0
CONGRUENCE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LuminosityGrid:
    ncols: int
    nrows: int
    x_origin: float
    y_origin: float
    cellsize: float
    nodata_value: float
    cells: np.ndarray
    clamped: int = 0

    def __post_init__(self):
        cells = np.array(self.cells, dtype=float, copy=True)
        if cells.shape != (self.nrows, self.ncols):
            raise RowLengthMismatch(f"cells have shape {cells.shape}, header says ({self.nrows}, {self.ncols})")
        if not self.cellsize > 0:
            raise MalformedHeader(f"cellsize must be positive, got {self.cellsize!r}")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def valid(self) -> np.ndarray:
        return ~((self.cells == self.nodata_value) | np.isnan(self.cells))

    @property
    def n_valid(self) -> int:
        return int(self.valid.sum())

    @property
    def extent(self) -> tuple[float, float, float, float]:
        return (
            self.x_origin,
            self.y_origin,
            self.x_origin + self.ncols * self.cellsize,
            self.y_origin + self.nrows * self.cellsize,
        )

    def with_cells(self, cells: np.ndarray) -> "LuminosityGrid":
        return replace(self, cells=cells, clamped=0)

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Longitudes of column centres and latitudes of row centres."""
        lon = self.x_origin + (np.arange(self.ncols) + 0.5) * self.cellsize
        lat = self.y_origin + (self.nrows - np.arange(self.nrows) - 0.5) * self.cellsize
        return lon, lat


@dataclass(frozen=True)
class BoundingBox:
    min_lon: float
    min_lat: float
    max_lon: float
    max_lat: float

    def __post_init__(self):
        if not (self.min_lon <= self.max_lon and self.min_lat <= self.max_lat):
            raise ValueError(f"AOI bounds are not ordered: {self}")


@dataclass(frozen=True, eq=False)
class MaskAOI:
    """AOI given as a grid congruent with the subject; nonzero valid cells are inside."""

    mask: LuminosityGrid


AreaOfInterest = BoundingBox | MaskAOI


def _parse_number(token: str, where: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise NonNumericCell(f"{where}: {token!r} is not a number") from None


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def parse_grid(text: str, source: str = "<string>") -> LuminosityGrid:
    lines = text.splitlines()
    header: dict[str, float] = {}
    pos = 0
    while pos < len(lines):
        parts = lines[pos].split()
        if not parts:
            pos += 1
            continue
        key = parts[0].lower()
        if _is_number(key):
            break
        if len(parts) != 2:
            raise MalformedHeader(f"{source}:{pos + 1}: expected 'key value', got {lines[pos]!r}")
        try:
            header[key] = float(parts[1])
        except ValueError:
            raise MalformedHeader(f"{source}:{pos + 1}: bad value for {parts[0]}") from None
        pos += 1

    for key in ("ncols", "nrows", "cellsize"):
        if key not in header:
            raise MalformedHeader(f"{source}: missing header key {key}")
    ncols, nrows = header["ncols"], header["nrows"]
    if ncols != int(ncols) or nrows != int(nrows) or ncols < 1 or nrows < 1:
        raise MalformedHeader(f"{source}: ncols/nrows must be positive integers")
    ncols, nrows = int(ncols), int(nrows)
    cs = header["cellsize"]
    if not cs > 0:
        raise MalformedHeader(f"{source}: cellsize must be positive")
    if "xllcorner" in header and "yllcorner" in header:
        x0, y0 = header["xllcorner"], header["yllcorner"]
    elif "xllcenter" in header and "yllcenter" in header:
        x0, y0 = header["xllcenter"] - cs / 2, header["yllcenter"] - cs / 2
    else:
        raise MalformedHeader(f"{source}: missing xllcorner/yllcorner")
    nodata = header.get("nodata_value", DEFAULT_NODATA)

    cells = np.empty((nrows, ncols))
    r = 0
    for lineno in range(pos, len(lines)):
        parts = lines[lineno].split()
        if not parts:
            continue
        if r >= nrows:
            raise RowLengthMismatch(f"{source}:{lineno + 1}: more than {nrows} data rows")
        if len(parts) != ncols:
            raise RowLengthMismatch(f"{source}:{lineno + 1}: {len(parts)} values, expected {ncols}")
        cells[r] = [_parse_number(p, f"{source}:{lineno + 1}") for p in parts]
        r += 1
    if r != nrows:
        raise RowLengthMismatch(f"{source}: {r} data rows, expected {nrows}")

    clamped = _kernels.clamp_negative(cells, float(nodata))
    if clamped:
        log.warning("%s: clamped %d negative radiance value(s) to 0", source, clamped)
    return LuminosityGrid(ncols, nrows, x0, y0, cs, float(nodata), cells, int(clamped))


def load_grid(path) -> LuminosityGrid:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"grid file not found: {path}")
    return parse_grid(path.read_text(), str(path))


def format_grid(grid: LuminosityGrid) -> str:
    out = [
        f"ncols {grid.ncols}",
        f"nrows {grid.nrows}",
        f"xllcorner {grid.x_origin!r}",
        f"yllcorner {grid.y_origin!r}",
        f"cellsize {grid.cellsize!r}",
        f"NODATA_value {grid.nodata_value!r}",
    ]
    for row in grid.cells:
        out.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(out) + "\n"


def write_grid(grid: LuminosityGrid, path) -> None:
    Path(path).write_text(format_grid(grid))


def congruent(a: LuminosityGrid, b: LuminosityGrid, tol: float = CONGRUENCE_TOL) -> bool:
    return (
        a.ncols == b.ncols
        and a.nrows == b.nrows
        and math.isclose(a.x_origin, b.x_origin, rel_tol=0, abs_tol=tol)
        and math.isclose(a.y_origin, b.y_origin, rel_tol=0, abs_tol=tol)
        and math.isclose(a.cellsize, b.cellsize, rel_tol=0, abs_tol=tol)
    )


def _require_congruent(a: LuminosityGrid, b: LuminosityGrid) -> None:
    if not congruent(a, b):
        raise GridMismatch(
            f"grids differ: {a.nrows}x{a.ncols} @ ({a.x_origin}, {a.y_origin}, {a.cellsize}) vs "
            f"{b.nrows}x{b.ncols} @ ({b.x_origin}, {b.y_origin}, {b.cellsize})"
        )


def _aligned(grid: LuminosityGrid, other: LuminosityGrid) -> np.ndarray:
    """``other``'s cells expressed with ``grid``'s NODATA sentinel."""
    if other.nodata_value == grid.nodata_value:
        return other.cells
    return np.where(other.valid, other.cells, grid.nodata_value)


def clip(grid: LuminosityGrid, aoi: AreaOfInterest) -> LuminosityGrid:
    """Restrict ``grid`` to cells whose centres fall inside ``aoi``.

    A bounding box yields the covering sub-grid.  A mask keeps the full extent
    and sets cells outside the mask to NODATA.
    """
    if isinstance(aoi, MaskAOI):
        _require_congruent(grid, aoi.mask)
        inside = aoi.mask.valid & (aoi.mask.cells != 0)
        if not inside.any():
            raise EmptyIntersection("mask AOI selects no cells")
        return grid.with_cells(np.where(inside, grid.cells, grid.nodata_value))

    eps = 1e-9 * grid.cellsize
    lon, lat = grid.cell_centers()
    cols = np.flatnonzero((lon >= aoi.min_lon - eps) & (lon <= aoi.max_lon + eps))
    rows = np.flatnonzero((lat >= aoi.min_lat - eps) & (lat <= aoi.max_lat + eps))
    if cols.size == 0 or rows.size == 0:
        raise EmptyIntersection(f"AOI {aoi} does not contain any cell centre of the grid")
    c0, c1, r0, r1 = cols[0], cols[-1], rows[0], rows[-1]
    return LuminosityGrid(
        ncols=int(c1 - c0 + 1),
        nrows=int(r1 - r0 + 1),
        x_origin=grid.x_origin + c0 * grid.cellsize,
        y_origin=grid.y_origin + (grid.nrows - 1 - r1) * grid.cellsize,
        cellsize=grid.cellsize,
        nodata_value=grid.nodata_value,
        cells=grid.cells[r0 : r1 + 1, c0 : c1 + 1],
    )


def normalize(grid: LuminosityGrid) -> LuminosityGrid:
    """Scale valid cells by the maximum valid value, so they land in [0, 1]."""
    vmax, count = _kernels.valid_max(grid.cells, grid.nodata_value)
    if count == 0:
        raise NoValidCells("grid has no valid cells to normalise")
    if vmax == 0:
        return grid.with_cells(grid.cells)
    return grid.with_cells(_kernels.scale_valid(grid.cells, grid.nodata_value, 1.0 / vmax))


def difference(baseline: LuminosityGrid, event: LuminosityGrid, signed: bool = False) -> LuminosityGrid:
    """Cell-wise luminosity lost, ``max(baseline - event, 0)``.

    With ``signed=True`` brightening is netted instead of clamped.  A cell that
    is NODATA in either input is NODATA in the result.
    """
    _require_congruent(baseline, event)
    out = _kernels.clamped_difference(
        baseline.cells, _aligned(baseline, event), baseline.nodata_value, signed
    )
    return baseline.with_cells(out)


def loss_totals(
    baseline: LuminosityGrid,
    event: LuminosityGrid,
    aoi: AreaOfInterest | None = None,
    signed: bool = False,
) -> tuple[float, float, int]:
    """``(lost, baseline_total, cells)`` over cells valid in both grids inside ``aoi``."""
    _require_congruent(baseline, event)
    if aoi is not None:
        baseline, event = clip(baseline, aoi), clip(event, aoi)
    num, den, cnt = _kernels.loss_totals(
        baseline.cells, _aligned(baseline, event), baseline.nodata_value, signed
    )
    return float(num), float(den), int(cnt)


def percent_loss(
    baseline: LuminosityGrid,
    event: LuminosityGrid,
    aoi: AreaOfInterest | None = None,
    signed: bool = False,
) -> float:
    """Fraction of baseline luminosity lost inside ``aoi`` (0.09 means 9 %)."""
    num, den, _ = loss_totals(baseline, event, aoi, signed)
    if not den > 0:
        raise ZeroBaseline("baseline luminosity over the AOI sums to zero")
    return num / den
