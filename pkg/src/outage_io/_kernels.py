"""Hot inner loops, each in a numba and a pure-numpy flavour.

The numba versions are used when numba imports cleanly and ``OUTAGE_IO_NO_JIT``
is unset (or ``0``).  Both flavours are always importable under their suffixed
names so the benchmark and the equivalence tests can drive them side by side.

Raster reductions accumulate one partial sum per row and then add the row
partials in row order, so results do not depend on the thread count.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_JIT = numba is not None and os.environ.get("OUTAGE_IO_NO_JIT", "") in ("", "0")

if numba is not None and "NUMBA_THREADING_LAYER" not in os.environ:
    # OpenMP is safe to enter from several Python threads at once
    numba.config.THREADING_LAYER = "omp"


def backend() -> str:
    return "numba" if USE_JIT else "numpy"


def configure_threads(n: int | None = None) -> int:
    """Cap kernel parallelism; ``0``/``None`` reads ``OUTAGE_IO_THREADS`` then falls back to auto."""
    if n is None:
        n = int(os.environ.get("OUTAGE_IO_THREADS", "0") or 0)
    if n <= 0:
        n = os.cpu_count() or 1
    if USE_JIT:
        n = min(n, numba.config.NUMBA_NUM_THREADS)
        numba.set_num_threads(n)
    return n


# ---------------------------------------------------------------------------
# numpy reference flavour
# ---------------------------------------------------------------------------


def _invalid_np(cells, nodata):
    return (cells == nodata) | np.isnan(cells)


def clamp_negative_np(cells, nodata):
    """Zero out negative valid cells in place; return how many were clamped."""
    neg = (cells < 0) & ~_invalid_np(cells, nodata)
    cells[neg] = 0.0
    return int(neg.sum())


def valid_max_np(cells, nodata):
    valid = ~_invalid_np(cells, nodata)
    count = int(valid.sum())
    if count == 0:
        return 0.0, 0
    return float(cells[valid].max()), count


def scale_valid_np(cells, nodata, factor):
    out = cells.copy()
    valid = ~_invalid_np(cells, nodata)
    out[valid] = cells[valid] * factor
    return out


def clamped_difference_np(base, event, nodata, signed):
    invalid = _invalid_np(base, nodata) | _invalid_np(event, nodata)
    diff = base - event
    if not signed:
        diff = np.maximum(diff, 0.0)
    return np.where(invalid, nodata, diff)


def loss_totals_np(base, event, nodata, signed):
    invalid = _invalid_np(base, nodata) | _invalid_np(event, nodata)
    diff = base - event
    if not signed:
        diff = np.maximum(diff, 0.0)
    num_rows = np.where(invalid, 0.0, diff).sum(axis=1)
    den_rows = np.where(invalid, 0.0, base).sum(axis=1)
    num = 0.0
    den = 0.0
    for r in range(num_rows.shape[0]):
        num += num_rows[r]
        den += den_rows[r]
    return float(num), float(den), int((~invalid).sum())


def step_hours_np(t_hours, counts, end_hours):
    edges = np.append(t_hours[1:], end_hours)
    return float(np.dot(counts, edges - t_hours))


def trapezoid_hours_np(t_hours, counts, end_hours):
    dt = np.diff(t_hours)
    inner = float(np.dot(0.5 * (counts[:-1] + counts[1:]), dt))
    return inner + float(counts[-1] * (end_hours - t_hours[-1]))


# ---------------------------------------------------------------------------
# numba flavour
# ---------------------------------------------------------------------------

if numba is not None:
    from numba import njit, prange

    @njit(cache=True)
    def _bad(v, nodata):
        return v == nodata or np.isnan(v)

    @njit(cache=True)
    def clamp_negative_nb(cells, nodata):
        count = 0
        nr, nc = cells.shape
        for i in range(nr):
            for j in range(nc):
                v = cells[i, j]
                if v < 0.0 and not _bad(v, nodata):
                    cells[i, j] = 0.0
                    count += 1
        return count

    @njit(cache=True)
    def valid_max_nb(cells, nodata):
        best = -np.inf
        count = 0
        nr, nc = cells.shape
        for i in range(nr):
            for j in range(nc):
                v = cells[i, j]
                if not _bad(v, nodata):
                    count += 1
                    if v > best:
                        best = v
        if count == 0:
            return 0.0, 0
        return best, count

    @njit(cache=True, parallel=True)
    def scale_valid_nb(cells, nodata, factor):
        nr, nc = cells.shape
        out = np.empty_like(cells)
        for i in prange(nr):
            for j in range(nc):
                v = cells[i, j]
                out[i, j] = v if _bad(v, nodata) else v * factor
        return out

    @njit(cache=True, parallel=True)
    def clamped_difference_nb(base, event, nodata, signed):
        nr, nc = base.shape
        out = np.empty_like(base)
        for i in prange(nr):
            for j in range(nc):
                b = base[i, j]
                e = event[i, j]
                if _bad(b, nodata) or _bad(e, nodata):
                    out[i, j] = nodata
                else:
                    d = b - e
                    if not signed and d < 0.0:
                        d = 0.0
                    out[i, j] = d
        return out

    @njit(cache=True, parallel=True)
    def _loss_rows_nb(base, event, nodata, signed, num_rows, den_rows, cnt_rows):
        nr, nc = base.shape
        for i in prange(nr):
            num = 0.0
            den = 0.0
            cnt = 0
            for j in range(nc):
                b = base[i, j]
                e = event[i, j]
                if _bad(b, nodata) or _bad(e, nodata):
                    continue
                d = b - e
                if not signed and d < 0.0:
                    d = 0.0
                num += d
                den += b
                cnt += 1
            num_rows[i] = num
            den_rows[i] = den
            cnt_rows[i] = cnt

    @njit(cache=True)
    def loss_totals_nb(base, event, nodata, signed):
        nr = base.shape[0]
        num_rows = np.zeros(nr)
        den_rows = np.zeros(nr)
        cnt_rows = np.zeros(nr, dtype=np.int64)
        _loss_rows_nb(base, event, nodata, signed, num_rows, den_rows, cnt_rows)
        num = 0.0
        den = 0.0
        cnt = 0
        for i in range(nr):
            num += num_rows[i]
            den += den_rows[i]
            cnt += cnt_rows[i]
        return num, den, cnt

    @njit(cache=True)
    def step_hours_nb(t_hours, counts, end_hours):
        total = 0.0
        n = t_hours.shape[0]
        for i in range(n):
            nxt = t_hours[i + 1] if i + 1 < n else end_hours
            total += counts[i] * (nxt - t_hours[i])
        return total

    @njit(cache=True)
    def trapezoid_hours_nb(t_hours, counts, end_hours):
        total = 0.0
        n = t_hours.shape[0]
        for i in range(n - 1):
            total += 0.5 * (counts[i] + counts[i + 1]) * (t_hours[i + 1] - t_hours[i])
        return total + counts[n - 1] * (end_hours - t_hours[n - 1])


if USE_JIT:
    clamp_negative = clamp_negative_nb
    valid_max = valid_max_nb
    scale_valid = scale_valid_nb
    clamped_difference = clamped_difference_nb
    loss_totals = loss_totals_nb
    step_hours = step_hours_nb
    trapezoid_hours = trapezoid_hours_nb
else:
    clamp_negative = clamp_negative_np
    valid_max = valid_max_np
    scale_valid = scale_valid_np
    clamped_difference = clamped_difference_np
    loss_totals = loss_totals_np
    step_hours = step_hours_np
    trapezoid_hours = trapezoid_hours_np
