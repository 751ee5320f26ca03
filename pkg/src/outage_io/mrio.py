"""Static input-output algebra on a multi-regional table.

Covers the demand-driven Leontief model, the supply-driven Ghosh model and the
inoperability formulation.  Inverses are held as LU factorisations; the dense
inverse matrix is only formed when a caller asks for ``.matrix``.

Money in a :class:`MrioTable` is expressed in units of ``currency_scale`` US$;
nothing in this module converts units.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import (
    DimensionMismatch,
    NegativeEntry,
    NotProductive,
    PerturbationExceedsOutput,
    ShapeMismatch,
    SingularSystem,
    TargetNotFound,
    ZeroOutputWithFlows,
)

IDENTITY_TOL = 1e-10
CONSISTENCY_TOL = 1e-6
POWER_ITER_TOL = 1e-6
POWER_ITER_MAX = 10_000
_TINY = 1e-150


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class MrioTable:
    """Regions x sectors economy.

    ``region_sectors`` fixes the index space: entry ``k`` is
    ``(region_id, sector_id, sector_name)`` for row/column ``k`` of every
    matrix and vector.
    """

    region_sectors: tuple[tuple[str, str, str], ...]
    A: np.ndarray
    F: np.ndarray
    x: np.ndarray
    v: np.ndarray
    base_year: int | None = None
    currency_scale: float = 1.0
    identity_tol: float = IDENTITY_TOL
    consistency_tol: float = CONSISTENCY_TOL
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.region_sectors)
        object.__setattr__(self, "region_sectors", tuple(tuple(rs) for rs in self.region_sectors))
        for name in ("A", "F", "x", "v"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if self.A.shape != (n, n):
            raise ShapeMismatch(f"A has shape {self.A.shape}, expected ({n}, {n})")
        for name in ("F", "x", "v"):
            if getattr(self, name).shape != (n,):
                raise ShapeMismatch(f"{name} has length {getattr(self, name).shape}, expected {n}")
        if (self.A < 0).any():
            i, j = np.argwhere(self.A < 0)[0]
            raise NegativeEntry(f"A[{i},{j}] = {self.A[i, j]!r} is negative")
        if (self.x < 0).any():
            raise NegativeEntry(f"gross output x[{int(np.argmax(self.x < 0))}] is negative")
        _check_zero_output_flows(self.A, self.x)
        if self.currency_scale <= 0:
            raise ValueError("currency_scale must be positive")

    @property
    def n(self) -> int:
        return len(self.region_sectors)

    @property
    def regions(self) -> list[str]:
        seen: dict[str, None] = {}
        for region, _, _ in self.region_sectors:
            seen.setdefault(region)
        return list(seen)

    @cached_property
    def _index(self) -> dict[tuple[str, str], int]:
        return {(r, s): k for k, (r, s, _) in enumerate(self.region_sectors)}

    def index_of(self, region: str, sector: str) -> int:
        try:
            return self._index[(region, sector)]
        except KeyError:
            raise TargetNotFound(f"no sector {sector!r} in region {region!r}") from None

    def region_indices(self, region: str) -> np.ndarray:
        idx = np.array([k for k, (r, _, _) in enumerate(self.region_sectors) if r == region], dtype=int)
        if idx.size == 0:
            raise TargetNotFound(f"region {region!r} not present in table")
        return idx

    @property
    def zero_output(self) -> np.ndarray:
        """Mask of carried sectors with no output and no flows."""
        return self.x == 0

    def consistency_residual(self) -> float:
        """``max|x - (A x + F)| / max|x|``."""
        scale = np.abs(self.x).max()
        if scale == 0:
            return 0.0
        return float(np.abs(self.x - (self.A @ self.x + self.F)).max() / scale)

    def value_added_residual(self) -> float:
        """``max|v - x (1 - colsum A)| / max|x|``."""
        scale = np.abs(self.x).max()
        if scale == 0:
            return 0.0
        implied = self.x * (1.0 - self.A.sum(axis=0))
        return float(np.abs(self.v - implied).max() / scale)

    @cached_property
    def leontief(self) -> "LeontiefInverse":
        return leontief_inverse(self.A)

    @cached_property
    def ghosh(self) -> "GhoshSystem":
        return ghosh_system(self.A, self.x)


def _check_zero_output_flows(A: np.ndarray, x: np.ndarray) -> None:
    zero = np.flatnonzero(x == 0)
    for i in zero:
        if A[:, i].any() or A[i, :].any():
            raise ZeroOutputWithFlows(f"sector {i} has zero gross output but nonzero coefficients")


def _as_square(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    return A


def _as_vector(v, n: int, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (n,):
        raise DimensionMismatch(f"{name} has shape {v.shape}, expected ({n},)")
    return v


def build_technical_coefficients(T, x) -> np.ndarray:
    """Technical coefficients ``A_ij = T_ij / x_j`` from a transactions matrix."""
    T = _as_square(T)
    x = _as_vector(x, T.shape[0], "x")
    A = np.zeros_like(T)
    pos = x > 0
    bad = ~pos & (T != 0).any(axis=0)
    if bad.any():
        j = int(np.flatnonzero(bad)[0])
        raise ZeroOutputWithFlows(f"column {j} has x = {x[j]!r} but nonzero transactions")
    A[:, pos] = T[:, pos] / x[pos]
    return A


@dataclass(frozen=True)
class ProductivenessReport:
    max_col_sum: float
    spectral_radius: float
    iterations: int
    converged: bool
    passed: bool

    def as_dict(self) -> dict:
        return {
            "max_col_sum": self.max_col_sum,
            "spectral_radius": self.spectral_radius,
            "iterations": self.iterations,
            "converged": self.converged,
            "passed": self.passed,
        }


def spectral_radius_bounds(A, tol: float = POWER_ITER_TOL, max_iter: int = POWER_ITER_MAX):
    """Collatz-Wielandt bounds on the Perron root of a nonnegative matrix.

    Power iteration runs on ``A + I``; the shift keeps the iterate strictly
    positive and removes periodicity, so reducible or cyclic matrices still
    converge.  Returns ``(lower, upper, iterations, converged)``.
    """
    A = _as_square(A)
    n = A.shape[0]
    v = np.ones(n)
    lo = hi = 0.0
    for it in range(1, max_iter + 1):
        w = A @ v + v
        ratios = w / v
        lo, hi = ratios.min() - 1.0, ratios.max() - 1.0
        if hi - lo < tol:
            return lo, hi, it, True
        # floor keeps the iterate positive when a reducible block decays away
        v = np.maximum(w / w.max(), _TINY)
    return lo, hi, max_iter, False


def productiveness_check(A, tol: float = POWER_ITER_TOL, max_iter: int = POWER_ITER_MAX) -> ProductivenessReport:
    A = _as_square(A)
    if (A < 0).any():
        i, j = np.argwhere(A < 0)[0]
        raise NegativeEntry(f"A[{i},{j}] = {A[i, j]!r} is negative")
    max_col = float(A.sum(axis=0).max()) if A.size else 0.0
    lo, hi, iters, converged = spectral_radius_bounds(A, tol, max_iter)
    rho = 0.5 * (lo + hi) if converged else hi
    # the upper bound decides, so a non-productive matrix can never pass
    passed = bool(hi < 1.0 or max_col < 1.0)
    return ProductivenessReport(max_col, float(max(rho, 0.0)), iters, converged, passed)


def _require_productive(A: np.ndarray) -> None:
    report = productiveness_check(A)
    if not report.passed:
        raise NotProductive(
            f"spectral radius {report.spectral_radius:.6g} >= 1 (max column sum {report.max_col_sum:.6g})"
        )


def _factor(M: np.ndarray, what: str):
    lu, piv = lu_factor(M, check_finite=True)
    diag = np.abs(np.diag(lu))
    if diag.size and diag.min() <= np.finfo(float).eps * M.shape[0] * max(diag.max(), 1.0):
        raise SingularSystem(f"{what} is numerically singular")
    return lu, piv


class LeontiefInverse:
    """``L = (I - A)^-1`` held as an LU factorisation of ``I - A``."""

    def __init__(self, A: np.ndarray):
        self.A = _frozen(A)
        self.n = self.A.shape[0]
        self._lu = _factor(np.eye(self.n) - self.A, "I - A")

    def solve(self, dF) -> np.ndarray:
        return lu_solve(self._lu, _as_vector(dF, self.n, "dF"))

    @cached_property
    def matrix(self) -> np.ndarray:
        return _frozen(lu_solve(self._lu, np.eye(self.n)))

    def residual(self) -> float:
        """``max|L (I - A) - I|``."""
        return float(np.abs(self.matrix @ (np.eye(self.n) - self.A) - np.eye(self.n)).max())


def leontief_inverse(A, check: bool = True) -> LeontiefInverse:
    A = _as_square(A)
    if check:
        _require_productive(A)
    return LeontiefInverse(A)


def leontief_delta(L: LeontiefInverse, dF) -> np.ndarray:
    """Output change ``L dF`` for a final-demand change ``dF``."""
    return L.solve(dF)


class GhoshSystem:
    """Direct-allocations matrix ``B`` and the Ghosh inverse ``G = (I - B)^-1``."""

    def __init__(self, B: np.ndarray):
        self.B = _frozen(B)
        self.n = self.B.shape[0]
        self._lu = _factor(np.eye(self.n) - self.B, "I - B")

    def row_solve(self, v_row) -> np.ndarray:
        # v G  ==  solve((I - B)^T, v)
        return lu_solve(self._lu, _as_vector(v_row, self.n, "v"), trans=1)

    @cached_property
    def G(self) -> np.ndarray:
        return _frozen(lu_solve(self._lu, np.eye(self.n)))


def allocation_matrix(A, x) -> np.ndarray:
    """``diag(x)^-1 A diag(x)``; rows/columns of zero-output sectors stay zero."""
    A = _as_square(A)
    x = _as_vector(x, A.shape[0], "x")
    if (x < 0).any():
        raise NegativeEntry("gross output must be nonnegative")
    _check_zero_output_flows(A, x)
    pos = x > 0
    B = np.zeros_like(A)
    xp = x[pos]
    B[np.ix_(pos, pos)] = A[np.ix_(pos, pos)] * xp[None, :] / xp[:, None]
    return B


def ghosh_system(A, x) -> GhoshSystem:
    B = allocation_matrix(A, x)
    try:
        return GhoshSystem(B)
    except SingularSystem as exc:
        raise NotProductive(str(exc)) from exc


def ghosh_output(v_row, G: GhoshSystem) -> np.ndarray:
    """Row-vector product ``v G``."""
    return G.row_solve(v_row)


@dataclass(frozen=True, eq=False)
class InoperabilitySystem:
    A_star: np.ndarray
    c_star: np.ndarray
    q: np.ndarray
    x: np.ndarray

    @property
    def lost_output(self) -> np.ndarray:
        """``diag(x) q``: output lost per sector, in table currency units."""
        return self.x * self.q


def inoperability_system(A, x, dx, ghosh: GhoshSystem | None = None) -> InoperabilitySystem:
    """Inoperability ``q = (I - A*)^-1 c*`` for a demand reduction ``dx``.

    ``A* = diag(x)^-1 A diag(x)`` is the same matrix as the Ghosh ``B``, so an
    already factorised :class:`GhoshSystem` for the same ``(A, x)`` can be
    passed in to skip a factorisation.
    """
    A = _as_square(A)
    n = A.shape[0]
    x = _as_vector(x, n, "x")
    dx = _as_vector(dx, n, "dx")
    if (dx < 0).any():
        raise NegativeEntry(f"perturbation dx[{int(np.argmax(dx < 0))}] is negative")
    over = dx > x
    if over.any():
        i = int(np.flatnonzero(over)[0])
        raise PerturbationExceedsOutput(f"dx[{i}] = {dx[i]!r} exceeds output x[{i}] = {x[i]!r}")
    if ghosh is None:
        ghosh = ghosh_system(A, x)
    pos = x > 0
    c_star = np.zeros(n)
    c_star[pos] = dx[pos] / x[pos]
    q = lu_solve(ghosh._lu, c_star)
    return InoperabilitySystem(ghosh.B, _frozen(c_star), _frozen(q), _frozen(x))
