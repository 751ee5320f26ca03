"""The three impact models and their domestic/global loss attribution.

Shocks are positive loss magnitudes in US$.  They are converted to table units
on the way in and every monetary field of an :class:`ImpactResult` is converted
back to US$ on the way out.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PartitionMismatch, ShockExceedsDemand, ZeroTargetDemand
from .mrio import MrioTable, inoperability_system
from .shocks import DemandShock

MODELS = ("leontief_ghosh", "critical_input", "inoperability")

# relative slack when comparing a shock against the demand it removes
_DEMAND_SLACK = 1e-12


@dataclass(frozen=True)
class RegionPartition:
    shocked_region: str
    domestic: np.ndarray
    rest_of_world: np.ndarray

    @classmethod
    def for_region(cls, table: MrioTable, region: str) -> "RegionPartition":
        dom = table.region_indices(region)
        mask = np.ones(table.n, dtype=bool)
        mask[dom] = False
        return cls(region, dom, np.flatnonzero(mask))

    def check(self, n: int) -> None:
        both = np.concatenate([self.domestic, self.rest_of_world])
        if both.size != n or not np.array_equal(np.sort(both), np.arange(n)):
            raise PartitionMismatch(f"partition for {self.shocked_region!r} does not cover 0..{n - 1} exactly once")


@dataclass(frozen=True)
class SectorLoss:
    index: int
    region: str
    sector: str
    loss: float
    pct_of_output: float


@dataclass(frozen=True, eq=False)
class ImpactResult:
    model: str
    shock: DemandShock
    direct: float
    upstream_indirect: float
    downstream_indirect: float
    total_indirect: float
    per_sector_delta: np.ndarray
    direct_vector: np.ndarray
    upstream_total: np.ndarray
    downstream_total: np.ndarray
    sector_output: np.ndarray
    labels: tuple[tuple[str, str, str], ...]
    domestic_indirect: float = 0.0
    global_indirect: float = 0.0
    rest_of_world_indirect: float = 0.0
    sector_rankings: list[SectorLoss] = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "model": self.model,
            "method": self.shock.method,
            "event_id": self.shock.event_id,
            "target": {"region": self.shock.target[0], "sector": self.shock.target[1]},
            "unit": "USD",
            "direct": self.direct,
            "upstream_indirect": self.upstream_indirect,
            "downstream_indirect": self.downstream_indirect,
            "total_indirect": self.total_indirect,
            "domestic_indirect": self.domestic_indirect,
            "global_indirect": self.global_indirect,
            "shock_assumptions": self.shock.assumptions,
        }


def attribute_regions(result: ImpactResult, partition: RegionPartition):
    """Split indirect losses into the shocked region and the rest of the world.

    Returns ``(domestic, global, rankings)``; ``global`` is assembled as
    ``domestic + rest_of_world`` so the two add up exactly.
    """
    domestic, rest, rankings = _attribute(result, partition)
    return domestic, domestic + rest, rankings


def _attribute(result: ImpactResult, partition: RegionPartition):
    n = result.per_sector_delta.shape[0]
    partition.check(n)
    indirect = result.per_sector_delta - result.direct_vector
    domestic = float(indirect[partition.domestic].sum())
    rest = float(indirect[partition.rest_of_world].sum())
    with np.errstate(divide="ignore", invalid="ignore"):
        pct = np.where(result.sector_output > 0, indirect / result.sector_output, 0.0)
    order = sorted(range(n), key=lambda k: (-indirect[k], k))
    rankings = [
        SectorLoss(k, result.labels[k][0], result.labels[k][1], float(indirect[k]), float(pct[k]))
        for k in order
    ]
    return domestic, rest, rankings


def _target(table: MrioTable, shock: DemandShock) -> tuple[int, float]:
    k = table.index_of(*shock.target)
    return k, shock.amount / table.currency_scale


def _finish(
    model: str,
    table: MrioTable,
    shock: DemandShock,
    direct_vec: np.ndarray,
    up: np.ndarray,
    down: np.ndarray,
    delta: np.ndarray,
    up_ind: float,
    down_ind: float,
    partition: RegionPartition | None,
) -> ImpactResult:
    s = table.currency_scale
    result = ImpactResult(
        model=model,
        shock=shock,
        direct=float(direct_vec.sum()) * s,
        upstream_indirect=up_ind * s,
        downstream_indirect=down_ind * s,
        total_indirect=up_ind * s + down_ind * s,
        per_sector_delta=delta * s,
        direct_vector=direct_vec * s,
        upstream_total=up * s,
        downstream_total=down * s,
        sector_output=table.x * s,
        labels=table.region_sectors,
    )
    if partition is None:
        partition = RegionPartition.for_region(table, shock.target[0])
    domestic, rest, rankings = _attribute(result, partition)
    object.__setattr__(result, "domestic_indirect", domestic)
    object.__setattr__(result, "global_indirect", domestic + rest)
    object.__setattr__(result, "rest_of_world_indirect", rest)
    object.__setattr__(result, "sector_rankings", rankings)
    return result


def _propagate(table: MrioTable, dF: np.ndarray, downstream_scale: float):
    up = table.leontief.solve(dF)
    dv = downstream_scale * dF
    down = table.ghosh.row_solve(dv)
    # the shocked cells appear in both propagations; keep them once
    delta = up + down - dF
    up_ind = float(up.sum() - dF.sum())
    down_ind = float(down.sum() - dv.sum())
    return up, down, delta, up_ind, down_ind


def run_leontief_ghosh(
    table: MrioTable,
    shock: DemandShock,
    partition: RegionPartition | None = None,
    downstream_scale: float = 1.0,
) -> ImpactResult:
    """Upstream (Leontief) plus downstream (Ghosh) losses for a single-sector shock.

    The value-added loss fed to the Ghosh side equals the demand loss times
    ``downstream_scale`` at the same sector.
    """
    k, amount = _target(table, shock)
    if amount > table.F[k] * (1 + _DEMAND_SLACK):
        raise ShockExceedsDemand(
            f"shock {shock.amount!r} US$ exceeds final demand at {shock.target} "
            f"({table.F[k] * table.currency_scale!r} US$)"
        )
    dF = np.zeros(table.n)
    dF[k] = amount
    up, down, delta, up_ind, down_ind = _propagate(table, dF, downstream_scale)
    return _finish("leontief_ghosh", table, shock, dF, up, down, delta, up_ind, down_ind, partition)


def critical_input_vector(table: MrioTable, shock: DemandShock, partition: RegionPartition) -> np.ndarray:
    """Final-demand loss when the target's loss share hits every domestic sector."""
    k, amount = _target(table, shock)
    if not table.F[k] > 0:
        raise ZeroTargetDemand(f"final demand at {shock.target} is zero")
    share = amount / table.F[k]
    if share > 1 + _DEMAND_SLACK:
        raise ShockExceedsDemand(f"shock is {share:.4g} of final demand at {shock.target}")
    dF = np.zeros(table.n)
    dF[partition.domestic] = share * table.F[partition.domestic]
    return dF


def run_critical_input(
    table: MrioTable,
    shock: DemandShock,
    partition: RegionPartition | None = None,
    downstream_scale: float = 1.0,
) -> ImpactResult:
    if partition is None:
        partition = RegionPartition.for_region(table, shock.target[0])
    partition.check(table.n)
    dF = critical_input_vector(table, shock, partition)
    up, down, delta, up_ind, down_ind = _propagate(table, dF, downstream_scale)
    return _finish("critical_input", table, shock, dF, up, down, delta, up_ind, down_ind, partition)


def run_inoperability(
    table: MrioTable,
    shock: DemandShock,
    partition: RegionPartition | None = None,
) -> ImpactResult:
    """Upstream-only loss through the inoperability formulation."""
    k, amount = _target(table, shock)
    dx = np.zeros(table.n)
    dx[k] = amount
    system = inoperability_system(table.A, table.x, dx, ghosh=table.ghosh)
    lost = system.lost_output
    up_ind = float(lost.sum() - amount)
    return _finish(
        "inoperability", table, shock, dx, lost, np.zeros(table.n), lost, up_ind, 0.0, partition
    )


def run_model(model: str, table: MrioTable, shock: DemandShock, **kwargs) -> ImpactResult:
    runners = {
        "leontief_ghosh": run_leontief_ghosh,
        "critical_input": run_critical_input,
        "inoperability": run_inoperability,
    }
    try:
        runner = runners[model]
    except KeyError:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}") from None
    return runner(table, shock, **kwargs)
