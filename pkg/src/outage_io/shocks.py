"""Turn outage evidence into a monetary final-demand shock on the utilities sector.

Three routes are supported: interrupted consumer-hours priced at a per-hour
share of utilities final demand, kWh lost relative to residential generation,
and fractional loss of nighttime luminosity.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from datetime import datetime

import numpy as np

from . import _kernels
from .errors import EmptySeries, FractionExceedsUnity, NonMonotonicTimestamps

METHODS = ("household", "kwh", "luminosity")

# Desk defaults reproducing the published direct shocks; see README.
DEFAULT_F_UTILITIES = 533e9
DEFAULT_POPULATION = 334.3e6
DEFAULT_NET_GENERATION_KWH = 4.25162e12
DEFAULT_RESIDENTIAL_SHARE = 0.5
HOURS_PER_YEAR = 8760.0


@dataclass(frozen=True)
class ShockConstants:
    f_utilities: float = DEFAULT_F_UTILITIES
    population: float = DEFAULT_POPULATION
    hours_per_year: float = HOURS_PER_YEAR
    net_generation_kwh: float = DEFAULT_NET_GENERATION_KWH
    residential_share: float = DEFAULT_RESIDENTIAL_SHARE
    value_per_consumer_hour: float | None = None

    def __post_init__(self):
        for name in ("f_utilities", "population", "hours_per_year", "net_generation_kwh", "residential_share"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive, got {getattr(self, name)!r}")
        if self.residential_share > 1:
            raise ValueError(f"residential_share must be <= 1, got {self.residential_share!r}")
        if self.value_per_consumer_hour is not None and not self.value_per_consumer_hour > 0:
            raise ValueError("value_per_consumer_hour must be strictly positive")

    def with_overrides(self, **overrides) -> "ShockConstants":
        return replace(self, **overrides)

    def snapshot(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class OutageSeries:
    """Point-in-time counts of customers without power.

    Each count is held until the next sample; the last one until ``window_end``.
    """

    timestamps: tuple[datetime, ...]
    customers: tuple[int, ...]
    window_start: datetime
    window_end: datetime

    def __post_init__(self):
        if len(self.timestamps) != len(self.customers):
            raise ValueError("timestamps and customers differ in length")
        if not self.timestamps:
            raise EmptySeries("outage series has no samples")
        for a, b in zip(self.timestamps, self.timestamps[1:]):
            if not b > a:
                raise NonMonotonicTimestamps(f"timestamp {b.isoformat()} does not follow {a.isoformat()}")
        if any(c < 0 for c in self.customers):
            raise ValueError("customer counts must be nonnegative")
        if self.window_start > self.timestamps[0] or self.window_end < self.timestamps[-1]:
            raise ValueError("event window does not cover all samples")

    @classmethod
    def from_samples(cls, samples, window_start=None, window_end=None) -> "OutageSeries":
        samples = list(samples)
        if not samples:
            raise EmptySeries("outage series has no samples")
        ts = tuple(t for t, _ in samples)
        counts = tuple(int(c) for _, c in samples)
        return cls(ts, counts, window_start or ts[0], window_end or ts[-1])

    def split(self, k: int) -> tuple["OutageSeries", "OutageSeries"]:
        """Split at sample ``k`` (which starts the second part)."""
        t = self.timestamps[k]
        head = OutageSeries(self.timestamps[:k], self.customers[:k], self.window_start, t)
        tail = OutageSeries(self.timestamps[k:], self.customers[k:], t, self.window_end)
        return head, tail


@dataclass(frozen=True)
class DemandShock:
    target: tuple[str, str]
    amount: float
    method: str
    event_id: str = ""
    assumptions: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.amount >= 0:
            raise ValueError(f"shock amount must be nonnegative, got {self.amount!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")

    def scaled(self, k: float) -> "DemandShock":
        return replace(self, amount=self.amount * k)

    def as_dict(self) -> dict:
        return {
            "event_id": self.event_id,
            "method": self.method,
            "target": {"region": self.target[0], "sector": self.target[1]},
            "amount": self.amount,
            "unit": "USD",
            "assumptions": self.assumptions,
        }


def _hours_axis(series: OutageSeries) -> tuple[np.ndarray, np.ndarray, float]:
    t0 = series.window_start
    t = np.array([(ts - t0).total_seconds() / 3600.0 for ts in series.timestamps])
    counts = np.array(series.customers, dtype=float)
    end = (series.window_end - t0).total_seconds() / 3600.0
    return t, counts, end


def integrate_consumer_hours(series: OutageSeries, rule: str = "step") -> float:
    """Customer-hours without power over the event window.

    ``rule="step"`` holds every count until the next sample (zero-order hold);
    ``rule="trapezoid"`` interpolates linearly between samples.  Either way the
    last count is held to the window end and nothing is counted before the
    first sample.
    """
    if not series.timestamps:
        raise EmptySeries("outage series has no samples")
    t, counts, end = _hours_axis(series)
    if np.any(np.diff(t) <= 0):
        raise NonMonotonicTimestamps("timestamps must be strictly increasing")
    if rule == "step":
        return float(_kernels.step_hours(t, counts, end))
    if rule == "trapezoid":
        return float(_kernels.trapezoid_hours(t, counts, end))
    raise ValueError(f"unknown integration rule {rule!r}")


def derive_value_per_consumer_hour(constants: ShockConstants) -> float:
    """Utilities final demand per person-hour, unless overridden."""
    if constants.value_per_consumer_hour is not None:
        return constants.value_per_consumer_hour
    return constants.f_utilities / (constants.population * constants.hours_per_year)


def household_shock(
    hours: float,
    rate: float,
    target: tuple[str, str],
    event_id: str = "",
    constants: ShockConstants | None = None,
) -> DemandShock:
    if hours < 0:
        raise ValueError(f"consumer-hours must be nonnegative, got {hours!r}")
    assumptions = {"consumer_hours": hours, "value_per_consumer_hour": rate}
    if constants is not None:
        assumptions["constants"] = constants.snapshot()
    return DemandShock(tuple(target), hours * rate, "household", event_id, assumptions)


def kwh_fraction(kwh_lost: float, constants: ShockConstants) -> float:
    return kwh_lost / (constants.net_generation_kwh * constants.residential_share)


def kwh_shock(
    kwh_lost: float,
    constants: ShockConstants,
    target: tuple[str, str],
    event_id: str = "",
) -> DemandShock:
    if kwh_lost < 0:
        raise ValueError(f"kwh_lost must be nonnegative, got {kwh_lost!r}")
    fraction = kwh_fraction(kwh_lost, constants)
    if fraction > 1:
        raise FractionExceedsUnity(
            f"kWh lost is {fraction:.4g} of residential generation; inputs are inconsistent"
        )
    assumptions = {"kwh_lost": kwh_lost, "fraction": fraction, "constants": constants.snapshot()}
    return DemandShock(tuple(target), fraction * constants.f_utilities, "kwh", event_id, assumptions)


def luminosity_shock(
    pct_loss: float,
    f_elec: float,
    target: tuple[str, str],
    scaling: float = 1.0,
    event_id: str = "",
    constants: ShockConstants | None = None,
) -> DemandShock:
    """Demand shock ``pct_loss * f_elec * scaling``.

    ``scaling`` defaults to 1 (the loss fraction applies to annual demand);
    pass e.g. ``duration_hours / 8760`` for a time-limited reading.
    """
    if not 0.0 <= pct_loss <= 1.0:
        raise ValueError(f"pct_loss must lie in [0, 1], got {pct_loss!r}")
    if scaling < 0:
        raise ValueError("scaling must be nonnegative")
    assumptions = {"pct_loss": pct_loss, "f_elec": f_elec, "scaling": scaling}
    if constants is not None:
        assumptions["constants"] = constants.snapshot()
    return DemandShock(tuple(target), pct_loss * f_elec * scaling, "luminosity", event_id, assumptions)
