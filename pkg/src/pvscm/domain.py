"""Shared domain types for PV + battery sizing under a self-consumption tariff.

Units discipline
----------------
Demand and solar irradiation series are energies per time step: kWh and
kWh/m2 respectively.  Capacities are kW (PV) and kWh (battery).  Prices are
an abstract currency per kWh; fixed costs are currency per kW (or kWh) per
year.  ``g_stc`` is stored in kW/m2 (default 1.0, i.e. the 1000 W/m2
standard-test-conditions irradiance), so that

    irradiation [kWh/m2] / g_stc [kW/m2] * e_pv * capacity [kW]  ->  kWh

without any further conversion factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

__all__ = [
    "DomainError",
    "LengthMismatch",
    "NegativeValue",
    "EmptyDay",
    "InvalidParams",
    "TariffAndCostParams",
    "Scenario",
    "SizingEstimate",
    "validate_scenario",
    "viability",
]


class DomainError(ValueError):
    """Base class for scenario/parameter validation failures."""


class LengthMismatch(DomainError):
    def __init__(self, demand_len: int, irradiation_len: int):
        self.demand_len = demand_len
        self.irradiation_len = irradiation_len
        super().__init__(
            f"demand has {demand_len} entries but irradiation has {irradiation_len}"
        )


class NegativeValue(DomainError):
    def __init__(self, series: str, index: int, value: float):
        self.series = series
        self.index = index
        self.value = value
        super().__init__(f"{series}[{index}] = {value} is negative")


class EmptyDay(DomainError):
    def __init__(self, day: int):
        self.day = day
        super().__init__(f"day {day} has no time steps")


class InvalidParams(DomainError):
    pass


def _positive(name: str, value: float) -> None:
    if not value > 0:
        raise InvalidParams(f"{name} must be > 0, got {value}")


def _nonnegative(name: str, value: float) -> None:
    if not value >= 0:
        raise InvalidParams(f"{name} must be >= 0, got {value}")


def _efficiency(name: str, value: float) -> None:
    if not (0 < value <= 1):
        raise InvalidParams(f"{name} must be in (0, 1], got {value}")


@dataclass(frozen=True)
class TariffAndCostParams:
    """Economic and technical scalars of the sizing problem.

    Defaults are the base-case values used throughout the test suite
    (currency is abstract; any consistent unit works).

    Attributes:
        c_pv_fixed: annual fixed cost of PV, currency/(kW*yr).
        c_bat_fixed: annual fixed cost of battery, currency/(kWh*yr).
        p_buy: retail price for buying from the grid, currency/kWh.
        p_sell: price for selling to the grid, currency/kWh.
        e_chg: charging efficiency, in (0, 1].
        e_dis: discharging efficiency, in (0, 1].
        e_pv: PV system performance ratio, in (0, 1].
        g_stc: standard-test-conditions irradiance in kW/m2 (1.0 = 1000 W/m2).
        m_pv_max: upper bound on PV capacity, kW.
        delta_p: load-slice width, kW.
    """

    c_pv_fixed: float = 12000.0
    c_bat_fixed: float = 4400.0
    p_buy: float = 26.0
    p_sell: float = 6.0
    e_chg: float = 0.9
    e_dis: float = 0.9
    e_pv: float = 0.78
    g_stc: float = 1.0
    m_pv_max: float = 10.0
    delta_p: float = 0.01

    def __post_init__(self):
        _nonnegative("c_pv_fixed", self.c_pv_fixed)
        _nonnegative("c_bat_fixed", self.c_bat_fixed)
        _nonnegative("p_buy", self.p_buy)
        _nonnegative("p_sell", self.p_sell)
        _efficiency("e_chg", self.e_chg)
        _efficiency("e_dis", self.e_dis)
        _efficiency("e_pv", self.e_pv)
        _positive("g_stc", self.g_stc)
        _positive("m_pv_max", self.m_pv_max)
        _positive("delta_p", self.delta_p)

    @property
    def self_consumption_viable(self) -> bool:
        """True iff storing surplus beats selling it: p_buy > p_sell/(e_chg*e_dis).

        Without this, the round trip through the battery can never pay and
        the estimated battery size is zero.
        """
        return self.p_buy > self.p_sell / (self.e_chg * self.e_dis)

    def with_overrides(self, **kwargs) -> "TariffAndCostParams":
        return replace(self, **kwargs)


def viability(params: TariffAndCostParams) -> bool:
    """Self-consumption viability predicate (see TariffAndCostParams)."""
    return params.self_consumption_viable


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Scenario:
    """Validated chronological demand/irradiation series with day partition.

    Construct through :func:`validate_scenario`; instances are immutable
    (arrays are write-protected) and safe to share between threads.

    Attributes:
        demand: kWh consumed per step, length n_t.
        irradiation: kWh/m2 received per step, length n_t.
        day_index: 1-based day of each step, non-decreasing, covering 1..n_d.
        step_hours: duration of one step in hours.
    """

    demand: np.ndarray
    irradiation: np.ndarray
    day_index: np.ndarray
    step_hours: float = 1.0
    n_t: int = field(init=False)
    n_d: int = field(init=False)
    f_anu: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "n_t", int(self.demand.shape[0]))
        object.__setattr__(self, "n_d", int(self.day_index[-1]) if self.n_t else 0)
        object.__setattr__(self, "f_anu", 365.0 / self.n_d)

    @property
    def day_starts(self) -> np.ndarray:
        """Index of the first step of each day (length n_d)."""
        first = np.ones(self.n_t, dtype=bool)
        first[1:] = self.day_index[1:] != self.day_index[:-1]
        return np.flatnonzero(first)

    def daily_sums(self, series: np.ndarray) -> np.ndarray:
        """Sum a per-step series (last axis = n_t) over each day."""
        return np.add.reduceat(series, self.day_starts, axis=-1)

    def to_dict(self) -> dict:
        return {
            "demand": self.demand.tolist(),
            "irradiation": self.irradiation.tolist(),
            "day_index": self.day_index.tolist(),
            "step_hours": self.step_hours,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "Scenario":
        return validate_scenario(
            payload["demand"],
            payload["irradiation"],
            day_index=payload.get("day_index"),
            step_hours=payload.get("step_hours", 1.0),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scenario):
            return NotImplemented
        return (
            self.step_hours == other.step_hours
            and np.array_equal(self.demand, other.demand)
            and np.array_equal(self.irradiation, other.irradiation)
            and np.array_equal(self.day_index, other.day_index)
        )


def validate_scenario(
    demand: Sequence[float],
    irradiation: Sequence[float],
    day_index: Sequence[int] | None = None,
    step_hours: float = 1.0,
    steps_per_day: int = 24,
) -> Scenario:
    """Validate raw series and return an immutable Scenario.

    When ``day_index`` is omitted the steps are partitioned into consecutive
    ``steps_per_day``-sized blocks (a trailing shorter block becomes the last
    day).  Day boundaries always come from this partition, never from
    timestamps.

    Raises:
        LengthMismatch: demand and irradiation lengths differ.
        NegativeValue: any entry < 0 (or a non-finite entry).
        EmptyDay: the day partition skips a day index.
        DomainError: empty input or malformed day_index.
    """
    d = np.asarray(demand, dtype=float)
    s = np.asarray(irradiation, dtype=float)
    if d.ndim != 1 or s.ndim != 1:
        raise DomainError("demand and irradiation must be one-dimensional")
    if d.shape[0] != s.shape[0]:
        raise LengthMismatch(d.shape[0], s.shape[0])
    if d.shape[0] == 0:
        raise DomainError("scenario must contain at least one step")
    for name, arr in (("demand", d), ("irradiation", s)):
        bad = np.flatnonzero(~(arr >= 0))  # catches negatives and NaN
        if bad.size:
            i = int(bad[0])
            raise NegativeValue(name, i, float(arr[i]))
    if not step_hours > 0:
        raise DomainError(f"step_hours must be > 0, got {step_hours}")

    n_t = d.shape[0]
    if day_index is None:
        if steps_per_day <= 0:
            raise DomainError("steps_per_day must be positive")
        idx = np.arange(n_t) // steps_per_day + 1
    else:
        idx = np.asarray(day_index, dtype=int)
        if idx.shape[0] != n_t:
            raise DomainError(
                f"day_index has {idx.shape[0]} entries, expected {n_t}"
            )
        if idx[0] != 1:
            raise DomainError(f"day_index must start at 1, got {idx[0]}")
        steps = np.diff(idx)
        if np.any(steps < 0):
            raise DomainError("day_index must be non-decreasing")
        jumps = np.flatnonzero(steps > 1)
        if jumps.size:
            raise EmptyDay(int(idx[jumps[0]]) + 1)

    return Scenario(
        demand=_freeze(d),
        irradiation=_freeze(s),
        day_index=_freeze(idx),
        step_hours=float(step_hours),
    )


@dataclass(frozen=True)
class SizingEstimate:
    """Capacity estimate plus the per-day trade profile behind it.

    ``first_crossing_kw`` is the slice level where min(PV, PV+battery) first
    exceeds the grid curve, reported for plotting; the capacities themselves
    come from counting least-cost slices, which is robust on non-monotone
    curves.
    """

    v_pv: float
    v_bat: float
    annualized_total_cost: float
    per_day_sold: np.ndarray
    per_day_charged: np.ndarray
    j_star: int
    first_crossing_kw: float | None = None

    def to_dict(self) -> dict:
        return {
            "v_pv_kw": self.v_pv,
            "v_bat_kwh": self.v_bat,
            "annual_cost": self.annualized_total_cost,
            "j_star": self.j_star,
            "first_crossing_kw": self.first_crossing_kw,
        }
