"""Scenario input: CSV loading and reproducible synthetic generation.

CSV schema: a UTF-8, comma-separated file with a header row and `.` decimal
points.  Required columns are ``demand_kwh`` and ``irradiation_kwh_m2``
(names overridable); an optional ``day`` column carries the 1-based day of
each row.  Without a day column, rows are grouped into fixed 24-row days.

The synthetic generator stands in for measured household data: it produces
seasons with scaled demand and irradiation (winter: more demand and less
sun), randomly cloudy days, and zero irradiation outside a daylight window.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .domain import NegativeValue, Scenario, validate_scenario

__all__ = [
    "IngestError",
    "MissingColumn",
    "ParseError",
    "SeasonSpec",
    "SyntheticSpec",
    "load_csv",
    "load_csv_text",
    "generate_synthetic",
]

DEMAND_COL = "demand_kwh"
IRRADIATION_COL = "irradiation_kwh_m2"
DAY_COL = "day"


class IngestError(ValueError):
    pass


class MissingColumn(IngestError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"required column {name!r} not found in header")


class ParseError(IngestError):
    def __init__(self, line: int, detail: str):
        self.line = line
        super().__init__(f"row {line}: {detail}")


def load_csv(
    path: str | Path,
    demand_col: str = DEMAND_COL,
    irr_col: str = IRRADIATION_COL,
    day_col: str | None = DAY_COL,
    steps_per_day: int = 24,
    step_hours: float = 1.0,
) -> Scenario:
    """Load and validate a scenario from a CSV file.

    ``day_col`` is used when present in the header; otherwise rows fall into
    fixed ``steps_per_day`` blocks.  Negative entries are reported with their
    1-based data row number.
    """
    text = Path(path).read_text(encoding="utf-8")
    return load_csv_text(
        text,
        demand_col=demand_col,
        irr_col=irr_col,
        day_col=day_col,
        steps_per_day=steps_per_day,
        step_hours=step_hours,
    )


def load_csv_text(
    text: str,
    demand_col: str = DEMAND_COL,
    irr_col: str = IRRADIATION_COL,
    day_col: str | None = DAY_COL,
    steps_per_day: int = 24,
    step_hours: float = 1.0,
) -> Scenario:
    """Parse CSV content (see :func:`load_csv`)."""
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames is None:
        raise IngestError("empty CSV input")
    header = [h.strip() for h in reader.fieldnames]
    for required in (demand_col, irr_col):
        if required not in header:
            raise MissingColumn(required)
    use_day = day_col is not None and day_col in header
    # Only the default day column may be silently absent (24-row fallback);
    # an explicitly requested one must exist.
    if day_col is not None and day_col != DAY_COL and day_col not in header:
        raise MissingColumn(day_col)

    demand: list[float] = []
    irr: list[float] = []
    days: list[int] = []
    for row_no, row in enumerate(reader, start=1):
        try:
            demand.append(float(row[demand_col]))
            irr.append(float(row[irr_col]))
        except (TypeError, ValueError) as exc:
            raise ParseError(row_no, f"cannot parse value ({exc})") from exc
        if use_day:
            try:
                days.append(int(row[day_col]))
            except (TypeError, ValueError) as exc:
                raise ParseError(row_no, f"bad day value ({exc})") from exc
    if not demand:
        raise IngestError("CSV contains no data rows")

    try:
        return validate_scenario(
            demand,
            irr,
            day_index=days if use_day else None,
            steps_per_day=steps_per_day,
            step_hours=step_hours,
        )
    except NegativeValue as exc:
        # Re-point the failure at the CSV data row (1-based).
        raise NegativeValue(exc.series, exc.index + 1, exc.value) from exc


@dataclass(frozen=True)
class SeasonSpec:
    """One season block of synthetic days.

    ``irr_scale``/``demand_scale`` multiply the clear-sky irradiation and the
    demand profile; ``cloudy_fraction`` is the per-day probability of a
    cloudy day, whose irradiation drops to 10-30% of the clear profile.
    """

    label: str
    days: int
    irr_scale: float = 1.0
    demand_scale: float = 1.0
    cloudy_fraction: float = 0.0

    def __post_init__(self):
        if self.days <= 0:
            raise IngestError(f"season {self.label!r} must have positive days")
        if not 0 <= self.cloudy_fraction <= 1:
            raise IngestError("cloudy_fraction must be in [0, 1]")
        if self.irr_scale < 0 or self.demand_scale < 0:
            raise IngestError("season scales must be non-negative")


def _default_seasons() -> tuple[SeasonSpec, ...]:
    return (
        SeasonSpec("winter", 28, irr_scale=0.6, demand_scale=1.5, cloudy_fraction=0.2),
        SeasonSpec("rainy", 30, irr_scale=0.5, demand_scale=0.9, cloudy_fraction=0.5),
        SeasonSpec("summer", 31, irr_scale=1.0, demand_scale=1.0, cloudy_fraction=0.1),
    )


@dataclass(frozen=True)
class SyntheticSpec:
    """Reproducible synthetic household scenario.

    Defaults mimic a winter / rainy-season / summer mix of 89 days with an
    evening-peaked demand profile and a half-sine clear-sky irradiation
    profile inside ``daylight`` (irradiation is exactly zero outside it).
    """

    seed: int = 0
    seasons: tuple[SeasonSpec, ...] = field(default_factory=_default_seasons)
    demand_base: float = 0.3  # kWh per step, always-on load
    demand_peak: float = 1.6  # kWh per step, peak-shape height
    irr_clear_peak: float = 0.9  # kWh/m2 per step at clear-sky noon
    daylight: tuple[int, int] = (6, 18)
    steps_per_day: int = 24

    @property
    def n_days(self) -> int:
        return sum(s.days for s in self.seasons)

    def __post_init__(self):
        if not self.seasons:
            raise IngestError("at least one season is required")
        lo, hi = self.daylight
        if not (0 <= lo < hi <= self.steps_per_day):
            raise IngestError(f"bad daylight window {self.daylight}")
        for name in ("demand_base", "demand_peak", "irr_clear_peak"):
            if getattr(self, name) < 0:
                raise IngestError(f"{name} must be non-negative")

    @classmethod
    def from_dict(cls, payload: dict) -> "SyntheticSpec":
        seasons = payload.get("seasons")
        kwargs = {
            key: payload[key]
            for key in (
                "seed",
                "demand_base",
                "demand_peak",
                "irr_clear_peak",
                "steps_per_day",
            )
            if key in payload
        }
        if "daylight" in payload:
            kwargs["daylight"] = tuple(payload["daylight"])
        if seasons is not None:
            kwargs["seasons"] = tuple(SeasonSpec(**s) for s in seasons)
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path: str | Path) -> "SyntheticSpec":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def generate_synthetic(spec: SyntheticSpec) -> Scenario:
    """Generate a validated Scenario; identical for identical specs/seeds."""
    rng = np.random.default_rng(spec.seed)
    steps = spec.steps_per_day
    hours = np.arange(steps, dtype=float)
    lo, hi = spec.daylight
    in_daylight = (hours >= lo) & (hours <= hi)
    clear = np.where(
        in_daylight, np.sin(np.pi * (hours - lo) / (hi - lo)), 0.0
    )
    # Morning peak, small midday plateau, evening peak.
    demand_shape = (
        1.2 * np.exp(-0.5 * ((hours - 7.5) / 1.5) ** 2)
        + 0.3 * np.exp(-0.5 * ((hours - 13.0) / 2.8) ** 2)
        + np.exp(-0.5 * ((hours - 19.0) / 1.8) ** 2)
    )

    demand_days = []
    irr_days = []
    for season in spec.seasons:
        cloudy = rng.random(season.days) < season.cloudy_fraction
        for d in range(season.days):
            if cloudy[d]:
                irr_factor = rng.uniform(0.1, 0.3)
            else:
                irr_factor = season.irr_scale * rng.uniform(0.85, 1.0)
            irr_days.append(spec.irr_clear_peak * irr_factor * clear)
            noise = rng.uniform(0.9, 1.1, steps)
            demand_days.append(
                (
                    spec.demand_base
                    + spec.demand_peak * season.demand_scale * demand_shape
                )
                * noise
            )
    demand = np.concatenate(demand_days)
    irr = np.concatenate(irr_days)
    return validate_scenario(demand, irr, steps_per_day=steps)
