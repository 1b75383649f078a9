"""Parameter sweeps: vary one tariff/cost scalar, size per point, optionally
cross-check each point against the LP optimum.

Sweep points are independent pure computations; they may run concurrently
but results always come back in input order, so parallelism never changes
the output.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import lp as lp_mod
from .domain import Scenario, TariffAndCostParams
from .scm import ScreeningCurveSet, build_curves, decompose, estimate_sizing

__all__ = ["SweepSpec", "SweepPoint", "SweepResult", "run_sweep", "curve_family"]

SWEEPABLE = ("c_pv_fixed", "c_bat_fixed", "p_buy", "p_sell")


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep: which scalar, which values, whether to run the LP.

    ``divergence_band_kwh``: points where |v_bat_scm - v_bat_lp| exceeds this
    band are flagged, marking the battery-overestimation regime.
    """

    parameter: str
    values: tuple[float, ...]
    with_lp: bool = False
    lp_time_limit_s: float | None = None
    divergence_band_kwh: float = 0.5

    def __post_init__(self):
        if self.parameter not in SWEEPABLE:
            raise ValueError(
                f"parameter must be one of {SWEEPABLE}, got {self.parameter!r}"
            )
        if len(self.values) == 0:
            raise ValueError("sweep needs at least one value")
        diffs = np.diff(np.asarray(self.values, dtype=float))
        if np.any(diffs <= 0):
            raise ValueError("sweep values must be strictly ascending")
        if any(v < 0 for v in self.values):
            raise ValueError(f"negative value for {self.parameter}")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @classmethod
    def from_dict(cls, payload: dict) -> "SweepSpec":
        return cls(
            parameter=payload["parameter"],
            values=tuple(payload["values"]),
            with_lp=bool(payload.get("with_lp", False)),
            lp_time_limit_s=payload.get("lp_time_limit_s"),
            divergence_band_kwh=float(payload.get("divergence_band_kwh", 0.5)),
        )


@dataclass
class SweepPoint:
    value: float
    scm_v_pv: float | None = None
    scm_v_bat: float | None = None
    scm_cost: float | None = None
    scm_seconds: float = 0.0
    lp_v_pv: float | None = None
    lp_v_bat: float | None = None
    lp_objective: float | None = None
    lp_status: str | None = None
    lp_seconds: float = 0.0
    diverged: bool | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


@dataclass
class SweepResult:
    parameter: str
    points: list[SweepPoint] = field(default_factory=list)

    CSV_FIELDS = (
        "value",
        "scm_v_pv",
        "scm_v_bat",
        "scm_cost",
        "scm_seconds",
        "lp_v_pv",
        "lp_v_bat",
        "lp_objective",
        "lp_status",
        "lp_seconds",
        "diverged",
        "error",
    )

    def to_json(self) -> str:
        return json.dumps(
            {"parameter": self.parameter, "points": [p.to_dict() for p in self.points]},
            indent=2,
        )

    def to_csv(self) -> str:
        lines = [",".join(self.CSV_FIELDS)]
        for p in self.points:
            row = []
            for name in self.CSV_FIELDS:
                v = getattr(p, name)
                row.append("" if v is None else str(v))
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def write(self, directory: str | Path, stem: str = "sweep") -> list[Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        j = directory / f"{stem}.json"
        c = directory / f"{stem}.csv"
        j.write_text(self.to_json(), encoding="utf-8")
        c.write_text(self.to_csv(), encoding="utf-8")
        return [j, c]


def _run_point(
    scenario: Scenario, base: TariffAndCostParams, spec: SweepSpec, value: float
) -> SweepPoint:
    point = SweepPoint(value=value)
    try:
        params = replace(base, **{spec.parameter: value})
        t0 = time.perf_counter()
        dec = decompose(scenario, params)
        curves = build_curves(scenario, params, dec)
        est = estimate_sizing(curves, dec, scenario, params)
        point.scm_seconds = time.perf_counter() - t0
        point.scm_v_pv = est.v_pv
        point.scm_v_bat = est.v_bat
        point.scm_cost = est.annualized_total_cost
        if spec.with_lp:
            t0 = time.perf_counter()
            sol = lp_mod.solve(
                lp_mod.build_lp(scenario, params),
                time_limit_s=spec.lp_time_limit_s,
                audit_inputs=(scenario, params),
            )
            point.lp_seconds = time.perf_counter() - t0
            point.lp_status = sol.status
            if sol.is_optimal:
                point.lp_v_pv = sol.v_pv
                point.lp_v_bat = sol.v_bat
                point.lp_objective = sol.objective
                point.diverged = (
                    abs(est.v_bat - sol.v_bat) > spec.divergence_band_kwh
                )
    except Exception as exc:  # recorded per point, sweep continues
        point.error = f"{type(exc).__name__}: {exc}"
    return point


def run_sweep(
    spec: SweepSpec,
    scenario: Scenario,
    base_params: TariffAndCostParams,
    max_workers: int = 1,
) -> SweepResult:
    """Run the sweep; rows come back in input order regardless of workers."""
    result = SweepResult(parameter=spec.parameter)
    if max_workers <= 1:
        result.points = [
            _run_point(scenario, base_params, spec, v) for v in spec.values
        ]
        return result
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = [
            pool.submit(_run_point, scenario, base_params, spec, v)
            for v in spec.values
        ]
        result.points = [f.result() for f in futures]
    return result


def curve_family(
    scenario: Scenario,
    base_params: TariffAndCostParams,
    parameter: str,
    values: tuple[float, ...] | list[float],
) -> list[tuple[float, ScreeningCurveSet]]:
    """Screening curves for up to five values of one parameter (overlay plot).

    Changing c_pv_fixed shifts the PV curves by exactly the same amount per
    kW at every slice and leaves the grid curve untouched; changing
    c_bat_fixed moves only the PV+battery curve.
    """
    if parameter not in SWEEPABLE:
        raise ValueError(f"parameter must be one of {SWEEPABLE}, got {parameter!r}")
    if not 1 <= len(values) <= 5:
        raise ValueError("curve_family accepts between one and five values")
    out = []
    for v in values:
        params = replace(base_params, **{parameter: float(v)})
        out.append((float(v), build_curves(scenario, params)))
    return out
