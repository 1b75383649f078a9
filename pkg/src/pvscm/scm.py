"""Screening-curve sizing of PV and battery for a self-consumption household.

The chronological load curve is cut into horizontal bands ("slices") whose
width at each step equals the generation of one ``delta_p``-sized unit of PV.
Each slice is then costed three ways: keep buying from the grid, install the
PV unit and sell all surplus, or install the PV unit plus just enough battery
to absorb the surplus of the most profitable days.  Counting the slices where
a PV option wins yields the PV capacity; summing the per-slice battery
amounts over slices where the battery option wins yields the battery
capacity.

All computations are pure functions of immutable inputs; per-slice work is
vectorized with numpy.  Slice indices in this module are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .domain import Scenario, SizingEstimate, TariffAndCostParams

__all__ = [
    "NonViableTariff",
    "SliceDecomposition",
    "ScreeningCurveSet",
    "decompose",
    "cost_grid",
    "cost_pv",
    "compute_j",
    "battery_for_slice",
    "marginal_benefits",
    "cost_pv_battery",
    "build_curves",
    "estimate_sizing",
    "charge_profile",
    "classical_curves",
    "ClassicalResult",
    "GRID",
    "PV",
    "PV_BATTERY",
]

# Technology codes per slice, in tie-break priority order: on exact cost
# equality the earlier option wins, so capital is never recommended for
# zero benefit.
GRID, PV, PV_BATTERY = 0, 1, 2


class NonViableTariff(ValueError):
    """p_buy * e_dis * e_chg <= p_sell: battery self-consumption cannot pay."""


def _slice_widths(params: TariffAndCostParams) -> np.ndarray:
    """Slice widths in kW: delta_p each, plus a partial final slice when
    m_pv_max is not a multiple of delta_p."""
    n_full = int(math.floor(params.m_pv_max / params.delta_p + 1e-9))
    widths = [params.delta_p] * n_full
    remainder = params.m_pv_max - n_full * params.delta_p
    if remainder > 1e-9 * params.delta_p:
        widths.append(remainder)
    if not widths:  # cap vanishingly small next to delta_p
        widths = [params.m_pv_max]
    return np.asarray(widths)


@dataclass(frozen=True)
class SliceDecomposition:
    """Per-slice split of the load curve into covered load and surplus.

    ``q_load[i, k] + q_sur[i, k]`` equals the generation of slice i at step
    k, i.e. ``unit_gen[k] * slice_widths[i] / delta_p``; for the usual
    uniform slices that is exactly ``unit_gen[k]``.
    """

    slice_widths: np.ndarray  # kW, length n_slices
    unit_gen: np.ndarray  # kWh per step for one delta_p of PV, length n_t
    q_load: np.ndarray  # kWh, shape (n_slices, n_t)
    q_sur: np.ndarray  # kWh, shape (n_slices, n_t)

    @property
    def n_slices(self) -> int:
        return self.slice_widths.shape[0]

    @property
    def slice_levels(self) -> np.ndarray:
        """Upper PV-capacity edge of each slice, kW (cumulative widths)."""
        return np.cumsum(self.slice_widths)


def decompose(scenario: Scenario, params: TariffAndCostParams) -> SliceDecomposition:
    """Cut the load curve into time-varying slices of PV-unit width.

    Slice i (0-based) is the generation band between capacity levels
    sum(widths[:i]) and sum(widths[:i+1]); the part of the band below the
    demand curve is covered load, the rest is surplus:

        q_load[i, k] = clip(D_k - below_i_k, 0, band_i_k)
        q_sur[i, k]  = band_i_k - q_load[i, k]

    with below_i_k the generation of all lower slices and
    band_i_k = S_k * e_pv * width_i / g_stc.
    """
    widths = _slice_widths(params)
    per_kw = scenario.irradiation * (params.e_pv / params.g_stc)  # kWh per kW
    unit_gen = per_kw * params.delta_p

    # q_load = clip(D - below, 0, band), built in place: the (n_slices, n_t)
    # buffer starts as `below`, becomes q_load, and q_sur is the only other
    # full-size allocation (matters at year scale: each is n_slices*n_t).
    buf = (np.cumsum(widths) - widths)[:, None] * per_kw[None, :]
    np.subtract(scenario.demand[None, :], buf, out=buf)
    np.clip(buf, 0.0, unit_gen[None, :], out=buf)
    if widths[-1] != params.delta_p:  # partial final slice has its own cap
        np.clip(buf[-1], 0.0, widths[-1] * per_kw, out=buf[-1])
    q_load = buf
    q_sur = widths[:, None] * per_kw[None, :]
    np.subtract(q_sur, q_load, out=q_sur)
    return SliceDecomposition(
        slice_widths=widths, unit_gen=unit_gen, q_load=q_load, q_sur=q_sur
    )


def cost_grid(
    i: int, dec: SliceDecomposition, scenario: Scenario, params: TariffAndCostParams
) -> float:
    """Annualized cost of serving slice i from the grid:
    f_anu * p_buy * sum_k q_load[i, k]."""
    return scenario.f_anu * params.p_buy * float(dec.q_load[i].sum())


def cost_pv(
    i: int, dec: SliceDecomposition, scenario: Scenario, params: TariffAndCostParams
) -> float:
    """Annualized cost of installing the PV unit of slice i and selling all
    surplus: c_pv_fixed * width_i - f_anu * p_sell * sum_k q_sur[i, k]."""
    return params.c_pv_fixed * float(dec.slice_widths[i]) - (
        scenario.f_anu * params.p_sell * float(dec.q_sur[i].sum())
    )


def compute_j(scenario: Scenario, params: TariffAndCostParams) -> int:
    """Closed-form count J of days whose battery increment is worth paying.

    J = max(0, floor(n_d + 1 - c_bat_fixed * e_chg /
                     (f_anu * (p_buy * e_dis * e_chg - p_sell))))

    clamped to n_d (the floor exceeds it when the battery is cheap enough to
    store every day's surplus).  J does not depend on the slice.

    Raises:
        NonViableTariff: when p_buy * e_dis * e_chg <= p_sell; callers that
            want the sizing to degrade gracefully map this to J = 0.
    """
    denom = params.p_buy * params.e_dis * params.e_chg - params.p_sell
    if denom <= 0:
        raise NonViableTariff(
            f"p_buy*e_dis*e_chg = {params.p_buy * params.e_dis * params.e_chg}"
            f" <= p_sell = {params.p_sell}"
        )
    j = math.floor(
        scenario.n_d + 1 - params.c_bat_fixed * params.e_chg / (scenario.f_anu * denom)
    )
    return int(min(max(j, 0), scenario.n_d))


def _j_star(scenario: Scenario, params: TariffAndCostParams) -> int:
    """compute_j with the non-viable tariff mapped to J = 0."""
    try:
        return compute_j(scenario, params)
    except NonViableTariff:
        return 0


def battery_for_slice(
    i: int,
    dec: SliceDecomposition,
    scenario: Scenario,
    params: TariffAndCostParams,
    j_star: int,
) -> tuple[float, float, np.ndarray]:
    """Battery capacity, total charged energy, and day order for slice i.

    Days are ordered ascending by daily slice surplus (ties by original day
    index).  A battery sized to absorb the J-th day's surplus
    (q_bat = e_chg * surplus_J) stores the full surplus of days 1..J and
    surplus_J on each remaining day:

        q_chg_total = sum_{j<=J} surplus_j + (n_d - J) * surplus_J

    Returns (q_bat_i in kWh, q_chg_total_i in kWh, day_order permutation).
    """
    daily = scenario.daily_sums(dec.q_sur[i])
    order = np.argsort(daily, kind="stable")
    if j_star <= 0:
        return 0.0, 0.0, order
    s = daily[order]
    s_j = float(s[j_star - 1])
    q_bat = params.e_chg * s_j
    q_chg_total = float(s[:j_star].sum()) + (scenario.n_d - j_star) * s_j
    return q_bat, q_chg_total, order


def marginal_benefits(
    i: int, dec: SliceDecomposition, scenario: Scenario, params: TariffAndCostParams
) -> np.ndarray:
    """Annualized benefit B_j of each battery increment for slice i, j=1..n_d.

    B_j = {f_anu * (n_d - j + 1) * (p_buy*e_dis - p_sell/e_chg) - c_bat_fixed}
          * (Q_bat_j - Q_bat_{j-1})

    with Q_bat_j = e_chg * (j-th smallest daily surplus) and Q_bat_0 = 0.
    Exposed for verification against compute_j; the sizing hot path uses the
    closed form instead.
    """
    daily = scenario.daily_sums(dec.q_sur[i])
    s = np.sort(daily, kind="stable")
    dq = np.diff(params.e_chg * s, prepend=0.0)
    j = np.arange(1, scenario.n_d + 1, dtype=float)
    per_unit = (
        scenario.f_anu
        * (scenario.n_d - j + 1)
        * (params.p_buy * params.e_dis - params.p_sell / params.e_chg)
        - params.c_bat_fixed
    )
    return per_unit * dq


def cost_pv_battery(
    i: int,
    dec: SliceDecomposition,
    scenario: Scenario,
    params: TariffAndCostParams,
    j_star: int,
) -> float:
    """Annualized cost of PV plus battery for slice i, in closed form:

    c_pv_fixed * width_i + c_bat_fixed * q_bat_i
        - f_anu * p_sell * sum_k q_sur[i, k]
        - f_anu * (p_buy*e_dis*e_chg - p_sell) * q_chg_total_i
    """
    q_bat, q_chg_total, _ = battery_for_slice(i, dec, scenario, params, j_star)
    return (
        params.c_pv_fixed * float(dec.slice_widths[i])
        + params.c_bat_fixed * q_bat
        - scenario.f_anu * params.p_sell * float(dec.q_sur[i].sum())
        - scenario.f_anu
        * (params.p_buy * params.e_dis * params.e_chg - params.p_sell)
        * q_chg_total
    )


@dataclass(frozen=True)
class ScreeningCurveSet:
    """The three annualized per-slice cost curves plus battery data.

    Raw curves are currency/yr for one slice; the ``*_per_kw`` properties
    scale by slice width for plotting.  ``j_star`` is the common
    benefit-positive day count (0 under a non-viable tariff).
    """

    slice_levels: np.ndarray  # kW, upper edge per slice
    slice_widths: np.ndarray  # kW
    c_grid: np.ndarray  # currency/yr per slice
    c_pv: np.ndarray
    c_pvbat: np.ndarray
    q_bat: np.ndarray  # kWh per slice
    per_slice_q_chg_total: np.ndarray  # kWh per slice
    j_star: int

    @property
    def n_slices(self) -> int:
        return self.slice_levels.shape[0]

    @property
    def c_grid_per_kw(self) -> np.ndarray:
        return self.c_grid / self.slice_widths

    @property
    def c_pv_per_kw(self) -> np.ndarray:
        return self.c_pv / self.slice_widths

    @property
    def c_pvbat_per_kw(self) -> np.ndarray:
        return self.c_pvbat / self.slice_widths

    @property
    def cumulative_battery(self) -> np.ndarray:
        """Running total of per-slice battery amounts, kWh."""
        return np.cumsum(self.q_bat)


def build_curves(
    scenario: Scenario,
    params: TariffAndCostParams,
    dec: SliceDecomposition | None = None,
) -> ScreeningCurveSet:
    """Compute all three screening curves and per-slice battery data."""
    if dec is None:
        dec = decompose(scenario, params)
    j_star = _j_star(scenario, params)
    load_sum = dec.q_load.sum(axis=1)
    sur_sum = dec.q_sur.sum(axis=1)
    c_grid = scenario.f_anu * params.p_buy * load_sum
    c_pv = params.c_pv_fixed * dec.slice_widths - (
        scenario.f_anu * params.p_sell * sur_sum
    )
    if j_star == 0:
        q_bat = np.zeros(dec.n_slices)
        q_chg = np.zeros(dec.n_slices)
        # + 0.0 terms keep c_pvbat bitwise equal to c_pv in this regime
        c_pvbat = c_pv + (params.c_bat_fixed * q_bat)
    else:
        daily = scenario.daily_sums(dec.q_sur)  # (n_slices, n_d)
        s_sorted = np.sort(daily, axis=-1, kind="stable")
        s_j = s_sorted[:, j_star - 1]
        q_bat = params.e_chg * s_j
        q_chg = s_sorted[:, :j_star].sum(axis=-1) + (scenario.n_d - j_star) * s_j
        denom = params.p_buy * params.e_dis * params.e_chg - params.p_sell
        c_pvbat = c_pv + (params.c_bat_fixed * q_bat - scenario.f_anu * denom * q_chg)
    return ScreeningCurveSet(
        slice_levels=dec.slice_levels,
        slice_widths=dec.slice_widths,
        c_grid=c_grid,
        c_pv=c_pv,
        c_pvbat=c_pvbat,
        q_bat=q_bat,
        per_slice_q_chg_total=q_chg,
        j_star=j_star,
    )


def _choices(curves: ScreeningCurveSet) -> np.ndarray:
    """Least-cost technology per slice with the grid > PV > PV+battery
    tie-break."""
    choice = np.full(curves.n_slices, PV_BATTERY, dtype=int)
    pv_wins = curves.c_pv <= curves.c_pvbat
    choice[pv_wins] = PV
    best_pv = np.minimum(curves.c_pv, curves.c_pvbat)
    choice[curves.c_grid <= best_pv] = GRID
    return choice


def charge_profile(
    slice_indices: Sequence[int] | np.ndarray,
    dec: SliceDecomposition,
    scenario: Scenario,
    params: TariffAndCostParams,
    q_bat: Sequence[float] | np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Realized per-day charged and sold energy for the installed slices.

    The charging profile within a day is arbitrary as long as each day's
    charge stays below q_bat_i / e_chg, so only daily totals are defined:

        charged[d] = min(daily surplus of slice i on day d, q_bat_i / e_chg)
        sold[d]    = daily surplus - charged[d]

    summed over ``slice_indices`` (with matching ``q_bat`` entries; pass 0
    for PV-only slices).  Returns (per_day_charged, per_day_sold).
    """
    idx = np.asarray(slice_indices, dtype=int)
    if idx.size == 0:
        return np.zeros(scenario.n_d), np.zeros(scenario.n_d)
    daily = scenario.daily_sums(dec.q_sur[idx])
    caps = np.asarray(q_bat, dtype=float) / params.e_chg
    charged = np.minimum(daily, caps[:, None])
    sold = daily - charged
    return charged.sum(axis=0), sold.sum(axis=0)


def estimate_sizing(
    curves: ScreeningCurveSet,
    dec: SliceDecomposition,
    scenario: Scenario,
    params: TariffAndCostParams,
) -> SizingEstimate:
    """Read capacities off the curves by counting least-cost slices.

    v_pv sums the widths of slices where a PV option strictly beats the
    grid; v_bat sums q_bat over slices where the battery option wins.  The
    annualized total cost is the all-grid baseline f_anu * p_buy * sum(D)
    minus the per-slice savings of the installed slices, which equals the
    per-slice minima plus the cost of night/uncovered demand.
    """
    choice = _choices(curves)
    installed = choice != GRID
    v_pv = float(curves.slice_widths[installed].sum())
    bat_slices = choice == PV_BATTERY
    v_bat = float(curves.q_bat[bat_slices].sum())

    best = np.minimum(curves.c_grid, np.minimum(curves.c_pv, curves.c_pvbat))
    baseline = scenario.f_anu * params.p_buy * float(scenario.demand.sum())
    savings = float((curves.c_grid - best)[installed].sum())
    total = baseline - savings

    idx = np.flatnonzero(installed)
    q_bat_installed = np.where(bat_slices, curves.q_bat, 0.0)[idx]
    per_day_charged, per_day_sold = charge_profile(
        idx, dec, scenario, params, q_bat_installed
    )

    grid_slices = np.flatnonzero(choice == GRID)
    if grid_slices.size:
        i = int(grid_slices[0])
        first_crossing = float(curves.slice_levels[i] - curves.slice_widths[i])
    else:
        first_crossing = None

    return SizingEstimate(
        v_pv=v_pv,
        v_bat=v_bat,
        annualized_total_cost=total,
        per_day_sold=per_day_sold,
        per_day_charged=per_day_charged,
        j_star=curves.j_star,
        first_crossing_kw=first_crossing,
    )


# ---------------------------------------------------------------------------
# Classical screening curves (time-invariant technologies, load-duration form)
# ---------------------------------------------------------------------------

HOURS_PER_YEAR = 8760.0


@dataclass(frozen=True)
class ClassicalBand:
    technology: int  # index into the input list
    label: str
    f_lo: float  # capacity-factor interval where this technology is cheapest
    f_hi: float
    level_lo: float  # corresponding load band, kW
    level_hi: float

    @property
    def capacity(self) -> float:
        return self.level_hi - self.level_lo


@dataclass(frozen=True)
class ClassicalResult:
    labels: tuple[str, ...]
    fixed_costs: np.ndarray  # currency/(kW*yr)
    variable_costs: np.ndarray  # currency/kWh
    load_duration: np.ndarray  # load sorted descending
    bands: tuple[ClassicalBand, ...]

    def line(self, t: int, f: np.ndarray) -> np.ndarray:
        """Annualized cost of technology t at capacity factor f."""
        return self.fixed_costs[t] + self.variable_costs[t] * HOURS_PER_YEAR * f

    def duration_at(self, f: float) -> float:
        """Load level exceeded for a fraction f of the time (step function)."""
        n = self.load_duration.shape[0]
        i = min(int(math.floor(f * n)), n - 1)
        return float(self.load_duration[i])


def classical_curves(
    technologies: Sequence[tuple], load: Sequence[float]
) -> ClassicalResult:
    """Classical screening analysis for time-invariant technologies.

    ``technologies`` is a list of (fixed_cost, variable_cost) or
    (label, fixed_cost, variable_cost) tuples; ``load`` is a chronological
    series in kWh per hour.  Each technology's screening line is
    c(f) = fixed + variable * 8760 * f; the lower envelope over the capacity
    factor f in [0, 1], combined with the load-duration curve, gives each
    technology a capacity band.
    """
    if not technologies:
        raise ValueError("at least one technology is required")
    labels, fixed, var = [], [], []
    for t, tech in enumerate(technologies):
        if len(tech) == 3:
            labels.append(str(tech[0]))
            fixed.append(float(tech[1]))
            var.append(float(tech[2]))
        else:
            labels.append(f"tech{t + 1}")
            fixed.append(float(tech[0]))
            var.append(float(tech[1]))
    fixed = np.asarray(fixed)
    slope = np.asarray(var) * HOURS_PER_YEAR
    ldc = np.sort(np.asarray(load, dtype=float))[::-1]

    result = ClassicalResult(
        labels=tuple(labels),
        fixed_costs=fixed,
        variable_costs=np.asarray(var),
        load_duration=ldc,
        bands=(),
    )

    # Walk the lower envelope of the lines from f = 0 to 1.
    def cheapest_at(f: float) -> int:
        costs = fixed + slope * f
        order = np.lexsort((slope, costs))  # cost, then slope as tie-break
        return int(order[0])

    segments: list[tuple[int, float, float]] = []
    f = 0.0
    current = cheapest_at(0.0)
    while f < 1.0:
        # Earliest crossing where some other line drops below the current one.
        f_next = 1.0
        nxt = None
        for t in range(fixed.shape[0]):
            if t == current or slope[t] >= slope[current]:
                continue
            cross = (fixed[t] - fixed[current]) / (slope[current] - slope[t])
            if f < cross < f_next:
                f_next = cross
                nxt = t
        segments.append((current, f, f_next))
        f = f_next
        if nxt is None:
            break
        current = nxt

    bands = []
    for seg_i, (t, f_lo, f_hi) in enumerate(segments):
        level_hi = result.duration_at(f_lo) if seg_i > 0 else float(ldc[0])
        level_lo = 0.0 if seg_i == len(segments) - 1 else result.duration_at(f_hi)
        bands.append(
            ClassicalBand(
                technology=t,
                label=labels[t],
                f_lo=f_lo,
                f_hi=f_hi,
                level_lo=level_lo,
                level_hi=level_hi,
            )
        )
    return ClassicalResult(
        labels=result.labels,
        fixed_costs=result.fixed_costs,
        variable_costs=result.variable_costs,
        load_duration=ldc,
        bands=tuple(bands),
    )
