"""Exact LP formulation of the PV + battery sizing problem.

Decision variables are the capacities v_pv (kW) and v_bat (kWh) plus, per
time step, the grid purchase/sale and battery charge/discharge energies and
the battery state of charge.  Minimizing annualized cost subject to the SOC
state equation (cyclic boundary), SOC capacity bound, energy balance, PV cap
and non-negativity gives the ground truth the screening-curve estimate is
verified against.

The model is built as sparse matrices and solved with scipy's HiGHS backend;
every optimal solution is audited by recomputing all constraints directly
from the scenario, independent of the solver and of the model matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .domain import Scenario, TariffAndCostParams

__all__ = [
    "LpModel",
    "LpSolution",
    "LpError",
    "IterationLimit",
    "NumericalFailure",
    "AuditFailure",
    "build_lp",
    "solve",
    "dispatch_lp",
    "audit_solution",
    "export_lp_text",
]

FEASIBILITY_TOL = 1e-7  # absolute, on rows normalized by their max coefficient
OBJECTIVE_TOL = 1e-7  # relative, solver objective vs. recomputed objective


class LpError(RuntimeError):
    pass


class IterationLimit(LpError):
    pass


class NumericalFailure(LpError):
    pass


class AuditFailure(LpError):
    pass


@dataclass(frozen=True)
class LpModel:
    """Sparse LP in standard form: min c.x s.t. A_eq x = b_eq, A_ub x <= b_ub,
    bounds[i][0] <= x_i <= bounds[i][1].

    Variable layout: [v_pv, v_bat, u_buy_1..n_t, u_sell_*, u_bin_*, u_bout_*,
    x_soc_*], so n_vars = 2 + 5 * n_t.
    """

    n_t: int
    c: np.ndarray
    a_eq: sparse.csr_matrix
    b_eq: np.ndarray
    a_ub: sparse.csr_matrix
    b_ub: np.ndarray
    bounds: list[tuple[float, float | None]]
    row_names: list[str] = field(default_factory=list)

    @property
    def n_vars(self) -> int:
        return 2 + 5 * self.n_t

    # Variable index helpers (k is 0-based).
    V_PV = 0
    V_BAT = 1

    def u_buy(self, k: int) -> int:
        return 2 + k

    def u_sell(self, k: int) -> int:
        return 2 + self.n_t + k

    def u_bin(self, k: int) -> int:
        return 2 + 2 * self.n_t + k

    def u_bout(self, k: int) -> int:
        return 2 + 3 * self.n_t + k

    def x_soc(self, k: int) -> int:
        return 2 + 4 * self.n_t + k

    def var_name(self, j: int) -> str:
        if j == 0:
            return "v_pv"
        if j == 1:
            return "v_bat"
        block, k = divmod(j - 2, self.n_t)
        return f"{['u_buy', 'u_sell', 'u_bin', 'u_bout', 'x_soc'][block]}_{k + 1}"


@dataclass(frozen=True)
class LpSolution:
    """Solved capacities, dispatch trajectories and objective.

    ``status`` is one of optimal | infeasible | unbounded | iteration-limit.
    Energy series are kWh per step; ``x_soc[k]`` is the SOC entering step k.
    """

    status: str
    v_pv: float
    v_bat: float
    u_buy: np.ndarray
    u_sell: np.ndarray
    u_bin: np.ndarray
    u_bout: np.ndarray
    x_soc: np.ndarray
    objective: float
    solver_message: str = ""
    iterations: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "v_pv_kw": self.v_pv,
            "v_bat_kwh": self.v_bat,
            "objective": self.objective,
        }


def build_lp(scenario: Scenario, params: TariffAndCostParams) -> LpModel:
    """Assemble the sizing LP for a scenario.

    Equalities: for each step k, the SOC state equation
    x_soc[k+1] = x_soc[k] + e_chg*u_bin[k] - u_bout[k]/e_dis with the cyclic
    boundary x_soc[n_t+1] := x_soc[1] realized by index aliasing, and the
    energy balance u_buy - u_sell - u_bin + u_bout + (S_k*e_pv/g_stc)*v_pv
    = D_k.  Inequalities: x_soc[k] <= v_bat per step and v_pv <= m_pv_max
    (without which cheap PV makes the problem unbounded).  All variables are
    bounded below by zero.
    """
    n_t = scenario.n_t
    n_vars = 2 + 5 * n_t
    c = np.zeros(n_vars)
    c[LpModel.V_PV] = params.c_pv_fixed
    c[LpModel.V_BAT] = params.c_bat_fixed
    c[2 : 2 + n_t] = scenario.f_anu * params.p_buy  # u_buy
    c[2 + n_t : 2 + 2 * n_t] = -scenario.f_anu * params.p_sell  # u_sell

    def u_buy(k):
        return 2 + k

    def u_sell(k):
        return 2 + n_t + k

    def u_bin(k):
        return 2 + 2 * n_t + k

    def u_bout(k):
        return 2 + 3 * n_t + k

    def x_soc(k):
        return 2 + 4 * n_t + k

    rows, cols, vals = [], [], []
    b_eq = np.zeros(2 * n_t)
    row_names = []

    # State equation rows 0..n_t-1: x_soc[(k+1) % n_t] - x_soc[k]
    #   - e_chg*u_bin[k] + u_bout[k]/e_dis = 0
    for k in range(n_t):
        r = k
        rows += [r, r, r, r]
        cols += [x_soc((k + 1) % n_t), x_soc(k), u_bin(k), u_bout(k)]
        vals += [1.0, -1.0, -params.e_chg, 1.0 / params.e_dis]
        row_names.append(f"soc_state_{k + 1}")
    # Balance rows n_t..2n_t-1.
    pv_gain = scenario.irradiation * (params.e_pv / params.g_stc)
    for k in range(n_t):
        r = n_t + k
        rows += [r, r, r, r, r]
        cols += [u_buy(k), u_sell(k), u_bin(k), u_bout(k), LpModel.V_PV]
        vals += [1.0, -1.0, -1.0, 1.0, pv_gain[k]]
        b_eq[r] = scenario.demand[k]
        row_names.append(f"balance_{k + 1}")
    a_eq = sparse.csr_matrix(
        (vals, (rows, cols)), shape=(2 * n_t, n_vars), dtype=float
    )

    rows, cols, vals = [], [], []
    b_ub = np.zeros(n_t + 1)
    for k in range(n_t):
        rows += [k, k]
        cols += [x_soc(k), LpModel.V_BAT]
        vals += [1.0, -1.0]
        row_names.append(f"soc_cap_{k + 1}")
    rows.append(n_t)
    cols.append(LpModel.V_PV)
    vals.append(1.0)
    b_ub[n_t] = params.m_pv_max
    row_names.append("pv_cap")
    a_ub = sparse.csr_matrix(
        (vals, (rows, cols)), shape=(n_t + 1, n_vars), dtype=float
    )

    bounds = [(0.0, None)] * n_vars
    return LpModel(
        n_t=n_t,
        c=c,
        a_eq=a_eq,
        b_eq=b_eq,
        a_ub=a_ub,
        b_ub=b_ub,
        bounds=bounds,
        row_names=row_names,
    )


_STATUS = {
    0: "optimal",
    1: "iteration-limit",
    2: "infeasible",
    3: "unbounded",
}


def solve(
    model: LpModel,
    method: str = "highs",
    time_limit_s: float | None = None,
    audit_inputs: tuple[Scenario, TariffAndCostParams] | None = None,
) -> LpSolution:
    """Solve the model and return the solution with a clean status.

    Pass ``audit_inputs=(scenario, params)`` to recompute feasibility and the
    objective independently of the solver; an optimal solution failing that
    audit raises :class:`AuditFailure` rather than being returned silently.

    Raises:
        NumericalFailure: the backend reported numerical trouble (status 4).
    """
    options: dict = {}
    if time_limit_s is not None and method.startswith("highs"):
        options["time_limit"] = float(time_limit_s)
    res = linprog(
        model.c,
        A_ub=model.a_ub,
        b_ub=model.b_ub,
        A_eq=model.a_eq,
        b_eq=model.b_eq,
        bounds=model.bounds,
        method=method,
        options=options,
    )
    if res.status == 4:
        raise NumericalFailure(res.message)
    status = _STATUS.get(res.status, "iteration-limit")
    n_t = model.n_t
    if res.x is None:
        x = np.zeros(model.n_vars)
        objective = math.nan
    else:
        x = np.asarray(res.x, dtype=float)
        objective = float(res.fun)
    solution = LpSolution(
        status=status,
        v_pv=float(x[LpModel.V_PV]),
        v_bat=float(x[LpModel.V_BAT]),
        u_buy=x[2 : 2 + n_t].copy(),
        u_sell=x[2 + n_t : 2 + 2 * n_t].copy(),
        u_bin=x[2 + 2 * n_t : 2 + 3 * n_t].copy(),
        u_bout=x[2 + 3 * n_t : 2 + 4 * n_t].copy(),
        x_soc=x[2 + 4 * n_t : 2 + 5 * n_t].copy(),
        objective=objective,
        solver_message=str(res.message),
        iterations=int(getattr(res, "nit", 0) or 0),
    )
    if solution.is_optimal and audit_inputs is not None:
        issues = audit_solution(audit_inputs[0], audit_inputs[1], solution)
        if issues:
            raise AuditFailure("; ".join(issues))
    return solution


def dispatch_lp(
    scenario: Scenario,
    params: TariffAndCostParams,
    v_pv: float,
    v_bat: float,
    method: str = "highs",
    time_limit_s: float | None = None,
) -> LpSolution:
    """Optimal operating cost with the capacities fixed.

    The capacity variables are pinned by equal lower/upper bounds, so the
    objective still includes their fixed costs and is directly comparable to
    the full LP objective (it can only be larger).
    """
    if v_pv < 0 or v_bat < 0:
        raise ValueError("capacities must be non-negative")
    model = build_lp(scenario, params)
    bounds = list(model.bounds)
    bounds[LpModel.V_PV] = (v_pv, v_pv)
    bounds[LpModel.V_BAT] = (v_bat, v_bat)
    pinned = LpModel(
        n_t=model.n_t,
        c=model.c,
        a_eq=model.a_eq,
        b_eq=model.b_eq,
        a_ub=model.a_ub,
        b_ub=model.b_ub,
        bounds=bounds,
        row_names=model.row_names,
    )
    return solve(pinned, method=method, time_limit_s=time_limit_s)


def audit_solution(
    scenario: Scenario,
    params: TariffAndCostParams,
    sol: LpSolution,
    tol: float = FEASIBILITY_TOL,
) -> list[str]:
    """Recompute every constraint and the objective from the raw scenario.

    Residuals are normalized by each row's largest coefficient magnitude
    (incl. the right-hand side) before comparison with ``tol``.  Returns a
    list of violation descriptions, empty when the solution checks out.
    """
    issues: list[str] = []
    n_t = scenario.n_t

    def norm(*values: float) -> float:
        return max(1.0, *(abs(v) for v in values))

    # Non-negativity (Eq-style bound audit).
    for name, arr in (
        ("v_pv", np.array([sol.v_pv])),
        ("v_bat", np.array([sol.v_bat])),
        ("u_buy", sol.u_buy),
        ("u_sell", sol.u_sell),
        ("u_bin", sol.u_bin),
        ("u_bout", sol.u_bout),
        ("x_soc", sol.x_soc),
    ):
        low = float(arr.min()) if arr.size else 0.0
        if low < -tol:
            issues.append(f"{name} negative: {low}")

    # SOC state equation with cyclic boundary.
    soc_next = np.roll(sol.x_soc, -1)
    resid = soc_next - sol.x_soc - params.e_chg * sol.u_bin + sol.u_bout / params.e_dis
    scale = np.maximum.reduce(
        [
            np.full(n_t, 1.0),
            np.abs(sol.x_soc),
            np.abs(soc_next),
            params.e_chg * np.abs(sol.u_bin),
            np.abs(sol.u_bout) / params.e_dis,
        ]
    )
    worst = np.abs(resid / scale).max() if n_t else 0.0
    if worst > tol:
        issues.append(f"soc state equation residual {worst}")

    # SOC capacity bound.
    over = (sol.x_soc - sol.v_bat) / norm(sol.v_bat)
    if float(over.max()) > tol:
        issues.append(f"x_soc exceeds v_bat by {float(over.max())}")

    # Energy balance.
    pv = scenario.irradiation * (params.e_pv / params.g_stc) * sol.v_pv
    resid = sol.u_buy - sol.u_sell - sol.u_bin + sol.u_bout - (scenario.demand - pv)
    scale = np.maximum.reduce(
        [
            np.full(n_t, 1.0),
            np.abs(sol.u_buy),
            np.abs(sol.u_sell),
            np.abs(sol.u_bin),
            np.abs(sol.u_bout),
            np.abs(scenario.demand),
            np.abs(pv),
        ]
    )
    worst = np.abs(resid / scale).max()
    if worst > tol:
        issues.append(f"energy balance residual {worst}")

    # PV cap.
    if (sol.v_pv - params.m_pv_max) / norm(params.m_pv_max) > tol:
        issues.append(f"v_pv {sol.v_pv} exceeds cap {params.m_pv_max}")

    # Objective recomputation.
    obj = (
        scenario.f_anu
        * float((params.p_buy * sol.u_buy - params.p_sell * sol.u_sell).sum())
        + params.c_pv_fixed * sol.v_pv
        + params.c_bat_fixed * sol.v_bat
    )
    if not math.isclose(obj, sol.objective, rel_tol=OBJECTIVE_TOL, abs_tol=1e-9):
        issues.append(f"objective mismatch: recomputed {obj} vs {sol.objective}")
    return issues


def export_lp_text(model: LpModel, name: str = "pv_battery_sizing") -> str:
    """Render the model in the human-readable CPLEX LP text format.

    Default variable bounds in that format are [0, +inf), which matches the
    non-negativity constraints, so only explicitly pinned bounds are listed.
    """

    def term(coef: float, var: str, first: bool) -> str:
        sign = "-" if coef < 0 else ("" if first else "+")
        return f"{sign} {abs(coef):.12g} {var}".strip()

    lines = [f"\\ {name}", "Minimize", " obj:"]
    parts = []
    for j in np.flatnonzero(model.c):
        parts.append(term(float(model.c[j]), model.var_name(int(j)), not parts))
    lines[-1] += " " + " ".join(parts)

    lines.append("Subject To")
    a_eq = model.a_eq.tocoo()
    eq_terms: dict[int, list[str]] = {}
    for r, j, v in zip(a_eq.row, a_eq.col, a_eq.data):
        eq_terms.setdefault(int(r), []).append(
            term(float(v), model.var_name(int(j)), not eq_terms.get(int(r)))
        )
    for r in range(model.b_eq.shape[0]):
        rname = model.row_names[r] if r < len(model.row_names) else f"eq_{r}"
        lines.append(f" {rname}: {' '.join(eq_terms.get(r, []))} = {model.b_eq[r]:.12g}")
    a_ub = model.a_ub.tocoo()
    ub_terms: dict[int, list[str]] = {}
    for r, j, v in zip(a_ub.row, a_ub.col, a_ub.data):
        ub_terms.setdefault(int(r), []).append(
            term(float(v), model.var_name(int(j)), not ub_terms.get(int(r)))
        )
    n_eq = model.b_eq.shape[0]
    for r in range(model.b_ub.shape[0]):
        rname = (
            model.row_names[n_eq + r]
            if n_eq + r < len(model.row_names)
            else f"ub_{r}"
        )
        lines.append(
            f" {rname}: {' '.join(ub_terms.get(r, []))} <= {model.b_ub[r]:.12g}"
        )

    pinned = [
        (j, lo, hi)
        for j, (lo, hi) in enumerate(model.bounds)
        if not (lo == 0.0 and hi is None)
    ]
    if pinned:
        lines.append("Bounds")
        for j, lo, hi in pinned:
            if hi is None:
                lines.append(f" {model.var_name(j)} >= {lo:.12g}")
            else:
                lines.append(f" {lo:.12g} <= {model.var_name(j)} <= {hi:.12g}")
    lines.append("End")
    return "\n".join(lines) + "\n"
