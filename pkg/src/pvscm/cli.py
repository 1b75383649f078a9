"""Command-line interface: size, curves, sensitivity, compare, classic, serve.

Every subcommand reads one scenario source (--csv or --synthetic), applies
tariff overrides, and writes plot-ready JSON/CSV (and optionally SVG) files
into --out.  Outputs are deterministic for identical inputs; wall-clock
measurements are confined to "timing" metadata fields.

Exit codes: 0 ok, 2 invalid input, 3 internal error.  Errors are emitted as
one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import lp as lp_mod
from .domain import DomainError, Scenario, TariffAndCostParams
from .ingest import IngestError, SyntheticSpec, generate_synthetic, load_csv
from .scm import (
    build_curves,
    classical_curves,
    decompose,
    estimate_sizing,
)
from .sensitivity import SweepSpec, run_sweep
from .svgplot import Marker, Panel, Series, multi_panel

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3

PARAM_FLAGS = {
    "delta_p": "--delta-p",
    "c_pv_fixed": "--c-pv",
    "c_bat_fixed": "--c-bat",
    "p_buy": "--p-buy",
    "p_sell": "--p-sell",
    "e_chg": "--e-chg",
    "e_dis": "--e-dis",
    "e_pv": "--e-pv",
    "m_pv_max": "--m-pv",
    "g_stc": "--g-stc",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pvscm",
        description="Screening-curve sizing of household PV + battery, "
        "with an exact LP cross-check.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p: argparse.ArgumentParser, needs_scenario: bool = True):
        if needs_scenario:
            src = p.add_argument_group("scenario source (choose one)")
            src.add_argument("--csv", type=Path, help="demand/irradiation CSV file")
            src.add_argument(
                "--synthetic", type=Path, help="synthetic spec JSON file ({} = defaults)"
            )
            p.add_argument("--demand-col", default="demand_kwh")
            p.add_argument("--irr-col", default="irradiation_kwh_m2")
            p.add_argument("--day-col", default="day")
        for field, flag in PARAM_FLAGS.items():
            p.add_argument(flag, dest=field, type=float, default=None)
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument(
            "--format",
            choices=["json", "csv", "svg"],
            nargs="+",
            default=["json", "csv"],
            help="output formats to write (subcommand-dependent)",
        )

    p_size = sub.add_parser("size", help="estimate PV and battery capacities")
    add_io(p_size)

    p_curves = sub.add_parser("curves", help="emit the three screening curves")
    add_io(p_curves)

    p_sens = sub.add_parser("sensitivity", help="run a one-parameter sweep")
    add_io(p_sens)
    p_sens.add_argument(
        "--sweep", type=Path, required=True, help="sweep spec JSON file"
    )
    p_sens.add_argument("--max-workers", type=int, default=1)

    p_cmp = sub.add_parser("compare", help="run SCM and LP on the same scenario")
    add_io(p_cmp)
    p_cmp.add_argument("--with-lp", action="store_true", default=True)
    p_cmp.add_argument("--lp-timeout-s", type=float, default=None)
    p_cmp.add_argument("--export-lp", type=Path, default=None)

    p_classic = sub.add_parser(
        "classic", help="classical screening curves and load-duration bands"
    )
    add_io(p_classic)
    p_classic.add_argument(
        "--tech",
        action="append",
        required=True,
        metavar="LABEL:FIXED:VARIABLE",
        help="technology as label:fixed_cost:variable_cost (repeatable)",
    )

    p_serve = sub.add_parser("serve", help="start the JSON-over-HTTP service")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--store-capacity", type=int, default=64)
    p_serve.add_argument(
        "--ui-dir", type=Path, default=None, help="static assets directory"
    )
    return parser


def load_scenario(args: argparse.Namespace) -> Scenario:
    if (args.csv is None) == (args.synthetic is None):
        raise IngestError("exactly one of --csv or --synthetic is required")
    if args.csv is not None:
        return load_csv(
            args.csv,
            demand_col=args.demand_col,
            irr_col=args.irr_col,
            day_col=args.day_col,
        )
    spec = SyntheticSpec.from_json(args.synthetic)
    return generate_synthetic(spec)


def load_params(args: argparse.Namespace) -> TariffAndCostParams:
    overrides = {
        name: getattr(args, name)
        for name in PARAM_FLAGS
        if getattr(args, name, None) is not None
    }
    return TariffAndCostParams(**overrides)


def _write(path: Path, content: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8")
    return path


def _json_dumps(payload) -> str:
    return json.dumps(payload, indent=2, allow_nan=True)


def cmd_size(args) -> int:
    scenario = load_scenario(args)
    params = load_params(args)
    dec = decompose(scenario, params)
    curves = build_curves(scenario, params, dec)
    est = estimate_sizing(curves, dec, scenario, params)
    out = args.out
    _write(out / "sizing.json", _json_dumps(est.to_dict()))
    per_day = ["day,sold_kwh,charged_kwh"]
    for d in range(scenario.n_d):
        per_day.append(
            f"{d + 1},{est.per_day_sold[d]:.9g},{est.per_day_charged[d]:.9g}"
        )
    _write(out / "per_day.csv", "\n".join(per_day) + "\n")
    print(json.dumps(est.to_dict()))
    return EXIT_OK


def _curves_csv(curves) -> str:
    lines = ["slice_level_kw,c_grid,c_pv,c_pvbat,q_bat,cumulative_battery"]
    cum = curves.cumulative_battery
    for i in range(curves.n_slices):
        lines.append(
            f"{curves.slice_levels[i]:.9g},{curves.c_grid[i]:.9g},"
            f"{curves.c_pv[i]:.9g},{curves.c_pvbat[i]:.9g},"
            f"{curves.q_bat[i]:.9g},{cum[i]:.9g}"
        )
    return "\n".join(lines) + "\n"


def _curves_svg(curves, est) -> str:
    levels = list(curves.slice_levels)
    cost_panel = Panel(
        title="Screening curves (per kW of PV)",
        x_label="slice level [kW]",
        y_label="annualized cost [currency/(kW yr)]",
        series=[
            Series("grid", levels, list(curves.c_grid_per_kw)),
            Series("PV", levels, list(curves.c_pv_per_kw)),
            Series("PV+battery", levels, list(curves.c_pvbat_per_kw)),
        ],
    )
    if est.first_crossing_kw is not None and est.first_crossing_kw > 0:
        idx = int(np.searchsorted(curves.slice_levels, est.first_crossing_kw))
        idx = min(max(idx, 0), curves.n_slices - 1)
        cost_panel.markers.append(
            Marker(
                est.first_crossing_kw,
                float(curves.c_grid_per_kw[idx]),
                f"{est.first_crossing_kw:.2f} kW",
            )
        )
    battery_panel = Panel(
        title="Cumulative battery amount",
        x_label="slice level [kW]",
        y_label="battery [kWh]",
        series=[Series("cumulative battery", levels, list(curves.cumulative_battery))],
    )
    return multi_panel([cost_panel, battery_panel])


def cmd_curves(args) -> int:
    scenario = load_scenario(args)
    params = load_params(args)
    dec = decompose(scenario, params)
    curves = build_curves(scenario, params, dec)
    est = estimate_sizing(curves, dec, scenario, params)
    out = args.out
    written = [
        _write(out / "curves.csv", _curves_csv(curves)),
        _write(
            out / "curves_meta.json",
            _json_dumps(
                {
                    "n_slices": curves.n_slices,
                    "j_star": curves.j_star,
                    "first_crossing_kw": est.first_crossing_kw,
                    "v_pv_kw": est.v_pv,
                    "v_bat_kwh": est.v_bat,
                }
            ),
        ),
    ]
    if "svg" in args.format:
        written.append(_write(out / "curves.svg", _curves_svg(curves, est)))
    print(json.dumps({"written": [str(p) for p in written]}))
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    scenario = load_scenario(args)
    params = load_params(args)
    spec = SweepSpec.from_dict(json.loads(args.sweep.read_text(encoding="utf-8")))
    result = run_sweep(spec, scenario, params, max_workers=args.max_workers)
    written = result.write(args.out)
    print(json.dumps({"written": [str(p) for p in written]}))
    return EXIT_OK


def cmd_compare(args) -> int:
    scenario = load_scenario(args)
    params = load_params(args)

    t0 = time.perf_counter()
    dec = decompose(scenario, params)
    curves = build_curves(scenario, params, dec)
    est = estimate_sizing(curves, dec, scenario, params)
    scm_seconds = time.perf_counter() - t0

    model = lp_mod.build_lp(scenario, params)
    if args.export_lp is not None:
        _write(args.export_lp, lp_mod.export_lp_text(model))

    t0 = time.perf_counter()
    lp_timed_out = False
    try:
        sol = lp_mod.solve(
            model, time_limit_s=args.lp_timeout_s, audit_inputs=(scenario, params)
        )
        lp_seconds = time.perf_counter() - t0
        lp_payload = sol.to_dict()
        if not sol.is_optimal:
            lp_timed_out = sol.status == "iteration-limit"
    except lp_mod.LpError as exc:
        lp_seconds = time.perf_counter() - t0
        sol = None
        lp_payload = {"status": "error", "message": str(exc)}

    scm_cost_via_lp = None
    if sol is not None and sol.is_optimal:
        re = lp_mod.dispatch_lp(scenario, params, est.v_pv, est.v_bat)
        if re.is_optimal:
            scm_cost_via_lp = re.objective

    payload = {
        "scm": {
            "v_pv_kw": est.v_pv,
            "v_bat_kwh": est.v_bat,
            "annual_cost": est.annualized_total_cost,
            "j_star": est.j_star,
        },
        "lp": lp_payload,
        "lp_timed_out": lp_timed_out,
        "scm_cost_via_dispatch_lp": scm_cost_via_lp,
        "timing": {"scm_seconds": scm_seconds, "lp_seconds": lp_seconds},
    }
    _write(args.out / "comparison.json", _json_dumps(payload))
    print(json.dumps(payload))
    return EXIT_OK


def _parse_tech(raw: str) -> tuple[str, float, float]:
    parts = raw.split(":")
    if len(parts) == 2:
        return (f"tech({raw})", float(parts[0]), float(parts[1]))
    if len(parts) == 3:
        return (parts[0], float(parts[1]), float(parts[2]))
    raise IngestError(f"bad --tech value {raw!r}, expected label:fixed:variable")


def cmd_classic(args) -> int:
    scenario = load_scenario(args)
    techs = [_parse_tech(raw) for raw in args.tech]
    result = classical_curves(techs, scenario.demand)
    out = args.out

    n = result.load_duration.shape[0]
    lines = ["capacity_factor,load_kw"]
    for i in range(n):
        lines.append(f"{(i + 0.5) / n:.9g},{result.load_duration[i]:.9g}")
    written = [_write(out / "load_duration.csv", "\n".join(lines) + "\n")]

    lines = ["technology,f_lo,f_hi,level_lo_kw,level_hi_kw,capacity_kw"]
    for band in result.bands:
        lines.append(
            f"{band.label},{band.f_lo:.9g},{band.f_hi:.9g},"
            f"{band.level_lo:.9g},{band.level_hi:.9g},{band.capacity:.9g}"
        )
    written.append(_write(out / "capacity_bands.csv", "\n".join(lines) + "\n"))

    fs = np.linspace(0, 1, 101)
    lines = ["technology,capacity_factor,annual_cost"]
    for t, label in enumerate(result.labels):
        for f, c in zip(fs, result.line(t, fs)):
            lines.append(f"{label},{f:.9g},{c:.9g}")
    written.append(_write(out / "screening_lines.csv", "\n".join(lines) + "\n"))

    if "svg" in args.format:
        screen_panel = Panel(
            title="Screening curves",
            x_label="capacity factor",
            y_label="annualized cost [currency/(kW yr)]",
            series=[
                Series(result.labels[t], list(fs), list(result.line(t, fs)))
                for t in range(len(result.labels))
            ],
        )
        ldc_panel = Panel(
            title="Load-duration curve",
            x_label="capacity factor",
            y_label="load [kW]",
            series=[
                Series(
                    "load duration",
                    [(i + 0.5) / n for i in range(n)],
                    list(result.load_duration),
                )
            ],
        )
        written.append(
            _write(out / "classic.svg", multi_panel([screen_panel, ldc_panel]))
        )
    print(json.dumps({"written": [str(p) for p in written]}))
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import serve

    serve(
        host=args.host,
        port=args.port,
        store_capacity=args.store_capacity,
        ui_dir=args.ui_dir,
    )
    return EXIT_OK


COMMANDS = {
    "size": cmd_size,
    "curves": cmd_curves,
    "sensitivity": cmd_sensitivity,
    "compare": cmd_compare,
    "classic": cmd_classic,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (DomainError, IngestError, FileNotFoundError, json.JSONDecodeError) as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
        )
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - defensive
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
        )
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
