"""Stateless JSON-over-HTTP facade for browser-driven what-if exploration.

Endpoints:
    GET  /api/health              liveness probe
    POST /api/scenario            CSV body (text/csv) or JSON {"synthetic":
                                  spec} / {"scenario": {demand, irradiation,
                                  day_index?, step_hours?}}; returns
                                  {scenario_id, n_t, n_d}
    POST /api/solve               {scenario_id, params?, with_lp?,
                                  lp_timeout_s?}; returns sizing + scaled
                                  curves (+ LP result when requested)
    POST /api/sweep               {scenario_id, sweep: SweepSpec}; streams
                                  newline-delimited JSON rows (chunked)

Scenarios live in a bounded in-memory LRU store; evicted ids answer 410.
All responses are pure functions of the request payload and the stored
scenario, so concurrent identical requests return identical bodies.  Floats
are emitted with at most six significant digits to keep payloads stable
across platforms.
"""

from __future__ import annotations

import json
import secrets
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from . import lp as lp_mod
from .domain import DomainError, Scenario, TariffAndCostParams, validate_scenario
from .ingest import IngestError, SyntheticSpec, generate_synthetic, load_csv_text
from .scm import build_curves, decompose, estimate_sizing
from .sensitivity import SweepSpec, _run_point

__all__ = ["ScenarioStore", "AppServer", "create_server", "serve"]


class ApiError(Exception):
    def __init__(self, status: int, message: str, **detail):
        self.status = status
        self.message = message
        self.detail = detail
        super().__init__(message)


def _round_floats(obj, digits: int = 6):
    """Recursively clamp floats to `digits` significant digits."""
    if isinstance(obj, float):
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, digits) for v in obj]
    return obj


@dataclass
class StoredScenario:
    scenario_id: str
    scenario: Scenario
    created_at: float


class ScenarioStore:
    """Bounded LRU map of scenario-id -> Scenario; remembers evictions."""

    def __init__(self, capacity: int = 64):
        if capacity <= 0:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._lock = threading.Lock()
        self._items: OrderedDict[str, StoredScenario] = OrderedDict()
        self._evicted: OrderedDict[str, None] = OrderedDict()

    def put(self, scenario: Scenario) -> StoredScenario:
        entry = StoredScenario(
            scenario_id=secrets.token_hex(8),
            scenario=scenario,
            created_at=time.time(),
        )
        with self._lock:
            self._items[entry.scenario_id] = entry
            while len(self._items) > self.capacity:
                old_id, _ = self._items.popitem(last=False)
                self._evicted[old_id] = None
                while len(self._evicted) > 16 * self.capacity:
                    self._evicted.popitem(last=False)
        return entry

    def get(self, scenario_id: str) -> Scenario:
        with self._lock:
            entry = self._items.get(scenario_id)
            if entry is not None:
                self._items.move_to_end(scenario_id)
                return entry.scenario
            if scenario_id in self._evicted:
                raise ApiError(410, f"scenario {scenario_id} was evicted")
        raise ApiError(404, f"unknown scenario id {scenario_id}")

    def __len__(self) -> int:
        with self._lock:
            return len(self._items)


def _parse_params(payload: dict | None) -> TariffAndCostParams:
    if not payload:
        return TariffAndCostParams()
    allowed = set(TariffAndCostParams.__dataclass_fields__)
    unknown = set(payload) - allowed
    if unknown:
        raise ApiError(400, f"unknown parameter fields: {sorted(unknown)}")
    try:
        return TariffAndCostParams(**{k: float(v) for k, v in payload.items()})
    except (TypeError, ValueError, DomainError) as exc:
        raise ApiError(400, f"invalid params: {exc}") from exc


def solve_payload(
    scenario: Scenario,
    params: TariffAndCostParams,
    with_lp: bool = False,
    lp_timeout_s: float | None = None,
) -> tuple[int, dict]:
    """Compute the /api/solve response; returns (http_status, body)."""
    dec = decompose(scenario, params)
    curves = build_curves(scenario, params, dec)
    est = estimate_sizing(curves, dec, scenario, params)
    body = {
        "v_pv_kw": est.v_pv,
        "v_bat_kwh": est.v_bat,
        "annual_cost": est.annualized_total_cost,
        "j_star": est.j_star,
        "first_crossing_kw": est.first_crossing_kw,
        "curves": {
            "slice_level_kw": curves.slice_levels.tolist(),
            "c_grid_per_kw": curves.c_grid_per_kw.tolist(),
            "c_pv_per_kw": curves.c_pv_per_kw.tolist(),
            "c_pvbat_per_kw": curves.c_pvbat_per_kw.tolist(),
            "cumulative_battery_kwh": curves.cumulative_battery.tolist(),
        },
        "per_day": {
            "sold_kwh": est.per_day_sold.tolist(),
            "charged_kwh": est.per_day_charged.tolist(),
        },
    }
    status = 200
    if with_lp:
        try:
            sol = lp_mod.solve(
                lp_mod.build_lp(scenario, params),
                time_limit_s=lp_timeout_s,
                audit_inputs=(scenario, params),
            )
            if sol.is_optimal:
                body["lp"] = sol.to_dict()
            else:
                body["lp_timeout"] = True
                body["lp"] = {"status": sol.status}
                status = 504
        except lp_mod.LpError as exc:
            body["lp"] = {"status": "error", "message": str(exc)}
            status = 504
    return status, body


class AppServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, store_capacity: int = 64, ui_dir: Path | None = None):
        self.store = ScenarioStore(store_capacity)
        self.ui_dir = ui_dir
        super().__init__(address, Handler)


class Handler(BaseHTTPRequestHandler):
    server: AppServer
    protocol_version = "HTTP/1.1"

    # -- plumbing ----------------------------------------------------------

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _cors(self):
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def _send_json(self, status: int, payload: dict):
        body = json.dumps(_round_floats(payload)).encode()
        self.send_response(status)
        self._cors()
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _read_body(self) -> bytes:
        length = int(self.headers.get("Content-Length", 0))
        return self.rfile.read(length) if length else b""

    def _json_body(self) -> dict:
        try:
            payload = json.loads(self._read_body() or b"{}")
        except json.JSONDecodeError as exc:
            raise ApiError(400, f"invalid JSON body: {exc}") from exc
        if not isinstance(payload, dict):
            raise ApiError(400, "JSON body must be an object")
        return payload

    # -- routes ------------------------------------------------------------

    def do_OPTIONS(self):
        self.send_response(204)
        self._cors()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        if self.path == "/api/health":
            self._send_json(200, {"status": "ok"})
            return
        self._serve_static()

    def do_POST(self):
        try:
            if self.path == "/api/scenario":
                self._post_scenario()
            elif self.path == "/api/solve":
                self._post_solve()
            elif self.path == "/api/sweep":
                self._post_sweep()
            else:
                raise ApiError(404, f"no such endpoint {self.path}")
        except ApiError as exc:
            self._send_json(
                exc.status, {"error": exc.message, **({"detail": exc.detail} if exc.detail else {})}
            )
        except (DomainError, IngestError, ValueError) as exc:
            self._send_json(400, {"error": f"{type(exc).__name__}: {exc}"})
        except Exception as exc:  # pragma: no cover - defensive
            self._send_json(500, {"error": f"{type(exc).__name__}: {exc}"})

    def _post_scenario(self):
        ctype = (self.headers.get("Content-Type") or "").split(";")[0].strip()
        if ctype == "text/csv":
            scenario = load_csv_text(self._read_body().decode("utf-8"))
        else:
            payload = self._json_body()
            if "synthetic" in payload:
                scenario = generate_synthetic(
                    SyntheticSpec.from_dict(payload["synthetic"])
                )
            elif "scenario" in payload:
                raw = payload["scenario"]
                scenario = validate_scenario(
                    raw.get("demand", []),
                    raw.get("irradiation", []),
                    day_index=raw.get("day_index"),
                    step_hours=raw.get("step_hours", 1.0),
                )
            else:
                raise ApiError(
                    400, "body must carry 'synthetic' or 'scenario' (or be text/csv)"
                )
        entry = self.server.store.put(scenario)
        self._send_json(
            200,
            {
                "scenario_id": entry.scenario_id,
                "n_t": scenario.n_t,
                "n_d": scenario.n_d,
            },
        )

    def _post_solve(self):
        payload = self._json_body()
        scenario = self.server.store.get(str(payload.get("scenario_id")))
        params = _parse_params(payload.get("params"))
        status, body = solve_payload(
            scenario,
            params,
            with_lp=bool(payload.get("with_lp", False)),
            lp_timeout_s=payload.get("lp_timeout_s"),
        )
        self._send_json(status, body)

    def _post_sweep(self):
        payload = self._json_body()
        scenario = self.server.store.get(str(payload.get("scenario_id")))
        params = _parse_params(payload.get("params"))
        try:
            spec = SweepSpec.from_dict(payload.get("sweep") or {})
        except (KeyError, TypeError, ValueError) as exc:
            raise ApiError(400, f"invalid sweep spec: {exc}") from exc

        # Stream one JSON row per value via chunked transfer encoding.
        self.send_response(200)
        self._cors()
        self.send_header("Content-Type", "application/x-ndjson")
        self.send_header("Transfer-Encoding", "chunked")
        self.end_headers()
        for value in spec.values:
            point = _run_point(scenario, params, spec, value)
            row = json.dumps(_round_floats(point.to_dict())).encode() + b"\n"
            self.wfile.write(f"{len(row):x}\r\n".encode() + row + b"\r\n")
        self.wfile.write(b"0\r\n\r\n")

    # -- static UI ---------------------------------------------------------

    CONTENT_TYPES = {
        ".html": "text/html; charset=utf-8",
        ".js": "text/javascript; charset=utf-8",
        ".mjs": "text/javascript; charset=utf-8",
        ".css": "text/css; charset=utf-8",
        ".svg": "image/svg+xml",
        ".json": "application/json",
        ".map": "application/json",
    }

    def _serve_static(self):
        root = self.server.ui_dir
        if root is None:
            self._send_json(404, {"error": "no UI bundled; API lives under /api/"})
            return
        rel = self.path.split("?")[0].lstrip("/") or "index.html"
        target = (root / rel).resolve()
        if not str(target).startswith(str(root.resolve())) or not target.is_file():
            self._send_json(404, {"error": f"not found: {self.path}"})
            return
        body = target.read_bytes()
        self.send_response(200)
        self._cors()
        ctype = self.CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def create_server(
    host: str = "127.0.0.1",
    port: int = 8080,
    store_capacity: int = 64,
    ui_dir: Path | None = None,
) -> AppServer:
    return AppServer((host, port), store_capacity=store_capacity, ui_dir=ui_dir)


def serve(
    host: str = "127.0.0.1",
    port: int = 8080,
    store_capacity: int = 64,
    ui_dir: Path | None = None,
) -> None:  # pragma: no cover - blocking entry point
    server = create_server(host, port, store_capacity, ui_dir)
    print(f"pvscm service listening on http://{host}:{port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
