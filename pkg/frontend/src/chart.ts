// Pure SVG rendering of solve responses: no DOM access, string in/out, so
// fidelity is testable without a browser. Every plotted number comes
// straight from the response arrays.

import type { SolveResponse } from "./types.js";

export interface RenderOptions {
  pinned?: SolveResponse | null;
  overlays?: { label: string; response: SolveResponse }[];
  width?: number;
  height?: number;
}

const COLORS = { grid: "#6a3d9a", pv: "#1f78b4", pvbat: "#33a02c" };
const OVERLAY_FADE = ["#1f78b4", "#5aa7d6", "#9ccae8", "#c6e0f2", "#e3eff8"];

interface Frame {
  x0: number;
  y0: number;
  w: number;
  h: number;
  xLo: number;
  xHi: number;
  yLo: number;
  yHi: number;
}

function px(f: Frame, x: number): number {
  return f.x0 + ((x - f.xLo) / (f.xHi - f.xLo || 1)) * f.w;
}

function py(f: Frame, y: number): number {
  return f.y0 + f.h - ((y - f.yLo) / (f.yHi - f.yLo || 1)) * f.h;
}

function polyline(
  f: Frame,
  xs: number[],
  ys: number[],
  color: string,
  cls: string,
  dashed = false,
): string {
  const pts = xs
    .map((x, i) => `${px(f, x).toFixed(2)},${py(f, ys[i]).toFixed(2)}`)
    .join(" ");
  const dash = dashed ? ' stroke-dasharray="6 4"' : "";
  return `<polyline class="${cls}" points="${pts}" fill="none" stroke="${color}" stroke-width="1.6"${dash}/>`;
}

function ticks(lo: number, hi: number, n = 5): number[] {
  if (hi <= lo) return [lo];
  const raw = (hi - lo) / n;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = [1, 2, 2.5, 5, 10].find((m) => raw <= m * mag)! * mag;
  const out: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-12; t += step) {
    out.push(Number(t.toPrecision(12)));
  }
  return out;
}

function axes(f: Frame, xLabel: string, yLabel: string): string {
  const parts = [
    `<rect x="${f.x0}" y="${f.y0}" width="${f.w}" height="${f.h}" fill="none" stroke="#999"/>`,
  ];
  for (const t of ticks(f.xLo, f.xHi)) {
    parts.push(
      `<text x="${px(f, t).toFixed(1)}" y="${f.y0 + f.h + 14}" class="tick" text-anchor="middle">${t}</text>`,
    );
  }
  for (const t of ticks(f.yLo, f.yHi)) {
    parts.push(
      `<text x="${f.x0 - 6}" y="${(py(f, t) + 3).toFixed(1)}" class="tick" text-anchor="end">${t}</text>`,
    );
  }
  parts.push(
    `<text x="${f.x0 + f.w / 2}" y="${f.y0 + f.h + 30}" class="label" text-anchor="middle">${xLabel}</text>`,
    `<text x="${f.x0 - 48}" y="${f.y0 + f.h / 2}" class="label" text-anchor="middle" transform="rotate(-90 ${f.x0 - 48} ${f.y0 + f.h / 2})">${yLabel}</text>`,
  );
  return parts.join("");
}

export function emptyState(width = 760, height = 300): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}">` +
    `<rect width="${width}" height="${height}" fill="#fafafa"/>` +
    `<text x="${width / 2}" y="${height / 2}" text-anchor="middle" class="placeholder">` +
    "No scenario loaded: upload a CSV or generate a synthetic household to see the cost curves." +
    "</text></svg>"
  );
}

export function renderCurves(
  response: SolveResponse | null,
  opts: RenderOptions = {},
): string {
  if (!response) return emptyState(opts.width, opts.height);
  const width = opts.width ?? 760;
  const height = opts.height ?? 560;
  const curves = response.curves;
  const levels = curves.slice_level_kw;
  const overlays = opts.overlays ?? [];
  const pinned = opts.pinned ?? null;

  const costSeries: number[][] = [
    curves.c_grid_per_kw,
    curves.c_pv_per_kw,
    curves.c_pvbat_per_kw,
    ...(pinned
      ? [
          pinned.curves.c_grid_per_kw,
          pinned.curves.c_pv_per_kw,
          pinned.curves.c_pvbat_per_kw,
        ]
      : []),
    ...overlays.map((o) => o.response.curves.c_pv_per_kw),
  ];
  const flat = costSeries.flat();
  const top: Frame = {
    x0: 70,
    y0: 26,
    w: width - 90,
    h: Math.floor(height * 0.55) - 60,
    xLo: 0,
    xHi: Math.max(...levels, 1e-9),
    yLo: Math.min(...flat),
    yHi: Math.max(...flat),
  };

  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    "<style>text{font-family:sans-serif;font-size:11px}.tick{font-size:10px}" +
      ".label{font-size:11px}.banner{font-size:12px;font-weight:bold}</style>",
    `<rect width="${width}" height="${height}" fill="white"/>`,
    `<text x="${width / 2}" y="16" text-anchor="middle" class="banner">Screening curves (per kW of PV)</text>`,
    axes(top, "slice level [kW]", "cost [currency/(kW yr)]"),
  ];

  if (pinned) {
    parts.push(
      polyline(top, pinned.curves.slice_level_kw, pinned.curves.c_grid_per_kw, COLORS.grid, "pinned-grid", true),
      polyline(top, pinned.curves.slice_level_kw, pinned.curves.c_pv_per_kw, COLORS.pv, "pinned-pv", true),
      polyline(top, pinned.curves.slice_level_kw, pinned.curves.c_pvbat_per_kw, COLORS.pvbat, "pinned-pvbat", true),
    );
  }
  for (let i = 0; i < overlays.length; i++) {
    parts.push(
      polyline(
        top,
        overlays[i].response.curves.slice_level_kw,
        overlays[i].response.curves.c_pv_per_kw,
        OVERLAY_FADE[Math.min(i + 1, OVERLAY_FADE.length - 1)],
        `overlay-pv overlay-${i}`,
      ),
    );
  }
  parts.push(
    polyline(top, levels, curves.c_grid_per_kw, COLORS.grid, "live-grid"),
    polyline(top, levels, curves.c_pv_per_kw, COLORS.pv, "live-pv"),
    polyline(top, levels, curves.c_pvbat_per_kw, COLORS.pvbat, "live-pvbat"),
  );

  const legendEntries: [string, string][] = [
    ["grid", COLORS.grid],
    ["PV", COLORS.pv],
    ["PV+battery", COLORS.pvbat],
  ];
  legendEntries.forEach(([label, color], i) => {
    const y = top.y0 + 12 + i * 14;
    parts.push(
      `<line x1="${top.x0 + 8}" y1="${y}" x2="${top.x0 + 26}" y2="${y}" stroke="${color}" stroke-width="1.6"/>`,
      `<text x="${top.x0 + 31}" y="${y + 3}" class="tick">${label}</text>`,
    );
  });

  if (response.v_pv_kw === 0) {
    parts.push(
      `<text x="${top.x0 + top.w / 2}" y="${top.y0 + top.h / 2}" text-anchor="middle" class="banner" id="grid-only">grid-only optimum</text>`,
    );
  } else if (response.first_crossing_kw !== null) {
    const cx = px(top, response.first_crossing_kw);
    const idx = Math.min(
      levels.findIndex((l) => l >= response.first_crossing_kw!) + 0 || 0,
      levels.length - 1,
    );
    const cy = py(top, curves.c_grid_per_kw[Math.max(idx, 0)]);
    parts.push(
      `<path id="crossing-marker" d="M ${cx - 5} ${cy - 5} L ${cx + 5} ${cy + 5} M ${cx - 5} ${cy + 5} L ${cx + 5} ${cy - 5}" stroke="#000" stroke-width="1.8"/>`,
    );
  }

  const batTop = Math.floor(height * 0.55) + 10;
  const bottom: Frame = {
    x0: 70,
    y0: batTop,
    w: width - 90,
    h: height - batTop - 50,
    xLo: 0,
    xHi: Math.max(...levels, 1e-9),
    yLo: 0,
    yHi: Math.max(...curves.cumulative_battery_kwh, 1e-9),
  };
  parts.push(
    `<text x="${width / 2}" y="${batTop - 2}" text-anchor="middle" class="banner">Cumulative battery</text>`,
    axes(bottom, "slice level [kW]", "battery [kWh]"),
  );
  if (pinned) {
    parts.push(
      polyline(
        bottom,
        pinned.curves.slice_level_kw,
        pinned.curves.cumulative_battery_kwh,
        "#e3931f",
        "pinned-battery",
        true,
      ),
    );
  }
  parts.push(
    polyline(bottom, levels, curves.cumulative_battery_kwh, "#e37f1f", "live-battery"),
  );
  parts.push("</svg>");
  return parts.join("\n");
}

/** Count the coordinate pairs in a rendered polyline with the given class. */
export function pointCount(svg: string, cls: string): number {
  const re = new RegExp(`<polyline class="${cls}"[^>]*points="([^"]*)"`);
  const m = svg.match(re);
  if (!m) return 0;
  return m[1].trim().split(/\s+/).filter(Boolean).length;
}
