"""Minimal SVG line plots: polylines, axes, ticks, legend, point markers.

Deliberately dependency-free so the CLI can emit charts anywhere; the
browser UI draws its own charts from the JSON API instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = ["Series", "Marker", "line_chart", "multi_panel"]

PALETTE = ("#6a3d9a", "#1f78b4", "#33a02c", "#e31a1c", "#ff7f00", "#555555")


@dataclass
class Series:
    label: str
    xs: list[float]
    ys: list[float]
    color: str | None = None
    dashed: bool = False


@dataclass
class Marker:
    x: float
    y: float
    label: str = ""


@dataclass
class Panel:
    title: str
    x_label: str
    y_label: str
    series: list[Series] = field(default_factory=list)
    markers: list[Marker] = field(default_factory=list)


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if not math.isfinite(lo) or not math.isfinite(hi):
        return [0.0, 1.0]
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    for mult in (1, 2, 2.5, 5, 10):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-12 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks or [lo, hi]


def _fmt(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return f"{v:.6g}"


def _panel_svg(
    panel: Panel, x0: int, y0: int, width: int, height: int
) -> list[str]:
    pad_l, pad_r, pad_t, pad_b = 64, 16, 28, 42
    plot_w = width - pad_l - pad_r
    plot_h = height - pad_t - pad_b

    xs_all = [x for s in panel.series for x in s.xs]
    ys_all = [y for s in panel.series for y in s.ys]
    if not xs_all:
        xs_all, ys_all = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if x_hi == x_lo:
        x_hi = x_lo + 1
    if y_hi == y_lo:
        y_hi = y_lo + 1
    y_pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    def px(x: float) -> float:
        return x0 + pad_l + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return y0 + pad_t + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    out = [
        f'<text x="{x0 + width / 2:.1f}" y="{y0 + 16}" text-anchor="middle" '
        f'class="title">{panel.title}</text>',
        f'<rect x="{x0 + pad_l}" y="{y0 + pad_t}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="#999"/>',
    ]
    for t in _nice_ticks(x_lo, x_hi):
        if x_lo <= t <= x_hi:
            out.append(
                f'<line x1="{px(t):.1f}" y1="{y0 + pad_t + plot_h}" '
                f'x2="{px(t):.1f}" y2="{y0 + pad_t + plot_h + 4}" stroke="#333"/>'
            )
            out.append(
                f'<text x="{px(t):.1f}" y="{y0 + pad_t + plot_h + 16}" '
                f'text-anchor="middle" class="tick">{_fmt(t)}</text>'
            )
    for t in _nice_ticks(y_lo, y_hi):
        if y_lo <= t <= y_hi:
            out.append(
                f'<line x1="{x0 + pad_l - 4}" y1="{py(t):.1f}" '
                f'x2="{x0 + pad_l}" y2="{py(t):.1f}" stroke="#333"/>'
            )
            out.append(
                f'<text x="{x0 + pad_l - 7}" y="{py(t) + 3:.1f}" '
                f'text-anchor="end" class="tick">{_fmt(t)}</text>'
            )
    out.append(
        f'<text x="{x0 + pad_l + plot_w / 2:.1f}" y="{y0 + height - 8}" '
        f'text-anchor="middle" class="label">{panel.x_label}</text>'
    )
    out.append(
        f'<text x="{x0 + 14}" y="{y0 + pad_t + plot_h / 2:.1f}" class="label" '
        f'text-anchor="middle" transform="rotate(-90 {x0 + 14} '
        f'{y0 + pad_t + plot_h / 2:.1f})">{panel.y_label}</text>'
    )

    legend_y = y0 + pad_t + 12
    for idx, s in enumerate(panel.series):
        color = s.color or PALETTE[idx % len(PALETTE)]
        pts = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in zip(s.xs, s.ys))
        dash = ' stroke-dasharray="6 4"' if s.dashed else ""
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="1.6"{dash}/>'
        )
        out.append(
            f'<line x1="{x0 + pad_l + 8}" y1="{legend_y}" x2="{x0 + pad_l + 28}" '
            f'y2="{legend_y}" stroke="{color}" stroke-width="1.6"{dash}/>'
        )
        out.append(
            f'<text x="{x0 + pad_l + 33}" y="{legend_y + 3}" class="tick">'
            f"{s.label}</text>"
        )
        legend_y += 14
    for m in panel.markers:
        cx, cy = px(m.x), py(m.y)
        out.append(
            f'<path d="M {cx - 4:.1f} {cy - 4:.1f} L {cx + 4:.1f} {cy + 4:.1f} '
            f'M {cx - 4:.1f} {cy + 4:.1f} L {cx + 4:.1f} {cy - 4:.1f}" '
            f'stroke="#000" stroke-width="1.6"/>'
        )
        if m.label:
            out.append(
                f'<text x="{cx + 6:.1f}" y="{cy - 6:.1f}" class="tick">'
                f"{m.label}</text>"
            )
    return out


def multi_panel(panels: list[Panel], width: int = 720, panel_height: int = 400) -> str:
    """Stack panels vertically into one SVG document."""
    height = panel_height * len(panels)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        "<style>text{font-family:sans-serif;font-size:11px}"
        ".title{font-size:13px;font-weight:bold}"
        ".tick{font-size:10px}.label{font-size:11px}</style>",
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for i, panel in enumerate(panels):
        parts.extend(_panel_svg(panel, 0, i * panel_height, width, panel_height))
    parts.append("</svg>")
    return "\n".join(parts)


def line_chart(
    series: list[Series],
    title: str,
    x_label: str,
    y_label: str,
    markers: list[Marker] | None = None,
    width: int = 720,
    height: int = 440,
) -> str:
    panel = Panel(
        title=title,
        x_label=x_label,
        y_label=y_label,
        series=series,
        markers=markers or [],
    )
    return multi_panel([panel], width=width, panel_height=height)
