"""Minimal standalone SVG line charts: axes, ticks, overlayed series, legend.

No plotting dependency; output is a self-contained SVG file.  Long series are
decimated with min-max binning so files stay small without losing envelope
shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["LineSeries", "emit_plot"]

_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64.0, 16.0, 34.0, 46.0
_MAX_POINTS = 4000


@dataclass(frozen=True)
class LineSeries:
    x: np.ndarray
    y: np.ndarray
    label: str = ""
    color: str = "#1f4fd8"


def _nice_ticks(lo: float, hi: float, target: int = 6):
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("non-finite axis range")
    if hi <= lo:
        pad = max(abs(lo), 1.0) * 0.5 or 0.5
        lo, hi = lo - pad, hi + pad
    raw = (hi - lo) / max(target, 2)
    mag = 10.0 ** math.floor(math.log10(raw))
    for m in (1.0, 2.0, 5.0, 10.0):
        if raw <= m * mag:
            step = m * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _fmt(v: float) -> str:
    if v == 0.0:
        return "0"
    a = abs(v)
    if 1e-3 <= a < 1e5:
        s = f"{v:.6g}"
    else:
        s = f"{v:.3e}"
    return s


def _decimate(x: np.ndarray, y: np.ndarray):
    n = x.size
    if n <= _MAX_POINTS:
        return x, y
    nbins = _MAX_POINTS // 2
    edges = np.linspace(0, n, nbins + 1).astype(int)
    xs, ys = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        seg = y[a:b]
        i_min = a + int(np.argmin(seg))
        i_max = a + int(np.argmax(seg))
        for i in sorted((i_min, i_max)):
            xs.append(x[i])
            ys.append(y[i])
    return np.asarray(xs), np.asarray(ys)


def emit_plot(
    series,
    path,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    size: tuple[int, int] = (760, 480),
) -> str:
    """Write a line chart of the given LineSeries list to ``path`` as SVG."""
    series = list(series)
    if not series:
        raise ValueError("no series to plot")
    for s in series:
        if np.asarray(s.x).size == 0 or np.asarray(s.y).size == 0:
            raise ValueError(f"empty series {s.label!r}")
    width, height = size
    x_all = np.concatenate([np.asarray(s.x, dtype=float) for s in series])
    y_all = np.concatenate([np.asarray(s.y, dtype=float) for s in series])
    if not (np.all(np.isfinite(x_all)) and np.all(np.isfinite(y_all))):
        raise ValueError("series contain non-finite values")

    xt = _nice_ticks(float(x_all.min()), float(x_all.max()))
    yt = _nice_ticks(float(y_all.min()), float(y_all.max()))
    x_lo, x_hi = min(xt[0], x_all.min()), max(xt[-1], x_all.max())
    y_lo, y_hi = min(yt[0], y_all.min()), max(yt[-1], y_all.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    pw = width - _MARGIN_L - _MARGIN_R
    ph = height - _MARGIN_T - _MARGIN_B

    def px(v):
        return _MARGIN_L + (v - x_lo) / (x_hi - x_lo) * pw

    def py(v):
        return _MARGIN_T + ph - (v - y_lo) / (y_hi - y_lo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{pw}" height="{ph}" '
        'fill="none" stroke="#222222" stroke-width="1"/>',
    ]
    if title:
        out.append(
            f'<text x="{width / 2}" y="{_MARGIN_T - 12}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="15">{title}</text>'
        )
    for v in xt:
        if v < x_lo - 1e-300 or v > x_hi:
            continue
        x = px(v)
        out.append(
            f'<line x1="{x:.2f}" y1="{_MARGIN_T + ph}" x2="{x:.2f}" '
            f'y2="{_MARGIN_T + ph + 5}" stroke="#222222" stroke-width="1"/>'
        )
        out.append(
            f'<line x1="{x:.2f}" y1="{_MARGIN_T}" x2="{x:.2f}" y2="{_MARGIN_T + ph}" '
            'stroke="#dddddd" stroke-width="0.6"/>'
        )
        out.append(
            f'<text x="{x:.2f}" y="{_MARGIN_T + ph + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(v)}</text>'
        )
    for v in yt:
        if v < y_lo - 1e-300 or v > y_hi:
            continue
        y = py(v)
        out.append(
            f'<line x1="{_MARGIN_L - 5}" y1="{y:.2f}" x2="{_MARGIN_L}" y2="{y:.2f}" '
            'stroke="#222222" stroke-width="1"/>'
        )
        out.append(
            f'<line x1="{_MARGIN_L}" y1="{y:.2f}" x2="{_MARGIN_L + pw}" y2="{y:.2f}" '
            'stroke="#dddddd" stroke-width="0.6"/>'
        )
        out.append(
            f'<text x="{_MARGIN_L - 8}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt(v)}</text>'
        )
    if xlabel:
        out.append(
            f'<text x="{_MARGIN_L + pw / 2}" y="{height - 10}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{xlabel}</text>'
        )
    if ylabel:
        yc = _MARGIN_T + ph / 2
        out.append(
            f'<text x="16" y="{yc}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="13" transform="rotate(-90 16 {yc})">{ylabel}</text>'
        )

    for s in series:
        xs, ys = _decimate(np.asarray(s.x, dtype=float), np.asarray(s.y, dtype=float))
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xs, ys))
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{s.color}" stroke-width="1.2"/>'
        )

    legend_y = _MARGIN_T + 14
    for s in series:
        if not s.label:
            continue
        lx = _MARGIN_L + pw - 150
        out.append(
            f'<line x1="{lx}" y1="{legend_y - 4}" x2="{lx + 22}" y2="{legend_y - 4}" '
            f'stroke="{s.color}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{lx + 28}" y="{legend_y}" font-family="sans-serif" '
            f'font-size="12">{s.label}</text>'
        )
        legend_y += 16

    out.append("</svg>")
    with open(path, "w") as f:
        f.write("\n".join(out) + "\n")
    return str(path)
