"""Minimal standalone SVG line-chart emitter.

Diagnostic figures only: a framed plot area, linear or logarithmic axes
with a handful of ticks, one polyline per series and a text legend.  No
external plotting dependency.
"""

from __future__ import annotations

import math

_COLORS = ("#1f6f8b", "#c0392b", "#27ae60", "#8e44ad", "#d35400", "#2c3e50")


def _ticks(lo: float, hi: float, log: bool, count: int = 5):
    if log:
        lo_e, hi_e = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
        step = max(1, (hi_e - lo_e) // count)
        return [10.0**e for e in range(lo_e, hi_e + 1, step)]
    if hi == lo:
        return [lo]
    step = (hi - lo) / count
    return [lo + i * step for i in range(count + 1)]


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.1e}"
    return f"{v:.4g}"


def write_line_chart(path, series, title="", xlabel="", ylabel="",
                     logx=False, logy=False, width=640, height=440):
    """series: iterable of (x array, y array, label)."""
    margin_l, margin_r, margin_t, margin_b = 70, 20, 36, 50
    pw, ph = width - margin_l - margin_r, height - margin_t - margin_b

    pts = []
    for xs, ys, _ in series:
        for x, y in zip(xs, ys):
            if logx and x <= 0 or logy and y <= 0:
                continue
            if math.isfinite(x) and math.isfinite(y):
                pts.append((x, y))
    if not pts:
        raise ValueError("no finite data points to plot")
    xs_all = [p[0] for p in pts]
    ys_all = [p[1] for p in pts]
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if x0 == x1:
        x0, x1 = x0 - 1, x1 + 1
    if y0 == y1:
        y0, y1 = y0 - 1, y1 + 1

    def sx(x):
        t = ((math.log10(x) - math.log10(x0)) / (math.log10(x1) - math.log10(x0))
             if logx else (x - x0) / (x1 - x0))
        return margin_l + t * pw

    def sy(y):
        t = ((math.log10(y) - math.log10(y0)) / (math.log10(y1) - math.log10(y0))
             if logy else (y - y0) / (y1 - y0))
        return margin_t + (1 - t) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{margin_l}" y="{margin_t}" width="{pw}" height="{ph}" '
        'fill="none" stroke="black"/>',
    ]
    if title:
        parts.append(f'<text x="{width / 2}" y="20" text-anchor="middle" '
                     f'font-size="14">{title}</text>')
    for xt in _ticks(x0, x1, logx):
        if xt < x0 or xt > x1:
            continue
        parts.append(f'<line x1="{sx(xt):.1f}" y1="{margin_t + ph}" '
                     f'x2="{sx(xt):.1f}" y2="{margin_t + ph + 5}" stroke="black"/>')
        parts.append(f'<text x="{sx(xt):.1f}" y="{margin_t + ph + 18}" '
                     f'text-anchor="middle" font-size="10">{_fmt(xt)}</text>')
    for yt in _ticks(y0, y1, logy):
        if yt < y0 or yt > y1:
            continue
        parts.append(f'<line x1="{margin_l - 5}" y1="{sy(yt):.1f}" '
                     f'x2="{margin_l}" y2="{sy(yt):.1f}" stroke="black"/>')
        parts.append(f'<text x="{margin_l - 8}" y="{sy(yt) + 3:.1f}" '
                     f'text-anchor="end" font-size="10">{_fmt(yt)}</text>')
    if xlabel:
        parts.append(f'<text x="{margin_l + pw / 2}" y="{height - 12}" '
                     f'text-anchor="middle" font-size="12">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="16" y="{margin_t + ph / 2}" text-anchor="middle" '
                     f'font-size="12" transform="rotate(-90 16 {margin_t + ph / 2})"'
                     f'>{ylabel}</text>')

    for idx, (xs, ys, label) in enumerate(series):
        color = _COLORS[idx % len(_COLORS)]
        coords = [
            f"{sx(x):.2f},{sy(y):.2f}"
            for x, y in zip(xs, ys)
            if (not logx or x > 0) and (not logy or y > 0)
            and math.isfinite(x) and math.isfinite(y)
        ]
        if coords:
            parts.append(f'<polyline points="{" ".join(coords)}" fill="none" '
                         f'stroke="{color}" stroke-width="1.5"/>')
        if label:
            ly = margin_t + 14 + 14 * idx
            parts.append(f'<line x1="{margin_l + pw - 120}" y1="{ly - 4}" '
                         f'x2="{margin_l + pw - 100}" y2="{ly - 4}" '
                         f'stroke="{color}" stroke-width="2"/>')
            parts.append(f'<text x="{margin_l + pw - 95}" y="{ly}" '
                         f'font-size="11">{label}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(parts) + "\n")
