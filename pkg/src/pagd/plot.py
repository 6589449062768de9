"""Minimal log-log residual chart written directly as SVG."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

COLORS = ("#d62728", "#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b")
WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 30, 50


def _series(trace, column):
    y = np.asarray(getattr(trace, column), dtype=np.float64)
    t = np.arange(len(y)) + 1.0  # shift so t = 0 fits on a log axis
    keep = np.isfinite(y) & (y > 0)
    return t[keep], y[keep]


def residual_svg(traces, column="tan_residual", title="residual vs iteration", max_points=400):
    """One polyline per non-diverged trace, axes log10(t + 1) against log10(residual)."""
    series = []
    for tr in traces:
        if tr.diverged:
            continue
        col = column if np.any(np.isfinite(getattr(tr, column))) else "nat_residual"
        t, y = _series(tr, col)
        if len(t) == 0:
            continue
        # log-spaced thinning keeps the file small for long runs
        idx = np.unique(np.geomspace(1, len(t), min(max_points, len(t))).astype(int) - 1)
        series.append((tr.method, np.log10(t[idx]), np.log10(y[idx])))

    if series:
        xs = np.concatenate([s[1] for s in series])
        ys = np.concatenate([s[2] for s in series])
        x0, x1 = 0.0, max(float(xs.max()), 1.0)
        y0, y1 = math.floor(float(ys.min())), math.ceil(float(ys.max()))
        if y1 == y0:
            y1 = y0 + 1
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0

    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    sx = lambda x: LEFT + (x - x0) / (x1 - x0) * pw
    sy = lambda y: TOP + (y1 - y) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<text x="{LEFT}" y="{TOP - 10}" font-size="14" font-family="sans-serif">{escape(title)}</text>',
           f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for k in range(int(math.floor(x0)), int(math.ceil(x1)) + 1):
        x = sx(k)
        out.append(f'<line x1="{x:.2f}" y1="{TOP + ph}" x2="{x:.2f}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{TOP + ph + 20}" font-size="11" text-anchor="middle" '
                   f'font-family="sans-serif">1e{k}</text>')
    for k in range(int(y0), int(y1) + 1):
        y = sy(k)
        out.append(f'<line x1="{LEFT - 5}" y1="{y:.2f}" x2="{LEFT}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{y + 4:.2f}" font-size="11" text-anchor="end" '
                   f'font-family="sans-serif">1e{k}</text>')
    out.append(f'<text x="{LEFT + pw / 2}" y="{HEIGHT - 10}" font-size="12" text-anchor="middle" '
               f'font-family="sans-serif">t + 1</text>')
    for i, (name, lx, ly) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(lx, ly))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly_ = TOP + 20 + 18 * i
        out.append(f'<line x1="{LEFT + pw + 15}" y1="{ly_}" x2="{LEFT + pw + 40}" y2="{ly_}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{LEFT + pw + 45}" y="{ly_ + 4}" font-size="12" '
                   f'font-family="sans-serif">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
