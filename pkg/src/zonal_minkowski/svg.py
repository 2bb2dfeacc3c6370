"""Minimal hand-written SVG: polylines and heatmaps."""
from __future__ import annotations

import math

import numpy as np

WIDTH, HEIGHT, PAD = 640, 420, 50
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")


def _scale(lo: float, hi: float, a: float, b: float):
    span = hi - lo if hi > lo else 1.0
    return lambda v: a + (v - lo) / span * (b - a)


def _frame(title: str, xlabel: str, ylabel: str, body: list[str]) -> str:
    head = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}">',
            '<rect width="100%" height="100%" fill="white"/>',
            f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
            f'<text x="{WIDTH / 2}" y="{HEIGHT - 8}" text-anchor="middle" font-size="12">{xlabel}</text>',
            f'<text x="14" y="{HEIGHT / 2}" font-size="12" transform="rotate(-90 14 {HEIGHT / 2})"'
            f' text-anchor="middle">{ylabel}</text>']
    return "\n".join(head + body + ["</svg>"]) + "\n"


def line_svg(series: dict, title: str = "", xlabel: str = "", ylabel: str = "", logy: bool = False) -> str:
    """series maps a label to (x values, y values)."""
    data = {}
    for label, (x, y) in series.items():
        x, y = np.asarray(x, float), np.asarray(y, float)
        if logy:
            y = np.log10(np.maximum(np.abs(y), 1e-300))
        keep = np.isfinite(x) & np.isfinite(y)
        data[label] = (x[keep], y[keep])
    xs = np.concatenate([d[0] for d in data.values()]) if data else np.zeros(1)
    ys = np.concatenate([d[1] for d in data.values()]) if data else np.zeros(1)
    sx = _scale(float(xs.min()), float(xs.max()), PAD, WIDTH - PAD)
    sy = _scale(float(ys.min()), float(ys.max()), HEIGHT - PAD, PAD)
    body = [f'<rect x="{PAD}" y="{PAD}" width="{WIDTH - 2 * PAD}" height="{HEIGHT - 2 * PAD}"'
            ' fill="none" stroke="#888"/>']
    for i, (label, (x, y)) in enumerate(data.items()):
        color = COLORS[i % len(COLORS)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
        body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        body.append(f'<text x="{WIDTH - PAD - 4}" y="{PAD + 16 * (i + 1)}" text-anchor="end"'
                    f' font-size="11" fill="{color}">{label}</text>')
    lo, hi = float(ys.min()), float(ys.max())
    fmt = (lambda v: f"1e{v:.1f}") if logy else (lambda v: f"{v:.3g}")
    body.append(f'<text x="{PAD - 4}" y="{HEIGHT - PAD}" text-anchor="end" font-size="10">{fmt(lo)}</text>')
    body.append(f'<text x="{PAD - 4}" y="{PAD + 10}" text-anchor="end" font-size="10">{fmt(hi)}</text>')
    return _frame(title, xlabel, ylabel, body)


def _color(v: float) -> str:
    # blue for negative, white at zero, red for positive
    v = max(-1.0, min(1.0, v))
    if v >= 0:
        c = int(round(255 * (1 - v)))
        return f"rgb(255,{c},{c})"
    c = int(round(255 * (1 + v)))
    return f"rgb({c},{c},255)"


def heatmap_svg(values, xs, ys, title: str = "", xlabel: str = "", ylabel: str = "") -> str:
    """values[i, k] is drawn at row ys[i], column xs[k]; color scale symmetric about zero."""
    values = np.asarray(values, float)
    rows, cols = values.shape
    scale = float(np.nanmax(np.abs(values))) or 1.0
    cw, ch = (WIDTH - 2 * PAD) / cols, (HEIGHT - 2 * PAD) / rows
    body = []
    for i in range(rows):
        for k in range(cols):
            v = values[i, k]
            fill = "#000" if not math.isfinite(v) else _color(v / scale)
            body.append(f'<rect x="{PAD + k * cw:.2f}" y="{HEIGHT - PAD - (i + 1) * ch:.2f}"'
                        f' width="{cw + 0.05:.2f}" height="{ch + 0.05:.2f}" fill="{fill}"/>')
    body.append(f'<text x="{WIDTH - PAD}" y="{PAD - 6}" text-anchor="end" font-size="10">'
                f'|max| = {scale:.3g}; x {xs[0]:.3g}..{xs[-1]:.3g}, y {ys[0]:.3g}..{ys[-1]:.3g}</text>')
    return _frame(title, xlabel, ylabel, body)
