"""Minimal standalone SVG line plots (no plotting stack required)."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence


def _ticks(lo: float, hi: float, count: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(count - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if step >= raw:
            break
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def write_line_svg(path, x: Sequence[float], y: Sequence[float], *,
                   title: str = "", xlabel: str = "", ylabel: str = "",
                   width: int = 720, height: int = 480) -> None:
    """Render one (x, y) series as a polyline with axes, ticks and labels."""
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    if len(xs) != len(ys) or not xs:
        raise ValueError("x and y must be equal-length, nonempty")

    ml, mr, mt, mb = 70, 20, 40, 55
    pw, ph = width - ml - mr, height - mt - mb
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.04 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def px(v):
        return ml + (v - x0) / (x1 - x0) * pw

    def py(v):
        return mt + ph - (v - y0) / (y1 - y0) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
        'stroke="black" stroke-width="1"/>',
    ]
    font = 'font-family="monospace" font-size="12"'
    for tx in _ticks(x0, x1):
        X = px(tx)
        parts.append(f'<line x1="{X:.2f}" y1="{mt + ph}" x2="{X:.2f}" '
                     f'y2="{mt + ph + 5}" stroke="black"/>')
        parts.append(f'<text x="{X:.2f}" y="{mt + ph + 18}" {font} '
                     f'text-anchor="middle">{tx:.4g}</text>')
    for ty in _ticks(y0, y1):
        Y = py(ty)
        parts.append(f'<line x1="{ml - 5}" y1="{Y:.2f}" x2="{ml}" '
                     f'y2="{Y:.2f}" stroke="black"/>')
        parts.append(f'<text x="{ml - 8}" y="{Y + 4:.2f}" {font} '
                     f'text-anchor="end">{ty:.4g}</text>')

    points = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xs, ys))
    parts.append(f'<polyline points="{points}" fill="none" stroke="#1f6fb2" '
                 'stroke-width="1.5"/>')

    if title:
        parts.append(f'<text x="{width / 2:.0f}" y="24" {font} font-size="15" '
                     f'text-anchor="middle">{title}</text>')
    if xlabel:
        parts.append(f'<text x="{ml + pw / 2:.0f}" y="{height - 14}" {font} '
                     f'text-anchor="middle">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="18" y="{mt + ph / 2:.0f}" {font} '
                     f'text-anchor="middle" transform="rotate(-90 18 {mt + ph / 2:.0f})">'
                     f'{ylabel}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
