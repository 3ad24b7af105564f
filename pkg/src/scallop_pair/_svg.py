"""Minimal SVG line charts, so plot emission needs no plotting dependency."""

from __future__ import annotations

import math

_WIDTH, _HEIGHT = 720, 480
_MARGIN = 60


def _scale(values, lo, hi, out_lo, out_hi):
    span = hi - lo if hi > lo else 1.0
    return [out_lo + (v - lo) / span * (out_hi - out_lo) for v in values]


def line_chart(path, series, title: str = "", xlabel: str = "", ylabel: str = "",
               vlines=()) -> None:
    """Write a simple multi-series line chart.

    series: iterable of (xs, ys, label, dashed) tuples. vlines: x positions
    drawn as dashed vertical markers. NaN points are dropped per series.
    """
    cleaned = []
    for xs, ys, label, dashed in series:
        points = [(x, y) for x, y in zip(xs, ys)
                  if math.isfinite(x) and math.isfinite(y)]
        if points:
            cleaned.append((points, label, dashed))
    all_x = [p[0] for pts, _, _ in cleaned for p in pts] + list(vlines)
    all_y = [p[1] for pts, _, _ in cleaned for p in pts]
    if not all_x or not all_y:
        all_x, all_y = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    if y_lo > 0:
        y_lo = 0.0

    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<text x="{_WIDTH / 2}" y="{_HEIGHT - 12}" text-anchor="middle" font-size="13">{xlabel}</text>',
        f'<text x="18" y="{_HEIGHT / 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 18 {_HEIGHT / 2})">{ylabel}</text>',
        f'<line x1="{_MARGIN}" y1="{_HEIGHT - _MARGIN}" x2="{_WIDTH - _MARGIN}" '
        f'y2="{_HEIGHT - _MARGIN}" stroke="black"/>',
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" y2="{_HEIGHT - _MARGIN}" stroke="black"/>',
        f'<text x="{_MARGIN}" y="{_HEIGHT - _MARGIN + 18}" font-size="11" '
        f'text-anchor="middle">{x_lo:.3g}</text>',
        f'<text x="{_WIDTH - _MARGIN}" y="{_HEIGHT - _MARGIN + 18}" font-size="11" '
        f'text-anchor="middle">{x_hi:.3g}</text>',
        f'<text x="{_MARGIN - 6}" y="{_HEIGHT - _MARGIN}" font-size="11" '
        f'text-anchor="end">{y_lo:.3g}</text>',
        f'<text x="{_MARGIN - 6}" y="{_MARGIN + 4}" font-size="11" '
        f'text-anchor="end">{y_hi:.3g}</text>',
    ]
    for x in vlines:
        (px,) = _scale([x], x_lo, x_hi, _MARGIN, _WIDTH - _MARGIN)
        parts.append(
            f'<line x1="{px:.2f}" y1="{_MARGIN}" x2="{px:.2f}" y2="{_HEIGHT - _MARGIN}" '
            f'stroke="#888" stroke-dasharray="3,5"/>'
        )
    for idx, (points, label, dashed) in enumerate(cleaned):
        xs = _scale([p[0] for p in points], x_lo, x_hi, _MARGIN, _WIDTH - _MARGIN)
        ys = _scale([p[1] for p in points], y_lo, y_hi, _HEIGHT - _MARGIN, _MARGIN)
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        color = colors[idx % len(colors)]
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"{dash}/>')
        parts.append(f'<text x="{_WIDTH - _MARGIN - 4}" y="{_MARGIN + 16 * (idx + 1)}" '
                     f'font-size="12" text-anchor="end" fill="{color}">{label}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
