"""Standalone SVG beeswarm rendering of Shapley summaries.

No plotting framework: the SVG is assembled as text with %.2f coordinates,
and the vertical jitter comes from a fixed-seed generator, so re-rendering
the same data is byte-identical. Each rendered point also lands in a CSV
twin (one row per instance x feature) next to the SVG.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .explain import SummaryData
from .features import FEATURE_NAMES
from .numeric import rng_from_seed

_JITTER_SEED = 714025
_LOW_COLOR = (59, 76, 192)
_HIGH_COLOR = (180, 4, 38)
_FLAT_COLOR = (150, 150, 150)

_ROW_H = 26
_LEFT = 120
_RIGHT = 40
_PLOT_W = 640
_TOP = 46
_BOTTOM = 34
_POINT_R = 2.4


def _color(t: float) -> str:
    r = _LOW_COLOR[0] + (_HIGH_COLOR[0] - _LOW_COLOR[0]) * t
    g = _LOW_COLOR[1] + (_HIGH_COLOR[1] - _LOW_COLOR[1]) * t
    b = _LOW_COLOR[2] + (_HIGH_COLOR[2] - _LOW_COLOR[2]) * t
    return f"rgb({int(round(r))},{int(round(g))},{int(round(b))})"


def render_beeswarm(data: SummaryData, path) -> None:
    """Write the summary SVG at `path` and its CSV twin at `<stem>.csv`.

    Rows are ordered by descending mean |phi|; points sit at x = phi with
    seeded vertical jitter, colored blue (low standardized feature value) to
    red (high).
    """
    path = Path(path)
    n_inst, d = data.phi.shape
    names = data.ordered_names

    lo = float(data.phi.min())
    hi = float(data.phi.max())
    if hi <= lo:
        lo, hi = lo - 1.0, hi + 1.0
    span = hi - lo
    lo -= 0.05 * span
    hi += 0.05 * span

    def x_of(v: float) -> float:
        return _LEFT + (v - lo) / (hi - lo) * _PLOT_W

    height = _TOP + d * _ROW_H + _BOTTOM
    width = _LEFT + _PLOT_W + _RIGHT
    rng = rng_from_seed(_JITTER_SEED)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        '<text x="16" y="24" font-family="sans-serif" font-size="14">'
        "Shapley summary (impact on Good score)</text>",
    ]
    zero_x = x_of(0.0)
    out.append(
        f'<line x1="{zero_x:.2f}" y1="{_TOP - 8}" x2="{zero_x:.2f}" '
        f'y2="{_TOP + d * _ROW_H}" stroke="#999" stroke-width="1"/>'
    )

    csv_lines = ["feature,instance,phi,std_value"]
    for row, fi in enumerate(data.order):
        cy = _TOP + row * _ROW_H + _ROW_H / 2.0
        out.append(
            f'<text x="{_LEFT - 8}" y="{cy + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{FEATURE_NAMES[fi]}</text>'
        )
        out.append(
            f'<line x1="{_LEFT}" y1="{cy:.2f}" x2="{_LEFT + _PLOT_W}" y2="{cy:.2f}" '
            'stroke="#eee" stroke-width="1"/>'
        )
        col = data.std_values[:, fi]
        cmin, cmax = float(col.min()), float(col.max())
        jitter = rng.uniform(-_ROW_H * 0.32, _ROW_H * 0.32, size=n_inst)
        for j in range(n_inst):
            phi = float(data.phi[j, fi])
            if cmax > cmin:
                color = _color((float(col[j]) - cmin) / (cmax - cmin))
            else:
                color = f"rgb({_FLAT_COLOR[0]},{_FLAT_COLOR[1]},{_FLAT_COLOR[2]})"
            out.append(
                f'<circle cx="{x_of(phi):.2f}" cy="{cy + jitter[j]:.2f}" r="{_POINT_R}" '
                f'fill="{color}" fill-opacity="0.8"/>'
            )
            csv_lines.append(
                f"{FEATURE_NAMES[fi]},{data.instance_ids[j]},"
                f"{format(phi, '.17g')},{format(float(col[j]), '.17g')}"
            )

    axis_y = _TOP + d * _ROW_H + 18
    for v in (lo, 0.0, hi):
        out.append(
            f'<text x="{x_of(v):.2f}" y="{axis_y}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{v:.3f}</text>'
        )
    out.append(
        f'<text x="{_LEFT + _PLOT_W / 2:.2f}" y="{axis_y + 14}" text-anchor="middle" '
        'font-family="sans-serif" font-size="11">Shapley value</text>'
    )
    out.append("</svg>")

    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    path.with_suffix(".csv").write_text("\n".join(csv_lines) + "\n", encoding="utf-8")
