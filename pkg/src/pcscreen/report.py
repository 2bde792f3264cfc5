"""Presentation artifacts: eigenvalue tables, biplots, price-track charts.

Figures are emitted as SVG 1.1 documents rendered directly from the data
with fixed layout rules, so identical inputs produce identical bytes and
the files diff cleanly. Each group gets a distinct marker shape as well as
a color, which keeps the figures readable in black and white.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .detector import RelationshipGroup
from .returns import ReturnPanel
from .spectra import EigenDecomposition

_COLORS = ("#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02")
_SHAPES = ("circle", "square", "triangle", "diamond", "cross", "plus")


def eigen_table(ed: EigenDecomposition, last_k: int) -> list[tuple[int, float]]:
    """(rank, eigenvalue) rows for the last_k smallest eigenvalues,
    ascending eigenvalue order (rank p first)."""
    if not 1 <= last_k <= ed.p:
        raise ValueError(f"last_k must be in 1..{ed.p}")
    return [(rank, ed.eigenvalue(rank)) for rank in range(ed.p, ed.p - last_k, -1)]


def write_eigen_tail_csv(ed: EigenDecomposition, last_k: int) -> str:
    lines = ["rank,eigenvalue"]
    for rank, lam in eigen_table(ed, last_k):
        lines.append(f"{rank},{lam!r}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BiplotSheet:
    """Loading coordinates for one pair of components, plus highlighting."""

    pc_a: int
    pc_b: int
    eigenvalue_a: float
    eigenvalue_b: float
    points: tuple[tuple[str, float, float], ...]  # (ticker, loading_a, loading_b)
    highlighted: dict[str, int]  # ticker -> group index (for marker style)


def _f(x: float) -> str:
    return format(x, ".3f")


def _marker(shape: str, x: float, y: float, color: str) -> str:
    s = 5.0
    if shape == "circle":
        return f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(s)}" fill="{color}"/>'
    if shape == "square":
        return (f'<rect x="{_f(x - s)}" y="{_f(y - s)}" width="{_f(2 * s)}" '
                f'height="{_f(2 * s)}" fill="{color}"/>')
    if shape == "triangle":
        pts = f"{_f(x)},{_f(y - s)} {_f(x - s)},{_f(y + s)} {_f(x + s)},{_f(y + s)}"
        return f'<polygon points="{pts}" fill="{color}"/>'
    if shape == "diamond":
        pts = f"{_f(x)},{_f(y - s)} {_f(x + s)},{_f(y)} {_f(x)},{_f(y + s)} {_f(x - s)},{_f(y)}"
        return f'<polygon points="{pts}" fill="{color}"/>'
    if shape == "cross":
        return (f'<path d="M {_f(x - s)} {_f(y - s)} L {_f(x + s)} {_f(y + s)} '
                f'M {_f(x - s)} {_f(y + s)} L {_f(x + s)} {_f(y - s)}" '
                f'stroke="{color}" stroke-width="2.5" fill="none"/>')
    return (f'<path d="M {_f(x - s)} {_f(y)} L {_f(x + s)} {_f(y)} '
            f'M {_f(x)} {_f(y - s)} L {_f(x)} {_f(y + s)}" '
            f'stroke="{color}" stroke-width="2.5" fill="none"/>')


def biplot(
    ed: EigenDecomposition,
    pc_a: int,
    pc_b: int,
    groups: Sequence[RelationshipGroup] = (),
) -> tuple[BiplotSheet, str]:
    """Scatter the loadings of two components; group members get labelled
    distinct markers. Returns the sheet and the rendered SVG document."""
    if pc_a == pc_b:
        raise ValueError("pc_a and pc_b must differ")
    va = ed.component(pc_a)
    vb = ed.component(pc_b)
    highlighted: dict[str, int] = {}
    for gi, group in enumerate(groups):
        for m in group.members:
            highlighted.setdefault(m, gi)
    sheet = BiplotSheet(
        pc_a=pc_a,
        pc_b=pc_b,
        eigenvalue_a=ed.eigenvalue(pc_a),
        eigenvalue_b=ed.eigenvalue(pc_b),
        points=tuple(
            (t, float(va[i]), float(vb[i])) for i, t in enumerate(ed.tickers)
        ),
        highlighted=highlighted,
    )
    return sheet, render_biplot_svg(sheet)


def render_biplot_svg(sheet: BiplotSheet) -> str:
    size, margin = 640.0, 70.0
    span = size - 2 * margin
    lim = max(
        [0.1]
        + [abs(x) for _, x, _ in sheet.points]
        + [abs(y) for _, _, y in sheet.points]
    )
    lim = np.ceil(lim * 10.0) / 10.0

    def sx(x: float) -> float:
        return margin + (x + lim) / (2 * lim) * span

    def sy(y: float) -> float:
        return size - margin - (y + lim) / (2 * lim) * span

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(size)}" '
        f'height="{_f(size)}" viewBox="0 0 {_f(size)} {_f(size)}">',
        f'<rect x="0" y="0" width="{_f(size)}" height="{_f(size)}" fill="white"/>',
        f'<rect x="{_f(margin)}" y="{_f(margin)}" width="{_f(span)}" height="{_f(span)}" '
        'fill="none" stroke="#333333" stroke-width="1"/>',
        # zero axes
        f'<line x1="{_f(sx(-lim))}" y1="{_f(sy(0.0))}" x2="{_f(sx(lim))}" y2="{_f(sy(0.0))}" '
        'stroke="#bbbbbb" stroke-width="1"/>',
        f'<line x1="{_f(sx(0.0))}" y1="{_f(sy(-lim))}" x2="{_f(sx(0.0))}" y2="{_f(sy(lim))}" '
        'stroke="#bbbbbb" stroke-width="1"/>',
    ]
    for value in (-lim, 0.0, lim):
        out.append(
            f'<text x="{_f(sx(value))}" y="{_f(size - margin + 20)}" font-size="11" '
            f'text-anchor="middle" font-family="monospace">{value:.2f}</text>'
        )
        out.append(
            f'<text x="{_f(margin - 8)}" y="{_f(sy(value) + 4)}" font-size="11" '
            f'text-anchor="end" font-family="monospace">{value:.2f}</text>'
        )
    out.append(
        f'<text x="{_f(size / 2)}" y="{_f(size - 18)}" font-size="14" text-anchor="middle" '
        f'font-family="sans-serif">PC {sheet.pc_a} (λ = {sheet.eigenvalue_a:.6g})</text>'
    )
    out.append(
        f'<text x="18" y="{_f(size / 2)}" font-size="14" text-anchor="middle" '
        f'font-family="sans-serif" transform="rotate(-90 18 {_f(size / 2)})">'
        f'PC {sheet.pc_b} (λ = {sheet.eigenvalue_b:.6g})</text>'
    )
    for ticker, x, y in sheet.points:
        px, py = sx(x), sy(y)
        gi = sheet.highlighted.get(ticker)
        if gi is None:
            out.append(f'<circle cx="{_f(px)}" cy="{_f(py)}" r="2.5" fill="#999999"/>')
        else:
            color = _COLORS[gi % len(_COLORS)]
            shape = _SHAPES[gi % len(_SHAPES)]
            out.append(_marker(shape, px, py, color))
            out.append(
                f'<text x="{_f(px + 7)}" y="{_f(py - 7)}" font-size="12" '
                f'font-family="sans-serif" fill="{color}">{ticker}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def price_tracks(
    rp: ReturnPanel, group: RelationshipGroup, rescale: bool = False
) -> tuple[str, str]:
    """Adjusted-price comparison for a group: CSV table plus SVG line chart.

    With rescale=True every member is drawn on its own vertical scale
    (useful when price levels differ by an order of magnitude); the CSV
    always carries the raw adjusted prices.
    """
    idx = [rp.ticker_index(m) for m in group.members]
    lines = ["date," + ",".join(group.members)]
    for t, date in enumerate(rp.price_dates):
        row = ",".join(repr(float(rp.adjusted_prices[i, t])) for i in idx)
        lines.append(f"{date.isoformat()},{row}")
    csv_text = "\n".join(lines) + "\n"
    return csv_text, _render_tracks_svg(rp, group, idx, rescale)


def _render_tracks_svg(rp, group, idx, rescale) -> str:
    width, height = 800.0, 480.0
    margin_l, margin_r, margin_t, margin_b = 70.0, 30.0, 50.0, 50.0
    plot_w = width - margin_l - margin_r
    plot_h = height - margin_t - margin_b
    n = len(rp.price_dates)
    series = rp.adjusted_prices[idx]
    lo_all, hi_all = float(series.min()), float(series.max())

    def x_at(t: int) -> float:
        return margin_l + (t / (n - 1)) * plot_w if n > 1 else margin_l

    def y_at(v: float, lo: float, hi: float) -> float:
        rng = hi - lo if hi > lo else 1.0
        return margin_t + (1.0 - (v - lo) / rng) * plot_h

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" '
        f'height="{_f(height)}" viewBox="0 0 {_f(width)} {_f(height)}">',
        f'<rect x="0" y="0" width="{_f(width)}" height="{_f(height)}" fill="white"/>',
        f'<rect x="{_f(margin_l)}" y="{_f(margin_t)}" width="{_f(plot_w)}" '
        f'height="{_f(plot_h)}" fill="none" stroke="#333333" stroke-width="1"/>',
        f'<text x="{_f(margin_l)}" y="{_f(height - 16)}" font-size="11" '
        f'font-family="monospace">{rp.price_dates[0].isoformat()}</text>',
        f'<text x="{_f(width - margin_r)}" y="{_f(height - 16)}" font-size="11" '
        f'text-anchor="end" font-family="monospace">{rp.price_dates[-1].isoformat()}</text>',
    ]
    if not rescale:
        out.append(
            f'<text x="{_f(margin_l - 8)}" y="{_f(y_at(hi_all, lo_all, hi_all) + 4)}" '
            f'font-size="11" text-anchor="end" font-family="monospace">{hi_all:.2f}</text>'
        )
        out.append(
            f'<text x="{_f(margin_l - 8)}" y="{_f(y_at(lo_all, lo_all, hi_all) + 4)}" '
            f'font-size="11" text-anchor="end" font-family="monospace">{lo_all:.2f}</text>'
        )
    for j, (member, i) in enumerate(zip(group.members, idx)):
        color = _COLORS[j % len(_COLORS)]
        row = rp.adjusted_prices[i]
        if rescale:
            lo, hi = float(row.min()), float(row.max())
        else:
            lo, hi = lo_all, hi_all
        pts = " ".join(
            f"{_f(x_at(t))},{_f(y_at(float(row[t]), lo, hi))}" for t in range(n)
        )
        dash = "" if j % 2 == 0 else ' stroke-dasharray="6,3"'
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>'
        )
        label = f"{member} (rescaled)" if rescale else member
        out.append(
            f'<text x="{_f(margin_l + 10 + 130 * j)}" y="{_f(margin_t - 12)}" font-size="12" '
            f'font-family="sans-serif" fill="{color}">{label}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def biplot_filename(pc_a: int, pc_b: int) -> str:
    return f"biplot_pc{pc_a}_pc{pc_b}.svg"


def adjacent_trailing_pairs(p: int, trailing: int) -> list[tuple[int, int]]:
    """Disjoint adjacent rank pairs covering the scanned trailing components,
    e.g. trailing=6 of p=156 -> (151,152), (153,154), (155,156). An odd
    count pairs the leftover component with its predecessor."""
    first = p - trailing + 1
    ranks = list(range(first, p + 1))
    pairs = []
    while len(ranks) >= 2:
        pairs.append((ranks[0], ranks[1]))
        ranks = ranks[2:]
    if ranks:  # odd trailing count: overlap the last pair by one rank
        pairs.append((ranks[0] - 1, ranks[0]))
    return pairs
