"""Minimal hand-rolled SVG boxplot emitter.

Written by hand (rather than through a plotting library) so the output is a
pure function of its inputs: identical runs produce byte-identical files.
"""

from __future__ import annotations

from typing import Sequence

from .simulate import BoxplotStats

_WIDTH = 480
_HEIGHT = 360
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 56, 16, 28, 40


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def boxplot_svg(
    labeled: Sequence[tuple[str, BoxplotStats]],
    reference: float | None = None,
    title: str = "",
) -> str:
    """Render side-by-side boxplots, optionally with a horizontal
    reference line (drawn dashed) at a known true value."""
    if not labeled:
        raise ValueError("nothing to plot")
    lo = min(s.whisker_lo for _, s in labeled)
    hi = max(s.whisker_hi for _, s in labeled)
    if reference is not None:
        lo, hi = min(lo, reference), max(hi, reference)
    span = (hi - lo) or 1.0
    lo -= 0.08 * span
    hi += 0.08 * span

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def ty(value: float) -> float:
        return _MARGIN_T + plot_h * (hi - value) / (hi - lo)

    k = len(labeled)
    slot = plot_w / k
    box_w = slot * 0.5

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_WIDTH / 2:.1f}" y="18" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{title}</text>'
        )

    # Axes and y ticks.
    x0, x1 = _MARGIN_L, _WIDTH - _MARGIN_R
    y0, y1 = _MARGIN_T, _HEIGHT - _MARGIN_B
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="black" stroke-width="1"/>'
    )
    for i in range(5):
        value = lo + (hi - lo) * i / 4
        y = ty(value)
        parts.append(
            f'<line x1="{x0 - 4}" y1="{_fmt(y)}" x2="{x0}" y2="{_fmt(y)}" '
            'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x0 - 7}" y="{_fmt(y + 3.5)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{value:.3g}</text>'
        )

    if reference is not None:
        y = ty(reference)
        parts.append(
            f'<line x1="{x0}" y1="{_fmt(y)}" x2="{x1}" y2="{_fmt(y)}" '
            'stroke="#c22" stroke-width="1" stroke-dasharray="5,4"/>'
        )

    for i, (label, s) in enumerate(labeled):
        cx = _MARGIN_L + slot * (i + 0.5)
        left = cx - box_w / 2
        right = cx + box_w / 2
        y_q1, y_q3 = ty(s.q1), ty(s.q3)
        y_med = ty(s.median)
        y_wlo, y_whi = ty(s.whisker_lo), ty(s.whisker_hi)
        # whiskers
        for y_box, y_w in ((y_q3, y_whi), (y_q1, y_wlo)):
            parts.append(
                f'<line x1="{_fmt(cx)}" y1="{_fmt(y_box)}" x2="{_fmt(cx)}" y2="{_fmt(y_w)}" '
                'stroke="black" stroke-width="1"/>'
            )
            parts.append(
                f'<line x1="{_fmt(cx - box_w / 4)}" y1="{_fmt(y_w)}" '
                f'x2="{_fmt(cx + box_w / 4)}" y2="{_fmt(y_w)}" stroke="black" stroke-width="1"/>'
            )
        # box and median
        parts.append(
            f'<rect x="{_fmt(left)}" y="{_fmt(y_q3)}" width="{_fmt(box_w)}" '
            f'height="{_fmt(y_q1 - y_q3)}" fill="#cfe2f3" stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<line x1="{_fmt(left)}" y1="{_fmt(y_med)}" x2="{_fmt(right)}" y2="{_fmt(y_med)}" '
            'stroke="black" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{_fmt(cx)}" y="{_HEIGHT - _MARGIN_B + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{label}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
