"""Deterministic SVG world-line plots (position across, time up)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .core import EventKind, WorldLineSet

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
           "#e377c2", "#17becf", "#7f7f7f", "#bcbd22")


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    k = 0
    while first + k * step <= hi + 1e-9 * step:
        ticks.append(round(first + k * step, 12) + 0.0)
        k += 1
    return ticks


def _label(v: float) -> str:
    s = f"{v:.6g}"
    return "0" if s == "-0" else s


def _segments(alive: np.ndarray) -> list[tuple[int, int]]:
    """Half-open index ranges of consecutive alive samples."""
    out, start = [], None
    for i, a in enumerate(alive):
        if a and start is None:
            start = i
        elif not a and start is not None:
            out.append((start, i))
            start = None
    if start is not None:
        out.append((start, len(alive)))
    return out


def emit_plot(lines: WorldLineSet, width: int = 640, height: int = 480,
              x_axis: str = "position", y_axis: str = "time", title: str | None = None) -> str:
    """SVG 1.1 document with one group per world line and one circle per event."""
    if (x_axis, y_axis) != ("position", "time"):
        raise ValueError("only position (horizontal) against time (vertical) is supported")
    margin_l, margin_r, margin_t, margin_b = 60, 20, 30 if title else 20, 45
    pw, ph = width - margin_l - margin_r, height - margin_t - margin_b

    xs = [ln.x[ln.alive] for ln in lines.lines]
    xs = np.concatenate(xs) if xs else np.empty(0)
    t = lines.t
    if xs.size:
        x_lo, x_hi = float(xs.min()), float(xs.max())
    else:
        x_lo, x_hi = -1.0, 1.0
    if x_hi - x_lo < 1e-12:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    pad = 0.05 * (x_hi - x_lo)
    x_lo, x_hi = x_lo - pad, x_hi + pad
    t_lo, t_hi = (float(t[0]), float(t[-1])) if len(t) > 1 else (0.0, 1.0)

    def px(x):
        return margin_l + (x - x_lo) / (x_hi - x_lo) * pw

    def py(tt):
        return margin_t + (t_hi - tt) / (t_hi - t_lo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{width / 2:.2f}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>')

    out.append('<g class="axes" stroke="black" fill="none">')
    out.append(f'<rect x="{margin_l}" y="{margin_t}" width="{pw}" height="{ph}"/>')
    out.append("</g>")
    out.append('<g class="ticks" font-size="11" fill="black">')
    for v in nice_ticks(x_lo, x_hi):
        X = px(v)
        out.append(f'<line x1="{X:.2f}" y1="{margin_t + ph}" x2="{X:.2f}" y2="{margin_t + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{margin_t + ph + 18}" text-anchor="middle">{_label(v)}</text>')
    for v in nice_ticks(t_lo, t_hi):
        Y = py(v)
        out.append(f'<line x1="{margin_l - 5}" y1="{Y:.2f}" x2="{margin_l}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{margin_l - 8}" y="{Y + 4:.2f}" text-anchor="end">{_label(v)}</text>')
    out.append(f'<text x="{margin_l + pw / 2:.2f}" y="{height - 8}" text-anchor="middle">x</text>')
    out.append(f'<text x="14" y="{margin_t + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 14 {margin_t + ph / 2:.2f})">t</text>')
    out.append("</g>")

    for k, ln in enumerate(lines.lines):
        colour = PALETTE[k % len(PALETTE)]
        out.append(f'<g class="worldline" id="line-{ln.id}" stroke="{colour}" fill="none" stroke-width="1.5">')
        for a, b in _segments(ln.alive):
            pts = " ".join(f"{px(x):.2f},{py(tt):.2f}" for x, tt in zip(ln.x[a:b], ln.t[a:b]))
            out.append(f'<polyline points="{pts}"/>')
        out.append("</g>")

    if lines.events:
        by_id = {ln.id: ln for ln in lines.lines}
        out.append('<g class="events" stroke="black">')
        for ev in lines.events:
            xe = []
            for lid in ev.line_ids:
                ln = by_id.get(lid)
                if ln is not None and len(ln.t):
                    xe.append(float(np.interp(ev.t_event, ln.t, ln.x)))
            if not xe:
                continue
            fill = "black" if ev.kind is EventKind.ANNIHILATION else "white"
            out.append(f'<circle cx="{px(float(np.mean(xe))):.2f}" cy="{py(ev.t_event):.2f}" r="4" '
                       f'fill="{fill}" class="{ev.kind.value}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
