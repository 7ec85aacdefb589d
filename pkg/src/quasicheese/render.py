"""Static SVG pictures of Swiss cheeses."""
from __future__ import annotations

from typing import Iterable
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .geometry import AbstractSwissCheese


def _fmt(x: float) -> str:
    return f"{x:.4f}".rstrip("0").rstrip(".") or "0"


def cheese_svg(cheese: AbstractSwissCheese, width_px: int = 800,
               overlay: Iterable[tuple[complex, float]] = (),
               min_hole_px: float = 0.25, title: str | None = None) -> str:
    """SVG markup: outer disk outlined, holes filled, overlay circles dashed.

    Holes smaller than ``min_hole_px`` on screen are drawn at that size so
    that very fine packings stay visible; the document states the cut-off.
    """
    o = cheese.outer
    pad = 0.02 * o.radius
    x0, y0 = o.center.real - o.radius - pad, o.center.imag - o.radius - pad
    span = 2 * (o.radius + pad)
    scale = width_px / span

    def px(z):
        return (z.real - x0) * scale, (y0 + span - z.imag) * scale  # y axis up

    cx, cy = px(o.center)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width_px}" height="{width_px}" '
        f'viewBox="0 0 {width_px} {width_px}">',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append(f"<desc>{len(cheese.holes)} holes; holes under {min_hole_px}px drawn at "
               f"{min_hole_px}px</desc>")
    out.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(o.radius * scale)}" '
               'fill="#fdf6d8" stroke="#333" stroke-width="1"/>')

    c, r = cheese.hole_centers, cheese.hole_radii
    keep = r > 0
    if keep.any():
        hx = (c.real[keep] - x0) * scale
        hy = (y0 + span - c.imag[keep]) * scale
        hr = np.maximum(r[keep] * scale, min_hole_px)
        out.append('<g fill="#444" stroke="none">')
        out.extend(f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="{_fmt(d)}"/>'
                   for a, b, d in zip(hx.tolist(), hy.tolist(), hr.tolist()))
        out.append("</g>")

    overlay = list(overlay)
    if overlay:
        out.append('<g fill="none" stroke="#c0392b" stroke-width="0.8" stroke-dasharray="4 3">')
        for center, rad in overlay:
            a, b = px(complex(center))
            out.append(f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="{_fmt(rad * scale)}" '
                       f'data-radius={quoteattr(repr(float(rad)))}/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
