"""Minimal SVG rendering of plane configurations.

Static figures only: labeled points, plus optional arrows for the
nearest / farthest maps.  The output is a self-contained SVG string
with no external dependencies, suitable for the command line's
``--svg`` flag.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .errors import InvalidInputError
from .metric import NeighbourMaps, PointConfig

_POINT_STYLE = "fill:#36618e;stroke:#17304a;stroke-width:1"
_NN_STYLE = "stroke:#2b8a3e;stroke-width:1.6;fill:none"
_FN_STYLE = "stroke:#c0392b;stroke-width:1.2;fill:none;stroke-dasharray:5 3"


def render_config_svg(config: PointConfig, maps: NeighbourMaps | None = None,
                      which: str = "both", size: int = 640,
                      title: str | None = None) -> str:
    """SVG text showing a 2-d configuration with labels and neighbour arrows.

    ``maps`` draws an arrow from each point to its nearest (solid) and/or
    farthest (dashed) point, controlled by ``which`` in {"nn", "fn", "both"}.
    """
    if config.m != 2:
        raise InvalidInputError(
            f"only plane configurations render to SVG, got {config.m} dimensions")
    if which not in ("nn", "fn", "both"):
        raise InvalidInputError(f"which must be 'nn', 'fn' or 'both', got {which!r}")
    pts = np.asarray(config.coords, dtype=float)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = float(max((hi - lo).max(), 1e-9))
    margin = 0.08 * size
    scale = (size - 2 * margin) / span

    def xy(p: np.ndarray) -> tuple[float, float]:
        # flip y so the drawing matches the usual mathematical orientation
        return (margin + (p[0] - lo[0]) * scale,
                size - margin - (p[1] - lo[1]) * scale)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        '<defs>'
        '<marker id="tipnn" viewBox="0 0 10 10" refX="9" refY="5" '
        'markerWidth="7" markerHeight="7" orient="auto-start-reverse">'
        '<path d="M 0 0 L 10 5 L 0 10 z" fill="#2b8a3e"/></marker>'
        '<marker id="tipfn" viewBox="0 0 10 10" refX="9" refY="5" '
        'markerWidth="7" markerHeight="7" orient="auto-start-reverse">'
        '<path d="M 0 0 L 10 5 L 0 10 z" fill="#c0392b"/></marker>'
        '</defs>',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    if title:
        parts.append(f'<text x="{size / 2:.1f}" y="{margin * 0.55:.1f}" '
                     f'text-anchor="middle" font-size="15" '
                     f'font-family="sans-serif">{escape(title)}</text>')

    if maps is not None:
        arrows = []
        if which in ("nn", "both"):
            arrows.append((maps.nn, _NN_STYLE, "tipnn"))
        if which in ("fn", "both"):
            arrows.append((maps.fn, _FN_STYLE, "tipfn"))
        for mapping, style, tip in arrows:
            for src, dst in enumerate(mapping):
                a, b = np.asarray(xy(pts[src])), np.asarray(xy(pts[dst]))
                vec = b - a
                dist = float(np.hypot(*vec))
                if dist < 1e-9:
                    continue
                # stop short of the target circle so the head stays visible
                b = b - vec / dist * 11.0
                a2 = a + vec / dist * 8.0
                parts.append(
                    f'<path d="M {a2[0]:.2f} {a2[1]:.2f} L {b[0]:.2f} {b[1]:.2f}" '
                    f'style="{style}" marker-end="url(#{tip})"/>')

    for idx in range(config.n):
        cx, cy = xy(pts[idx])
        parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="6" '
                     f'style="{_POINT_STYLE}"/>')
        parts.append(f'<text x="{cx + 9:.2f}" y="{cy - 7:.2f}" font-size="13" '
                     f'font-family="sans-serif">{idx}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def write_svg(path: str, svg_text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg_text)
        if not svg_text.endswith("\n"):
            fh.write("\n")


__all__ = ["render_config_svg", "write_svg"]
