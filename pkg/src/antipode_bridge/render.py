"""SVG drawing of the unfolded octahedron (the L1 sphere for d = 2).

The net keeps the top facet in the middle, surrounded by the three facets
sharing an edge with it; one facet with two flipped signs hangs off each of
those in a pinwheel, and the bottom facet hangs off the first of them.
"""

from __future__ import annotations

import math
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from .construction import ExtendedCover
from .geometry import GridPoint

DEFAULT_PALETTE = ("#d95f02", "#1b9e77", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d")

Vec = Tuple[float, float]
Vertex = Tuple[int, int]  # (sign, coordinate index 0..2)


def _reflect(p: Vec, a: Vec, b: Vec) -> Vec:
    dx, dy = b[0] - a[0], b[1] - a[1]
    t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / (dx * dx + dy * dy)
    foot = (a[0] + t * dx, a[1] + t * dy)
    return (2 * foot[0] - p[0], 2 * foot[1] - p[1])


def octahedron_net() -> List[Tuple[Tuple[int, int, int], Dict[Vertex, Vec]]]:
    """Facets as ``(signs, {vertex: planar position})`` in drawing order."""
    h = math.sqrt(3) / 2
    # equilateral, side 2, centered on the origin
    top = {(1, 0): (0.0, -4 * h / 3), (1, 1): (-1.0, 2 * h / 3), (1, 2): (1.0, 2 * h / 3)}
    facets = [((1, 1, 1), top)]
    flipped = {}
    for i in range(3):
        j, k = [c for c in range(3) if c != i]
        pos = {(-1, i): _reflect(top[(1, i)], top[(1, j)], top[(1, k)]), (1, j): top[(1, j)], (1, k): top[(1, k)]}
        signs = tuple(-1 if c == i else 1 for c in range(3))
        flipped[i] = pos
        facets.append((signs, pos))
    # facet positive only in coordinate i hangs off the facet flipping i-1 (mod 3)
    pinwheel = {}
    for i in range(3):
        host_flip = (i - 1) % 3
        other = [c for c in range(3) if c not in (i, host_flip)][0]
        host = flipped[host_flip]
        a, b = host[(1, i)], host[(-1, host_flip)]
        pos = {(1, i): a, (-1, host_flip): b, (-1, other): _reflect(host[(1, other)], a, b)}
        signs = tuple(1 if c == i else -1 for c in range(3))
        pinwheel[i] = pos
        facets.append((signs, pos))
    base = pinwheel[0]
    a, b = base[(-1, 1)], base[(-1, 2)]
    bottom = {(-1, 1): a, (-1, 2): b, (-1, 0): _reflect(base[(1, 0)], a, b)}
    facets.append(((-1, -1, -1), bottom))
    return facets


def _facet_id(signs: Sequence[int]) -> str:
    return "".join("p" if s > 0 else "m" for s in signs)


def _fmt(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def render_svg(
    ext: ExtendedCover,
    exposed: Iterable[GridPoint] = (),
    size: int = 600,
    palette: Sequence[str] = DEFAULT_PALETTE,
) -> str:
    """Deterministic SVG of the unfolded sphere with grid points colored by A-membership."""
    if ext.dim != 2:
        raise ValueError("rendering is only defined for d = 2")
    if len(palette) < 3:
        raise ValueError("palette needs at least three colors")
    exposed = set(exposed)
    net = octahedron_net()
    xs = [p[0] for _, pos in net for p in pos.values()]
    ys = [p[1] for _, pos in net for p in pos.values()]
    margin = 0.04 * size
    span = max(max(xs) - min(xs), max(ys) - min(ys))
    scale = (size - 2 * margin) / span
    ox = margin - min(xs) * scale + ((size - 2 * margin) - (max(xs) - min(xs)) * scale) / 2
    oy = margin - min(ys) * scale + ((size - 2 * margin) - (max(ys) - min(ys)) * scale) / 2

    def screen(p: Vec) -> str:
        return f"{_fmt(ox + p[0] * scale)},{_fmt(oy + p[1] * scale)}"

    radius = max(1.5, min(8.0, size / (8.0 * ext.n + 8)))
    combos: Dict[FrozenSet[int], str] = {}
    body = []
    for signs, pos in net:
        fid = _facet_id(signs)
        verts = [pos[(signs[c], c)] for c in range(3)]
        style = 'fill="#f7f7f7" stroke="#333333" stroke-width="1"'
        if signs == (1, 1, 1):
            style += ' stroke-dasharray="6,4"'
        body.append(f'<g class="facet" id="facet-{fid}">')
        body.append(f'<polygon points="{" ".join(screen(v) for v in verts)}" {style}/>')
        for g in ext.points():
            if any(s * v < 0 for s, v in zip(signs, g.k)):
                continue
            w = [abs(v) / g.n for v in g.k]
            p = (sum(w[c] * verts[c][0] for c in range(3)), sum(w[c] * verts[c][1] for c in range(3)))
            sets = ext.sets(g)
            cx, cy = screen(p).split(",")
            label = " ".join(str(i) for i in sorted(sets))
            if g in exposed:
                r2 = _fmt(radius * 1.4)
                body.append(
                    f'<circle class="exposed" cx="{cx}" cy="{cy}" r="{r2}" fill="#ffffff" '
                    f'stroke="#000000" stroke-width="2"><title>exposed</title></circle>'
                )
                continue
            if not sets:
                fill = "#ffffff"
            elif len(sets) == 1:
                fill = palette[(next(iter(sets)) - 1) % len(palette)]
            else:
                key = frozenset(sets)
                combos.setdefault(key, "stripe-" + "-".join(str(i) for i in sorted(key)))
                fill = f"url(#{combos[key]})"
            body.append(
                f'<circle class="grid-point" cx="{cx}" cy="{cy}" r="{_fmt(radius)}" fill="{fill}" '
                f'stroke="#222222" stroke-width="0.5"><title>A: {label}</title></circle>'
            )
        body.append("</g>")

    defs = []
    for key in sorted(combos, key=lambda s: sorted(s)):
        idx = sorted(key)
        width = 4 * len(idx)
        defs.append(
            f'<pattern id="{combos[key]}" patternUnits="userSpaceOnUse" width="{width}" height="{width}" '
            f'patternTransform="rotate(45)">'
        )
        for n, i in enumerate(idx):
            defs.append(f'<rect x="{4 * n}" y="0" width="4" height="{width}" fill="{palette[(i - 1) % len(palette)]}"/>')
        defs.append("</pattern>")

    head = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        "<defs>",
        *defs,
        "</defs>",
        f'<rect width="{size}" height="{size}" fill="#ffffff"/>',
    ]
    return "\n".join(head + body + ["</svg>"]) + "\n"
