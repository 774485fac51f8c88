"""Phase-portrait data for the reduced system in the (phi, p_phi) plane.

The reduced energy is separable, p^2/2 + V(phi), so the grid is an outer sum
of a p-parabola and the sampled potential.  Level sets are traced with
marching squares and emitted as CSV and as a deterministic SVG.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .potential import AveragedParams, Equilibrium, find_equilibria, v_bar

__all__ = [
    "PortraitGrid",
    "LevelContours",
    "build_grid",
    "extract_contours",
    "render_svg",
    "grid_to_csv",
    "contours_to_csv",
]

POLE_INSET = 0.02
DEFAULT_RESOLUTION = 512
AUTO_LEVEL_COUNT = 8


@dataclass(frozen=True, eq=False)
class PortraitGrid:
    """Sampled reduced energies plus the contour levels to draw.

    values[i, j] = p[j]^2 / 2 + V(phi[i]); separatrix_levels are the energies
    of the unstable equilibria (empty when there is no saddle).
    """

    phi: np.ndarray
    p: np.ndarray
    values: np.ndarray
    levels: tuple[float, ...]
    separatrix_levels: tuple[float, ...]
    equilibria: tuple[Equilibrium, ...]

    @property
    def nx(self) -> int:
        return len(self.phi)

    @property
    def ny(self) -> int:
        return len(self.p)

    @property
    def phi_range(self) -> tuple[float, float]:
        return (float(self.phi[0]), float(self.phi[-1]))

    @property
    def p_range(self) -> tuple[float, float]:
        return (float(self.p[0]), float(self.p[-1]))


def build_grid(
    ap: AveragedParams,
    nx: int = DEFAULT_RESOLUTION,
    ny: int = DEFAULT_RESOLUTION,
    p_max: float | None = None,
) -> PortraitGrid:
    """Sample the reduced energy over a regular (phi, p_phi) window.

    The phi window is inset from the poles when B > 0 (where V diverges) and
    the full [0, pi] otherwise.  By default p_max covers the sampled energy
    span, so every auto-selected level intersects the window.  Levels are the
    saddle energies, if any, plus AUTO_LEVEL_COUNT values evenly spaced
    strictly between the extremes of V over the window.
    """
    if nx < 2 or ny < 2:
        raise ValueError("grid needs nx, ny >= 2")
    if ap.B > 0.0:
        phi_lo, phi_hi = POLE_INSET, math.pi - POLE_INSET
    else:
        phi_lo, phi_hi = 0.0, math.pi
    phi = np.linspace(phi_lo, phi_hi, nx)
    v = np.array([v_bar(float(x), ap) for x in phi])
    v_min = float(v.min())
    v_max = float(v.max())
    if p_max is None:
        span = v_max - v_min
        p_max = math.sqrt(2.0 * span) if span > 0.0 else 1.0
    if not (p_max > 0.0):
        raise ValueError("p_max must be positive")
    p = np.linspace(-p_max, p_max, ny)
    p = 0.5 * (p - p[::-1])  # exact mirror symmetry p[j] == -p[ny-1-j]

    values = v[:, None] + 0.5 * p[None, :] ** 2

    eqs = tuple(find_equilibria(ap))
    separatrix = tuple(sorted({v_bar(eq.phi, ap) for eq in eqs if eq.kind == "unstable"}))
    spaced = [
        v_min + k * (v_max - v_min) / (AUTO_LEVEL_COUNT + 1.0)
        for k in range(1, AUTO_LEVEL_COUNT + 1)
    ]
    levels = tuple(separatrix) + tuple(x for x in spaced if x not in separatrix)
    return PortraitGrid(
        phi=phi, p=p, values=values, levels=levels, separatrix_levels=separatrix, equilibria=eqs
    )


@dataclass(frozen=True, eq=False)
class LevelContours:
    """Polylines of one level set; each polyline is an (m, 2) array of (phi, p)."""

    level: float
    polylines: tuple[np.ndarray, ...]
    is_separatrix: bool


# Cell corners, counter-clockwise from the low corner, with bit values:
#   A = (i, j) -> 1,  B = (i+1, j) -> 2,  C = (i+1, j+1) -> 4,  D = (i, j+1) -> 8
# and edges AB, BC, CD, DA between them.  The table maps the "corner above
# level" bitmask to pairs of crossed edges; None marks the two ambiguous
# masks, resolved by whether the cell average is above the level.
_AB, _BC, _CD, _DA = 0, 1, 2, 3
_SEGMENT_TABLE: dict[int, list[tuple[int, int]] | None] = {
    1: [(_AB, _DA)],
    2: [(_AB, _BC)],
    3: [(_BC, _DA)],
    4: [(_BC, _CD)],
    5: None,
    6: [(_AB, _CD)],
    7: [(_CD, _DA)],
    8: [(_CD, _DA)],
    9: [(_AB, _CD)],
    10: None,
    11: [(_BC, _CD)],
    12: [(_BC, _DA)],
    13: [(_AB, _BC)],
    14: [(_AB, _DA)],
}


def _edge_key(i: int, j: int, edge: int) -> tuple[str, int, int]:
    # Canonical grid-edge identity shared between neighbouring cells, so
    # chaining is exact and needs no floating-point endpoint matching.
    if edge == _AB:
        return ("p", i, j)  # edge along phi at constant p index j
    if edge == _CD:
        return ("p", i, j + 1)
    if edge == _DA:
        return ("f", i, j)  # edge along p at constant phi index i
    return ("f", i + 1, j)


def _marching_squares(
    phi: np.ndarray, p: np.ndarray, values: np.ndarray, level: float
) -> list[np.ndarray]:
    inside = values > level
    a = inside[:-1, :-1]
    b = inside[1:, :-1]
    c = inside[1:, 1:]
    d = inside[:-1, 1:]
    mask = (
        a.astype(np.int8)
        + (b.astype(np.int8) << 1)
        + (c.astype(np.int8) << 2)
        + (d.astype(np.int8) << 3)
    )
    active = np.argwhere((mask != 0) & (mask != 15))

    points: dict[tuple[str, int, int], tuple[float, float]] = {}

    def crossing(key: tuple[str, int, int]) -> tuple[float, float]:
        pt = points.get(key)
        if pt is not None:
            return pt
        kind, i, j = key
        if kind == "p":
            v0, v1 = values[i, j], values[i + 1, j]
            t = (level - v0) / (v1 - v0)
            pt = (float(phi[i] + t * (phi[i + 1] - phi[i])), float(p[j]))
        else:
            v0, v1 = values[i, j], values[i, j + 1]
            t = (level - v0) / (v1 - v0)
            pt = (float(phi[i]), float(p[j] + t * (p[j + 1] - p[j])))
        points[key] = pt
        return pt

    segments: list[tuple[tuple[str, int, int], tuple[str, int, int]]] = []
    for i, j in active:
        case = int(mask[i, j])
        pairs = _SEGMENT_TABLE[case]
        if pairs is None:
            centre_inside = (values[i, j] + values[i + 1, j] + values[i + 1, j + 1] + values[i, j + 1]) > 4.0 * level
            if case == 5:
                pairs = [(_AB, _BC), (_CD, _DA)] if centre_inside else [(_AB, _DA), (_BC, _CD)]
            else:  # case 10
                pairs = [(_AB, _DA), (_BC, _CD)] if centre_inside else [(_AB, _BC), (_CD, _DA)]
        for e0, e1 in pairs:
            k0 = _edge_key(int(i), int(j), e0)
            k1 = _edge_key(int(i), int(j), e1)
            crossing(k0)
            crossing(k1)
            segments.append((k0, k1))

    return _chain_segments(segments, points)


def _chain_segments(segments, points) -> list[np.ndarray]:
    adjacency: dict[tuple, list[int]] = {}
    for idx, (k0, k1) in enumerate(segments):
        adjacency.setdefault(k0, []).append(idx)
        adjacency.setdefault(k1, []).append(idx)

    used = [False] * len(segments)

    def walk(start_key) -> list[tuple]:
        chain = [start_key]
        key = start_key
        while True:
            nxt = None
            for idx in adjacency[key]:
                if not used[idx]:
                    nxt = idx
                    break
            if nxt is None:
                return chain
            used[nxt] = True
            k0, k1 = segments[nxt]
            key = k1 if k0 == key else k0
            chain.append(key)

    polylines: list[np.ndarray] = []
    # Open chains start at nodes of odd degree; walk those first, then cycles.
    starts = sorted(k for k, segs in adjacency.items() if len(segs) % 2 == 1)
    for start in starts:
        if all(used[idx] for idx in adjacency[start]):
            continue
        chain = walk(start)
        polylines.append(np.array([points[k] for k in chain]))
    for idx in range(len(segments)):
        if used[idx]:
            continue
        used[idx] = True
        k0, k1 = segments[idx]
        chain = [k0] + walk(k1)
        polylines.append(np.array([points[k] for k in chain]))
    return polylines


def extract_contours(grid: PortraitGrid) -> list[LevelContours]:
    """Marching-squares level sets for every level of the grid."""
    out = []
    for level in grid.levels:
        polylines = _marching_squares(grid.phi, grid.p, grid.values, float(level))
        out.append(
            LevelContours(
                level=float(level),
                polylines=tuple(polylines),
                is_separatrix=level in grid.separatrix_levels,
            )
        )
    return out


# Fixed drawing geometry and palette; nothing here depends on the wall clock
# or any randomness, so identical inputs give byte-identical documents.
_SVG_W, _SVG_H = 800, 600
_PLOT = (70.0, 20.0, 770.0, 550.0)  # x0, y0, x1, y1
_CONTOUR_STYLE = 'class="contour" fill="none" stroke="#4878a8" stroke-width="1"'
_SEPARATRIX_STYLE = 'class="separatrix" fill="none" stroke="#c0392b" stroke-width="2"'
_MARKER_R = 5.0


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def render_svg(grid: PortraitGrid, contours: list[LevelContours]) -> str:
    """Deterministic SVG of the portrait: contours plus equilibrium markers.

    Stable equilibria are filled circles, unstable and degenerate ones
    crosses; separatrix polylines get their own stroke.
    """
    x0, y0, x1, y1 = _PLOT
    phi_lo, phi_hi = grid.phi_range
    p_lo, p_hi = grid.p_range

    def to_x(phi: float) -> float:
        return x0 + (phi - phi_lo) / (phi_hi - phi_lo) * (x1 - x0)

    def to_y(p: float) -> float:
        return y1 - (p - p_lo) / (p_hi - p_lo) * (y1 - y0)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<rect x="0" y="0" width="{_SVG_W}" height="{_SVG_H}" fill="#ffffff"/>',
        f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(x1 - x0)}" height="{_fmt(y1 - y0)}" '
        'fill="none" stroke="#000000" stroke-width="1"/>',
    ]
    for k in range(5):
        phi = phi_lo + k * (phi_hi - phi_lo) / 4.0
        x = to_x(phi)
        parts.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(y1)}" x2="{_fmt(x)}" y2="{_fmt(y1 + 6)}" '
            'stroke="#000000" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y1 + 22)}" font-size="13" text-anchor="middle" '
            f'font-family="sans-serif">{phi:.2f}</text>'
        )
        p = p_lo + k * (p_hi - p_lo) / 4.0
        y = to_y(p)
        parts.append(
            f'<line x1="{_fmt(x0 - 6)}" y1="{_fmt(y)}" x2="{_fmt(x0)}" y2="{_fmt(y)}" '
            'stroke="#000000" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(x0 - 10)}" y="{_fmt(y + 4)}" font-size="13" text-anchor="end" '
            f'font-family="sans-serif">{p:.2f}</text>'
        )
    parts.append(
        f'<text x="{_fmt(0.5 * (x0 + x1))}" y="{_fmt(y1 + 40)}" font-size="15" '
        'text-anchor="middle" font-family="sans-serif">phi</text>'
    )
    parts.append(
        f'<text x="16" y="{_fmt(0.5 * (y0 + y1))}" font-size="15" text-anchor="middle" '
        f'font-family="sans-serif" transform="rotate(-90 16 {_fmt(0.5 * (y0 + y1))})">p_phi</text>'
    )

    for lc in contours:
        style = _SEPARATRIX_STYLE if lc.is_separatrix else _CONTOUR_STYLE
        for poly in lc.polylines:
            coords = " L ".join(f"{_fmt(to_x(pt[0]))} {_fmt(to_y(pt[1]))}" for pt in poly)
            parts.append(f'<path {style} d="M {coords}"/>')

    for eq in grid.equilibria:
        if not (phi_lo <= eq.phi <= phi_hi):
            continue
        x = to_x(eq.phi)
        y = to_y(0.0)
        if eq.kind == "stable":
            parts.append(
                f'<circle class="equilibrium-stable" cx="{_fmt(x)}" cy="{_fmt(y)}" '
                f'r="{_fmt(_MARKER_R)}" fill="#1f3b66"/>'
            )
        else:
            r = _MARKER_R
            parts.append(
                f'<path class="equilibrium-{eq.kind}" stroke="#c0392b" stroke-width="2" '
                f'd="M {_fmt(x - r)} {_fmt(y - r)} L {_fmt(x + r)} {_fmt(y + r)} '
                f'M {_fmt(x - r)} {_fmt(y + r)} L {_fmt(x + r)} {_fmt(y - r)}"/>'
            )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def grid_to_csv(grid: PortraitGrid) -> str:
    """CSV of the sampled energies: header row of p values, first column phi."""
    header = "phi," + ",".join(repr(float(x)) for x in grid.p)
    lines = [header]
    for i in range(grid.nx):
        row = repr(float(grid.phi[i])) + "," + ",".join(repr(float(v)) for v in grid.values[i])
        lines.append(row)
    return "\n".join(lines) + "\n"


def contours_to_csv(contours: list[LevelContours]) -> str:
    """CSV of the polylines: level, per-level polyline id, phi, p_phi."""
    lines = ["level,polyline_id,phi,p_phi"]
    for lc in contours:
        for pid, poly in enumerate(lc.polylines):
            for pt in poly:
                lines.append(f"{lc.level!r},{pid},{float(pt[0])!r},{float(pt[1])!r}")
    return "\n".join(lines) + "\n"
