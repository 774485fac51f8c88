"""Effective potential of the symmetry-reduced averaged system.

With dimensionless parameters A (vertical vibration intensity), B (squared
azimuthal momentum) and C (horizontal vibration intensity), the polar angle
moves in the potential

    V(phi) = B / (2 sin^2 phi) + (1/2) (A - C) sin^2 phi - cos phi

Everything here is about V: its derivatives, its equilibria, the critical
curve in the (A - C, B) plane where an equilibrium degenerates, and the
resulting one- vs three-equilibrium domain classification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

__all__ = [
    "AveragedParams",
    "Equilibrium",
    "GammaPoint",
    "DomainLabel",
    "SingularConfigurationError",
    "InconsistentCountError",
    "v_bar",
    "dv",
    "d2v",
    "find_equilibria",
    "gamma_point",
    "gamma_curve",
    "classify_domain",
    "gamma_curve_to_csv",
    "equilibrium_report",
]

GRID_INTERVALS = 4096
PHI_MARGIN = 1e-6
BISECT_WIDTH = 1e-12
DEDUP_TOL = 1e-9
DEGENERATE_DV_TOL = 1e-10

DomainLabel = Literal["I", "II", "boundary"]
EquilibriumKind = Literal["stable", "unstable", "degenerate"]


class SingularConfigurationError(ValueError):
    """Evaluation on the vertical axis where the azimuthal barrier diverges."""


class InconsistentCountError(RuntimeError):
    """The root finder returned an equilibrium count the theory forbids."""


@dataclass(frozen=True)
class AveragedParams:
    """Dimensionless parameters (A, B, C) of the reduced averaged system.

    A and C are means of squared velocities, B a squared momentum, so all
    three are nonnegative; the reduced dynamics depends on A and C only
    through the difference A - C.
    """

    A: float
    B: float
    C: float = 0.0

    def __post_init__(self):
        for name in ("A", "B", "C"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)}")

    @property
    def a_minus_c(self) -> float:
        return self.A - self.C

    @classmethod
    def from_a_minus_c(cls, a_minus_c: float, b: float) -> "AveragedParams":
        """Parameters with the given difference, using the smaller of A, C as zero."""
        if a_minus_c >= 0.0:
            return cls(A=a_minus_c, B=b, C=0.0)
        return cls(A=0.0, B=b, C=-a_minus_c)


def _check_regular(s: float, b: float) -> None:
    if s == 0.0 and b != 0.0:
        raise SingularConfigurationError("sin(phi) = 0 with a nonzero azimuthal barrier")


def v_bar(phi: float, ap: AveragedParams) -> float:
    """Effective potential V(phi)."""
    s = math.sin(phi)
    _check_regular(s, ap.B)
    barrier = ap.B / (2.0 * s * s) if ap.B != 0.0 else 0.0
    return barrier + 0.5 * ap.a_minus_c * s * s - math.cos(phi)


def dv(phi: float, ap: AveragedParams) -> float:
    """First derivative dV/dphi."""
    s = math.sin(phi)
    c = math.cos(phi)
    _check_regular(s, ap.B)
    barrier = -ap.B * c / (s * s * s) if ap.B != 0.0 else 0.0
    return barrier + ap.a_minus_c * s * c + s


def d2v(phi: float, ap: AveragedParams) -> float:
    """Second derivative d2V/dphi2."""
    s = math.sin(phi)
    c = math.cos(phi)
    _check_regular(s, ap.B)
    if ap.B != 0.0:
        s2 = s * s
        barrier = 3.0 * ap.B * c * c / (s2 * s2) + ap.B / s2
    else:
        barrier = 0.0
    return barrier + ap.a_minus_c * (c * c - s * s) + c


def _dv_samples(phi: np.ndarray, ap: AveragedParams) -> np.ndarray:
    s = np.sin(phi)
    c = np.cos(phi)
    barrier = -ap.B * c / (s * s * s) if ap.B != 0.0 else 0.0
    return barrier + ap.a_minus_c * s * c + s


def _d2v_samples(phi: np.ndarray, ap: AveragedParams) -> np.ndarray:
    s = np.sin(phi)
    c = np.cos(phi)
    if ap.B != 0.0:
        s2 = s * s
        barrier = 3.0 * ap.B * c * c / (s2 * s2) + ap.B / s2
    else:
        barrier = 0.0
    return barrier + ap.a_minus_c * (c * c - s * s) + c


@dataclass(frozen=True)
class Equilibrium:
    """Critical point of V with its stability classification."""

    phi: float
    kind: EquilibriumKind
    v_value: float
    second_derivative: float


def degeneracy_tolerance(ap: AveragedParams) -> float:
    # d2V grows with the parameters; scale the tolerance accordingly.
    return 1e-8 * max(1.0, abs(ap.a_minus_c), ap.B)


def _classify(phi: float, ap: AveragedParams, second: float) -> Equilibrium:
    tol = degeneracy_tolerance(ap)
    if abs(second) <= tol:
        kind: EquilibriumKind = "degenerate"
    elif second > 0.0:
        kind = "stable"
    else:
        kind = "unstable"
    return Equilibrium(phi=phi, kind=kind, v_value=v_bar(phi, ap), second_derivative=second)


def _bisect(f: Callable[[float], float], a: float, b: float, fa: float, fb: float) -> float:
    """Bisection of a bracketed sign change down to interval width BISECT_WIDTH."""
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    while b - a > BISECT_WIDTH:
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fa < 0.0) != (fm < 0.0):
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


def _bracketed_roots(
    f: Callable[[float], float], grid: np.ndarray, values: np.ndarray
) -> list[float]:
    roots = []
    for i in range(len(grid) - 1):
        fa, fb = values[i], values[i + 1]
        if fa == 0.0:
            roots.append(float(grid[i]))
        elif (fa < 0.0) != (fb < 0.0):
            roots.append(_bisect(f, float(grid[i]), float(grid[i + 1]), float(fa), float(fb)))
    if len(values) and values[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def _dedup(values: list[float], tol: float = DEDUP_TOL) -> list[float]:
    out: list[float] = []
    for x in sorted(values):
        if not out or x - out[-1] > tol:
            out.append(x)
    return out


def find_equilibria(ap: AveragedParams) -> list[Equilibrium]:
    """All equilibria of V on [0, pi], sorted by phi.

    For B > 0 the poles are excluded by the barrier and roots of dV are
    bracketed on a uniform grid and bisected; tangential (degenerate) roots
    do not change sign, so they are recovered separately as roots of d2V at
    which dV also vanishes.  For B = 0 the poles are genuine equilibria and
    the interior ones solve (A - C) cos phi + 1 = 0 in closed form.
    """
    if ap.B == 0.0:
        return _find_equilibria_planar(ap)

    lo = PHI_MARGIN
    hi = math.pi - PHI_MARGIN
    grid = np.linspace(lo, hi, GRID_INTERVALS + 1)
    f = lambda x: dv(x, ap)
    fs = _dv_samples(grid, ap)
    roots = _bracketed_roots(f, grid, fs)

    # Tangential roots: dV touches zero where also d2V = 0.
    g = lambda x: d2v(x, ap)
    gs = _d2v_samples(grid, ap)
    dv_tol = DEGENERATE_DV_TOL * max(1.0, abs(ap.a_minus_c), ap.B)
    for xc in _bracketed_roots(g, grid, gs):
        if abs(dv(xc, ap)) <= dv_tol:
            roots.append(xc)

    return [_classify(x, ap, d2v(x, ap)) for x in _dedup(roots)]


def _find_equilibria_planar(ap: AveragedParams) -> list[Equilibrium]:
    # B = 0: dV = sin(phi) ((A - C) cos(phi) + 1).  Poles are equilibria with
    # limiting curvatures (A - C) + 1 at phi = 0 and (A - C) - 1 at phi = pi.
    amc = ap.a_minus_c
    phis = [0.0, math.pi]
    if abs(amc) >= 1.0:
        phis.append(math.acos(-1.0 / amc))
    return [_classify(x, ap, d2v(x, ap)) for x in _dedup(phis)]


@dataclass(frozen=True)
class GammaPoint:
    """Point of the critical curve, parametrised by the degenerate angle phi."""

    phi: float
    a_minus_c: float
    b: float


def gamma_point(phi: float) -> GammaPoint:
    """Critical-curve point whose degenerate equilibrium sits at phi.

    Defined for phi in (pi/2, pi]; outside that range the construction would
    require a negative B.
    """
    if not (0.5 * math.pi < phi <= math.pi):
        raise ValueError(f"gamma curve is parametrised by phi in (pi/2, pi], got {phi}")
    s = math.sin(phi)
    c = math.cos(phi)
    c3 = c * c * c
    a_minus_c = -(3.0 * c * c + 1.0) / (4.0 * c3)
    b = -0.25 * s ** 6 / c3
    return GammaPoint(phi=phi, a_minus_c=a_minus_c, b=b)


def gamma_curve(phi_values) -> list[GammaPoint]:
    """Critical-curve points for each parameter value."""
    return [gamma_point(float(phi)) for phi in phi_values]


def classify_domain(ap: AveragedParams) -> DomainLabel:
    """Parameter-plane domain by direct equilibrium count (B > 0 only).

    "I" for a single equilibrium, "II" for three, "boundary" when a
    degenerate equilibrium is present.  Because dV runs from -inf to +inf
    across (0, pi), any other nondegenerate count signals a root-finder
    failure and raises :class:`InconsistentCountError`.
    """
    if not (ap.B > 0.0):
        raise ValueError("domain classification is defined for B > 0")
    eqs = find_equilibria(ap)
    if any(eq.kind == "degenerate" for eq in eqs):
        return "boundary"
    count = len(eqs)
    if count == 1:
        return "I"
    if count == 3:
        return "II"
    raise InconsistentCountError(
        f"found {count} nondegenerate equilibria for (A-C, B) = "
        f"({ap.a_minus_c}, {ap.B}); expected 1 or 3"
    )


def gamma_curve_to_csv(points: list[GammaPoint]) -> str:
    """CSV rendering of the critical curve: phi, a_minus_c, b."""
    lines = ["phi,a_minus_c,b"]
    for pt in points:
        lines.append(f"{pt.phi!r},{pt.a_minus_c!r},{pt.b!r}")
    return "\n".join(lines) + "\n"


def equilibrium_report(ap: AveragedParams) -> dict:
    """JSON-ready equilibrium set with the domain label (null on the B = 0 edge)."""
    eqs = find_equilibria(ap)
    if ap.B > 0.0:
        domain = classify_domain(ap)
    else:
        domain = None
    return {
        "params": {"A": ap.A, "B": ap.B, "C": ap.C, "a_minus_c": ap.a_minus_c},
        "equilibria": [
            {"phi": eq.phi, "kind": eq.kind, "v": eq.v_value, "d2v": eq.second_derivative}
            for eq in eqs
        ],
        "domain": domain,
    }
