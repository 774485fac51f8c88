"""Shared independent oracles for the test suite.

These deliberately re-derive results with the dumbest method available
(finite differences, dense sign scans, plain bisection) so they stay
independent of the library code paths they audit.
"""

import numpy as np


def central_diff(f, x: float, h: float = 1e-6) -> float:
    return (f(x + h) - f(x - h)) / (2.0 * h)


def close_rel(a: float, b: float, rtol: float = 1e-6, floor: float = 1.0) -> bool:
    """|a - b| <= rtol * max(floor, |a|, |b|)."""
    return abs(a - b) <= rtol * max(floor, abs(a), abs(b))


def brute_force_sign_changes(f, lo: float, hi: float, n: int) -> int:
    """Transversal zero crossings of f on a dense uniform grid."""
    xs = np.linspace(lo, hi, n + 1)
    vs = np.array([f(float(x)) for x in xs])
    signs = np.sign(vs)
    return int(np.sum(signs[:-1] * signs[1:] < 0))


def brute_force_roots(f, lo: float, hi: float, n: int, width: float = 1e-13) -> list:
    """Roots of f by dense scan plus plain bisection."""
    xs = np.linspace(lo, hi, n + 1)
    vs = np.array([f(float(x)) for x in xs])
    roots = []
    for i in range(n):
        a, b = float(xs[i]), float(xs[i + 1])
        fa, fb = float(vs[i]), float(vs[i + 1])
        if fa == 0.0:
            roots.append(a)
            continue
        if fa * fb >= 0.0:
            continue
        while b - a > width:
            mid = 0.5 * (a + b)
            fm = f(mid)
            if fm == 0.0:
                a = b = mid
                break
            if fa * fm < 0.0:
                b, fb = mid, fm
            else:
                a, fa = mid, fm
        roots.append(0.5 * (a + b))
    return roots
