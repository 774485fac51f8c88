"""Hamiltonian flows of the pendulum with a vibrating pivot.

The full flow is time dependent through the pivot velocities; additive terms
of the Hamiltonian that depend on time alone are dropped, since they do not
enter Hamilton's equations.  Averaging over one period of the fast phase
(state frozen) yields the averaged Hamiltonian, which under the symmetry
conditions reduces to one degree of freedom: phi moving in the effective
potential of :mod:`pendulum_vib.potential`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .excitation import (
    Excitation,
    MomentMatrix,
    SymmetryReport,
    check_symmetry,
    eval_velocity,
    velocity_moments,
)
from .potential import AveragedParams, SingularConfigurationError, dv

__all__ = [
    "PhysicalParams",
    "FullState",
    "Trajectory",
    "ComparisonReport",
    "IntegrationBlowUpError",
    "SymmetryViolationError",
    "full_hamiltonian",
    "full_rhs",
    "averaged_hamiltonian",
    "averaged_params",
    "reduced_rhs",
    "make_full_rhs",
    "make_reduced_rhs",
    "rk4_step",
    "integrate",
    "sample_at",
    "compare_full_averaged",
    "convergence_sweep",
    "trajectory_to_csv",
]

STEPS_PER_FAST_PERIOD = 64
REDUCED_STEP = 1e-3


@dataclass(frozen=True)
class PhysicalParams:
    """Bob mass, rod length, gravity; all strictly positive."""

    m: float = 1.0
    l: float = 1.0
    g: float = 1.0

    def __post_init__(self):
        for name in ("m", "l", "g"):
            if not (getattr(self, name) > 0.0):
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


UNIT_PARAMS = PhysicalParams(1.0, 1.0, 1.0)


@dataclass(frozen=True)
class FullState:
    """Canonical state (phi, alpha, p_phi, p_alpha) of the full system."""

    phi: float
    alpha: float
    p_phi: float
    p_alpha: float

    def as_array(self) -> np.ndarray:
        return np.array([self.phi, self.alpha, self.p_phi, self.p_alpha])

    @classmethod
    def from_array(cls, y) -> "FullState":
        return cls(float(y[0]), float(y[1]), float(y[2]), float(y[3]))


def _pivot_projections(
    s: float, c: float, sa: float, ca: float, vel: tuple[float, float, float]
) -> tuple[float, float]:
    # Pivot velocity resolved along the two angular directions.
    td, ed, xd = vel
    u_phi = c * ca * td + c * sa * ed + s * xd
    u_alpha = -s * sa * td + s * ca * ed
    return u_phi, u_alpha


def full_hamiltonian(state: FullState, t: float, e: Excitation, p: PhysicalParams) -> float:
    """Hamiltonian of the full time-dependent system.

    With zero excitation this is the standard spherical pendulum; additive
    functions of time alone are dropped.
    """
    vel = eval_velocity(e, t)
    s = math.sin(state.phi)
    c = math.cos(state.phi)
    sa = math.sin(state.alpha)
    ca = math.cos(state.alpha)
    u_phi, u_alpha = _pivot_projections(s, c, sa, ca, vel)
    ml = p.m * p.l
    ml2 = p.m * p.l * p.l
    d_phi = state.p_phi - ml * u_phi
    if s == 0.0:
        if state.p_alpha != 0.0:
            raise SingularConfigurationError("sin(phi) = 0 with p_alpha != 0")
        # u_alpha carries a factor sin(phi); the azimuthal term has a finite limit.
        w = -ml * (-sa * vel[0] + ca * vel[1])
    else:
        w = (state.p_alpha - ml * u_alpha) / s
    return (d_phi * d_phi + w * w) / (2.0 * ml2) - p.m * p.g * p.l * c


def full_rhs(
    state: FullState, t: float, e: Excitation, p: PhysicalParams
) -> tuple[float, float, float, float]:
    """Hamilton's equations of the full system: (dphi, dalpha, dp_phi, dp_alpha)."""
    vel = eval_velocity(e, t)
    td, ed, xd = vel
    s = math.sin(state.phi)
    c = math.cos(state.phi)
    sa = math.sin(state.alpha)
    ca = math.cos(state.alpha)
    u_phi, u_alpha = _pivot_projections(s, c, sa, ca, vel)
    ml = p.m * p.l
    ml2 = p.m * p.l * p.l
    d_phi = state.p_phi - ml * u_phi

    du_phi_dphi = -s * ca * td - s * sa * ed + c * xd
    horiz = -sa * td + ca * ed
    du_alpha_dphi = c * horiz
    du_phi_dalpha = c * horiz
    du_alpha_dalpha = -s * ca * td - s * sa * ed

    if s == 0.0:
        if state.p_alpha != 0.0 or horiz != 0.0:
            raise SingularConfigurationError("sin(phi) = 0 is a coordinate singularity here")
        dphi = d_phi / ml2
        dp_phi = (d_phi / p.l) * du_phi_dphi - p.m * p.g * p.l * s
        return (dphi, 0.0, dp_phi, 0.0)

    w = (state.p_alpha - ml * u_alpha) / s
    dphi = d_phi / ml2
    dalpha = w / (ml2 * s)
    dp_phi = (
        (d_phi / p.l) * du_phi_dphi
        + (w / (p.l * s)) * du_alpha_dphi
        + w * w * c / (ml2 * s)
        - p.m * p.g * p.l * s
    )
    dp_alpha = (d_phi / p.l) * du_phi_dalpha + (w / (p.l * s)) * du_alpha_dalpha
    return (dphi, dalpha, dp_phi, dp_alpha)


def averaged_hamiltonian(state: FullState, mm: MomentMatrix, p: PhysicalParams) -> float:
    """Hamiltonian averaged over one period of the fast phase, state frozen.

    Retains the azimuth-dependent terms; they vanish only under the symmetry
    conditions tested by :func:`pendulum_vib.excitation.check_symmetry`.
    """
    s = math.sin(state.phi)
    c = math.cos(state.phi)
    sa = math.sin(state.alpha)
    ca = math.cos(state.alpha)
    ml2 = p.m * p.l * p.l
    if s == 0.0:
        if state.p_alpha != 0.0:
            raise SingularConfigurationError("sin(phi) = 0 with p_alpha != 0")
        kin = state.p_phi * state.p_phi / (2.0 * ml2)
    else:
        kin = (state.p_phi * state.p_phi + state.p_alpha * state.p_alpha / (s * s)) / (2.0 * ml2)
    m = p.m
    return (
        kin
        + 0.5 * m * (c * c * ca * ca + sa * sa) * mm.tau_tau
        + 0.5 * m * (c * c * sa * sa + ca * ca) * mm.eta_eta
        + 0.5 * m * s * s * mm.xi_xi
        + m * (c * c * ca * sa - ca * sa) * mm.tau_eta
        + m * c * ca * s * mm.tau_xi
        + m * c * sa * s * mm.eta_xi
        - m * p.g * p.l * c
    )


def averaged_params(mm: MomentMatrix, p_alpha: float, p: PhysicalParams) -> AveragedParams:
    """Nondimensionalise the moments and azimuthal momentum to (A, B, C).

    A = <xi'^2> / (g l), C = <eta'^2> / (g l), B = p_alpha^2 / (m^2 l^3 g);
    the matching time unit is sqrt(l / g).
    """
    gl = p.g * p.l
    return AveragedParams(
        A=mm.xi_xi / gl,
        B=p_alpha * p_alpha / (p.m * p.m * p.l ** 3 * p.g),
        C=mm.eta_eta / gl,
    )


def reduced_rhs(phi: float, p_phi: float, ap: AveragedParams) -> tuple[float, float]:
    """Reduced flow in dimensionless units: (dphi, dp_phi) = (p_phi, -dV/dphi)."""
    return (p_phi, -dv(phi, ap))


def make_full_rhs(e: Excitation, p: PhysicalParams) -> Callable[[float, np.ndarray], np.ndarray]:
    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return np.array(full_rhs(FullState.from_array(y), t, e, p))

    return rhs


def make_reduced_rhs(ap: AveragedParams) -> Callable[[float, np.ndarray], np.ndarray]:
    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return np.array(reduced_rhs(float(y[0]), float(y[1]), ap))

    return rhs


class IntegrationBlowUpError(RuntimeError):
    """A trajectory left the realm of finite floats."""

    def __init__(self, time: float):
        super().__init__(f"non-finite state reached at t = {time}")
        self.time = time


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States recorded at every accepted step of a fixed-step integration."""

    t: np.ndarray
    y: np.ndarray


def rk4_step(rhs, t: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1)
    k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(rhs, y0, t_span: tuple[float, float], step: float) -> Trajectory:
    """Classical fixed-step RK4 over t_span, recording every step.

    A final shorter step lands exactly on the end time when the span is not
    an integer number of steps.  Deterministic for identical inputs; aborts
    with :class:`IntegrationBlowUpError` when the state goes non-finite.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not (step > 0.0):
        raise ValueError("step must be positive")
    if not (t1 > t0):
        raise ValueError("t_span must have positive length")
    n_full = int(math.floor((t1 - t0) / step * (1.0 + 1e-12)))
    remainder = t1 - (t0 + n_full * step)

    y = np.array(y0, dtype=float)
    ts = [t0]
    ys = [y]
    t = t0
    for k in range(n_full):
        y = rk4_step(rhs, t, y, step)
        t = t0 + (k + 1) * step
        if not np.all(np.isfinite(y)):
            raise IntegrationBlowUpError(t)
        ts.append(t)
        ys.append(y)
    if remainder > step * 1e-9:
        y = rk4_step(rhs, t, y, remainder)
        t = t1
        if not np.all(np.isfinite(y)):
            raise IntegrationBlowUpError(t)
        ts.append(t)
        ys.append(y)
    return Trajectory(t=np.array(ts), y=np.array(ys))


def sample_at(rhs, traj: Trajectory, t: float) -> np.ndarray:
    """State at an arbitrary time inside a trajectory's span.

    Advances one partial RK4 step from the last recorded state at or before
    t, so the extra error is a single local truncation error rather than a
    linear-interpolation error.
    """
    k = int(np.searchsorted(traj.t, t, side="right")) - 1
    k = min(max(k, 0), len(traj.t) - 1)
    delta = t - float(traj.t[k])
    if delta == 0.0:
        return traj.y[k]
    return rk4_step(rhs, float(traj.t[k]), traj.y[k], delta)


class SymmetryViolationError(ValueError):
    """Excitation fails the rotational-symmetry conditions required here."""

    def __init__(self, report: SymmetryReport):
        super().__init__(
            "excitation violates the symmetry conditions: residuals "
            f"{report.residuals()} exceed tol {report.tol}"
        )
        self.report = report


@dataclass(frozen=True)
class ComparisonReport:
    """Worst-case gaps between the full and averaged descriptions."""

    epsilon: float
    t_end: float
    max_err_phi: float
    max_err_p_phi: float
    p_alpha_drift: float


def compare_full_averaged(
    e: Excitation,
    initial: FullState,
    t_end: float,
    steps_per_period: int = STEPS_PER_FAST_PERIOD,
    reduced_step: float = REDUCED_STEP,
    symmetry_tol: float = 1e-9,
) -> ComparisonReport:
    """Integrate the full and reduced systems from the same slow state.

    Requires a symmetric excitation (the reduced system assumes it).  Both
    flows run in dimensionless units m = l = g = 1; the full flow is sampled
    at STEPS_PER_FAST_PERIOD points per fast period, the reduced flow at the
    fixed reduced_step, and the reduced state is re-sampled at the full
    trajectory's times for the max-difference norms.
    """
    mm = velocity_moments(e)
    report = check_symmetry(mm, symmetry_tol)
    if not report.passed:
        raise SymmetryViolationError(report)

    ap = averaged_params(mm, initial.p_alpha, UNIT_PARAMS)
    full_step = e.fast_period / steps_per_period
    full_traj = integrate(make_full_rhs(e, UNIT_PARAMS), initial.as_array(), (0.0, t_end), full_step)
    red_rhs = make_reduced_rhs(ap)
    red_traj = integrate(red_rhs, [initial.phi, initial.p_phi], (0.0, t_end), reduced_step)

    max_err_phi = 0.0
    max_err_p_phi = 0.0
    for t, y in zip(full_traj.t, full_traj.y):
        ref = sample_at(red_rhs, red_traj, float(t))
        max_err_phi = max(max_err_phi, abs(float(y[0]) - float(ref[0])))
        max_err_p_phi = max(max_err_p_phi, abs(float(y[2]) - float(ref[1])))
    p_alpha_drift = float(np.max(np.abs(full_traj.y[:, 3] - initial.p_alpha)))
    return ComparisonReport(
        epsilon=e.epsilon,
        t_end=t_end,
        max_err_phi=max_err_phi,
        max_err_p_phi=max_err_p_phi,
        p_alpha_drift=p_alpha_drift,
    )


def convergence_sweep(
    e: Excitation,
    epsilons,
    initial: FullState,
    t_end: float,
    max_workers: int = 1,
) -> dict:
    """Run :func:`compare_full_averaged` for each amplitude scale.

    Returns the JSON-ready report; entries are ordered like ``epsilons``
    regardless of worker scheduling.
    """
    epsilons = [float(x) for x in epsilons]
    runs = [replace(e, epsilon=eps) for eps in epsilons]
    if max_workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            reports = list(pool.map(lambda exc: compare_full_averaged(exc, initial, t_end), runs))
    else:
        reports = [compare_full_averaged(exc, initial, t_end) for exc in runs]
    return {
        "epsilons": epsilons,
        "max_err_phi": [r.max_err_phi for r in reports],
        "max_err_p_phi": [r.max_err_p_phi for r in reports],
        "p_alpha_drift": [r.p_alpha_drift for r in reports],
    }


def trajectory_to_csv(traj: Trajectory) -> str:
    """CSV rendering of a full-system trajectory."""
    if traj.y.ndim != 2 or traj.y.shape[1] != 4:
        raise ValueError("trajectory CSV expects 4-component full states")
    lines = ["t,phi,alpha,p_phi,p_alpha"]
    for t, y in zip(traj.t, traj.y):
        row = [float(t)] + [float(v) for v in y]
        lines.append(",".join(repr(v) for v in row))
    return "\n".join(lines) + "\n"
