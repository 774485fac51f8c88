"""Command-line front end.

Exit codes: 0 success, 1 bad input or I/O trouble, 2 a scientific check
failed (symmetry violation, convergence band, impossible equilibrium count).
All outputs are deterministic functions of the inputs; written JSON re-reads
and re-emits byte-identically.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import (
    FullState,
    PhysicalParams,
    SymmetryViolationError,
    averaged_params,
    convergence_sweep,
)
from .excitation import check_symmetry, load_excitation, velocity_moments
from .portrait import build_grid, contours_to_csv, extract_contours, grid_to_csv, render_svg
from .potential import (
    AveragedParams,
    InconsistentCountError,
    classify_domain,
    equilibrium_report,
    gamma_curve,
    gamma_curve_to_csv,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SCIENCE = 2

CONVERGENCE_BAND = (1.4, 3.5)
# Errors below this are integrator/rounding noise; ratio checks do not apply.
ERROR_FLOOR = 1e-8


@dataclass
class RunConfig:
    """Validated per-invocation options shared by the subcommands."""

    phys: PhysicalParams = PhysicalParams()
    p_alpha: float = 0.0
    tol: float = 1e-9
    excitation_path: str | None = None
    out: str | None = None
    a_minus_c: float = 0.0
    b: float = 0.0
    nx: int = 512
    ny: int = 512
    p_max: float | None = None
    eps_sweep: list[float] = field(default_factory=list)
    t_end: float = 10.0
    initial: tuple[float, float, float, float] = (2.0, 0.0, 0.0, 0.3)
    samples: int = 500

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        cfg = cls()
        if getattr(args, "phys", None):
            m, l, g = _parse_float_list(args.phys, expect=3, what="--phys")
            cfg.phys = PhysicalParams(m, l, g)
        for name in ("p_alpha", "tol", "excitation", "out", "a_minus_c", "b",
                     "nx", "ny", "p_max", "t_end", "samples"):
            attr = "excitation_path" if name == "excitation" else name
            if getattr(args, name, None) is not None:
                setattr(cfg, attr, getattr(args, name))
        if cfg.tol <= 0.0:
            raise ValueError("--tol must be positive")
        if getattr(args, "eps_sweep", None):
            sweep = _parse_float_list(args.eps_sweep, what="--eps-sweep")
            if any(x <= 0.0 for x in sweep):
                raise ValueError("--eps-sweep entries must be positive")
            if any(b >= a for a, b in zip(sweep, sweep[1:])):
                raise ValueError("--eps-sweep must be strictly decreasing")
            cfg.eps_sweep = sweep
        if getattr(args, "initial", None):
            cfg.initial = tuple(_parse_float_list(args.initial, expect=4, what="--initial"))
        return cfg


def _parse_float_list(text: str, expect: int | None = None, what: str = "list") -> list[float]:
    try:
        values = [float(x) for x in text.split(",")]
    except ValueError:
        raise ValueError(f"{what}: expected comma-separated numbers, got {text!r}")
    if expect is not None and len(values) != expect:
        raise ValueError(f"{what}: expected {expect} values, got {len(values)}")
    return values


def _emit_json(doc, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def _emit_text(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _max_workers() -> int:
    raw = os.environ.get("PENDULUM_VIB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def cmd_moments(cfg: RunConfig) -> int:
    if cfg.excitation_path is None:
        raise ValueError("--excitation is required")
    e = load_excitation(cfg.excitation_path)
    mm = velocity_moments(e)
    rep = check_symmetry(mm, cfg.tol)
    ap = averaged_params(mm, cfg.p_alpha, cfg.phys)
    doc = {
        "moments": {
            "tau_tau": mm.tau_tau,
            "eta_eta": mm.eta_eta,
            "xi_xi": mm.xi_xi,
            "tau_eta": mm.tau_eta,
            "tau_xi": mm.tau_xi,
            "eta_xi": mm.eta_xi,
        },
        "A": ap.A,
        "B": ap.B,
        "C": ap.C,
        "symmetry": {
            "passed": rep.passed,
            "tol": rep.tol,
            "residuals": {
                "diag": rep.diag_residual,
                "tau_eta": rep.tau_eta,
                "tau_xi": rep.tau_xi,
                "eta_xi": rep.eta_xi,
            },
        },
    }
    _emit_json(doc, cfg.out)
    return EXIT_OK if rep.passed else EXIT_SCIENCE


def cmd_equilibria(cfg: RunConfig) -> int:
    ap = AveragedParams.from_a_minus_c(cfg.a_minus_c, cfg.b)
    _emit_json(equilibrium_report(ap), cfg.out)
    return EXIT_OK


def cmd_curve(cfg: RunConfig) -> int:
    if cfg.samples < 2:
        raise ValueError("--samples must be at least 2")
    phis = np.linspace(0.5 * math.pi + 1e-3, math.pi, cfg.samples)
    _emit_text(gamma_curve_to_csv(gamma_curve(phis)), cfg.out)
    return EXIT_OK


def cmd_domain(cfg: RunConfig) -> int:
    ap = AveragedParams.from_a_minus_c(cfg.a_minus_c, cfg.b)
    label = classify_domain(ap)
    doc = {"params": {"a_minus_c": cfg.a_minus_c, "b": cfg.b}, "domain": label}
    _emit_json(doc, cfg.out)
    return EXIT_OK


def _write_portrait(ap: AveragedParams, out_dir: Path, nx: int, ny: int, p_max) -> None:
    grid = build_grid(ap, nx=nx, ny=ny, p_max=p_max)
    contours = extract_contours(grid)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "grid.csv").write_text(grid_to_csv(grid), encoding="utf-8")
    (out_dir / "contours.csv").write_text(contours_to_csv(contours), encoding="utf-8")
    (out_dir / "portrait.svg").write_text(render_svg(grid, contours), encoding="utf-8")
    for eq in grid.equilibria:
        print(f"equilibrium phi={eq.phi:.6f} kind={eq.kind} V={eq.v_value:.6f}")


def cmd_portrait(cfg: RunConfig) -> int:
    ap = AveragedParams.from_a_minus_c(cfg.a_minus_c, cfg.b)
    out_dir = Path(cfg.out) if cfg.out else Path(".")
    _write_portrait(ap, out_dir, cfg.nx, cfg.ny, cfg.p_max)
    return EXIT_OK


def _ratio_verdict(errors: list[float]) -> tuple[list[float], bool]:
    """Successive halving ratios and whether each pair is in the band.

    Pairs where both errors sit below ERROR_FLOOR carry no information about
    the convergence order (they are integrator noise, e.g. an exactly
    conserved quantity) and pass.
    """
    lo, hi = CONVERGENCE_BAND
    ratios = []
    ok = True
    for a, b in zip(errors, errors[1:]):
        if a <= ERROR_FLOOR and b <= ERROR_FLOOR:
            ratios.append(float("nan"))
            continue
        r = a / b if b != 0.0 else float("inf")
        ratios.append(r)
        if not (lo <= r <= hi):
            ok = False
    return ratios, ok


def cmd_compare(cfg: RunConfig) -> int:
    if cfg.excitation_path is None:
        raise ValueError("--excitation is required")
    if not cfg.eps_sweep:
        raise ValueError("--eps-sweep is required")
    e = load_excitation(cfg.excitation_path)
    initial = FullState(*cfg.initial)
    report = convergence_sweep(e, cfg.eps_sweep, initial, cfg.t_end, max_workers=_max_workers())
    ratios_phi, phi_ok = _ratio_verdict(report["max_err_phi"])
    ratios_drift, drift_ok = _ratio_verdict(report["p_alpha_drift"])
    doc = dict(report)
    doc["ratios_phi"] = [None if math.isnan(r) else r for r in ratios_phi]
    doc["ratios_p_alpha"] = [None if math.isnan(r) else r for r in ratios_drift]
    doc["band"] = list(CONVERGENCE_BAND)
    doc["passed"] = bool(phi_ok and drift_ok)
    _emit_json(doc, cfg.out)
    return EXIT_OK if doc["passed"] else EXIT_SCIENCE


def cmd_reproduce(cfg: RunConfig) -> int:
    out_dir = Path(cfg.out) if cfg.out else Path(
        f"reproduction-{datetime.date.today().isoformat()}"
    )
    out_dir.mkdir(parents=True, exist_ok=True)

    phis = np.linspace(0.5 * math.pi + 1e-3, math.pi, cfg.samples)
    (out_dir / "gamma.csv").write_text(
        gamma_curve_to_csv(gamma_curve(phis)), encoding="utf-8"
    )
    print(f"wrote {out_dir / 'gamma.csv'}")

    lines = ["a_minus_c,b,domain"]
    for amc in np.linspace(-1.0, 4.0, 41):
        for b in np.linspace(0.05, 1.5, 30):
            label = classify_domain(AveragedParams.from_a_minus_c(float(amc), float(b)))
            lines.append(f"{float(amc)!r},{float(b)!r},{label}")
    (out_dir / "domains.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out_dir / 'domains.csv'}")

    for name, amc, b in (("domain_I", 0.0, 0.1), ("domain_II", 3.5, 0.01)):
        sub = out_dir / f"portrait_{name}"
        _write_portrait(AveragedParams.from_a_minus_c(amc, b), sub, cfg.nx, cfg.ny, cfg.p_max)
        print(f"wrote {sub}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pendulum-vib",
        description="Averaged dynamics of a spherical pendulum with a fast-vibrating pivot.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("moments", cmd_moments, "velocity moments, (A, B, C) and the symmetry verdict")
    p.add_argument("--excitation", required=True, help="path to an excitation JSON file")
    p.add_argument("--p-alpha", dest="p_alpha", type=float, help="azimuthal momentum (default 0)")
    p.add_argument("--phys", help="physical parameters m,l,g (default 1,1,1)")
    p.add_argument("--tol", type=float, help="symmetry tolerance (default 1e-9)")
    p.add_argument("--out", help="also write the JSON report to this file")

    p = add("equilibria", cmd_equilibria, "equilibria of the effective potential")
    p.add_argument("--a-minus-c", dest="a_minus_c", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--out")

    p = add("curve", cmd_curve, "parametric critical curve as CSV")
    p.add_argument("--samples", type=int, help="number of phi samples (default 500)")
    p.add_argument("--out")

    p = add("domain", cmd_domain, "parameter-plane domain label (B > 0)")
    p.add_argument("--a-minus-c", dest="a_minus_c", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--out")

    p = add("portrait", cmd_portrait, "phase-portrait grid, contours and SVG")
    p.add_argument("--a-minus-c", dest="a_minus_c", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--p-max", dest="p_max", type=float)
    p.add_argument("--out", help="output directory (default current)")

    p = add("compare", cmd_compare, "full vs averaged convergence experiment")
    p.add_argument("--excitation", required=True)
    p.add_argument("--eps-sweep", dest="eps_sweep", required=True,
                   help="strictly decreasing amplitudes, e.g. 0.1,0.05,0.025")
    p.add_argument("--t-end", dest="t_end", type=float, help="time horizon (default 10)")
    p.add_argument("--initial", help="phi,alpha,p_phi,p_alpha (default 2,0,0,0.3)")
    p.add_argument("--out")

    p = add("reproduce", cmd_reproduce, "regenerate curve, domain sweep and both portraits")
    p.add_argument("--samples", type=int)
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--p-max", dest="p_max", type=float)
    p.add_argument("--out", help="output directory (default reproduction-<date>)")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        return args.func(cfg)
    except SymmetryViolationError as exc:
        rep = exc.report
        doc = {
            "error": "symmetry violation",
            "residuals": {
                "diag": rep.diag_residual,
                "tau_eta": rep.tau_eta,
                "tau_xi": rep.tau_xi,
                "eta_xi": rep.eta_xi,
            },
            "tol": rep.tol,
        }
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return EXIT_INPUT
    except InconsistentCountError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCIENCE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
