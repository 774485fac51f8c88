"""Averaged dynamics of a spherical pendulum whose pivot vibrates rapidly.

Pipeline: periodic pivot excitations -> time-averaged velocity moments and
symmetry check -> reduced effective potential, equilibria and the critical
curve in the parameter plane -> phase portraits -> numerical validation of
the averaging step against the full time-dependent flow.
"""

from .excitation import (
    Excitation,
    HarmonicSeries,
    MomentMatrix,
    SymmetryReport,
    check_symmetry,
    eval_displacement,
    eval_velocity,
    excitation_from_dict,
    excitation_to_dict,
    load_excitation,
    velocity_moments,
    velocity_moments_quadrature,
)
from .potential import (
    AveragedParams,
    DomainLabel,
    Equilibrium,
    GammaPoint,
    InconsistentCountError,
    SingularConfigurationError,
    classify_domain,
    d2v,
    dv,
    find_equilibria,
    gamma_curve,
    gamma_point,
    v_bar,
)
from .dynamics import (
    ComparisonReport,
    FullState,
    IntegrationBlowUpError,
    PhysicalParams,
    SymmetryViolationError,
    Trajectory,
    averaged_hamiltonian,
    averaged_params,
    compare_full_averaged,
    convergence_sweep,
    full_hamiltonian,
    full_rhs,
    integrate,
    reduced_rhs,
    trajectory_to_csv,
)
from .portrait import (
    LevelContours,
    PortraitGrid,
    build_grid,
    contours_to_csv,
    extract_contours,
    grid_to_csv,
    render_svg,
)

__version__ = "0.1.0"
