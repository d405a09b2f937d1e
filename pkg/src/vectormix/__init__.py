"""Pseudospectral optimal mixing of divergence-free passive vector fields.

A passive divergence-free field u on the 2-D torus is transported by a
divergence-free stirring field U; pressure enforces the constraint and is
eliminated through the spectral divergence-free projection.  The package
provides the truncated Galerkin dynamics with adaptive embedded RK
stepping, the stirring field that instantaneously maximizes decay of the
homogeneous H^{-alpha} mix norm, lower-bound calculators for the minimal
mixing time, and executable verification of the scheme's conservation,
stability and convergence properties.
"""

from .bounds import (
    BoundInput,
    BoundResult,
    Regime,
    exp_envelope_from_series,
    fit_exponential,
    minimal_bound_constant,
    recover_pressure,
    regime_select,
    tmin,
)
from .config import SimConfig, parse_config
from .dynamics import SimState, StepControl, advection_rhs, evolve, rk45_step
from .errors import (
    ConfigError,
    GridError,
    NonIntegrableModeError,
    ParameterError,
    RepresentabilityError,
    SnapshotFormatError,
    StiffnessError,
    VectormixError,
)
from .harness import (
    CheckReport,
    check_algebraic_envelope,
    check_convergence,
    check_energy,
    check_groenwall_envelope,
    check_sobolev_growth,
    check_stability,
    check_translation_flow,
    run_suite,
)
from .initial import (
    InitKind,
    InitSpec,
    build_initial,
    dipole_field,
    dipole_stream,
    stream_from_modes,
    velocity_from_stream,
)
from .mixer import (
    OptimalUResult,
    drive_field,
    instantaneous_decay_identity,
    optimal_provider,
    optimal_velocity,
    stream_cell_extrema,
    stream_function,
)
from .series import CSV_HEADER, NormSeries
from .snapshots import read_snapshot, write_scalar_snapshot, write_snapshot
from .spectral import (
    GridSpec,
    PhysicalField,
    ScalarField,
    SpectralField,
    divergence_residual,
    field_from_component_modes,
    fractional_multiplier,
    gradient,
    hermitianize,
    l2_inner,
    l2_norm,
    lebesgue_norm,
    leray_project,
    project_divfree_truncate,
    scalar_to_physical,
    sobolev_norm,
    to_physical,
    to_spectral,
)

__version__ = "0.1.0"
