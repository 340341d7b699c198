"""Floquet analysis of a quantum well periodically shaken along a path in
the complex plane.

The library covers the reduced two-level dynamics (quasi-energies, Floquet
eigenstates, multiphoton resonances and exceptional points of non-Hermitian
drives), an independent Fourier-hierarchy eigensolver, an exactly solvable
two-bound-state double well with its analytic continuation, a split-step
pseudo-spectral field solver, and the directional-coupler application.
"""

from .coupler import (
    CouplerSpec,
    CouplerTrajectory,
    mode_selectivity,
    propagate_coupler,
    supermode_inverse,
    supermode_transform,
)
from .errors import (
    AmbiguityError,
    CoalescenceError,
    ContractViolationError,
    DivergenceError,
    DomainError,
    EigensolverError,
    FloquetWellError,
    IntegrationError,
    NearSingularError,
    PoleProximityError,
    QuadratureError,
    ResolutionError,
    SchemaError,
    TruncationError,
)
from .hierarchy import (
    ClosedFormCoefficients,
    GaugeMap,
    HierarchyMatrix,
    QuasiEnergySolution,
    build_matrix,
    closed_form_v1_zero,
    default_truncation,
    gauge_transform,
    gauge_transform_coefficients,
    hierarchy_residual,
    solve_quasi_energies,
)
from .pde import (
    ProjectionSeries,
    WaveField,
    dump_snapshot,
    init_ground_state,
    load_snapshot,
    project,
    run_experiment,
    run_scan,
    step,
)
from .twolevel import (
    DriveSpec,
    FloquetState,
    MonodromyResult,
    ResonanceScan,
    ShakingPath,
    TrajectoryRecord,
    WKBQuasiEnergies,
    classify_resonance,
    ep_eigenvector,
    eval_path,
    floquet_generator,
    floquet_states,
    generalized_eigenvector,
    map_a_to_c,
    map_c_to_a,
    monodromy,
    propagate,
    resonance_estimate,
    unbalance_factor,
    wkb_quasi_energies,
    wkb_states,
)
from .well import (
    GridSpec,
    StripeReport,
    WellSpec,
    coupling_kappa,
    eigenfunction,
    eigenfunction_derivative,
    potential,
    reduce_to_drive,
    validate_stripe,
)

__version__ = "0.1.0"
