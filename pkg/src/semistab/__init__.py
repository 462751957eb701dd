"""semistab: stability and scaling analysis for contraction semigroups.

The package builds negative self-adjoint operators (finite-difference
Dirichlet boxes and multiplication models), represents spectral
measures on (-inf, 0], evolves the generated contraction semigroups in
the spectral picture, estimates decay and scaling exponents, classifies
stability through the spectral gap, and packages the whole thing into
reproducible, config-driven studies with a CLI front end.
"""

from .errors import (
    DomainError,
    InvariantViolation,
    PreconditionError,
    ResourceCapError,
)
from .measures import (
    AtomicMeasure,
    DensityMeasure,
    ScalingExponentEstimate,
    ball_mass,
    lacunary_measure,
    laplace_moment,
    laplace_norm_sq,
    load_measure,
    log_ball_mass,
    measure_from_text,
    measure_to_text,
    monomial_profile_measure,
    power_law_measure,
    sampled_density_measure,
    save_measure,
    scaling_exponents,
    uniform_measure,
)
from .operators import (
    DiscretizedOperator,
    MetricValue,
    MultiplicationModel,
    Potential,
    constant_potential,
    dirichlet_laplacian_eigenvalues,
    discretize,
    exp_well,
    gaussian_well,
    load_potential,
    metric_d,
    potential_from_text,
    potential_to_text,
    resolvent_apply,
    resolvent_gap,
    sampled_potential,
    save_potential,
    shift_potential,
    spectral_measure,
    spectrum_to_csv,
    square_well,
    truncate_potential,
)
from .semigroup import (
    DEFAULT_ATOM_TOL,
    DEFAULT_GAP_TOL,
    RATIO_FLOOR,
    BetaDescriptor,
    BoundCheckValue,
    DecayExponentEstimate,
    GdeltaProbeResult,
    OrbitTrace,
    StabilityVerdict,
    check_fn_membership,
    classify_stability,
    decay_exponents,
    evolve_norms,
    format_number,
    gdelta_probe,
    orbit_to_csv,
    range_bound_check,
    shifted_range_bound_check,
    verdict_to_text,
)
from .experiments import (
    OUTPUT_DIR_ENV,
    STUDY_KINDS,
    ReportTable,
    SpotCheck,
    StudyConfig,
    StudyReport,
    VerdictLine,
    approximation_study,
    decay_bound_study,
    exponent_table,
    gap_vs_box,
    gdelta_witness,
    load_study_config,
    parse_scale_token,
    parse_study_config,
    resolve_output_dir,
    run_study,
    spot_check,
    write_report,
)

__version__ = "0.1.0"
