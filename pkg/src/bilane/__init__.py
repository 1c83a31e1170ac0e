"""Biharmonic Lane-Emden analysis in log-radial coordinates.

Exact transform-coefficient algebra, an adaptive integrator for the
radial dynamics, the monotone energy audit, and singularity
classification with the universal limit constant C_pn.
"""

from .classify import (
    BoundReport,
    ClassificationReport,
    ClassifyOptions,
    DerivativeBoundReport,
    Side,
    Verdict,
    audit_bounds,
    audit_derivative_bounds,
    classify_profile,
)
from .coeffs import (
    CoefficientSet,
    Params,
    QuarticPolynomial,
    SignLemmaError,
    SignReport,
    SymbolCheckReport,
    characteristic_polynomial,
    compute_coefficients,
    sign_report,
    sphere_eigenvalue,
    verify_symbol_identity,
    zero_state_roots,
)
from .energy import (
    EnergyLevels,
    EnergyRecord,
    MonotonicityAudit,
    ScalingCheck,
    audit_monotonicity,
    energy_at,
    energy_levels,
    energy_rate,
    scaling_invariance_check,
    sphere_measure,
)
from .ode import (
    EquilibriumKind,
    EquilibriumSpectrum,
    IntegrateOptions,
    IntegrationError,
    State,
    Termination,
    Trajectory,
    equilibrium_spectrum,
    equilibrium_state,
    fitted_growth_rate,
    integrate,
    rhs,
    shoot_regular,
    solve_rk45,
)
from .transform import (
    EFProfile,
    RadialFunction,
    RadialProfile,
    ef_state_from_radial,
    ef_state_from_samples,
    from_ef,
    radial_bilaplacian,
    scale,
    scale_function,
    to_ef,
)

__version__ = "0.1.0"
