"""Radial ground states of the dilation-invariant fourth order problem

    Δ²u − λ div(|x|⁻²∇u) = |x|^(−β)|u|^(q−2)u   in ℝⁿ, n ≥ 5,

computed through the Emden–Fowler reduction to a constant-coefficient ODE
on the line, plus identity checks and first-harmonic symmetry-breaking
certificates.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    BoundaryLeak,
    DimensionTooSmall,
    ExponentOutOfRange,
    LambdaOutOfRange,
    NoConvergence,
    NotConverged,
    ParameterError,
    QuadratureFailure,
    SingularConfiguration,
    ToolkitError,
)
from .functional import EnergyBreakdown, energy_breakdown, rayleigh_quotient  # noqa: F401
from .params import (  # noqa: F401
    ProblemParams,
    bs_condition,
    make_params,
    q_threshold,
    s2_closed_form,
)
from .profile import Grid, Profile, ef_transform, ef_untransform  # noqa: F401
from .solver import GroundState, SolverOptions, dilation_invariance_check, solve_radial  # noqa: F401
from .symmetry import (  # noqa: F401
    SymmetryCertificate,
    bs_window,
    bubble_comparison,
    certify,
    lambda_star,
    s_star,
    spherical_mean_weight,
)
from .verify import IdentityReport, cross_check_ef, verify_ground_state  # noqa: F401
