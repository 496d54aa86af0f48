"""Maximal Bell-inequality violation of two-qubit states under local filtering.

The package computes the maximal CHSH expectation (Horodecki criterion),
a sphere-cap integral lower bound on the maximal Vertesi-inequality
violation, the optimized local-filtering (SLOCC) enhancements of both,
and a Monte-Carlo validation of an explicit local-hidden-variable model
for one entangled state family.
"""

__version__ = "0.1.0"

from .chsh import (
    CHSH_CLASSICAL_BOUND,
    TSIRELSON_BOUND,
    ChshResult,
    ChshSettings,
    bell_expectation,
    bell_operator,
    holevo_bound,
    mvci,
    optimal_chsh_settings,
    teleportation_fidelity_bound,
)
from .errors import (
    BadWindow,
    BellFilterError,
    DegenerateCorrelation,
    NotHermitian,
    NotPositive,
    OutOfRange,
    TraceNotOne,
    VanishingNorm,
)
from .filtering import (
    FilterParams,
    FilterResult,
    FilteredCorrelation,
    apply_filter_density,
    filter_coefficients,
    filter_operators,
    filtered_correlation,
    filtered_mvci_objective,
    maximize_filtered_mvci,
)
from .lhv import (
    JointDistribution,
    LhvModel,
    joint_from_state,
    lhv_report,
    lhv_sigma_check,
    quantum_joint,
    sample_biased_lambda,
    simulate_lhv,
)
from .optimize import OptimizerOptions, bisect_onset
from .states import (
    DensityMatrix,
    ExtendedCorrelation,
    Rotation3,
    correlation_data,
    density_from_json,
    density_to_json,
    euler_to_rotation,
    load_density,
    local_unitary_rotate,
    make_density,
    ppt_min_eigenvalue,
    rho1,
    rho2,
    su2_from_euler,
    werner,
)
from .vertesi import (
    LHV_CEILING,
    CapWindow,
    Quadrature,
    VertesiResult,
    cap_area,
    cap_first_moment,
    maximize_vertesi_bound,
    vertesi_lower_bound,
    vertesi_terms,
)

__all__ = [
    "__version__",
    "BadWindow",
    "BellFilterError",
    "CapWindow",
    "CHSH_CLASSICAL_BOUND",
    "ChshResult",
    "ChshSettings",
    "DegenerateCorrelation",
    "DensityMatrix",
    "ExtendedCorrelation",
    "FilterParams",
    "FilterResult",
    "FilteredCorrelation",
    "JointDistribution",
    "LHV_CEILING",
    "LhvModel",
    "NotHermitian",
    "NotPositive",
    "OptimizerOptions",
    "OutOfRange",
    "Quadrature",
    "Rotation3",
    "TraceNotOne",
    "TSIRELSON_BOUND",
    "VanishingNorm",
    "VertesiResult",
    "apply_filter_density",
    "bell_expectation",
    "bell_operator",
    "bisect_onset",
    "cap_area",
    "cap_first_moment",
    "correlation_data",
    "density_from_json",
    "density_to_json",
    "euler_to_rotation",
    "filter_coefficients",
    "filter_operators",
    "filtered_correlation",
    "filtered_mvci_objective",
    "holevo_bound",
    "joint_from_state",
    "lhv_report",
    "lhv_sigma_check",
    "load_density",
    "local_unitary_rotate",
    "make_density",
    "maximize_filtered_mvci",
    "maximize_vertesi_bound",
    "mvci",
    "optimal_chsh_settings",
    "ppt_min_eigenvalue",
    "quantum_joint",
    "rho1",
    "rho2",
    "sample_biased_lambda",
    "simulate_lhv",
    "su2_from_euler",
    "teleportation_fidelity_bound",
    "vertesi_lower_bound",
    "vertesi_terms",
    "werner",
]
