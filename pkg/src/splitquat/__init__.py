"""Split quaternions, biquaternions and Cauchy-Fueter integral formulas."""

__version__ = "0.1.0"

from .algebra import (  # noqa: E402
    BASIS_FACTORS,
    E0,
    E1,
    E2,
    E3,
    ET0,
    ET1,
    ET2,
    ET3,
    ZERO,
    Biquaternion,
    RealFormPoint,
    classify_real_form,
    conjugate,
    euclid_norm,
    form_S,
    gram_matrix,
    inverse,
    mul,
    pairing,
    quad_form_N,
)
from .calculus import (  # noqa: E402
    DiracSpec,
    QFunction,
    apply_dirac,
    constant,
    kernel,
    linear,
    polynomial,
    reciprocal_n,
    regularity_residual,
    verify_chain_rules,
    wave_operator,
)
from .errors import (  # noqa: E402
    ConeTangency,
    ConfigError,
    DegenerateFrame,
    IntegrandSingular,
    NonConvergent,
    SingularElement,
    SplitQuatError,
    StencilOutsideDomain,
    WindowTooWide,
)
from .fueter import (  # noqa: E402
    EpsSchedule,
    FueterQuery,
    cf_classical,
    cf_deformed,
    cf_regularized,
    eps_extrapolate,
    homotopy_check,
    regularized_limit,
    sphere_kernel_integral,
    theta_regularized,
)
from .geometry import (  # noqa: E402
    Chain,
    Cycle3,
    box_boundary,
    box_boundary_HR,
    deform,
    eval_Dz,
    eval_dV,
    integrate_form,
    restriction_check,
    sphere_H,
    sphere_HR,
)
from .regions import (  # noqa: E402
    RegionVerdict,
    SU11Params,
    in_gamma0,
    in_gamma0_bar,
    omega_margin,
    region_verdict,
    su11_sample,
)

__all__ = [
    "__version__",
    "BASIS_FACTORS",
    "E0",
    "E1",
    "E2",
    "E3",
    "ET0",
    "ET1",
    "ET2",
    "ET3",
    "ZERO",
    "Biquaternion",
    "RealFormPoint",
    "classify_real_form",
    "conjugate",
    "euclid_norm",
    "form_S",
    "gram_matrix",
    "inverse",
    "mul",
    "pairing",
    "quad_form_N",
    "DiracSpec",
    "QFunction",
    "apply_dirac",
    "constant",
    "kernel",
    "linear",
    "polynomial",
    "reciprocal_n",
    "regularity_residual",
    "verify_chain_rules",
    "wave_operator",
    "ConeTangency",
    "ConfigError",
    "DegenerateFrame",
    "IntegrandSingular",
    "NonConvergent",
    "SingularElement",
    "SplitQuatError",
    "StencilOutsideDomain",
    "WindowTooWide",
    "EpsSchedule",
    "FueterQuery",
    "cf_classical",
    "cf_deformed",
    "cf_regularized",
    "eps_extrapolate",
    "homotopy_check",
    "regularized_limit",
    "sphere_kernel_integral",
    "theta_regularized",
    "Chain",
    "Cycle3",
    "box_boundary",
    "box_boundary_HR",
    "deform",
    "eval_Dz",
    "eval_dV",
    "integrate_form",
    "restriction_check",
    "sphere_H",
    "sphere_HR",
    "RegionVerdict",
    "SU11Params",
    "in_gamma0",
    "in_gamma0_bar",
    "omega_margin",
    "region_verdict",
    "su11_sample",
]
