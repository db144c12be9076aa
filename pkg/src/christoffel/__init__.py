"""Regularized Christoffel functions and kernel ridge leverage scores.

Compute empirical Christoffel values (inverse leverage scores) from
weighted point clouds, evaluate the spectral profile D(lam) and its
small-lam asymptotics, and invert them into density estimates and
support labels.  See the README for the command-line interface.
"""

from .backends import active_backend, available_backends
from .density import (
    BOUNDARY,
    INSIDE,
    OUTSIDE,
    ChristoffelEstimate,
    estimate_density,
    evaluate_field,
    rate_diagnostic,
    support_indicator,
)
from .gram import (
    FactorizationError,
    GramSystem,
    assemble,
    christoffel_at_point,
    christoffel_at_points,
    christoffel_at_support,
    christoffel_at_support_all,
    leverage_score,
    leverage_scores_at_points,
    refit_lambda,
)
from .kernels import (
    Gaussian,
    KernelSpec,
    Matern,
    RadialProfile,
    cross_matrix,
    eval_q,
    eval_q_hat,
    fourier_roundtrip_check,
    gaussian,
    gram_matrix,
    kernel_sum,
    matern,
    radial_profile_kernel,
)
from .measure import (
    WeightedSample,
    from_iid_sample,
    grid_1d,
    grid_2d,
    load_csv,
    riemann_from_density,
)
from .quadrature import QuadratureError
from .special import bessel_k
from .spectral import (
    SpectralProfile,
    compute_D,
    compute_q0,
    default_epsilon,
    eval_f_lambda,
    matern_q0_closed_form,
    predict_asymptotic,
    predict_inside,
    predict_outside,
    tail_mass_ratio,
)

__version__ = "0.1.0"

__all__ = [
    "BOUNDARY",
    "ChristoffelEstimate",
    "FactorizationError",
    "Gaussian",
    "GramSystem",
    "INSIDE",
    "KernelSpec",
    "Matern",
    "OUTSIDE",
    "QuadratureError",
    "RadialProfile",
    "SpectralProfile",
    "WeightedSample",
    "active_backend",
    "assemble",
    "available_backends",
    "bessel_k",
    "christoffel_at_point",
    "christoffel_at_points",
    "christoffel_at_support",
    "christoffel_at_support_all",
    "compute_D",
    "compute_q0",
    "cross_matrix",
    "default_epsilon",
    "estimate_density",
    "eval_f_lambda",
    "eval_q",
    "eval_q_hat",
    "evaluate_field",
    "fourier_roundtrip_check",
    "from_iid_sample",
    "gaussian",
    "gram_matrix",
    "grid_1d",
    "grid_2d",
    "kernel_sum",
    "leverage_score",
    "leverage_scores_at_points",
    "load_csv",
    "matern",
    "matern_q0_closed_form",
    "predict_asymptotic",
    "predict_inside",
    "predict_outside",
    "rate_diagnostic",
    "refit_lambda",
    "riemann_from_density",
    "support_indicator",
    "tail_mass_ratio",
]
