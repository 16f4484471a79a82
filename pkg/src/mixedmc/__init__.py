"""Low-rank completion of mixed-type matrices.

Recovers a low-rank matrix of exponential-family canonical parameters from
partially observed continuous/binary/count data by solving a hybrid
max-norm + nuclear-norm penalized maximum-likelihood program with ADMM on a
semidefinite embedding.
"""

from .expfam import (
    CurvatureBounds,
    DomainError,
    ExpFamModel,
    bernoulli,
    bregman,
    curvature,
    curvature_bounds,
    gamma,
    gaussian,
    log_partition,
    mean_map,
    negbin,
    nll_term,
    poisson,
    sample,
    table_curvature_bounds,
    theta_interval,
)
from .layout import ColumnBlockLayout, SamplingScheme, apply_mask, make_mask
from .matnorm import (
    EigenSolverError,
    EigMode,
    linf_ball_project,
    linf_prox,
    max_norm_upper,
    nuclear_norm,
    psd_project,
    tangent_project,
    tangent_project_perp,
    two_to_inf_norm,
)
from .solver import (
    AdmmConfig,
    AdmmState,
    CompletionResult,
    ConfigurationError,
    balance_gap,
    dual_step,
    penalties_from_estimator,
    residuals,
    solve,
    x_step,
    z12_entry_solve,
    z_step,
)
from .theory import (
    BoundInputs,
    beta_threshold,
    lambda_star,
    recovery_bound,
    sigma_r_bound,
    worst_case_bounds,
)
from .datagen import (
    SyntheticInstance,
    gen_low_rank_theta,
    gen_observed,
    make_instance,
    relative_error,
    weighted_frobenius,
)
from .typedetect import DetectionReport, detect, fit_mle, mgf_distance

__version__ = "0.1.0"

__all__ = [
    "AdmmConfig",
    "AdmmState",
    "BoundInputs",
    "ColumnBlockLayout",
    "CompletionResult",
    "ConfigurationError",
    "CurvatureBounds",
    "DetectionReport",
    "DomainError",
    "EigMode",
    "EigenSolverError",
    "ExpFamModel",
    "SamplingScheme",
    "SyntheticInstance",
    "apply_mask",
    "balance_gap",
    "bernoulli",
    "beta_threshold",
    "bregman",
    "curvature",
    "curvature_bounds",
    "detect",
    "dual_step",
    "fit_mle",
    "gamma",
    "gaussian",
    "gen_low_rank_theta",
    "gen_observed",
    "lambda_star",
    "linf_ball_project",
    "linf_prox",
    "log_partition",
    "make_instance",
    "make_mask",
    "max_norm_upper",
    "mean_map",
    "mgf_distance",
    "negbin",
    "nll_term",
    "nuclear_norm",
    "penalties_from_estimator",
    "poisson",
    "psd_project",
    "recovery_bound",
    "relative_error",
    "residuals",
    "sample",
    "sigma_r_bound",
    "solve",
    "table_curvature_bounds",
    "tangent_project",
    "tangent_project_perp",
    "theta_interval",
    "two_to_inf_norm",
    "weighted_frobenius",
    "worst_case_bounds",
    "x_step",
    "z12_entry_solve",
    "z_step",
]
