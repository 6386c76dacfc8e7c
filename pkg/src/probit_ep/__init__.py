"""Expectation propagation for Bayesian probit regression.

Gaussian EP approximation of the posterior over coefficients under an
isotropic normal prior, in two algebraically equivalent variants: a
dense O(p^2 n)-per-sweep routine and a low-rank O(p n^2) one for
p >= n.  Exact rejection-sampling and quadrature oracles support
accuracy checks, and a CLI drives simulation, fitting, comparison, and
scaling benchmarks.
"""

from .ep_dense import (
    DenseGlobalState,
    EPConfig,
    FitReport,
    HybridSNParams,
    PosteriorSummary,
    SiteState,
    cavity_for_site,
    ep_dense_fit,
    hybrid_moments,
)
from .ep_lowrank import (
    LowRankGlobalState,
    ep_lowrank_fit,
    recover_covariance,
    recover_mean_and_sds,
    select_algorithm,
)
from .estimator import ProbitEP
from .model_data import (
    DataError,
    Dataset,
    DimensionMismatch,
    NonBinaryResponse,
    NonFiniteCovariate,
    ParseError,
    PriorConfig,
    SimConfig,
    load_csv,
    save_csv,
    simulate,
    validate,
)
from .posterior_oracle import (
    AcceptanceTooLow,
    OracleResult,
    QuadratureNonConvergence,
    quadrature_posterior_1d,
    rejection_sample_posterior,
)
from .special_functions import norm_cdf, norm_logcdf, norm_pdf, zeta1, zeta2

__version__ = "0.1.0"

__all__ = [
    "AcceptanceTooLow",
    "DataError",
    "Dataset",
    "DenseGlobalState",
    "DimensionMismatch",
    "EPConfig",
    "FitReport",
    "HybridSNParams",
    "LowRankGlobalState",
    "NonBinaryResponse",
    "NonFiniteCovariate",
    "OracleResult",
    "ParseError",
    "PosteriorSummary",
    "PriorConfig",
    "ProbitEP",
    "QuadratureNonConvergence",
    "SimConfig",
    "SiteState",
    "cavity_for_site",
    "ep_dense_fit",
    "ep_lowrank_fit",
    "hybrid_moments",
    "load_csv",
    "norm_cdf",
    "norm_logcdf",
    "norm_pdf",
    "quadrature_posterior_1d",
    "recover_covariance",
    "recover_mean_and_sds",
    "rejection_sample_posterior",
    "save_csv",
    "select_algorithm",
    "simulate",
    "validate",
    "zeta1",
    "zeta2",
    "__version__",
]
