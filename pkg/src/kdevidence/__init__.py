"""Marginal likelihood estimation from posterior samples via kernel density
plug-in, with conjugate and quadrature reference values."""

__version__ = "0.1.0"

from .errors import EvidenceError
from .model import (
    BayesModelSpec,
    Dataset,
    NormalModelConfig,
    PosteriorParams,
    dataset_from_values,
    normal_log_likelihood,
    normal_log_marginal_closed_form,
    normal_log_prior,
    normal_model,
    normal_posterior_params,
)
from .sampling import (
    MhConfig,
    PosteriorSample,
    Provenance,
    metropolis_sample,
    rng_new,
    sample_exact_posterior,
    sample_normal,
)
from .kde import DensityGrid, KdeConfig, interp_linear, kde_eval_direct, kde_fit_grid, silverman_bandwidth
from .estimator import (
    LogWeightSet,
    MarginalEstimate,
    compute_log_weights,
    estimate_evidence,
    estimate_log_marginal,
    estimate_with_true_posterior,
    log_sum_exp,
)
from .oracle import QuadratureConfig, default_quadrature_config, quadrature_log_marginal
