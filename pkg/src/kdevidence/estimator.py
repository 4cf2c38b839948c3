"""Marginal likelihood from posterior draws and a posterior density estimate.

For draws ``theta_i`` from the posterior and any density ``q`` close to the
posterior,

    log Z ~= log mean_i exp(log L(theta_i) + log p(theta_i) - log q(theta_i)).

If ``q`` is the exact posterior every term equals ``log Z``; with a kernel
density estimate the terms are nearly constant and the average converges
as the sample grows.  Everything is accumulated in log space.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DensityFloorViolation, EmptyInput, NonFiniteLogWeight
from .kde import KdeConfig, interp_linear, kde_eval_direct, kde_fit_grid, select_bandwidth
from .model import BayesModelSpec, Dataset, PosteriorParams, normal_log_pdf
from .sampling import PosteriorSample

DENSITY_FLOOR = 1e-300


def log_sum_exp(values) -> float:
    """``m + log(sum(exp(v - m)))`` with ``m = max(v)``, summed in input order."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise EmptyInput("log_sum_exp of an empty sequence")
    if not np.all(np.isfinite(v)):
        raise ValueError("log_sum_exp expects finite values")
    m = float(v.max())
    return m + float(np.log(np.sum(np.exp(v - m))))


@dataclass(frozen=True)
class LogWeightSet:
    log_weights: np.ndarray = field(repr=False)
    n_clamped: int = 0


@dataclass(frozen=True)
class MarginalEstimate:
    log_evidence: float
    n_samples: int
    log_weight_sd: float
    log_weight_min: float
    log_weight_max: float
    n_clamped: int = 0
    config_echo: dict = field(default_factory=dict)

    @property
    def log_weight_range(self):
        return self.log_weight_min, self.log_weight_max

    def diagnostics(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "log_weight_sd": self.log_weight_sd,
            "log_weight_min": self.log_weight_min,
            "log_weight_max": self.log_weight_max,
            "n_clamped": self.n_clamped,
        }


def compute_log_weights(
    model: BayesModelSpec,
    data: Dataset,
    sample: PosteriorSample,
    density_at: Callable,
    floor: float = DENSITY_FLOOR,
    clamp: bool = False,
) -> LogWeightSet:
    """Per-draw log importance weights against the density ``density_at``.

    ``density_at`` is called once with the full array of draws and must
    return an array of the same shape.  A density at or below ``floor``
    raises :class:`DensityFloorViolation` unless ``clamp`` is set, in which
    case it is replaced by ``floor`` and counted in ``n_clamped``.
    """
    draws = sample.draws
    dens = np.asarray(density_at(draws), dtype=float).reshape(draws.shape)
    low = ~(dens > floor)
    n_clamped = 0
    if np.any(low):
        if not clamp:
            i = int(np.flatnonzero(low)[0])
            raise DensityFloorViolation(float(draws[i]), float(dens[i]), floor)
        n_clamped = int(low.sum())
        dens = np.where(low, floor, dens)

    logw = (
        np.asarray(model.log_likelihood(draws, data), dtype=float)
        + np.asarray(model.log_prior(draws), dtype=float)
        - np.log(dens)
    )
    bad = ~np.isfinite(logw)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise NonFiniteLogWeight(
            f"log weight is {logw[i]} at theta={draws[i]!r}; the model gives zero "
            "or undefined density at a posterior draw"
        )
    logw.setflags(write=False)
    return LogWeightSet(logw, n_clamped)


def estimate_log_marginal(weights: LogWeightSet, config_echo: Optional[dict] = None) -> MarginalEstimate:
    lw = weights.log_weights
    n = lw.size
    return MarginalEstimate(
        log_evidence=log_sum_exp(lw) - float(np.log(n)),
        n_samples=int(n),
        log_weight_sd=float(np.std(lw)),
        log_weight_min=float(lw.min()),
        log_weight_max=float(lw.max()),
        n_clamped=weights.n_clamped,
        config_echo=dict(config_echo or {}),
    )


def estimate_with_true_posterior(
    model: BayesModelSpec, data: Dataset, sample: PosteriorSample, posterior: PosteriorParams
) -> MarginalEstimate:
    """Plug the exact Normal posterior density into the estimator."""

    def density(theta):
        return np.exp(normal_log_pdf(theta, posterior.mean, posterior.variance))

    weights = compute_log_weights(model, data, sample, density)
    echo = {
        "model": model.name,
        "sample": {"n": len(sample), **sample.provenance.as_dict()},
        "density": {"kind": "exact-normal", "mean": posterior.mean, "variance": posterior.variance},
    }
    return estimate_log_marginal(weights, echo)


def kde_density_evaluator(sample: PosteriorSample, cfg: KdeConfig):
    """Build the posterior density estimate used by :func:`estimate_evidence`.

    Returns ``(density_at, bandwidth)``.
    """
    draws = sample.draws
    if cfg.eval_mode == "direct":
        h = select_bandwidth(draws, cfg)
        return (lambda theta: kde_eval_direct(draws, h, theta)), h
    grid = kde_fit_grid(draws, cfg)
    return (lambda theta: interp_linear(grid, theta)), grid.bandwidth


def estimate_evidence(
    model: BayesModelSpec,
    data: Dataset,
    sample: PosteriorSample,
    kde_config: KdeConfig = KdeConfig(),
    clamp: bool = False,
) -> MarginalEstimate:
    """Estimate the log marginal likelihood with a kernel density estimate
    of the posterior built from the same draws."""
    density_at, h = kde_density_evaluator(sample, kde_config)
    weights = compute_log_weights(model, data, sample, density_at, clamp=clamp)
    echo = {
        "model": model.name,
        "sample": {"n": len(sample), **sample.provenance.as_dict()},
        "kde": {**kde_config.as_dict(), "bandwidth_value": h},
    }
    return estimate_log_marginal(weights, echo)
