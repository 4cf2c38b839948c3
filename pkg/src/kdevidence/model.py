"""Normal observations with known variance and a Normal prior on the mean.

Besides the conjugate formulas this module defines :class:`BayesModelSpec`,
the pair of log densities every other module works with.  Any
one-parameter model can be plugged into the samplers, the estimator and
the quadrature oracle by building a ``BayesModelSpec`` by hand.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import EmptyDataset, InvalidObservation, InvalidScale

LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class Dataset:
    """Observations together with their sufficient statistics.

    ``pop_variance`` uses divisor ``n``.
    """

    values: np.ndarray = field(repr=False)
    n: int
    mean: float
    pop_variance: float


def dataset_from_values(values) -> Dataset:
    arr = np.array(values, dtype=float).ravel()
    if arr.size == 0:
        raise EmptyDataset("dataset needs at least one observation")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise InvalidObservation(f"observation {bad[0]} is not finite: {arr[bad[0]]!r}")
    arr.setflags(write=False)
    mean = float(arr.mean())
    pop_variance = float(np.mean((arr - mean) ** 2))
    return Dataset(values=arr, n=int(arr.size), mean=mean, pop_variance=pop_variance)


@dataclass(frozen=True)
class NormalModelConfig:
    """Known observation sd ``sigma`` and prior N(theta0, sigma0**2)."""

    sigma: float
    theta0: float
    sigma0: float

    def __post_init__(self):
        for name in ("sigma", "sigma0"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidScale(f"{name} must be a positive finite number, got {value!r}")
        if not np.isfinite(self.theta0):
            raise InvalidScale(f"theta0 must be finite, got {self.theta0!r}")


@dataclass(frozen=True)
class PosteriorParams:
    mean: float
    variance: float

    @property
    def sd(self) -> float:
        return float(np.sqrt(self.variance))


@dataclass(frozen=True)
class BayesModelSpec:
    """A one-parameter Bayesian model given by its log densities.

    Parameters
    ----------
    log_likelihood : callable
        ``log_likelihood(theta, data)``; must accept a numpy array of
        ``theta`` values and broadcast over it.
    log_prior : callable
        ``log_prior(theta)``, vectorized the same way.
    name : str
        Identifier echoed in reports.

    Both callables must be pure and return finite values or ``-inf``;
    never NaN.
    """

    log_likelihood: Callable[[np.ndarray, Dataset], np.ndarray]
    log_prior: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"

    def log_target(self, theta, data: Dataset):
        """Unnormalized log posterior."""
        return self.log_likelihood(theta, data) + self.log_prior(theta)


def normal_log_likelihood(data: Dataset, config: NormalModelConfig, theta):
    n = data.n
    sigma = config.sigma
    theta = np.asarray(theta, dtype=float)
    quad = (theta - data.mean) ** 2 + data.pop_variance
    out = -0.5 * n * LOG_2PI - n * np.log(sigma) - n / (2.0 * sigma**2) * quad
    return out if out.ndim else float(out)


def normal_log_prior(theta, config: NormalModelConfig):
    return normal_log_pdf(theta, config.theta0, config.sigma0**2)


def normal_log_pdf(theta, mean, variance):
    """Log density of N(mean, variance); broadcasts over ``theta``."""
    theta = np.asarray(theta, dtype=float)
    out = -0.5 * (LOG_2PI + np.log(variance)) - 0.5 * (theta - mean) ** 2 / variance
    return out if out.ndim else float(out)


def normal_posterior_params(data: Dataset, config: NormalModelConfig) -> PosteriorParams:
    n, s2, s02 = data.n, config.sigma**2, config.sigma0**2
    denom = n * s02 + s2
    mean = (n * s02 * data.mean + s2 * config.theta0) / denom
    variance = s2 * s02 / denom
    return PosteriorParams(mean=float(mean), variance=float(variance))


def normal_log_marginal_closed_form(data: Dataset, config: NormalModelConfig) -> float:
    """Log marginal likelihood of the Normal-Normal model.

    The exponent is evaluated as ``n s^2 / sigma^2 + n (xbar - theta0)^2 /
    (n sigma0^2 + sigma^2)``, which is algebraically the textbook bracket
    but avoids the cancellation between its last two terms when ``xbar``
    and ``theta0`` are large.
    """
    n = data.n
    s2, s02 = config.sigma**2, config.sigma0**2
    denom = n * s02 + s2
    bracket = n * data.pop_variance / s2 + n * (data.mean - config.theta0) ** 2 / denom
    return float(
        -0.5 * n * LOG_2PI
        - (n - 1) * np.log(config.sigma)
        - 0.5 * np.log(denom)
        - 0.5 * bracket
    )


def normal_model(config: NormalModelConfig) -> BayesModelSpec:
    """Wrap the conjugate model as a :class:`BayesModelSpec`."""
    return BayesModelSpec(
        log_likelihood=lambda theta, data: normal_log_likelihood(data, config, theta),
        log_prior=lambda theta: normal_log_prior(theta, config),
        name=f"normal-normal(sigma={config.sigma!r}, theta0={config.theta0!r}, sigma0={config.sigma0!r})",
    )
