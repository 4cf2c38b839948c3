"""Simulation pipelines behind the ``reproduce`` and ``sweep`` commands.

The default configuration simulates 25 observations from N(-1, 3**2),
puts a N(0, 10**2) prior on the mean and estimates the evidence from
1000 exact posterior draws.  Seed 1702 is the default, but the stream is
numpy's PCG64, so the numbers agree with other implementations only
statistically.
"""

import hashlib
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .estimator import MarginalEstimate, estimate_evidence
from .kde import KdeConfig
from .model import (
    NormalModelConfig,
    dataset_from_values,
    normal_log_marginal_closed_form,
    normal_model,
    normal_posterior_params,
)
from .sampling import rng_new, sample_exact_posterior, sample_normal

SWEEP_COLUMNS = ("n_post", "replication", "seed", "log_estimate", "log_theoretical", "abs_error")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 1702
    n_obs: int = 25
    true_mean: float = -1.0
    sigma: float = 3.0
    theta0: float = 0.0
    sigma0: float = 10.0
    n_post: int = 1000
    kde: KdeConfig = KdeConfig()
    posterior_seed: Optional[int] = None

    def __post_init__(self):
        if self.n_obs < 1:
            raise ValueError("n_obs must be >= 1")
        if self.n_post < 2:
            raise ValueError("n_post must be >= 2")

    @property
    def model_config(self) -> NormalModelConfig:
        return NormalModelConfig(sigma=self.sigma, theta0=self.theta0, sigma0=self.sigma0)

    def as_dict(self):
        out = asdict(self)
        out["kde"] = self.kde.as_dict()
        return out


@dataclass
class ExperimentReport:
    config: dict
    log_theoretical: Optional[float]
    log_estimate: float
    abs_error: Optional[float]
    diagnostics: dict
    timing_ms: float = 0.0
    versions: dict = field(default_factory=lambda: {"kdevidence": __version__})

    @classmethod
    def from_estimate(cls, config, estimate: MarginalEstimate, log_theoretical=None, timing_ms=0.0):
        abs_error = None if log_theoretical is None else abs(log_theoretical - estimate.log_evidence)
        return cls(
            config=config,
            log_theoretical=log_theoretical,
            log_estimate=estimate.log_evidence,
            abs_error=abs_error,
            diagnostics=estimate.diagnostics(),
            timing_ms=timing_ms,
        )

    def to_dict(self):
        return {
            "config": self.config,
            "log_theoretical": self.log_theoretical,
            "log_estimate": self.log_estimate,
            "abs_error": self.abs_error,
            "diagnostics": self.diagnostics,
            "versions": self.versions,
            "timing_ms": self.timing_ms,
        }


def simulate_dataset(cfg: RunConfig, rng):
    return dataset_from_values(sample_normal(rng, cfg.true_mean, cfg.sigma, cfg.n_obs))


def run_reproduce(cfg: RunConfig = RunConfig(), keep=None) -> ExperimentReport:
    """Simulate data, draw exact posterior samples and estimate the evidence.

    Data and posterior draws come from one stream seeded with ``cfg.seed``
    unless ``cfg.posterior_seed`` is set, in which case the posterior draws
    use their own stream.  If ``keep`` is a dict, the dataset and sample
    are stored in it under ``"data"`` and ``"sample"``.
    """
    t0 = time.perf_counter()
    rng = rng_new(cfg.seed)
    data = simulate_dataset(cfg, rng)
    mcfg = cfg.model_config
    post = normal_posterior_params(data, mcfg)
    post_rng = rng if cfg.posterior_seed is None else rng_new(cfg.posterior_seed)
    sample = sample_exact_posterior(post_rng, post, cfg.n_post)
    est = estimate_evidence(normal_model(mcfg), data, sample, cfg.kde)
    log_theory = normal_log_marginal_closed_form(data, mcfg)
    if keep is not None:
        keep.update(data=data, sample=sample)
    elapsed = 1000.0 * (time.perf_counter() - t0)
    return ExperimentReport.from_estimate(cfg.as_dict(), est, log_theory, elapsed)


def sweep_seed(seed: int, n_post: int, replication: int) -> int:
    """Sub-seed of one sweep cell.

    ``seed XOR h`` where ``h`` is the first 8 bytes (little endian) of the
    BLAKE2b digest of the ASCII string ``"{n_post}:{replication}"``.
    """
    digest = hashlib.blake2b(f"{n_post}:{replication}".encode("ascii"), digest_size=8).digest()
    return int(seed) ^ int.from_bytes(digest, "little")


def run_sweep(cfg: RunConfig, n_post_list, replications: int):
    """Evidence error over posterior sample sizes on one fixed dataset.

    The dataset is the one :func:`run_reproduce` would simulate from
    ``cfg.seed``.  Each ``(n_post, replication)`` cell draws its posterior
    sample from ``sweep_seed(cfg.seed, n_post, replication)``, so the cell
    is reproduced by ``run_reproduce`` with ``posterior_seed`` set to it.
    Returns a list of row dicts keyed by ``SWEEP_COLUMNS``.
    """
    n_post_list = [int(n) for n in n_post_list]
    if not n_post_list:
        raise ValueError("n_post_list is empty")
    if any(n < 2 for n in n_post_list):
        raise ValueError("every n_post must be >= 2")
    if replications < 1:
        raise ValueError("replications must be >= 1")

    data = simulate_dataset(cfg, rng_new(cfg.seed))
    mcfg = cfg.model_config
    model = normal_model(mcfg)
    post = normal_posterior_params(data, mcfg)
    log_theory = normal_log_marginal_closed_form(data, mcfg)

    rows = []
    for n_post in n_post_list:
        for rep in range(replications):
            sub = sweep_seed(cfg.seed, n_post, rep)
            sample = sample_exact_posterior(rng_new(sub), post, n_post)
            est = estimate_evidence(model, data, sample, cfg.kde)
            rows.append(
                {
                    "n_post": n_post,
                    "replication": rep,
                    "seed": sub,
                    "log_estimate": est.log_evidence,
                    "log_theoretical": log_theory,
                    "abs_error": abs(est.log_evidence - log_theory),
                }
            )
    return rows


def median_abs_error(rows):
    """Median ``abs_error`` per ``n_post``, in first-seen order."""
    by_n = {}
    for row in rows:
        by_n.setdefault(row["n_post"], []).append(row["abs_error"])
    return {n: float(np.median(v)) for n, v in by_n.items()}
