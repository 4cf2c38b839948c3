"""Seeded random streams, exact conjugate draws and random-walk Metropolis.

Random streams are numpy ``Generator`` objects over PCG64, so a given seed
produces the same sequence on every platform numpy supports.  The stream
is not R's Mersenne-Twister; results match R only in distribution.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BadInitialization, InvalidScale, SampleFileError, SampleTooSmall
from .model import BayesModelSpec, Dataset, PosteriorParams

MAX_SEED = 2**64 - 1


def rng_new(seed: int) -> np.random.Generator:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def sample_normal(rng: np.random.Generator, mean: float, sd: float, count: int) -> np.ndarray:
    if not (np.isfinite(sd) and sd > 0):
        raise InvalidScale(f"sd must be positive, got {sd!r}")
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    return mean + sd * rng.standard_normal(int(count))


@dataclass(frozen=True)
class Provenance:
    """Where a posterior sample came from.

    ``kind`` is ``"exact_iid"`` or ``"mcmc"``; the chain fields are None
    for exact samples.
    """

    kind: str = "exact_iid"
    burn_in: Optional[int] = None
    thinning: Optional[int] = None
    acceptance_rate: Optional[float] = None

    def as_dict(self):
        out = {"kind": self.kind}
        if self.kind == "mcmc":
            out.update(
                burn_in=self.burn_in,
                thinning=self.thinning,
                acceptance_rate=self.acceptance_rate,
            )
        return out


@dataclass(frozen=True)
class PosteriorSample:
    draws: np.ndarray = field(repr=False)
    provenance: Provenance = Provenance()

    def __post_init__(self):
        draws = np.array(self.draws, dtype=float).ravel()
        if draws.size < 2:
            raise SampleTooSmall(f"a posterior sample needs at least 2 draws, got {draws.size}")
        if not np.all(np.isfinite(draws)):
            raise ValueError("posterior draws must be finite")
        draws.setflags(write=False)
        object.__setattr__(self, "draws", draws)

    def __len__(self):
        return self.draws.size


def sample_exact_posterior(rng, params: PosteriorParams, n_draws: int) -> PosteriorSample:
    if n_draws < 2:
        raise SampleTooSmall(f"n_draws must be >= 2, got {n_draws}")
    draws = sample_normal(rng, params.mean, params.sd, n_draws)
    return PosteriorSample(draws, Provenance("exact_iid"))


@dataclass(frozen=True)
class MhConfig:
    """Random-walk Metropolis settings.

    ``chain_length`` counts the transitions after the starting point; the
    retained draws are states ``burn_in + thinning, burn_in + 2*thinning, ...``
    """

    proposal_sd: float
    chain_length: int
    initial_theta: float
    burn_in: int = 1000
    thinning: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.proposal_sd) and self.proposal_sd > 0):
            raise InvalidScale(f"proposal_sd must be positive, got {self.proposal_sd!r}")
        if self.thinning < 1:
            raise ValueError(f"thinning must be >= 1, got {self.thinning}")
        if self.burn_in < 0:
            raise ValueError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.chain_length < 2:
            raise ValueError(f"chain_length must be >= 2, got {self.chain_length}")
        if not np.isfinite(self.initial_theta):
            raise ValueError("initial_theta must be finite")

    @property
    def n_retained(self) -> int:
        return max(self.chain_length - self.burn_in, 0) // self.thinning


def default_proposal_sd(posterior_sd=None, prior_sd=None) -> float:
    """2.4 times the best available posterior scale guess."""
    scale = posterior_sd if posterior_sd is not None else prior_sd
    if scale is None:
        raise ValueError("need a posterior or prior sd to scale the proposal")
    return 2.4 * float(scale)


def metropolis_sample(rng, model: BayesModelSpec, data: Dataset, cfg: MhConfig) -> PosteriorSample:
    """Run a random-walk Metropolis chain targeting the model posterior."""
    n_keep = cfg.n_retained
    if n_keep < 2:
        raise SampleTooSmall(
            f"chain_length={cfg.chain_length}, burn_in={cfg.burn_in}, thinning={cfg.thinning} "
            f"retain only {n_keep} draws; need at least 2"
        )

    def log_target(theta):
        value = float(model.log_target(theta, data))
        if np.isnan(value):
            raise ValueError(f"model log target is NaN at theta={theta!r}")
        return value

    theta = float(cfg.initial_theta)
    current = log_target(theta)
    if not np.isfinite(current):
        raise BadInitialization(f"log target is {current} at initial_theta={theta!r}")

    steps = cfg.proposal_sd * rng.standard_normal(cfg.chain_length)
    log_u = np.log(rng.random(cfg.chain_length))
    states = np.empty(cfg.chain_length)
    accepted = 0
    for i in range(cfg.chain_length):
        proposal = theta + steps[i]
        cand = log_target(proposal)
        if log_u[i] < cand - current:
            theta, current = proposal, cand
            accepted += 1
        states[i] = theta

    start = cfg.burn_in + cfg.thinning - 1
    draws = states[start::cfg.thinning][:n_keep]
    prov = Provenance("mcmc", cfg.burn_in, cfg.thinning, accepted / cfg.chain_length)
    return PosteriorSample(draws, prov)


def batch_means_se(draws, n_batches: int = 50) -> float:
    """Standard error of the mean of a correlated series by batch means."""
    draws = np.asarray(draws, dtype=float)
    size = draws.size // n_batches
    if size < 1:
        raise SampleTooSmall("too few draws for the requested number of batches")
    means = draws[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    return float(means.std(ddof=1) / np.sqrt(n_batches))


# Plain-text sample files: one float per line, '#' lines are comments.


def format_provenance(prov: Provenance) -> str:
    parts = [f"provenance={'mcmc' if prov.kind == 'mcmc' else 'exact_iid'}"]
    if prov.kind == "mcmc":
        parts += [
            f"burn_in={prov.burn_in}",
            f"thinning={prov.thinning}",
            f"acceptance_rate={prov.acceptance_rate!r}",
        ]
    return "# " + " ".join(parts)


def write_values(path, values, comments=()):
    with open(path, "w") as fh:
        for line in comments:
            fh.write(line if line.startswith("#") else "# " + line)
            fh.write("\n")
        for v in np.asarray(values, dtype=float):
            fh.write(repr(float(v)))
            fh.write("\n")


def write_sample(path, sample: PosteriorSample):
    write_values(path, sample.draws, [format_provenance(sample.provenance)])


def read_values(path):
    """Parse a sample/data file; returns ``(values, comment_lines)``.

    Blank lines are skipped.  A non-numeric or non-finite line raises
    :class:`SampleFileError` naming the line.
    """
    values, comments = [], []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                comments.append(line)
                continue
            try:
                v = float(line)
            except ValueError:
                raise SampleFileError(path, lineno, f"not a number: {line[:40]!r}") from None
            if not np.isfinite(v):
                raise SampleFileError(path, lineno, f"not finite: {line[:40]!r}")
            values.append(v)
    return np.array(values, dtype=float), comments


def parse_provenance(comments) -> Provenance:
    for line in comments:
        fields = dict(
            tok.split("=", 1) for tok in line.lstrip("#").split() if "=" in tok
        )
        kind = fields.get("provenance")
        if kind == "mcmc":
            return Provenance(
                "mcmc",
                int(fields["burn_in"]) if "burn_in" in fields else None,
                int(fields["thinning"]) if "thinning" in fields else None,
                float(fields["acceptance_rate"]) if "acceptance_rate" in fields else None,
            )
        if kind is not None:
            return Provenance("exact_iid")
    return Provenance("exact_iid")


def read_sample(path) -> PosteriorSample:
    values, comments = read_values(path)
    if values.size < 2:
        raise SampleTooSmall(f"{path}: need at least 2 draws, found {values.size}")
    return PosteriorSample(values, parse_provenance(comments))
