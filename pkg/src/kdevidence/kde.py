"""Gaussian kernel density estimation in one dimension.

Two evaluation routes are provided: exact kernel sums at arbitrary points
(:func:`kde_eval_direct`) and a linearly binned grid fit
(:func:`kde_fit_grid`) read back through :func:`interp_linear`.
"""

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DegenerateSample, InvalidScale, OutOfGridRange, SampleTooSmall

SQRT_2PI = float(np.sqrt(2.0 * np.pi))
IQR_NORMAL = 1.349

EVAL_MODES = ("direct", "grid-interp")


@dataclass(frozen=True)
class KdeConfig:
    """Density-estimate settings.

    ``bandwidth`` is either ``"silverman"`` or a fixed positive float.
    ``padding_bandwidths`` extends the grid beyond the sample range on
    both sides.
    """

    bandwidth: Union[str, float] = "silverman"
    grid_size: int = 401
    padding_bandwidths: float = 6.0
    eval_mode: str = "direct"

    def __post_init__(self):
        if isinstance(self.bandwidth, str):
            if self.bandwidth != "silverman":
                raise ValueError(f"unknown bandwidth rule {self.bandwidth!r}")
        elif not (np.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise InvalidScale(f"fixed bandwidth must be positive, got {self.bandwidth!r}")
        if self.grid_size < 2:
            raise ValueError(f"grid_size must be >= 2, got {self.grid_size}")
        if not self.padding_bandwidths > 0:
            raise ValueError("padding_bandwidths must be positive")
        if self.eval_mode not in EVAL_MODES:
            raise ValueError(f"eval_mode must be one of {EVAL_MODES}, got {self.eval_mode!r}")

    def as_dict(self):
        return {
            "bandwidth": self.bandwidth,
            "grid_size": self.grid_size,
            "padding_bandwidths": self.padding_bandwidths,
            "eval_mode": self.eval_mode,
        }


@dataclass(frozen=True)
class DensityGrid:
    """A density tabulated on an equally spaced grid."""

    abscissae: np.ndarray = field(repr=False)
    ordinates: np.ndarray = field(repr=False)
    bandwidth: float

    def integral(self) -> float:
        return float(np.trapezoid(self.ordinates, self.abscissae))

    def to_csv(self, path):
        """Write ``x,density`` rows with 17 significant digits."""
        with open(path, "w") as fh:
            fh.write("x,density\n")
            for x, y in zip(self.abscissae, self.ordinates):
                fh.write(f"{x:.17g},{y:.17g}\n")


def _as_sample(sample) -> np.ndarray:
    arr = np.asarray(sample, dtype=float).ravel()
    if arr.size < 2:
        raise SampleTooSmall(f"need at least 2 sample points, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("sample contains non-finite values")
    return arr


def silverman_bandwidth(sample) -> float:
    """Silverman's rule of thumb, ``0.9 * min(sd, IQR/1.349) * N**(-1/5)``.

    The sd uses divisor ``N - 1``; quartiles interpolate linearly at index
    ``q * (N - 1)`` of the sorted sample.  If the IQR is zero but the sd
    is not, the sd alone is used.
    """
    x = _as_sample(sample)
    sd = float(np.std(x, ddof=1))
    q75, q25 = np.quantile(x, [0.75, 0.25], method="linear")
    iqr = float(q75 - q25) / IQR_NORMAL
    if sd == 0.0:
        raise DegenerateSample(
            "all sample values are identical; use a fixed bandwidth instead"
        )
    spread = min(sd, iqr) if iqr > 0 else sd
    return 0.9 * spread * x.size ** (-0.2)


def select_bandwidth(sample, cfg: KdeConfig) -> float:
    if cfg.bandwidth == "silverman":
        return silverman_bandwidth(sample)
    return float(cfg.bandwidth)


def _linear_bin(x, lo, delta, grid_size):
    pos = (x - lo) / delta
    k = np.clip(np.floor(pos).astype(np.int64), 0, grid_size - 2)
    frac = pos - k
    counts = np.bincount(k, weights=1.0 - frac, minlength=grid_size)
    counts += np.bincount(k + 1, weights=frac, minlength=grid_size)
    return counts


def kde_fit_grid(sample, cfg: KdeConfig = KdeConfig()) -> DensityGrid:
    """Binned Gaussian KDE on ``grid_size`` equally spaced points.

    The grid spans the sample range padded by ``padding_bandwidths * h``.
    Sample mass is split linearly between the two neighbouring grid
    points, then convolved with the discretised kernel.
    """
    x = _as_sample(sample)
    h = select_bandwidth(x, cfg)
    pad = cfg.padding_bandwidths * h
    lo, hi = float(x.min()) - pad, float(x.max()) + pad
    g = cfg.grid_size
    grid = np.linspace(lo, hi, g)
    delta = (hi - lo) / (g - 1)

    counts = _linear_bin(x, lo, delta, g)
    offsets = np.arange(-(g - 1), g) * (delta / h)
    kernel = np.exp(-0.5 * offsets**2) / (SQRT_2PI * h * x.size)
    dens = np.convolve(counts, kernel)[g - 1 : 2 * g - 1]
    np.maximum(dens, 0.0, out=dens)

    grid.setflags(write=False)
    dens.setflags(write=False)
    return DensityGrid(abscissae=grid, ordinates=dens, bandwidth=h)


def kde_eval_direct(sample, h: float, theta, block: int = 2048):
    """Exact Gaussian KDE ``(1/(N h)) sum phi((theta - x_i)/h)``.

    Vectorized over ``theta``; work is blocked to bound memory.  Values are
    summed in sample order.
    """
    x = _as_sample(sample)
    if not (np.isfinite(h) and h > 0):
        raise InvalidScale(f"bandwidth must be positive, got {h!r}")
    t = np.asarray(theta, dtype=float)
    flat = t.ravel()
    out = np.empty(flat.size)
    norm = SQRT_2PI * h * x.size
    for start in range(0, flat.size, block):
        z = (flat[start : start + block, None] - x[None, :]) / h
        out[start : start + block] = np.exp(-0.5 * z * z).sum(axis=1) / norm
    out = out.reshape(t.shape)
    return out if out.ndim else float(out)


def interp_linear(grid: DensityGrid, theta):
    """Piecewise-linear read-out of a grid density.

    Points outside ``[abscissae[0], abscissae[-1]]`` raise
    :class:`OutOfGridRange` instead of returning zero.
    """
    t = np.asarray(theta, dtype=float)
    lo, hi = grid.abscissae[0], grid.abscissae[-1]
    outside = (t < lo) | (t > hi) | np.isnan(t)
    if np.any(outside):
        bad = t[outside] if t.ndim else t
        raise OutOfGridRange(
            f"theta={float(np.ravel(bad)[0])!r} outside grid range [{lo!r}, {hi!r}]"
        )
    out = np.interp(t, grid.abscissae, grid.ordinates)
    return out if np.ndim(out) else float(out)
