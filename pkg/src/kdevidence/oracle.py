"""Marginal likelihood by one-dimensional adaptive Simpson quadrature.

The integrand ``exp(g(theta))`` with ``g = log-likelihood + log-prior`` is
shifted by its maximum over a coarse scan before exponentiating, so large
data sets do not underflow.  The window is ``center +/- half_width_sds *
scale``; integrands with heavier than Gaussian tails are not handled.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EmptySupport, ToleranceNotMet
from .model import BayesModelSpec, Dataset, NormalModelConfig, PosteriorParams

N_SCAN = 1024
_EPS16 = 16.0 * np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureConfig:
    center: float
    scale: float
    half_width_sds: float = 12.0
    abs_tol: float = 1e-10
    max_depth: int = 40

    def __post_init__(self):
        if not (self.half_width_sds > 0 and self.scale > 0 and self.abs_tol > 0):
            raise ValueError("half_width_sds, scale and abs_tol must all be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not np.isfinite(self.center):
            raise ValueError("center must be finite")


def default_quadrature_config(
    config: NormalModelConfig, model_hint: Optional[PosteriorParams] = None
) -> QuadratureConfig:
    if model_hint is None:
        return QuadratureConfig(center=config.theta0, scale=config.sigma0)
    return QuadratureConfig(center=model_hint.mean, scale=max(model_hint.sd, config.sigma0))


def _simpson(h, fa, fm, fb):
    return h / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(f, a, b, abs_tol, max_depth=40, n_panels=1, rel_noise=0.0):
    """Integrate a vectorized ``f`` over ``[a, b]``.

    The interval is first cut into ``n_panels`` equal panels, each with a
    share of ``abs_tol`` proportional to its width, and every panel is
    refined by bisection until ``|S2 - S1| <= 15 tol``.  All intervals on
    a given level are evaluated in one call to ``f``.

    ``rel_noise`` is the relative rounding noise of ``f`` itself.  An
    interval whose ``|S2 - S1|`` is below the rounding floor (that noise,
    plus the width error of floating-point abscissae) is accepted, since
    further bisection cannot improve it.

    Returns ``(value, error_estimate, converged)``.
    """
    edges = np.linspace(a, b, n_panels + 1)
    return _adaptive_simpson_edges(f, edges, f(edges), abs_tol, max_depth, rel_noise)


def _adaptive_simpson_edges(f, edges, f_edges, abs_tol, max_depth, rel_noise=0.0):
    lo, hi = edges[:-1], edges[1:]
    flo, fhi = f_edges[:-1], f_edges[1:]
    mid = 0.5 * (lo + hi)
    fmid = f(mid)
    width = hi - lo
    whole = _simpson(width, flo, fmid, fhi)
    tol = abs_tol * width / (edges[-1] - edges[0])

    pieces, errors = [], []
    converged = True
    depth = 0
    while lo.size:
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        half = 0.5 * (hi - lo)
        left = _simpson(half, flo, flm, fmid)
        right = _simpson(half, fmid, frm, fhi)
        delta = left + right - whole
        # rounding floors: relative noise of f, and the absolute width error
        # from abscissae that stop being exactly representable
        floor = rel_noise * (np.abs(left) + np.abs(right)) + _EPS16 * np.maximum(np.abs(lo), np.abs(hi)) * (
            np.abs(flo) + np.abs(fmid) + np.abs(fhi)
        )
        done = np.abs(delta) <= np.maximum(15.0 * tol, floor)
        depth += 1
        if depth >= max_depth:
            if not np.all(done):
                converged = False
            done[:] = True
        pieces.append((left + right + delta / 15.0)[done])
        errors.append(np.abs(delta[done]) / 15.0)

        keep = ~done
        # children: [lo, mid] and [mid, hi], interleaved to keep a fixed order
        lo_k, mid_k, hi_k = lo[keep], mid[keep], hi[keep]
        lo = np.column_stack([lo_k, mid_k]).ravel()
        hi = np.column_stack([mid_k, hi_k]).ravel()
        mid = np.column_stack([lm[keep], rm[keep]]).ravel()
        flo = np.column_stack([flo[keep], fmid[keep]]).ravel()
        fhi = np.column_stack([fmid[keep], fhi[keep]]).ravel()
        fmid = np.column_stack([flm[keep], frm[keep]]).ravel()
        whole = np.column_stack([left[keep], right[keep]]).ravel()
        tol = np.repeat(tol[keep] / 2.0, 2)

    value = math.fsum(np.concatenate(pieces))
    err = math.fsum(np.concatenate(errors))
    return value, err, converged


def quadrature_log_marginal(model: BayesModelSpec, data: Dataset, cfg: QuadratureConfig) -> float:
    """``log`` of the integral of likelihood times prior over the window."""
    w = cfg.half_width_sds * cfg.scale
    a, b = cfg.center - w, cfg.center + w

    def g(theta):
        out = np.asarray(model.log_target(theta, data), dtype=float)
        return np.broadcast_to(out, np.shape(theta))

    scan = np.linspace(a, b, N_SCAN)
    g_scan = g(scan)
    if np.any(np.isnan(g_scan)):
        raise ValueError("log integrand is NaN inside the window")
    g_max = float(np.max(g_scan))
    if not np.isfinite(g_max):
        if g_max == -np.inf:
            raise EmptySupport(f"integrand is zero everywhere on the scan of [{a!r}, {b!r}]")
        raise ValueError("log integrand is +inf inside the window")

    def f(theta):
        return np.exp(g(theta) - g_max)

    # exp(g - g_max) inherits the absolute rounding error of g
    rel_noise = 64.0 * np.finfo(float).eps * (1.0 + abs(g_max))
    value, err, ok = _adaptive_simpson_edges(
        f, scan, np.exp(g_scan - g_max), cfg.abs_tol, cfg.max_depth, rel_noise
    )
    if value <= 0.0:
        raise EmptySupport("integral of the shifted integrand is not positive")
    result = g_max + math.log(value)
    if not ok:
        raise ToleranceNotMet(result, err, cfg.abs_tol)
    return result
