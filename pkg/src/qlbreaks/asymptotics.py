"""Sandwich covariance of per-segment QMLEs and confidence intervals.

The asymptotic covariance of the segment estimate is F^-1 G F^-1 where F is
the expected per-observation Hessian of the loss and G the expected score
outer product; both are estimated by sample averages over the segment at the
fitted parameter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import ConfigurationError, DegenerateInformationError
from .families import ModelFamily
from .likelihood import SegmentRef, series_array

CONDITION_THRESHOLD = 1e12


@dataclass
class SandwichEstimate:
    """F and G estimates, the sandwich covariance and diagnostics.

    ``cov`` is scaled so that ``theta_i +/- z * sqrt(cov_ii / n_j)`` is the
    interval at segment length ``n_j``.
    """

    F_hat: np.ndarray
    G_hat: np.ndarray
    cov: np.ndarray
    n_j: int
    condition_F: float


def sandwich_cov(seg: SegmentRef, theta, series, family: ModelFamily) -> SandwichEstimate:
    """Per-segment sandwich covariance; raises
    :class:`DegenerateInformationError` when F is numerically singular."""
    x = series_array(series)
    theta = family.validate_theta(theta)
    n_j = seg.length
    _, _, hess, outer = family.contrast_derivs(theta, x, seg.lo, seg.hi)
    F = hess / n_j
    F = 0.5 * (F + F.T)
    G = outer / n_j
    G = 0.5 * (G + G.T)
    cond = float(np.linalg.cond(F))
    if not np.isfinite(cond) or cond > CONDITION_THRESHOLD:
        raise DegenerateInformationError(
            f"information matrix is numerically singular (condition {cond:.3e})"
        )
    Finv_G = np.linalg.solve(F, G)
    cov = np.linalg.solve(F, Finv_G.T).T
    cov = 0.5 * (cov + cov.T)
    return SandwichEstimate(F_hat=F, G_hat=G, cov=cov, n_j=n_j, condition_F=cond)


def confint(est: SandwichEstimate, theta, level: float = 0.95) -> np.ndarray:
    """Per-parameter normal intervals, returned as a (d, 2) array."""
    if not 0.0 < level < 1.0:
        raise ConfigurationError("confidence level must be in (0, 1)")
    theta = np.asarray(theta, dtype=float)
    z = norm.ppf(0.5 * (1.0 + level))
    half = z * np.sqrt(np.clip(np.diag(est.cov), 0.0, None) / est.n_j)
    return np.column_stack([theta - half, theta + half])
