"""Gaussian quasi-likelihood contrasts.

The per-observation loss at time s is ``(X_s - f_s)^2 / h_s + log h_s``
where both conditional moments are evaluated on the *whole* observed prefix
X_{s-1}, ..., X_1 (zero-padded before the sample start).  The loss therefore
depends only on s and theta, never on segment boundaries, which is what
makes segment costs additive and the dynamic program exact.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryWarning, ConfigurationError
from .families import ModelFamily, ParamDomain
from .simulate import SeriesSample


@dataclass(frozen=True)
class SegmentRef:
    """Half-open segment (lo, hi]: observations s in {lo+1, ..., hi}."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if not (0 <= self.lo < self.hi):
            raise ConfigurationError(f"invalid segment ({self.lo}, {self.hi}]")

    @property
    def length(self) -> int:
        return self.hi - self.lo


def series_array(series) -> np.ndarray:
    if isinstance(series, SeriesSample):
        return series.x
    return np.ascontiguousarray(series, dtype=float)


def point_contrast(s: int, theta, series, family: ModelFamily) -> float:
    """Loss of observation s (1-indexed) under theta."""
    x = series_array(series)
    if not 1 <= s <= x.shape[0]:
        raise ConfigurationError(f"s={s} outside the sample 1..{x.shape[0]}")
    return family.contrast(family.validate_theta(theta), x, s - 1, s)


def segment_contrast(seg: SegmentRef, theta, series, family: ModelFamily) -> float:
    """Minus twice the segment quasi-log-likelihood; empty segments cost 0."""
    if seg is None or seg.length == 0:
        return 0.0
    x = series_array(series)
    if seg.hi > x.shape[0]:
        raise ConfigurationError("segment extends beyond the sample")
    return family.contrast(family.validate_theta(theta), x, seg.lo, seg.hi)


def segment_score(seg: SegmentRef, theta, series, family: ModelFamily,
                  domain: ParamDomain | None = None):
    """Gradient and Hessian of the segment contrast at theta."""
    x = series_array(series)
    theta = family.validate_theta(theta)
    domain = domain or family.default_domain()
    if not domain.is_interior(theta):
        warnings.warn(
            f"{family.name}: score requested on the domain-box boundary",
            BoundaryWarning,
            stacklevel=2,
        )
    _, grad, hess, _ = family.contrast_derivs(theta, x, seg.lo, seg.hi)
    return grad, hess
