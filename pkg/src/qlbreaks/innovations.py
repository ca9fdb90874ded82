"""Innovation laws: iid noise with mean zero and unit variance.

Absolute moments are computed in closed form so that contraction checks do
not depend on sampling noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class Gaussian:
    """Standard normal innovations."""

    name: str = "gaussian"

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return rng.standard_normal(count)

    def abs_moment(self, r: float) -> float:
        """E|xi|^r for xi ~ N(0, 1)."""
        if r < 0:
            raise ConfigurationError("moment order must be nonnegative")
        return 2.0 ** (r / 2.0) * math.gamma((r + 1.0) / 2.0) / math.sqrt(math.pi)

    def to_dict(self) -> dict:
        return {"law": "gaussian"}


@dataclass(frozen=True)
class StudentT:
    """Student-t innovations rescaled by sqrt((nu-2)/nu) to unit variance."""

    nu: float
    name: str = "student_t"

    def __post_init__(self) -> None:
        if not self.nu > 2.0:
            raise ConfigurationError(
                f"student_t requires nu > 2 for a finite variance, got nu={self.nu}"
            )

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        scale = math.sqrt((self.nu - 2.0) / self.nu)
        return scale * rng.standard_t(self.nu, size=count)

    def abs_moment(self, r: float) -> float:
        """E|xi|^r for the standardized law; finite only for r < nu."""
        if r < 0:
            raise ConfigurationError("moment order must be nonnegative")
        if r >= self.nu:
            raise ConfigurationError(
                f"E|xi|^{r} is infinite for student_t with nu={self.nu}; need nu > r"
            )
        nu = self.nu
        return (
            (nu - 2.0) ** (r / 2.0)
            * math.gamma((r + 1.0) / 2.0)
            * math.gamma((nu - r) / 2.0)
            / (math.sqrt(math.pi) * math.gamma(nu / 2.0))
        )

    def to_dict(self) -> dict:
        return {"law": "student_t", "nu": self.nu}


GAUSSIAN = Gaussian()

InnovationLaw = Gaussian | StudentT


def innovation_from_dict(spec: dict | str) -> InnovationLaw:
    """Build an innovation law from a config entry.

    Accepts either a bare law name or a mapping with a ``law`` key and an
    optional ``nu`` for student_t.
    """
    if isinstance(spec, str):
        spec = {"law": spec}
    law = spec.get("law", "gaussian").lower()
    if law in ("gaussian", "normal"):
        return Gaussian()
    if law in ("student_t", "student", "t"):
        if "nu" not in spec:
            raise ConfigurationError("student_t innovation requires 'nu'")
        return StudentT(float(spec["nu"]))
    raise ConfigurationError(f"unknown innovation law: {law!r}")
