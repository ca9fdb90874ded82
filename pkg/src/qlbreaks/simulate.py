"""Simulation of piecewise causal paths.

A path is generated regime by regime on a single time axis: regime 1 starts
from a zero past and runs through a burn-in window (discarded) so that the
retained stretch is approximately stationary; each later regime continues
from the same path with its own parameter, so the dependence across break
points is preserved rather than simulating independent blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError
from .families import ModelFamily, family_from_dict
from .innovations import GAUSSIAN, InnovationLaw, innovation_from_dict


@dataclass
class BreakModel:
    """Ground-truth description of a piecewise model.

    ``tau_star`` holds the break fractions (length ``K_star - 1``) and
    ``thetas`` one parameter vector per regime.  Every regime parameter must
    lie in the stationarity region for the configured moment order ``r``.
    """

    family: ModelFamily
    K_star: int
    tau_star: np.ndarray
    thetas: list[np.ndarray]
    innovation: InnovationLaw = GAUSSIAN
    r: float = 2.0

    def __post_init__(self) -> None:
        self.tau_star = np.asarray(self.tau_star, dtype=float)
        if self.K_star < 1:
            raise ConfigurationError("K_star must be >= 1")
        if self.tau_star.shape != (self.K_star - 1,):
            raise ConfigurationError("tau_star must have length K_star - 1")
        if self.K_star > 1:
            if not (np.all(self.tau_star > 0.0) and np.all(self.tau_star < 1.0)):
                raise ConfigurationError("break fractions must lie in (0, 1)")
            if not np.all(np.diff(self.tau_star) > 0.0):
                raise ConfigurationError("break fractions must be strictly increasing")
        if len(self.thetas) != self.K_star:
            raise ConfigurationError("need one parameter vector per regime")
        self.thetas = [self.family.validate_theta(t) for t in self.thetas]
        for j, theta in enumerate(self.thetas):
            rep = self.family.contraction(theta, r=self.r, innovation=self.innovation)
            if not rep.in_domain:
                raise DomainError(
                    f"regime {j + 1} parameter fails the contraction test "
                    f"(beta0={rep.beta0:.4f} >= 1); refusing to simulate"
                )
        for j in range(self.K_star - 1):
            if float(np.linalg.norm(self.thetas[j + 1] - self.thetas[j])) == 0.0:
                raise ConfigurationError(
                    f"regimes {j + 1} and {j + 2} have identical parameters"
                )

    def break_indices(self, n: int) -> np.ndarray:
        """Integer break instants floor(n * tau)."""
        return np.floor(n * self.tau_star).astype(np.int64)

    def to_dict(self) -> dict:
        return {
            **self.family.to_dict(),
            "K_star": self.K_star,
            "tau": self.tau_star.tolist(),
            "theta": [t.tolist() for t in self.thetas],
            "innovation": self.innovation.to_dict(),
            "r": self.r,
        }

    @classmethod
    def from_dict(cls, spec: dict) -> "BreakModel":
        family = family_from_dict(spec)
        thetas = [np.asarray(t, dtype=float) for t in spec["theta"]]
        tau = np.asarray(spec.get("tau", []), dtype=float)
        return cls(
            family=family,
            K_star=len(thetas),
            tau_star=tau,
            thetas=thetas,
            innovation=innovation_from_dict(spec.get("innovation", "gaussian")),
            r=float(spec.get("r", 2.0)),
        )


@dataclass
class SeriesSample:
    """An observed path with its generation metadata."""

    x: np.ndarray
    n: int
    true_breaks: np.ndarray | None = None
    seed: int = 0
    burn_in: int = 0

    def __post_init__(self) -> None:
        self.x = np.asarray(self.x, dtype=float)
        if self.x.shape != (self.n,):
            raise ConfigurationError("series length must equal n")
        if not np.all(np.isfinite(self.x)):
            raise ConfigurationError("series contains non-finite values")
        if self.true_breaks is not None:
            tb = np.asarray(self.true_breaks, dtype=np.int64)
            if tb.size and not (
                np.all(np.diff(tb) > 0) and tb[0] > 0 and tb[-1] < self.n
            ):
                raise ConfigurationError("true breaks must be strictly increasing in (0, n)")
            self.true_breaks = tb


def sample_innovations(law: InnovationLaw, count: int, seed: int) -> np.ndarray:
    """iid draws with mean 0 and variance 1, deterministic given the seed."""
    if count < 0:
        raise ConfigurationError("count must be nonnegative")
    rng = np.random.default_rng(seed)
    return law.sample(rng, count)


def simulate_piecewise(model: BreakModel, n: int, burn_in: int = 500,
                       seed: int = 0, zero_past: bool = False) -> SeriesSample:
    """Simulate a length-n path of the piecewise model.

    With ``zero_past=True`` the path starts directly at t=1 from a zero past
    (no burn-in); otherwise ``burn_in`` pre-sample steps of regime 1 are
    generated and discarded.
    """
    if n < 1:
        raise ConfigurationError("n must be >= 1")
    burn = 0 if zero_past else int(burn_in)
    if burn < 0:
        raise ConfigurationError("burn_in must be nonnegative")
    if not zero_past and burn < model.family.max_lag:
        raise ConfigurationError(
            f"burn_in must be >= the family lag horizon ({model.family.max_lag})"
        )
    t_breaks = model.break_indices(n)
    if model.K_star > 1:
        if t_breaks[0] < 1 or t_breaks[-1] >= n or np.any(np.diff(t_breaks) < 1):
            raise ConfigurationError(
                "break fractions collapse onto fewer than K_star - 1 distinct "
                f"instants at n={n}"
            )
    eps = sample_innovations(model.innovation, burn + n, seed)
    ends = np.concatenate([burn + t_breaks, [burn + n]]).astype(np.int64)
    x_ext = model.family.simulate_path(model.thetas, ends, eps)
    return SeriesSample(
        x=x_ext[burn:].copy(),
        n=n,
        true_breaks=t_breaks if model.K_star > 1 else None,
        seed=seed,
        burn_in=burn,
    )


def simulate_stationary(family: ModelFamily, theta, n: int, burn_in: int = 500,
                        seed: int = 0, innovation: InnovationLaw = GAUSSIAN,
                        r: float = 2.0) -> SeriesSample:
    """Single-regime convenience wrapper around :func:`simulate_piecewise`."""
    model = BreakModel(family=family, K_star=1, tau_star=np.array([]),
                       thetas=[np.asarray(theta, dtype=float)],
                       innovation=innovation, r=r)
    return simulate_piecewise(model, n, burn_in=burn_in, seed=seed)
