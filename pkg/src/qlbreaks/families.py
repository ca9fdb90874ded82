"""Parametric model families: conditional mean/variance maps, derivatives,
contraction coefficients and admissible parameter domains.

Each family evaluates its conditional moments on the *available* past under
the zero-padding convention (unobserved values treated as 0), and exposes
whole-series sweep methods used by the likelihood and estimation layers.

Families and parameter layouts
------------------------------
``ar(p)``              theta = (phi_1, ..., phi_p); X_t = sum phi_k X_{t-k} + xi_t
``riemannian_ar(L)``   theta = (c, gamma), gamma > 1; AR coefficients c * k^-gamma, k <= L
``arch(q)``            theta = (psi_0, ..., psi_q); X_t = sqrt(h_t) xi_t,
                       h_t = psi_0 + sum psi_k X_{t-k}^2
``garch(p, q)``        theta = (a_0, a_1..a_q, b_1..b_p);
                       h_t = a_0 + sum a_k X_{t-k}^2 + sum b_j h_{t-j}
``tarch(q)``           theta = (b_0, b_1^+..b_q^+, b_1^-..b_q^-);
                       sigma_t = b_0 + sum (b_k^+ max(X_{t-k},0) - b_k^- min(X_{t-k},0))
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .errors import BoundaryWarning, ConfigurationError, DomainError, ParameterError
from .innovations import GAUSSIAN, InnovationLaw

CONTRACTION_LIMIT = 1.0 - 1e-6


@dataclass(frozen=True)
class ParamDomain:
    """Admissible parameter box plus the moment order and variance floor.

    The box is a necessary constraint; membership in the stationarity region
    additionally requires the family's contraction sum to stay below 1.
    """

    box_lower: np.ndarray
    box_upper: np.ndarray
    r: float = 2.0
    h_floor: float = 1e-8

    def __post_init__(self) -> None:
        lo = np.asarray(self.box_lower, dtype=float)
        up = np.asarray(self.box_upper, dtype=float)
        object.__setattr__(self, "box_lower", lo)
        object.__setattr__(self, "box_upper", up)
        if lo.shape != up.shape or lo.ndim != 1:
            raise ConfigurationError("domain bounds must be 1-d arrays of equal length")
        if not np.all(lo < up):
            raise ConfigurationError("box_lower must be strictly below box_upper")
        if not self.h_floor > 0:
            raise ConfigurationError("variance floor must be positive")
        if not self.r >= 1:
            raise ConfigurationError("moment order r must be >= 1")

    @property
    def dim(self) -> int:
        return self.box_lower.shape[0]

    def contains(self, theta: np.ndarray, tol: float = 0.0) -> bool:
        return bool(
            np.all(theta >= self.box_lower - tol) and np.all(theta <= self.box_upper + tol)
        )

    def is_interior(self, theta: np.ndarray, tol: float = 1e-12) -> bool:
        return bool(
            np.all(theta > self.box_lower + tol) and np.all(theta < self.box_upper - tol)
        )

    def clip(self, theta: np.ndarray) -> np.ndarray:
        return np.clip(theta, self.box_lower, self.box_upper)

    def sample_interior(self, rng: np.random.Generator) -> np.ndarray:
        u = rng.uniform(0.05, 0.95, size=self.dim)
        return self.box_lower + u * (self.box_upper - self.box_lower)


@dataclass(frozen=True)
class ContractionReport:
    """Result of the stationarity (contraction) test for one parameter."""

    beta0: float
    coefficient_tail: np.ndarray
    is_arch_type: bool
    in_domain: bool = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "in_domain", bool(self.beta0 < 1.0))


def garch_to_arch_weights(a: np.ndarray, b: np.ndarray, n_terms: int) -> tuple[float, np.ndarray]:
    """Nelson-Cao expansion of a GARCH variance into ARCH(inf) weights.

    Returns ``(psi_0, psi)`` with ``h_t = psi_0 + sum_k psi_k X_{t-k}^2``,
    the expansion truncated after ``n_terms`` lags.  Requires sum(b) < 1.
    """
    q = a.shape[0] - 1
    p = b.shape[0]
    bsum = float(np.sum(b))
    if bsum >= 1.0:
        raise DomainError("Nelson-Cao expansion requires sum(b) < 1")
    psi0 = float(a[0]) / (1.0 - bsum)
    psi = np.zeros(n_terms)
    for k in range(1, n_terms + 1):
        s = a[k] if k <= q else 0.0
        for j in range(1, min(p, k - 1) + 1):
            s += b[j - 1] * psi[k - j - 1]
        psi[k - 1] = s
    return psi0, psi


class ModelFamily:
    """Base class; concrete families fill in the attributes and hooks."""

    name: str
    d: int
    max_lag: int
    param_names: tuple[str, ...]
    is_volatility: bool
    coefficient_decay: str

    # -- parameter checks ---------------------------------------------------

    def validate_theta(self, theta) -> np.ndarray:
        arr = np.atleast_1d(np.asarray(theta, dtype=float))
        if arr.shape != (self.d,):
            raise ParameterError(
                f"{self.name} expects {self.d} parameters, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ParameterError(f"{self.name} parameters must be finite")
        return arr

    def default_domain(self, r: float = 2.0) -> ParamDomain:
        raise NotImplementedError

    # -- single-point conditional moments ------------------------------------

    def conditional_mean(self, theta, past) -> float:
        """f evaluated on the reversed past slice (most recent first)."""
        self.validate_theta(theta)
        return 0.0

    def conditional_variance(self, theta, past) -> float:
        raise NotImplementedError

    def mean_var_derivatives(self, theta, past, domain: ParamDomain | None = None):
        """(df, dh, d2f, d2h) at theta; warns if theta sits on the box boundary."""
        theta = self.validate_theta(theta)
        domain = domain or self.default_domain()
        on_edge = np.any(np.isclose(theta, domain.box_lower)) or np.any(
            np.isclose(theta, domain.box_upper)
        )
        if on_edge:
            warnings.warn(
                f"{self.name}: derivatives requested on the domain-box boundary",
                BoundaryWarning,
                stacklevel=2,
            )
        return self._derivatives_impl(theta, np.asarray(past, dtype=float))

    def _derivatives_impl(self, theta, past):
        raise NotImplementedError

    # -- contraction ---------------------------------------------------------

    def contraction(self, theta, r: float = 2.0, innovation: InnovationLaw = GAUSSIAN) -> ContractionReport:
        raise NotImplementedError

    def contraction_value_grad(self, theta, r: float = 2.0,
                               innovation: InnovationLaw = GAUSSIAN):
        """(beta0, d beta0 / d theta); subgradient convention at kinks."""
        raise NotImplementedError

    # -- whole-series sweeps (hot paths, dispatched to the kernel backend) ----

    def qhat_values(self, theta, x) -> np.ndarray:
        raise NotImplementedError

    def contrast(self, theta, x, lo, hi) -> float:
        return self._sums(theta, x, lo, hi, 0)[0]

    def contrast_grad(self, theta, x, lo, hi):
        val, g, _, _ = self._sums(theta, x, lo, hi, 1)
        return val, g

    def contrast_derivs(self, theta, x, lo, hi):
        """(value, grad, hess, outer) of the segment loss sum."""
        return self._sums(theta, x, lo, hi, 2)

    def _sums(self, theta, x, lo, hi, want):
        raise NotImplementedError

    def simulate_path(self, thetas, ends, eps) -> np.ndarray:
        raise NotImplementedError

    def initial_guess(self, x, lo, hi, domain: ParamDomain) -> np.ndarray:
        raise NotImplementedError

    # -- misc -----------------------------------------------------------------

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:  # pragma: no cover
        return f"<{self.name} d={self.d}>"


# ---------------------------------------------------------------------------
# linear-mean families (unit conditional variance)
# ---------------------------------------------------------------------------


class _LinearMeanFamily(ModelFamily):
    is_volatility = False

    def coef(self, theta) -> np.ndarray:
        raise NotImplementedError

    def coef_jac(self, theta) -> np.ndarray:
        raise NotImplementedError

    def coef_hess(self, theta) -> np.ndarray:
        raise NotImplementedError

    def conditional_mean(self, theta, past) -> float:
        theta = self.validate_theta(theta)
        past = np.asarray(past, dtype=float)
        c = self.coef(theta)
        m = min(c.shape[0], past.shape[0])
        return float(c[:m] @ past[:m])

    def conditional_variance(self, theta, past) -> float:
        self.validate_theta(theta)
        return 1.0

    def _derivatives_impl(self, theta, past):
        c = self.coef(theta)
        J = self.coef_jac(theta)
        H = self.coef_hess(theta)
        m = min(c.shape[0], past.shape[0])
        df = J[:m].T @ past[:m] if m else np.zeros(self.d)
        d2f = np.tensordot(H[:m], past[:m], axes=(0, 0)) if m else np.zeros((self.d, self.d))
        return df, np.zeros(self.d), d2f, np.zeros((self.d, self.d))

    def qhat_values(self, theta, x):
        theta = self.validate_theta(theta)
        return backend.kernels().linmean_qhat(self.coef(theta), np.asarray(x, dtype=float))

    def _sums(self, theta, x, lo, hi, want):
        theta = self.validate_theta(theta)
        c = self.coef(theta)
        val, gc, gram, wgram = backend.kernels().linmean_sums(c, x, lo, hi, want)
        if want == 0:
            return val, None, None, None
        J = self.coef_jac(theta)
        g = J.T @ gc
        if want == 1:
            return val, g, None, None
        H = self.coef_hess(theta)
        hess = 2.0 * (J.T @ gram @ J) + np.tensordot(H, gc, axes=(0, 0))
        outer = 4.0 * (J.T @ wgram @ J)
        return val, g, hess, outer

    def simulate_path(self, thetas, ends, eps):
        coefs = np.stack([self.coef(self.validate_theta(t)) for t in thetas])
        return backend.kernels().linmean_simulate(coefs, ends, eps)


class AR(_LinearMeanFamily):
    """Autoregression of finite order p with unit innovation variance."""

    coefficient_decay = "finite"

    def __init__(self, p: int):
        if p < 1:
            raise ConfigurationError("ar requires p >= 1")
        self.p = p
        self.d = p
        self.max_lag = p
        self.name = f"ar({p})"
        self.param_names = tuple(f"phi_{k}" for k in range(1, p + 1))

    def default_domain(self, r: float = 2.0) -> ParamDomain:
        return ParamDomain(
            box_lower=-0.99 * np.ones(self.p),
            box_upper=0.99 * np.ones(self.p),
            r=r,
            h_floor=1.0,
        )

    def coef(self, theta):
        return np.asarray(theta, dtype=float)

    def coef_jac(self, theta):
        return np.eye(self.p)

    def coef_hess(self, theta):
        return np.zeros((self.p, self.p, self.p))

    def contraction(self, theta, r=2.0, innovation=GAUSSIAN):
        theta = self.validate_theta(theta)
        tail = np.abs(theta)
        return ContractionReport(float(np.sum(tail)), tail, is_arch_type=False)

    def contraction_value_grad(self, theta, r=2.0, innovation=GAUSSIAN):
        theta = self.validate_theta(theta)
        return float(np.sum(np.abs(theta))), np.sign(theta)

    def initial_guess(self, x, lo, hi, domain):
        Z = backend.kernels()
        _, gc, gram, _ = Z.linmean_sums(np.zeros(self.p), x, lo, hi, 2)
        c = -0.5 * gc  # sum z_i x_i
        try:
            phi = np.linalg.solve(gram, c)
        except np.linalg.LinAlgError:
            phi = np.zeros(self.p)
        s = np.sum(np.abs(phi))
        limit = CONTRACTION_LIMIT - 0.05
        if s >= limit:
            phi *= limit / s
        return domain.clip(phi)

    def to_dict(self):
        return {"family": "ar", "p": self.p}


class RiemannianAR(_LinearMeanFamily):
    """AR with power-decay coefficients c * k^-gamma, truncated at lag L."""

    coefficient_decay = "riemannian"

    def __init__(self, L: int = 50):
        if L < 1:
            raise ConfigurationError("riemannian_ar requires L >= 1")
        self.L = L
        self.d = 2
        self.max_lag = L
        self.name = f"riemannian_ar(L={L})"
        self.param_names = ("c", "gamma")
        self._ks = np.arange(1, L + 1, dtype=float)
        self._logk = np.log(self._ks)

    def default_domain(self, r: float = 2.0) -> ParamDomain:
        return ParamDomain(
            box_lower=np.array([-0.99, 1.001]),
            box_upper=np.array([0.99, 4.0]),
            r=r,
            h_floor=1.0,
        )

    def coef(self, theta):
        return theta[0] * self._ks ** (-theta[1])

    def coef_jac(self, theta):
        w = self._ks ** (-theta[1])
        J = np.empty((self.L, 2))
        J[:, 0] = w
        J[:, 1] = -theta[0] * self._logk * w
        return J

    def coef_hess(self, theta):
        w = self._ks ** (-theta[1])
        H = np.zeros((self.L, 2, 2))
        H[:, 0, 1] = H[:, 1, 0] = -self._logk * w
        H[:, 1, 1] = theta[0] * self._logk * self._logk * w
        return H

    def contraction(self, theta, r=2.0, innovation=GAUSSIAN):
        theta = self.validate_theta(theta)
        tail = np.abs(self.coef(theta))
        return ContractionReport(float(np.sum(tail)), tail, is_arch_type=False)

    def contraction_value_grad(self, theta, r=2.0, innovation=GAUSSIAN):
        theta = self.validate_theta(theta)
        w = self._ks ** (-theta[1])
        s = float(np.sum(w))
        grad = np.array([np.sign(theta[0]) * s, -abs(theta[0]) * float(self._logk @ w)])
        return abs(theta[0]) * s, grad

    def initial_guess(self, x, lo, hi, domain):
        seg = x[lo:hi]
        denom = float(seg[:-1] @ seg[:-1])
        rho = float(seg[1:] @ seg[:-1]) / denom if denom > 0 else 0.0
        return domain.clip(np.array([np.clip(rho, -0.5, 0.5), 2.0]))

    def to_dict(self):
        return {"family": "riemannian_ar", "L": self.L}


# ---------------------------------------------------------------------------
# volatility families (zero conditional mean)
# ---------------------------------------------------------------------------


class _VolatilityFamily(ModelFamily):
    is_volatility = True

    def _derivatives_impl(self, theta, past):
        dh, d2h = self._var_derivatives(theta, past)
        return np.zeros(self.d), dh, np.zeros((self.d, self.d)), d2h

    def _var_derivatives(self, theta, past):
        raise NotImplementedError


class ARCH(_VolatilityFamily):
    """ARCH of finite order q."""

    coefficient_decay = "finite"

    def __init__(self, q: int):
        if q < 1:
            raise ConfigurationError("arch requires q >= 1")
        self.q = q
        self.d = q + 1
        self.max_lag = q
        self.name = f"arch({q})"
        self.param_names = ("psi_0",) + tuple(f"psi_{k}" for k in range(1, q + 1))

    def default_domain(self, r: float = 2.0) -> ParamDomain:
        return ParamDomain(
            box_lower=np.array([1e-6] + [0.0] * self.q),
            box_upper=np.array([10.0] + [0.999] * self.q),
            r=r,
            h_floor=1e-8,
        )

    def conditional_variance(self, theta, past) -> float:
        theta = self.validate_theta(theta)
        if theta[0] < self.default_domain().h_floor:
            raise DomainError(f"{self.name}: constant term below the variance floor")
        past = np.asarray(past, dtype=float)
        m = min(self.q, past.shape[0])
        return float(theta[0] + theta[1:1 + m] @ (past[:m] ** 2))

    def _var_derivatives(self, theta, past):
        m = min(self.q, past.shape[0])
        dh = np.zeros(self.d)
        dh[0] = 1.0
        dh[1:1 + m] = past[:m] ** 2
        return dh, np.zeros((self.d, self.d))

    def contraction(self, theta, r=2.0, innovation=GAUSSIAN):
        theta = self.validate_theta(theta)
        fac = innovation.abs_moment(r) ** (2.0 / r)
        tail = np.asarray(theta[1:], dtype=float)
        return ContractionReport(float(fac * np.sum(tail)), tail, is_arch_type=True)

    def contraction_value_grad(self, theta, r=2.0, innovation=GAUSSIAN):
        theta = self.validate_theta(theta)
        fac = innovation.abs_moment(r) ** (2.0 / r)
        grad = np.zeros(self.d)
        grad[1:] = fac
        return float(fac * np.sum(theta[1:])), grad

    def qhat_values(self, theta, x):
        theta = self.validate_theta(theta)
        return backend.kernels().arch_qhat(theta, np.asarray(x, dtype=float))

    def _sums(self, theta, x, lo, hi, want):
        theta = self.validate_theta(theta)
        return backend.kernels().arch_sums(theta, x, lo, hi, want)

    def simulate_path(self, thetas, ends, eps):
        psis = np.stack([self.validate_theta(t) for t in thetas])
        return backend.kernels().arch_simulate(psis, ends, eps)

    def initial_guess(self, x, lo, hi, domain):
        seg2 = x[lo:hi] ** 2
        v = float(np.mean(seg2))
        theta = np.zeros(self.d)
        if v <= 0 or float(np.var(seg2)) == 0.0:
            theta[0] = v
        else:
            theta[1:] = 0.2 / self.q
            theta[0] = 0.8 * v
        return domain.clip(theta)

    def to_dict(self):
        return {"family": "arch", "q": self.q}


class GARCH(_VolatilityFamily):
    """GARCH(p, q); the conditional variance is evaluated by the forward
    recursion with the pre-sample variance pinned at a0 / (1 - sum b), which
    reproduces the truncated Nelson-Cao ARCH(inf) expansion on zero-padded
    data."""

    coefficient_decay = "geometric"

    def __init__(self, p: int = 1, q: int = 1):
        if p < 1 or q < 1:
            raise ConfigurationError("garch requires p >= 1 and q >= 1")
        self.p = p
        self.q = q
        self.d = 1 + q + p
        self.max_lag = max(p, q)
        self.name = f"garch({p},{q})"
        self.param_names = (
            ("a_0",)
            + tuple(f"a_{k}" for k in range(1, q + 1))
            + tuple(f"b_{j}" for j in range(1, p + 1))
        )

    def default_domain(self, r: float = 2.0) -> ParamDomain:
        return ParamDomain(
            box_lower=np.array([1e-6] + [0.0] * (self.q + self.p)),
            box_upper=np.array([10.0] + [0.999] * (self.q + self.p)),
            r=r,
            h_floor=1e-8,
        )

    def _split(self, theta):
        return theta[0], theta[1:1 + self.q], theta[1 + self.q:]

    def conditional_variance(self, theta, past) -> float:
        theta = self.validate_theta(theta)
        a0, a, b = self._split(theta)
        if a0 < self.default_domain().h_floor:
            raise DomainError(f"{self.name}: constant term below the variance floor")
        if float(np.sum(b)) >= 1.0:
            raise DomainError(f"{self.name}: sum(b) must be < 1")
        chron = np.asarray(past, dtype=float)[::-1].copy()
        m = chron.shape[0]
        sig2 = backend.kernels().garch_sig2(
            theta, np.concatenate([chron, [0.0]]), self.p, self.q, m + 1
        )
        return float(sig2[m])

    def _var_derivatives(self, theta, past):
        a0, a, b = self._split(theta)
        chron = np.asarray(past, dtype=float)[::-1]
        m = chron.shape[0]
        d = self.d
        fac = 1.0 / (1.0 - float(np.sum(b)))
        psi0 = a0 * fac
        dpsi0 = np.zeros(d)
        dpsi0[0] = fac
        dpsi0[1 + self.q:] = a0 * fac * fac
        d2psi0 = np.zeros((d, d))
        for j in range(self.p):
            d2psi0[0, 1 + self.q + j] = d2psi0[1 + self.q + j, 0] = fac * fac
            for i in range(self.p):
                d2psi0[1 + self.q + i, 1 + self.q + j] += 2.0 * a0 * fac ** 3
        sig_hist = [psi0] * self.p
        dsig_hist = [dpsi0.copy() for _ in range(self.p)]
        d2sig_hist = [d2psi0.copy() for _ in range(self.p)]
        s, ds, d2s = psi0, dpsi0, d2psi0
        for i in range(m + 1):
            s = a0
            ds = np.zeros(d)
            ds[0] = 1.0
            d2s = np.zeros((d, d))
            for k in range(1, self.q + 1):
                if i - k >= 0:
                    xk2 = chron[i - k] ** 2
                    s += a[k - 1] * xk2
                    ds[k] += xk2
            for j in range(1, self.p + 1):
                sj = sig_hist[-j]
                dsj = dsig_hist[-j]
                s += b[j - 1] * sj
                ds += b[j - 1] * dsj
                ds[self.q + j] += sj
                d2s = d2s + b[j - 1] * d2sig_hist[-j]
                d2s[self.q + j, :] += dsj
                d2s[:, self.q + j] += dsj
            if i < m:
                sig_hist.pop(0)
                sig_hist.append(s)
                dsig_hist.pop(0)
                dsig_hist.append(ds)
                d2sig_hist.pop(0)
                d2sig_hist.append(d2s)
        return ds, d2s

    def contraction(self, theta, r=2.0, innovation=GAUSSIAN):
        theta = self.validate_theta(theta)
        a0, a, b = self._split(theta)
        fac = innovation.abs_moment(r) ** (2.0 / r)
        beta0 = float(fac * np.sum(a) + np.sum(b))
        if float(np.sum(b)) < 1.0:
            _, tail = garch_to_arch_weights(np.concatenate([[a0], a]), b, 50)
        else:
            tail = np.full(50, np.inf)
        return ContractionReport(beta0, tail, is_arch_type=True)

    def contraction_value_grad(self, theta, r=2.0, innovation=GAUSSIAN):
        theta = self.validate_theta(theta)
        fac = innovation.abs_moment(r) ** (2.0 / r)
        grad = np.zeros(self.d)
        grad[1:1 + self.q] = fac
        grad[1 + self.q:] = 1.0
        a0, a, b = self._split(theta)
        return float(fac * np.sum(a) + np.sum(b)), grad

    def qhat_values(self, theta, x):
        theta = self.validate_theta(theta)
        return backend.kernels().garch_qhat(theta, np.asarray(x, dtype=float), self.p, self.q)

    def _sums(self, theta, x, lo, hi, want):
        theta = self.validate_theta(theta)
        return backend.kernels().garch_sums(theta, x, self.p, self.q, lo, hi, want)

    def simulate_path(self, thetas, ends, eps):
        arr = np.stack([self.validate_theta(t) for t in thetas])
        return backend.kernels().garch_simulate(
            arr[:, :1 + self.q].copy(), arr[:, 1 + self.q:].copy(), ends, eps
        )

    def initial_guess(self, x, lo, hi, domain):
        seg2 = x[lo:hi] ** 2
        v = float(np.mean(seg2))
        theta = np.zeros(self.d)
        if v <= 0 or float(np.var(seg2)) == 0.0:
            theta[0] = v
        else:
            theta[1:1 + self.q] = 0.1 / self.q
            theta[1 + self.q:] = 0.75 / self.p
            theta[0] = max(v * 0.15, 1e-6)
        return domain.clip(theta)

    def to_dict(self):
        return {"family": "garch", "p": self.p, "q": self.q}


class TARCH(_VolatilityFamily):
    """Threshold ARCH of order q: the conditional standard deviation is
    affine in the positive and negative parts of the lagged observations."""

    coefficient_decay = "finite"

    def __init__(self, q: int):
        if q < 1:
            raise ConfigurationError("tarch requires q >= 1")
        self.q = q
        self.d = 1 + 2 * q
        self.max_lag = q
        self.name = f"tarch({q})"
        self.param_names = (
            ("b_0",)
            + tuple(f"bplus_{k}" for k in range(1, q + 1))
            + tuple(f"bminus_{k}" for k in range(1, q + 1))
        )

    def default_domain(self, r: float = 2.0) -> ParamDomain:
        return ParamDomain(
            box_lower=np.array([1e-6] + [0.0] * (2 * self.q)),
            box_upper=np.array([10.0] + [0.999] * (2 * self.q)),
            r=r,
            h_floor=1e-12,
        )

    def _sigma_regressors(self, past):
        m = min(self.q, past.shape[0])
        u = np.zeros(self.d)
        u[0] = 1.0
        u[1:1 + m] = np.maximum(past[:m], 0.0)
        u[1 + self.q:1 + self.q + m] = -np.minimum(past[:m], 0.0)
        return u

    def conditional_variance(self, theta, past) -> float:
        theta = self.validate_theta(theta)
        if theta[0] ** 2 < self.default_domain().h_floor:
            raise DomainError(f"{self.name}: constant term below the variance floor")
        u = self._sigma_regressors(np.asarray(past, dtype=float))
        sig = float(theta @ u)
        return sig * sig

    def _var_derivatives(self, theta, past):
        u = self._sigma_regressors(np.asarray(past, dtype=float))
        sig = float(theta @ u)
        return 2.0 * sig * u, 2.0 * np.outer(u, u)

    def contraction(self, theta, r=2.0, innovation=GAUSSIAN):
        theta = self.validate_theta(theta)
        fac = innovation.abs_moment(r) ** (1.0 / r)
        tail = np.maximum(np.abs(theta[1:1 + self.q]), np.abs(theta[1 + self.q:]))
        return ContractionReport(float(fac * np.sum(tail)), tail, is_arch_type=False)

    def contraction_value_grad(self, theta, r=2.0, innovation=GAUSSIAN):
        theta = self.validate_theta(theta)
        fac = innovation.abs_moment(r) ** (1.0 / r)
        bp = np.abs(theta[1:1 + self.q])
        bm = np.abs(theta[1 + self.q:])
        grad = np.zeros(self.d)
        plus_wins = bp >= bm
        grad[1:1 + self.q] = np.where(plus_wins, fac * np.sign(theta[1:1 + self.q]), 0.0)
        grad[1 + self.q:] = np.where(~plus_wins, fac * np.sign(theta[1 + self.q:]), 0.0)
        return float(fac * np.sum(np.maximum(bp, bm))), grad

    def qhat_values(self, theta, x):
        theta = self.validate_theta(theta)
        return backend.kernels().tarch_qhat(theta, np.asarray(x, dtype=float), self.q)

    def _sums(self, theta, x, lo, hi, want):
        theta = self.validate_theta(theta)
        return backend.kernels().tarch_sums(theta, x, self.q, lo, hi, want)

    def simulate_path(self, thetas, ends, eps):
        arr = np.stack([self.validate_theta(t) for t in thetas])
        return backend.kernels().tarch_simulate(arr, ends, eps)

    def initial_guess(self, x, lo, hi, domain):
        seg = x[lo:hi]
        s = float(np.sqrt(np.mean(seg ** 2)))
        theta = np.zeros(self.d)
        if s <= 0:
            theta[0] = 0.0
        else:
            theta[1:] = 0.15 / self.q
            theta[0] = 0.7 * s
        return domain.clip(theta)

    def to_dict(self):
        return {"family": "tarch", "q": self.q}


# ---------------------------------------------------------------------------
# registry / module-level operation wrappers
# ---------------------------------------------------------------------------

FAMILY_NAMES = ("ar", "riemannian_ar", "arch", "garch", "tarch")


def make_family(name: str, p: int | None = None, q: int | None = None,
                L: int | None = None) -> ModelFamily:
    """Build a family from its config name and order parameters."""
    key = name.lower()
    if key == "ar":
        return AR(p if p is not None else 1)
    if key == "riemannian_ar":
        return RiemannianAR(L if L is not None else 50)
    if key == "arch":
        return ARCH(q if q is not None else 1)
    if key == "garch":
        return GARCH(p if p is not None else 1, q if q is not None else 1)
    if key == "tarch":
        return TARCH(q if q is not None else 1)
    raise ConfigurationError(
        f"unknown family: {name!r} (expected one of {FAMILY_NAMES})"
    )


def family_from_dict(spec: dict) -> ModelFamily:
    return make_family(
        spec["family"], p=spec.get("p"), q=spec.get("q"), L=spec.get("L")
    )


def conditional_mean(family: ModelFamily, theta, past) -> float:
    return family.conditional_mean(theta, past)


def conditional_variance(family: ModelFamily, theta, past) -> float:
    return family.conditional_variance(theta, past)


def contraction(family: ModelFamily, theta, r: float = 2.0,
                innovation: InnovationLaw = GAUSSIAN) -> ContractionReport:
    return family.contraction(theta, r=r, innovation=innovation)


def mean_var_derivatives(family: ModelFamily, theta, past,
                         domain: ParamDomain | None = None):
    return family.mean_var_derivatives(theta, past, domain=domain)
