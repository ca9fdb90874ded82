"""Per-segment QMLE fits, segment-cost tables and exact dynamic-programming
minimisation of the penalized contrast over (K, breaks, parameters).

The segment cost is the minimised contrast ``min_theta sum_{s in T} loss_s``;
because each per-observation loss ignores segment boundaries, costs are
additive and the DP over candidate break positions is exact on its grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import backend
from .asymptotics import sandwich_cov, confint
from .errors import ConfigurationError, DegenerateInformationError
from .families import AR, CONTRACTION_LIMIT, ModelFamily, ParamDomain
from .likelihood import SegmentRef, series_array

_BARRIER_MU = 1e-2
_BARRIER_ACTIVATION = CONTRACTION_LIMIT - 0.05
_BARRIER_TMIN = 1e-9
_PENALTY_BASE = 1e10


@dataclass(frozen=True)
class PenaltySchedule:
    """Per-segment penalty beta_n.

    ``sqrt_n`` (default, the robust choice), ``bic`` (log n), ``heavy``
    (n / log n) or ``custom`` with an explicit nonnegative value.
    """

    kind: str = "sqrt_n"
    custom_beta: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("sqrt_n", "bic", "heavy", "custom"):
            raise ConfigurationError(f"unknown penalty kind: {self.kind!r}")
        if self.kind == "custom":
            if self.custom_beta is None or self.custom_beta < 0:
                raise ConfigurationError("custom penalty requires custom_beta >= 0")

    def beta(self, n: int) -> float:
        if self.kind == "sqrt_n":
            return math.sqrt(n)
        if self.kind == "bic":
            return math.log(n)
        if self.kind == "heavy":
            return n / math.log(n)
        return float(self.custom_beta)


@dataclass
class FitResult:
    theta: np.ndarray
    cost: float
    converged: bool


# ---------------------------------------------------------------------------
# box-constrained quasi-Newton fit of one segment
# ---------------------------------------------------------------------------


def _feasibility(family, theta, domain):
    beta0, _ = family.contraction_value_grad(theta, r=domain.r)
    return beta0


def _make_feasible(family, theta, domain):
    """Pull lag coefficients toward zero until the contraction test passes."""
    theta = domain.clip(np.asarray(theta, dtype=float))
    for _ in range(60):
        if _feasibility(family, theta, domain) < _BARRIER_ACTIVATION:
            return theta
        theta = theta * 0.9
        theta = domain.clip(theta)
    return domain.clip(np.zeros(family.d) + domain.box_lower)


def _sample_feasible(family, domain, rng):
    for _ in range(50):
        cand = domain.sample_interior(rng)
        if _feasibility(family, cand, domain) < _BARRIER_ACTIVATION:
            return cand
    return _make_feasible(family, domain.sample_interior(rng), domain)


def _objective(family, x, lo, hi, domain):
    limit = CONTRACTION_LIMIT

    def fun(theta):
        beta0, dbeta0 = family.contraction_value_grad(theta, r=domain.r)
        slack = limit - beta0
        if slack <= _BARRIER_TMIN:
            # infeasible probe: a steep penalty surface pointing back inside
            return _PENALTY_BASE * (1.0 + beta0 - limit), _PENALTY_BASE * dbeta0
        val, grad = family.contrast_grad(theta, x, lo, hi)
        if beta0 > _BARRIER_ACTIVATION:
            val += -_BARRIER_MU * math.log(slack / (limit - _BARRIER_ACTIVATION))
            grad = grad + (_BARRIER_MU / slack) * dbeta0
        return val, grad

    return fun


def _newton_polish(family, x, lo, hi, domain, theta, cost):
    """One projected Newton step; kept only if it lowers the raw contrast."""
    _, grad, hess, _ = family.contrast_derivs(theta, x, lo, hi)
    try:
        step = np.linalg.solve(hess, grad)
    except np.linalg.LinAlgError:
        return theta, cost
    cand = domain.clip(theta - step)
    if _feasibility(family, cand, domain) >= CONTRACTION_LIMIT - _BARRIER_TMIN:
        return theta, cost
    cand_cost = family.contrast(cand, x, lo, hi)
    if np.isfinite(cand_cost) and cand_cost < cost:
        return cand, cand_cost
    return theta, cost


def _fit_core(x, lo, hi, family, domain, warm_start=None, n_restarts=5,
              seed=0, gtol=1e-7, maxiter=500, polish=True) -> FitResult:
    fun = _objective(family, x, lo, hi, domain)
    bounds = list(zip(domain.box_lower, domain.box_upper))
    starts = []
    if warm_start is not None:
        starts.append(_make_feasible(family, warm_start, domain))
    starts.append(_make_feasible(family, family.initial_guess(x, lo, hi, domain), domain))
    if n_restarts > 0:
        rng = np.random.default_rng(np.random.SeedSequence([abs(int(seed)), lo, hi]))
        starts.extend(_sample_feasible(family, domain, rng) for _ in range(n_restarts))

    best_theta, best_cost, best_ok = None, np.inf, False
    for s0 in starts:
        res = minimize(
            fun, s0, jac=True, method="L-BFGS-B", bounds=bounds,
            options={"maxiter": maxiter, "ftol": 1e-14, "gtol": gtol},
        )
        cand = np.asarray(res.x, dtype=float)
        cand_cost = family.contrast(cand, x, lo, hi)
        if np.isfinite(cand_cost) and cand_cost < best_cost:
            best_theta, best_cost, best_ok = cand, cand_cost, bool(res.success)
    if best_theta is None:  # every start failed; report the first iterate
        best_theta, best_cost, best_ok = starts[0], family.contrast(starts[0], x, lo, hi), False
    if polish:
        best_theta, best_cost = _newton_polish(family, x, lo, hi, domain, best_theta, best_cost)
    return FitResult(theta=best_theta, cost=float(best_cost), converged=best_ok)


def fit_segment(seg: SegmentRef, series, family: ModelFamily,
                domain: ParamDomain | None = None, warm_start=None,
                n_restarts: int = 5, seed: int = 0, gtol: float = 1e-7,
                maxiter: int = 500, polish: bool = True) -> FitResult:
    """QMLE of one segment: minimise the segment contrast over the domain box
    (intersected with the contraction region via a log barrier) by L-BFGS-B
    with analytic gradients, from a warm start, a moment-based start and
    ``n_restarts`` random interior starts."""
    x = series_array(series)
    if seg.hi > x.shape[0]:
        raise ConfigurationError("segment extends beyond the sample")
    domain = domain or family.default_domain()
    if seg.length < family.d + 2:
        raise ConfigurationError(
            f"segment of length {seg.length} too short to fit {family.d} parameters"
        )
    return _fit_core(x, seg.lo, seg.hi, family, domain, warm_start=warm_start,
                     n_restarts=n_restarts, seed=seed, gtol=gtol,
                     maxiter=maxiter, polish=polish)


# ---------------------------------------------------------------------------
# segment-cost evaluators
# ---------------------------------------------------------------------------


class _GenericEvaluator:
    """Cost of a cell by the quasi-Newton fit, with warm-start chaining."""

    def __init__(self, x, family, domain, n_restarts=0, seed=0, polish=False):
        self.x = x
        self.family = family
        self.domain = domain
        self.n_restarts = n_restarts
        self.seed = seed
        self.polish = polish

    def cell(self, lo, hi, warm=None):
        fr = _fit_core(self.x, lo, hi, self.family, self.domain, warm_start=warm,
                       n_restarts=self.n_restarts, seed=self.seed, polish=self.polish)
        return fr.cost, fr.theta, fr.converged


class _ARGramEvaluator:
    """Closed-form least-squares cell costs for AR models via prefix Gram
    sums; falls back to the generic fit when the unconstrained solution
    leaves the box or the contraction region."""

    def __init__(self, x, family: AR, domain, n_restarts=0, seed=0):
        self.x = x
        self.family = family
        self.domain = domain
        p = family.p
        n = x.shape[0]
        Z = _ar_lag_matrix(x, p)
        self.Sxx = np.zeros((n + 1, p, p))
        np.cumsum(Z[:, :, None] * Z[:, None, :], axis=0, out=self.Sxx[1:])
        self.Sxy = np.zeros((n + 1, p))
        np.cumsum(Z * x[:, None], axis=0, out=self.Sxy[1:])
        self.Syy = np.zeros(n + 1)
        np.cumsum(x * x, out=self.Syy[1:])
        self.generic = _GenericEvaluator(x, family, domain, n_restarts=n_restarts, seed=seed)

    def cell(self, lo, hi, warm=None):
        G = self.Sxx[hi] - self.Sxx[lo]
        c = self.Sxy[hi] - self.Sxy[lo]
        yy = self.Syy[hi] - self.Syy[lo]
        try:
            phi = np.linalg.solve(G, c)
        except np.linalg.LinAlgError:
            if np.all(np.abs(c) < 1e-12):
                return max(yy, 0.0), np.zeros(self.family.p), True
            return self.generic.cell(lo, hi, warm)
        if (np.all(phi >= self.domain.box_lower) and np.all(phi <= self.domain.box_upper)
                and np.sum(np.abs(phi)) < CONTRACTION_LIMIT):
            return max(float(yy - phi @ c), 0.0), phi, True
        return self.generic.cell(lo, hi, warm)


def _make_evaluator(x, family, domain, n_restarts, seed):
    if isinstance(family, AR):
        return _ARGramEvaluator(x, family, domain, n_restarts=n_restarts, seed=seed)
    return _GenericEvaluator(x, family, domain, n_restarts=n_restarts, seed=seed)


# ---------------------------------------------------------------------------
# cost table
# ---------------------------------------------------------------------------


@dataclass
class SegmentCostTable:
    """Minimised contrasts for every grid-aligned admissible segment."""

    n: int
    min_len: int
    delta: int
    positions: np.ndarray
    cost: np.ndarray
    theta: np.ndarray
    converged: np.ndarray
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._index = {int(p): i for i, p in enumerate(self.positions)}

    def cell(self, lo: int, hi: int):
        i, j = self._index[int(lo)], self._index[int(hi)]
        if not np.isfinite(self.cost[i, j]):
            raise KeyError(f"segment ({lo}, {hi}] not admissible in this table")
        return self.cost[i, j], self.theta[i, j], bool(self.converged[i, j])

    @property
    def n_cells(self) -> int:
        return int(np.isfinite(self.cost).sum())


def grid_positions(n: int, delta: int) -> np.ndarray:
    pos = list(range(0, n + 1, delta))
    if pos[-1] != n:
        pos.append(n)
    return np.asarray(pos, dtype=np.int64)


def build_cost_table(series, family: ModelFamily, domain: ParamDomain | None = None,
                     min_len: int | None = None, delta: int = 1,
                     K_max: int | None = None, n_restarts: int = 0,
                     seed: int = 0, positions: np.ndarray | None = None,
                     warm_starts: bool = True) -> SegmentCostTable:
    """Fill the cost table for all grid-aligned cells with length >= min_len.

    Each row (fixed left endpoint) is processed with increasing right
    endpoint so the previous cell warm-starts the next fit.
    """
    x = series_array(series)
    n = x.shape[0]
    domain = domain or family.default_domain()
    if min_len is None:
        min_len = max(10, 2 * family.d)
    if min_len < family.d + 2:
        raise ConfigurationError("min_len must be at least d + 2")
    if positions is None:
        if delta < 1:
            raise ConfigurationError("delta must be >= 1")
        positions = grid_positions(n, delta)
    positions = np.asarray(positions, dtype=np.int64)
    m = positions.shape[0]

    if isinstance(family, AR):
        Z = _ar_lag_matrix(x, family.p)
        Sxx = np.zeros((n + 1, family.p, family.p))
        np.cumsum(Z[:, :, None] * Z[:, None, :], axis=0, out=Sxx[1:])
        Sxy = np.zeros((n + 1, family.p))
        np.cumsum(Z * x[:, None], axis=0, out=Sxy[1:])
        Syy = np.zeros(n + 1)
        np.cumsum(x * x, out=Syy[1:])
        kern = backend.kernels()
        cost, theta, status = kern.ar_fill_table(
            positions, Sxx, Sxy, Syy, domain.box_lower, domain.box_upper,
            CONTRACTION_LIMIT, min_len,
        )
        converged = status == 1
        refit = np.argwhere(status == 2)
        if refit.size:
            gen = _GenericEvaluator(x, family, domain, n_restarts=max(n_restarts, 1), seed=seed)
            for i, j in refit:
                c, th, ok = gen.cell(int(positions[i]), int(positions[j]))
                cost[i, j] = c
                theta[i, j] = th
                converged[i, j] = ok
        return SegmentCostTable(n=n, min_len=min_len, delta=delta,
                                positions=positions, cost=cost, theta=theta,
                                converged=converged)

    ev = _make_evaluator(x, family, domain, n_restarts, seed)
    cost = np.full((m, m), np.inf)
    theta = np.zeros((m, m, family.d))
    converged = np.zeros((m, m), dtype=bool)
    for i in range(m):
        lo = int(positions[i])
        warm = None
        for j in range(i + 1, m):
            hi = int(positions[j])
            if hi - lo < min_len:
                continue
            c, th, ok = ev.cell(lo, hi, warm if warm_starts else None)
            cost[i, j] = c
            theta[i, j] = th
            converged[i, j] = ok
            warm = th
    return SegmentCostTable(n=n, min_len=min_len, delta=delta,
                            positions=positions, cost=cost, theta=theta,
                            converged=converged)


def _ar_lag_matrix(x, p):
    from ._pykernels import _lag_matrix
    return _lag_matrix(x, p)


# ---------------------------------------------------------------------------
# dynamic program
# ---------------------------------------------------------------------------


@dataclass
class DPResult:
    K_hat: int
    t_hat: np.ndarray
    contrast: float
    penalized: float


def dp_segment(table: SegmentCostTable, K_max: int, penalty: PenaltySchedule,
               k_fixed: int | None = None) -> DPResult:
    """Exact minimiser of (summed cost + beta * K) over grid segmentations.

    Ties are broken toward smaller K, then toward the lexicographically
    smallest break vector.  K values with no feasible segmentation are
    skipped.
    """
    if K_max < 1:
        raise ConfigurationError("K_max must be >= 1")
    beta = penalty.beta(table.n)
    G = backend.kernels().dp_suffix(table.cost, K_max)
    ks = [k_fixed] if k_fixed is not None else range(1, K_max + 1)
    best_k, best_total = None, np.inf
    for k in ks:
        if k < 1 or k > K_max:
            raise ConfigurationError("k_fixed must be within 1..K_max")
        total = G[k, 0] + beta * k
        if np.isfinite(total) and total < best_total:
            best_k, best_total = k, total
    if best_k is None:
        raise ConfigurationError(
            "no feasible segmentation (min_len too large for this K range)"
        )
    # left-to-right reconstruction, choosing the smallest feasible break
    t_hat = []
    i = 0
    m = table.positions.shape[0]
    for k in range(best_k, 1, -1):
        for j in range(i + 1, m):
            val = table.cost[i, j] + G[k - 1, j]
            if np.isfinite(val) and val == G[k, i]:
                t_hat.append(int(table.positions[j]))
                i = j
                break
        else:  # numerical safety net: nearest candidate
            j = int(np.nanargmin(table.cost[i, i + 1:] + G[k - 1, i + 1:])) + i + 1
            t_hat.append(int(table.positions[j]))
            i = j
    return DPResult(
        K_hat=best_k,
        t_hat=np.asarray(t_hat, dtype=np.int64),
        contrast=float(G[best_k, 0]),
        penalized=float(best_total),
    )


# ---------------------------------------------------------------------------
# break refinement on the unit grid
# ---------------------------------------------------------------------------


def _refine_breaks(x, family, domain, t_hat, delta, min_len, seed, n_restarts=0,
                   passes=2):
    """Coordinate-wise scan of each break over a +/-delta window at unit
    step, holding the other breaks fixed; deterministic and monotone in the
    total cost."""
    n = x.shape[0]
    ev = _make_evaluator(x, family, domain, n_restarts, seed)
    bounds = [0] + [int(t) for t in t_hat] + [n]
    for _ in range(passes):
        moved = False
        for j in range(1, len(bounds) - 1):
            left, cur, right = bounds[j - 1], bounds[j], bounds[j + 1]
            lo_t = max(left + min_len, cur - delta)
            hi_t = min(right - min_len, cur + delta)
            if lo_t > hi_t:
                continue
            best_t, best_cost = cur, np.inf
            warm_l = warm_r = None
            for t in range(lo_t, hi_t + 1):
                cl, warm_l, _ = ev.cell(left, t, warm_l)
                cr, warm_r, _ = ev.cell(t, right, warm_r)
                if cl + cr < best_cost:
                    best_t, best_cost = t, cl + cr
            if best_t != cur:
                bounds[j] = best_t
                moved = True
        if not moved:
            break
    return np.asarray(bounds[1:-1], dtype=np.int64)


# ---------------------------------------------------------------------------
# end-to-end detection
# ---------------------------------------------------------------------------


@dataclass
class SegmentFit:
    lo: int
    hi: int
    theta: np.ndarray
    cost: float
    converged: bool
    cov: np.ndarray | None = None
    conf_int: np.ndarray | None = None
    condition_F: float | None = None
    cov_error: str | None = None
    F_hat: np.ndarray | None = None
    G_hat: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "theta": self.theta.tolist(),
            "cost": self.cost,
            "converged": self.converged,
            "cov": None if self.cov is None else self.cov.tolist(),
            "conf_int": None if self.conf_int is None else self.conf_int.tolist(),
            "condition_F": self.condition_F,
            "cov_error": self.cov_error,
        }


@dataclass
class SegmentationResult:
    """Detector output: number of segments, break instants, per-segment
    parameter estimates and covariances, and the contrast values."""

    K_hat: int
    t_hat: np.ndarray
    tau_hat: np.ndarray
    theta_hat: list[np.ndarray]
    contrast: float
    penalized: float
    beta_n: float
    penalty_kind: str
    n: int
    min_len: int
    delta: int
    refined: bool
    segments: list[SegmentFit]

    @property
    def per_segment_cov(self) -> list[np.ndarray | None]:
        return [s.cov for s in self.segments]

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "K_hat": self.K_hat,
            "t_hat": self.t_hat.tolist(),
            "tau_hat": self.tau_hat.tolist(),
            "theta_hat": [t.tolist() for t in self.theta_hat],
            "contrast": self.contrast,
            "penalized": self.penalized,
            "beta_n": self.beta_n,
            "penalty": self.penalty_kind,
            "n": self.n,
            "min_len": self.min_len,
            "grid_delta": self.delta,
            "refined": self.refined,
            "segments": [s.to_dict() for s in self.segments],
        }


def detect(series, family: ModelFamily, domain: ParamDomain | None = None,
           penalty: PenaltySchedule | None = None, K_max: int = 5,
           min_len: int | None = None, delta: int | None = None,
           refine: bool = True, k_fixed: int | None = None,
           n_restarts: int = 5, table_restarts: int = 0, seed: int = 0,
           with_cov: bool = True, level: float = 0.95) -> SegmentationResult:
    """Full pipeline: cost table -> DP -> refinement -> per-segment QMLE
    refits and sandwich covariances."""
    x = series_array(series)
    n = x.shape[0]
    domain = domain or family.default_domain()
    penalty = penalty or PenaltySchedule()
    if min_len is None:
        min_len = max(10, 2 * family.d)
    if delta is None:
        delta = 1 if n <= 2000 else math.ceil(n / 2000)
    if n < (k_fixed or 1) * min_len:
        raise ConfigurationError("sample too short for the requested segmentation")

    table = build_cost_table(x, family, domain=domain, min_len=min_len,
                             delta=delta, K_max=K_max, n_restarts=table_restarts,
                             seed=seed)
    dp = dp_segment(table, K_max, penalty, k_fixed=k_fixed)
    t_hat = dp.t_hat
    did_refine = False
    if refine and delta > 1 and dp.K_hat > 1:
        t_hat = _refine_breaks(x, family, domain, t_hat, delta, min_len, seed,
                               n_restarts=table_restarts)
        did_refine = True

    bounds = [0] + [int(t) for t in t_hat] + [n]
    segments = []
    theta_hat = []
    contrast = 0.0
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        fr = _fit_core(x, lo, hi, family, domain, warm_start=None,
                       n_restarts=n_restarts, seed=seed, polish=True)
        seg = SegmentFit(lo=lo, hi=hi, theta=fr.theta, cost=fr.cost,
                         converged=fr.converged)
        if with_cov:
            try:
                est = sandwich_cov(SegmentRef(lo, hi), fr.theta, x, family)
                seg.cov = est.cov
                seg.F_hat = est.F_hat
                seg.G_hat = est.G_hat
                seg.condition_F = est.condition_F
                seg.conf_int = confint(est, fr.theta, level=level)
            except DegenerateInformationError as exc:
                seg.cov_error = str(exc)
        segments.append(seg)
        theta_hat.append(fr.theta)
        contrast += fr.cost

    beta = penalty.beta(n)
    return SegmentationResult(
        K_hat=len(segments),
        t_hat=np.asarray(t_hat, dtype=np.int64),
        tau_hat=np.asarray(t_hat, dtype=float) / n,
        theta_hat=theta_hat,
        contrast=float(contrast),
        penalized=float(contrast + beta * len(segments)),
        beta_n=float(beta),
        penalty_kind=penalty.kind,
        n=n,
        min_len=min_len,
        delta=delta,
        refined=did_refine,
        segments=segments,
    )
