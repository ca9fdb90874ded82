"""Pure-Python (numpy) implementations of the hot numerical kernels.

These are the reference implementations; ``_ckernels.pyx`` mirrors them with
identical semantics.  Conventions shared by every kernel:

* ``x`` holds the observations X_1..X_n at indices 0..n-1.
* A segment ``(lo, hi)`` covers observation indices lo..hi-1.
* Values before the start of the sample are treated as zero (the truncated,
  computable form of each conditional moment).
* Derivative sums return ``(value, grad, hess, outer)`` where ``value`` is
  the summed per-observation loss ``(x_s - f_s)^2 / h_s + log h_s``,
  ``grad``/``hess`` are derivatives of that sum and ``outer`` is the sum of
  per-observation gradient outer products.  ``want`` selects how much is
  computed: 0 value only, 1 adds grad, 2 adds hess and outer.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

BACKEND_NAME = "python"


def _lag_matrix(x: np.ndarray, lags: int) -> np.ndarray:
    """Return the (n, lags) matrix Z with Z[i, k-1] = x[i-k], zero-padded."""
    n = x.shape[0]
    xpad = np.concatenate([np.zeros(lags), x])
    return sliding_window_view(xpad, lags)[:n, ::-1]


# ---------------------------------------------------------------------------
# linear-mean families (constant unit variance)
# ---------------------------------------------------------------------------


def linmean_fitted(c: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Conditional means f_i = sum_k c_k x_{i-k} with zero padding."""
    n = x.shape[0]
    f = np.zeros(n)
    for k in range(1, min(c.shape[0], n) + 1):
        f[k:] += c[k - 1] * x[:n - k]
    return f


def linmean_qhat(c: np.ndarray, x: np.ndarray) -> np.ndarray:
    e = x - linmean_fitted(c, x)
    return e * e


def linmean_sums(c, x, lo, hi, want):
    e = (x - linmean_fitted(c, x))[lo:hi]
    val = float(e @ e)
    if want == 0:
        return val, None, None, None
    Z = _lag_matrix(x, c.shape[0])[lo:hi]
    gc = -2.0 * (Z.T @ e)
    if want == 1:
        return val, gc, None, None
    gram = Z.T @ Z
    wgram = (Z * (e * e)[:, None]).T @ Z
    return val, gc, gram, wgram


def linmean_simulate(coefs: np.ndarray, ends: np.ndarray, eps: np.ndarray) -> np.ndarray:
    total = eps.shape[0]
    L = coefs.shape[1]
    x = np.zeros(total)
    start = 0
    for j in range(ends.shape[0]):
        cj = coefs[j]
        for t in range(start, int(ends[j])):
            acc = eps[t]
            kmax = min(L, t)
            for k in range(1, kmax + 1):
                acc += cj[k - 1] * x[t - k]
            x[t] = acc
        start = int(ends[j])
    return x


# ---------------------------------------------------------------------------
# ARCH(q)
# ---------------------------------------------------------------------------


def arch_h(psi: np.ndarray, x: np.ndarray) -> np.ndarray:
    q = psi.shape[0] - 1
    Z2 = _lag_matrix(x * x, q) if q > 0 else np.zeros((x.shape[0], 0))
    return psi[0] + (Z2 @ psi[1:] if q > 0 else 0.0)


def arch_qhat(psi: np.ndarray, x: np.ndarray) -> np.ndarray:
    h = arch_h(psi, x)
    return x * x / h + np.log(h)


def arch_sums(psi, x, lo, hi, want):
    q = psi.shape[0] - 1
    x2 = x * x
    Z2 = _lag_matrix(x2, q)[lo:hi] if q > 0 else np.zeros((hi - lo, 0))
    h = psi[0] + (Z2 @ psi[1:] if q > 0 else 0.0)
    x2s = x2[lo:hi]
    val = float(np.sum(x2s / h + np.log(h)))
    if want == 0:
        return val, None, None, None
    D = np.concatenate([np.ones((hi - lo, 1)), Z2], axis=1)
    w = 1.0 / h - x2s / (h * h)
    g = D.T @ w
    if want == 1:
        return val, g, None, None
    c2 = 2.0 * x2s / (h ** 3) - 1.0 / (h * h)
    hess = (D * c2[:, None]).T @ D
    outer = (D * (w * w)[:, None]).T @ D
    return val, g, hess, outer


def arch_simulate(psis: np.ndarray, ends: np.ndarray, eps: np.ndarray) -> np.ndarray:
    total = eps.shape[0]
    q = psis.shape[1] - 1
    x = np.zeros(total)
    start = 0
    for j in range(ends.shape[0]):
        pj = psis[j]
        for t in range(start, int(ends[j])):
            h = pj[0]
            for k in range(1, min(q, t) + 1):
                h += pj[k] * x[t - k] * x[t - k]
            x[t] = np.sqrt(h) * eps[t]
        start = int(ends[j])
    return x


# ---------------------------------------------------------------------------
# GARCH(p, q); theta = (a_0, a_1..a_q, b_1..b_p)
# ---------------------------------------------------------------------------


def _garch_presample(theta: np.ndarray, p: int, q: int) -> float:
    bsum = float(np.sum(theta[1 + q:]))
    return float(theta[0]) / (1.0 - bsum)


def garch_sig2(theta: np.ndarray, x: np.ndarray, p: int, q: int, m: int) -> np.ndarray:
    """Conditional variances of observations 0..m-1 under the zero-padded
    convention, with pre-sample variance pinned at a0 / (1 - sum b)."""
    a0 = theta[0]
    a = theta[1:1 + q]
    b = theta[1 + q:]
    psi0 = _garch_presample(theta, p, q)
    sig2 = np.empty(m)
    for i in range(m):
        s = a0
        for k in range(1, q + 1):
            if i - k >= 0:
                s += a[k - 1] * x[i - k] * x[i - k]
        for j in range(1, p + 1):
            s += b[j - 1] * (sig2[i - j] if i - j >= 0 else psi0)
        sig2[i] = s
    return sig2


def garch_qhat(theta: np.ndarray, x: np.ndarray, p: int, q: int) -> np.ndarray:
    sig2 = garch_sig2(theta, x, p, q, x.shape[0])
    return x * x / sig2 + np.log(sig2)


def garch_sums(theta, x, p, q, lo, hi, want):
    d = 1 + q + p
    a0 = theta[0]
    a = theta[1:1 + q]
    b = theta[1 + q:]
    bsum = float(np.sum(b))
    fac = 1.0 / (1.0 - bsum)
    psi0 = a0 * fac

    dpsi0 = np.zeros(d)
    dpsi0[0] = fac
    dpsi0[1 + q:] = a0 * fac * fac
    d2psi0 = np.zeros((d, d))
    if want >= 2:
        for j in range(p):
            d2psi0[0, 1 + q + j] = fac * fac
            d2psi0[1 + q + j, 0] = fac * fac
            for i in range(p):
                d2psi0[1 + q + i, 1 + q + j] += 2.0 * a0 * fac ** 3

    # rolling histories of the last p variance states and their derivatives
    sig_hist = [psi0] * p
    dsig_hist = [dpsi0.copy() for _ in range(p)]
    d2sig_hist = [d2psi0.copy() for _ in range(p)]

    val = 0.0
    g = np.zeros(d)
    hess = np.zeros((d, d))
    outer = np.zeros((d, d))

    for i in range(hi):
        s = a0
        ds = np.zeros(d)
        ds[0] = 1.0
        d2s = np.zeros((d, d)) if want >= 2 else None
        for k in range(1, q + 1):
            if i - k >= 0:
                xk2 = x[i - k] * x[i - k]
                s += a[k - 1] * xk2
                ds[k] += xk2
        for j in range(1, p + 1):
            sj = sig_hist[-j]
            dsj = dsig_hist[-j]
            s += b[j - 1] * sj
            ds += b[j - 1] * dsj
            ds[q + j] += sj
            if want >= 2:
                d2s += b[j - 1] * d2sig_hist[-j]
                d2s[q + j, :] += dsj
                d2s[:, q + j] += dsj
        if i >= lo:
            xi2 = x[i] * x[i]
            val += xi2 / s + np.log(s)
            if want >= 1:
                w = 1.0 / s - xi2 / (s * s)
                g += w * ds
                if want >= 2:
                    c2 = 2.0 * xi2 / s ** 3 - 1.0 / (s * s)
                    hess += c2 * np.outer(ds, ds) + w * d2s
                    outer += (w * w) * np.outer(ds, ds)
        if p > 0:
            sig_hist.pop(0)
            sig_hist.append(s)
            dsig_hist.pop(0)
            dsig_hist.append(ds)
            if want >= 2:
                d2sig_hist.pop(0)
                d2sig_hist.append(d2s)

    if want == 0:
        return val, None, None, None
    if want == 1:
        return val, g, None, None
    return val, g, hess, outer


def garch_simulate(a_coefs: np.ndarray, b_coefs: np.ndarray,
                   ends: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """Piecewise GARCH path: within each regime the conditional variance is
    the regime's ARCH(inf) functional of the whole past path, realised by
    rerunning the variance recursion from the axis origin."""
    total = eps.shape[0]
    q = a_coefs.shape[1] - 1
    p = b_coefs.shape[1]
    x = np.zeros(total)
    start = 0
    for j in range(ends.shape[0]):
        aj = a_coefs[j]
        bj = b_coefs[j]
        theta_j = np.concatenate([aj, bj])
        psi0 = _garch_presample(theta_j, p, q)
        end = int(ends[j])
        sig2 = np.empty(end)
        for t in range(end):
            s = aj[0]
            for k in range(1, q + 1):
                if t - k >= 0:
                    s += aj[k] * x[t - k] * x[t - k]
            for m in range(1, p + 1):
                s += bj[m - 1] * (sig2[t - m] if t - m >= 0 else psi0)
            sig2[t] = s
            if t >= start:
                x[t] = np.sqrt(s) * eps[t]
        start = end
    return x


# ---------------------------------------------------------------------------
# TARCH(q); theta = (b_0, b_1^+ .. b_q^+, b_1^- .. b_q^-)
# ---------------------------------------------------------------------------


def _tarch_regressors(x: np.ndarray, q: int, lo: int, hi: int) -> np.ndarray:
    Z = _lag_matrix(x, q)[lo:hi]
    U = np.empty((hi - lo, 1 + 2 * q))
    U[:, 0] = 1.0
    U[:, 1:1 + q] = np.maximum(Z, 0.0)
    U[:, 1 + q:] = -np.minimum(Z, 0.0)
    return U


def tarch_sigma(th: np.ndarray, x: np.ndarray, q: int) -> np.ndarray:
    U = _tarch_regressors(x, q, 0, x.shape[0])
    return U @ th


def tarch_qhat(th: np.ndarray, x: np.ndarray, q: int) -> np.ndarray:
    sig = tarch_sigma(th, x, q)
    h = sig * sig
    return x * x / h + np.log(h)


def tarch_sums(th, x, q, lo, hi, want):
    U = _tarch_regressors(x, q, lo, hi)
    sig = U @ th
    h = sig * sig
    x2s = (x * x)[lo:hi]
    val = float(np.sum(x2s / h + np.log(h)))
    if want == 0:
        return val, None, None, None
    w = 1.0 / h - x2s / (h * h)
    D = U * (2.0 * sig)[:, None]
    g = D.T @ w
    if want == 1:
        return val, g, None, None
    c2 = 2.0 * x2s / (h ** 3) - 1.0 / (h * h)
    hess = (D * c2[:, None]).T @ D + (U * (2.0 * w)[:, None]).T @ U
    outer = (D * (w * w)[:, None]).T @ D
    return val, g, hess, outer


def tarch_simulate(ths: np.ndarray, ends: np.ndarray, eps: np.ndarray) -> np.ndarray:
    total = eps.shape[0]
    q = (ths.shape[1] - 1) // 2
    x = np.zeros(total)
    start = 0
    for j in range(ends.shape[0]):
        tj = ths[j]
        for t in range(start, int(ends[j])):
            sig = tj[0]
            for k in range(1, min(q, t) + 1):
                xv = x[t - k]
                if xv > 0.0:
                    sig += tj[k] * xv
                elif xv < 0.0:
                    sig -= tj[q + k] * xv
            x[t] = sig * eps[t]
        start = int(ends[j])
    return x


# ---------------------------------------------------------------------------
# least-squares segment-cost table for linear AR models
# ---------------------------------------------------------------------------

STATUS_SKIP = 0
STATUS_OK = 1
STATUS_REFIT = 2


def ar_fill_table(pos, Sxx, Sxy, Syy, lb, ub, beta_limit, min_len):
    """Closed-form minimised residual sums for every admissible cell.

    Cells whose least-squares solution leaves the box or the contraction
    region are marked ``STATUS_REFIT`` for the generic optimiser.  All
    admissible cells are solved in one batched call.
    """
    m = pos.shape[0]
    p = Sxy.shape[1]
    cost = np.full((m, m), np.inf)
    theta = np.zeros((m, m, p))
    status = np.zeros((m, m), dtype=np.int8)

    ii, jj = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    adm = (pos[jj] - pos[ii]) >= min_len
    adm &= jj > ii
    I, J = np.nonzero(adm)
    if I.size == 0:
        return cost, theta, status
    a, b = pos[I], pos[J]
    G = Sxx[b] - Sxx[a]
    c = Sxy[b] - Sxy[a]
    yy = Syy[b] - Syy[a]

    dets = np.linalg.det(G)
    solvable = np.abs(dets) > 1e-300
    phi = np.zeros((I.size, p))
    if np.any(solvable):
        phi[solvable] = np.linalg.solve(G[solvable], c[solvable][..., None])[..., 0]
    ok = (
        solvable
        & np.all(phi >= lb, axis=1)
        & np.all(phi <= ub, axis=1)
        & (np.sum(np.abs(phi), axis=1) < beta_limit)
    )
    rss = np.maximum(yy - np.einsum("ij,ij->i", phi, c), 0.0)
    zero_target = ~solvable & np.all(np.abs(c) < 1e-12, axis=1)

    cost[I[ok], J[ok]] = rss[ok]
    theta[I[ok], J[ok]] = phi[ok]
    status[I[ok], J[ok]] = STATUS_OK
    cost[I[zero_target], J[zero_target]] = np.maximum(yy[zero_target], 0.0)
    status[I[zero_target], J[zero_target]] = STATUS_OK
    refit = ~ok & ~zero_target
    status[I[refit], J[refit]] = STATUS_REFIT
    return cost, theta, status


def dp_suffix(cost: np.ndarray, k_max: int) -> np.ndarray:
    """G[k, i] = minimal cost of covering (pos_i, pos_last] with exactly k
    segments; inf where infeasible."""
    m = cost.shape[0]
    G = np.full((k_max + 1, m), np.inf)
    G[0, m - 1] = 0.0
    for k in range(1, k_max + 1):
        for i in range(m - 2, -1, -1):
            cand = cost[i, i + 1:] + G[k - 1, i + 1:]
            best = np.min(cand) if cand.size else np.inf
            G[k, i] = best
    return G
