# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementations of the hot numerical kernels.

Mirrors ``_pykernels`` exactly; see that module for the conventions.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, log, sqrt, fabs

cnp.import_array()

BACKEND_NAME = "c"

STATUS_SKIP = 0
STATUS_OK = 1
STATUS_REFIT = 2


# ---------------------------------------------------------------------------
# linear-mean families
# ---------------------------------------------------------------------------


def linmean_fitted(double[::1] c, double[::1] x):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t L = c.shape[0]
    cdef cnp.ndarray[double, ndim=1] f_arr = np.zeros(n)
    cdef double[::1] f = f_arr
    cdef Py_ssize_t i, k, kmax
    cdef double acc
    for i in range(n):
        acc = 0.0
        kmax = L if L < i else i
        for k in range(1, kmax + 1):
            acc += c[k - 1] * x[i - k]
        f[i] = acc
    return f_arr


def linmean_qhat(double[::1] c, double[::1] x):
    cdef cnp.ndarray[double, ndim=1] f_arr = linmean_fitted(c, x)
    cdef double[::1] f = f_arr
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[double, ndim=1] q_arr = np.empty(n)
    cdef double[::1] q = q_arr
    cdef Py_ssize_t i
    cdef double e
    for i in range(n):
        e = x[i] - f[i]
        q[i] = e * e
    return q_arr


def linmean_sums(double[::1] c, double[::1] x, Py_ssize_t lo, Py_ssize_t hi, int want):
    cdef Py_ssize_t L = c.shape[0]
    cdef Py_ssize_t i, k, l, kmax
    cdef double e, acc, zk
    cdef double val = 0.0
    cdef cnp.ndarray[double, ndim=1] gc_arr = None
    cdef cnp.ndarray[double, ndim=2] gram_arr = None
    cdef cnp.ndarray[double, ndim=2] wgram_arr = None
    cdef double[::1] gc = None
    cdef double[:, ::1] gram = None
    cdef double[:, ::1] wgram = None
    if want >= 1:
        gc_arr = np.zeros(L)
        gc = gc_arr
    if want >= 2:
        gram_arr = np.zeros((L, L))
        gram = gram_arr
        wgram_arr = np.zeros((L, L))
        wgram = wgram_arr
    for i in range(lo, hi):
        acc = 0.0
        kmax = L if L < i else i
        for k in range(1, kmax + 1):
            acc += c[k - 1] * x[i - k]
        e = x[i] - acc
        val += e * e
        if want >= 1:
            for k in range(1, kmax + 1):
                gc[k - 1] += -2.0 * e * x[i - k]
            if want >= 2:
                for k in range(1, kmax + 1):
                    zk = x[i - k]
                    for l in range(1, kmax + 1):
                        gram[k - 1, l - 1] += zk * x[i - l]
                        wgram[k - 1, l - 1] += e * e * zk * x[i - l]
    if want == 0:
        return val, None, None, None
    if want == 1:
        return val, gc_arr, None, None
    return val, gc_arr, gram_arr, wgram_arr


def linmean_simulate(double[:, ::1] coefs, long long[::1] ends, double[::1] eps):
    cdef Py_ssize_t total = eps.shape[0]
    cdef Py_ssize_t L = coefs.shape[1]
    cdef cnp.ndarray[double, ndim=1] x_arr = np.zeros(total)
    cdef double[::1] x = x_arr
    cdef Py_ssize_t j, t, k, kmax, start = 0
    cdef double acc
    for j in range(ends.shape[0]):
        for t in range(start, <Py_ssize_t> ends[j]):
            acc = eps[t]
            kmax = L if L < t else t
            for k in range(1, kmax + 1):
                acc += coefs[j, k - 1] * x[t - k]
            x[t] = acc
        start = <Py_ssize_t> ends[j]
    return x_arr


# ---------------------------------------------------------------------------
# ARCH(q)
# ---------------------------------------------------------------------------


def arch_qhat(double[::1] psi, double[::1] x):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t q = psi.shape[0] - 1
    cdef cnp.ndarray[double, ndim=1] out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, k, kmax
    cdef double h
    for i in range(n):
        h = psi[0]
        kmax = q if q < i else i
        for k in range(1, kmax + 1):
            h += psi[k] * x[i - k] * x[i - k]
        out[i] = x[i] * x[i] / h + log(h)
    return out_arr


def arch_sums(double[::1] psi, double[::1] x, Py_ssize_t lo, Py_ssize_t hi, int want):
    cdef Py_ssize_t q = psi.shape[0] - 1
    cdef Py_ssize_t d = q + 1
    cdef Py_ssize_t i, k, l, kmax
    cdef double h, w, c2, xi2, dk, dl
    cdef double val = 0.0
    cdef cnp.ndarray[double, ndim=1] g_arr = None
    cdef cnp.ndarray[double, ndim=2] hess_arr = None
    cdef cnp.ndarray[double, ndim=2] outer_arr = None
    cdef double[::1] g = None
    cdef double[:, ::1] hess = None
    cdef double[:, ::1] outer = None
    cdef cnp.ndarray[double, ndim=1] dh_arr = np.empty(d)
    cdef double[::1] dh = dh_arr
    if want >= 1:
        g_arr = np.zeros(d)
        g = g_arr
    if want >= 2:
        hess_arr = np.zeros((d, d))
        hess = hess_arr
        outer_arr = np.zeros((d, d))
        outer = outer_arr
    for i in range(lo, hi):
        h = psi[0]
        kmax = q if q < i else i
        dh[0] = 1.0
        for k in range(1, d):
            dh[k] = 0.0
        for k in range(1, kmax + 1):
            dh[k] = x[i - k] * x[i - k]
            h += psi[k] * dh[k]
        xi2 = x[i] * x[i]
        val += xi2 / h + log(h)
        if want >= 1:
            w = 1.0 / h - xi2 / (h * h)
            for k in range(d):
                g[k] += w * dh[k]
            if want >= 2:
                c2 = 2.0 * xi2 / (h * h * h) - 1.0 / (h * h)
                for k in range(d):
                    dk = dh[k]
                    for l in range(d):
                        dl = dh[l]
                        hess[k, l] += c2 * dk * dl
                        outer[k, l] += w * w * dk * dl
    if want == 0:
        return val, None, None, None
    if want == 1:
        return val, g_arr, None, None
    return val, g_arr, hess_arr, outer_arr


def arch_simulate(double[:, ::1] psis, long long[::1] ends, double[::1] eps):
    cdef Py_ssize_t total = eps.shape[0]
    cdef Py_ssize_t q = psis.shape[1] - 1
    cdef cnp.ndarray[double, ndim=1] x_arr = np.zeros(total)
    cdef double[::1] x = x_arr
    cdef Py_ssize_t j, t, k, kmax, start = 0
    cdef double h
    for j in range(ends.shape[0]):
        for t in range(start, <Py_ssize_t> ends[j]):
            h = psis[j, 0]
            kmax = q if q < t else t
            for k in range(1, kmax + 1):
                h += psis[j, k] * x[t - k] * x[t - k]
            x[t] = sqrt(h) * eps[t]
        start = <Py_ssize_t> ends[j]
    return x_arr


# ---------------------------------------------------------------------------
# GARCH(p, q)
# ---------------------------------------------------------------------------


def garch_sig2(double[::1] theta, double[::1] x, Py_ssize_t p, Py_ssize_t q, Py_ssize_t m):
    cdef double a0 = theta[0]
    cdef double bsum = 0.0
    cdef Py_ssize_t i, k, j
    for j in range(p):
        bsum += theta[1 + q + j]
    cdef double psi0 = a0 / (1.0 - bsum)
    cdef cnp.ndarray[double, ndim=1] sig2_arr = np.empty(m)
    cdef double[::1] sig2 = sig2_arr
    cdef double s
    for i in range(m):
        s = a0
        for k in range(1, q + 1):
            if i - k >= 0:
                s += theta[k] * x[i - k] * x[i - k]
        for j in range(1, p + 1):
            s += theta[q + j] * (sig2[i - j] if i - j >= 0 else psi0)
        sig2[i] = s
    return sig2_arr


def garch_qhat(double[::1] theta, double[::1] x, Py_ssize_t p, Py_ssize_t q):
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[double, ndim=1] sig2_arr = garch_sig2(theta, x, p, q, n)
    cdef double[::1] sig2 = sig2_arr
    cdef cnp.ndarray[double, ndim=1] out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = x[i] * x[i] / sig2[i] + log(sig2[i])
    return out_arr


def garch_sums(double[::1] theta, double[::1] x, Py_ssize_t p, Py_ssize_t q,
               Py_ssize_t lo, Py_ssize_t hi, int want):
    cdef Py_ssize_t d = 1 + q + p
    cdef double a0 = theta[0]
    cdef double bsum = 0.0
    cdef Py_ssize_t i, j, k, l, idx
    for j in range(p):
        bsum += theta[1 + q + j]
    cdef double fac = 1.0 / (1.0 - bsum)
    cdef double psi0 = a0 * fac

    # rolling histories: slot (i % p) holds the state p steps back once full
    cdef cnp.ndarray[double, ndim=1] sig_hist_arr = np.full(p, psi0)
    cdef double[::1] sig_hist = sig_hist_arr
    cdef cnp.ndarray[double, ndim=2] dsig_hist_arr = np.zeros((p, d))
    cdef double[:, ::1] dsig_hist = dsig_hist_arr
    cdef cnp.ndarray[double, ndim=3] d2sig_hist_arr = None
    cdef double[:, :, ::1] d2sig_hist = None

    cdef Py_ssize_t hp
    for hp in range(p):
        dsig_hist[hp, 0] = fac
        for j in range(p):
            dsig_hist[hp, 1 + q + j] = a0 * fac * fac
    if want >= 2:
        d2sig_hist_arr = np.zeros((p, d, d))
        d2sig_hist = d2sig_hist_arr
        for hp in range(p):
            for j in range(p):
                d2sig_hist[hp, 0, 1 + q + j] = fac * fac
                d2sig_hist[hp, 1 + q + j, 0] = fac * fac
                for k in range(p):
                    d2sig_hist[hp, 1 + q + k, 1 + q + j] += 2.0 * a0 * fac * fac * fac

    cdef double val = 0.0
    cdef cnp.ndarray[double, ndim=1] g_arr = None
    cdef cnp.ndarray[double, ndim=2] hess_arr = None
    cdef cnp.ndarray[double, ndim=2] outer_arr = None
    cdef double[::1] g = None
    cdef double[:, ::1] hess = None
    cdef double[:, ::1] outer = None
    if want >= 1:
        g_arr = np.zeros(d)
        g = g_arr
    if want >= 2:
        hess_arr = np.zeros((d, d))
        hess = hess_arr
        outer_arr = np.zeros((d, d))
        outer = outer_arr

    cdef cnp.ndarray[double, ndim=1] ds_arr = np.zeros(d)
    cdef double[::1] ds = ds_arr
    cdef cnp.ndarray[double, ndim=2] d2s_arr = np.zeros((d, d))
    cdef double[:, ::1] d2s = d2s_arr

    cdef double s, xk2, xi2, w, c2, bj, sj
    cdef Py_ssize_t slot, jslot

    for i in range(hi):
        s = a0
        ds[0] = 1.0
        for k in range(1, d):
            ds[k] = 0.0
        if want >= 2:
            for k in range(d):
                for l in range(d):
                    d2s[k, l] = 0.0
        for k in range(1, q + 1):
            if i - k >= 0:
                xk2 = x[i - k] * x[i - k]
                s += theta[k] * xk2
                ds[k] += xk2
        for j in range(1, p + 1):
            jslot = (i - j) % p if i - j >= 0 else -1
            if jslot >= 0:
                sj = sig_hist[jslot]
            else:
                sj = psi0
            bj = theta[q + j]
            s += bj * sj
            if jslot >= 0:
                for k in range(d):
                    ds[k] += bj * dsig_hist[jslot, k]
                ds[q + j] += sj
                if want >= 2:
                    for k in range(d):
                        for l in range(d):
                            d2s[k, l] += bj * d2sig_hist[jslot, k, l]
                    for k in range(d):
                        d2s[q + j, k] += dsig_hist[jslot, k]
                        d2s[k, q + j] += dsig_hist[jslot, k]
            else:
                for k in range(d):
                    ds[k] += bj * (fac if k == 0 else (a0 * fac * fac if k >= 1 + q else 0.0))
                ds[q + j] += sj
                if want >= 2:
                    for k in range(p):
                        d2s[0, 1 + q + k] += bj * fac * fac
                        d2s[1 + q + k, 0] += bj * fac * fac
                        for l in range(p):
                            d2s[1 + q + k, 1 + q + l] += bj * 2.0 * a0 * fac * fac * fac
                    for k in range(d):
                        d2s[q + j, k] += fac if k == 0 else (a0 * fac * fac if k >= 1 + q else 0.0)
                        d2s[k, q + j] += fac if k == 0 else (a0 * fac * fac if k >= 1 + q else 0.0)
        if i >= lo:
            xi2 = x[i] * x[i]
            val += xi2 / s + log(s)
            if want >= 1:
                w = 1.0 / s - xi2 / (s * s)
                for k in range(d):
                    g[k] += w * ds[k]
                if want >= 2:
                    c2 = 2.0 * xi2 / (s * s * s) - 1.0 / (s * s)
                    for k in range(d):
                        for l in range(d):
                            hess[k, l] += c2 * ds[k] * ds[l] + w * d2s[k, l]
                            outer[k, l] += w * w * ds[k] * ds[l]
        if p > 0:
            slot = i % p
            sig_hist[slot] = s
            for k in range(d):
                dsig_hist[slot, k] = ds[k]
            if want >= 2:
                for k in range(d):
                    for l in range(d):
                        d2sig_hist[slot, k, l] = d2s[k, l]
    if want == 0:
        return val, None, None, None
    if want == 1:
        return val, g_arr, None, None
    return val, g_arr, hess_arr, outer_arr


def garch_simulate(double[:, ::1] a_coefs, double[:, ::1] b_coefs,
                   long long[::1] ends, double[::1] eps):
    cdef Py_ssize_t total = eps.shape[0]
    cdef Py_ssize_t q = a_coefs.shape[1] - 1
    cdef Py_ssize_t p = b_coefs.shape[1]
    cdef cnp.ndarray[double, ndim=1] x_arr = np.zeros(total)
    cdef double[::1] x = x_arr
    cdef cnp.ndarray[double, ndim=1] sig2_arr = np.empty(total)
    cdef double[::1] sig2 = sig2_arr
    cdef Py_ssize_t j, t, k, m, start = 0, end
    cdef double s, bsum, psi0
    for j in range(ends.shape[0]):
        bsum = 0.0
        for k in range(p):
            bsum += b_coefs[j, k]
        psi0 = a_coefs[j, 0] / (1.0 - bsum)
        end = <Py_ssize_t> ends[j]
        for t in range(end):
            s = a_coefs[j, 0]
            for k in range(1, q + 1):
                if t - k >= 0:
                    s += a_coefs[j, k] * x[t - k] * x[t - k]
            for m in range(1, p + 1):
                s += b_coefs[j, m - 1] * (sig2[t - m] if t - m >= 0 else psi0)
            sig2[t] = s
            if t >= start:
                x[t] = sqrt(s) * eps[t]
        start = end
    return x_arr


# ---------------------------------------------------------------------------
# TARCH(q)
# ---------------------------------------------------------------------------


def tarch_sigma(double[::1] th, double[::1] x, Py_ssize_t q):
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[double, ndim=1] out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, k, kmax
    cdef double sig, xv
    for i in range(n):
        sig = th[0]
        kmax = q if q < i else i
        for k in range(1, kmax + 1):
            xv = x[i - k]
            if xv > 0.0:
                sig += th[k] * xv
            elif xv < 0.0:
                sig -= th[q + k] * xv
        out[i] = sig
    return out_arr


def tarch_qhat(double[::1] th, double[::1] x, Py_ssize_t q):
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[double, ndim=1] sig_arr = tarch_sigma(th, x, q)
    cdef double[::1] sig = sig_arr
    cdef cnp.ndarray[double, ndim=1] out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double h
    for i in range(n):
        h = sig[i] * sig[i]
        out[i] = x[i] * x[i] / h + log(h)
    return out_arr


def tarch_sums(double[::1] th, double[::1] x, Py_ssize_t q,
               Py_ssize_t lo, Py_ssize_t hi, int want):
    cdef Py_ssize_t d = 1 + 2 * q
    cdef Py_ssize_t i, k, l, kmax
    cdef double sig, h, xv, w, c2, xi2
    cdef double val = 0.0
    cdef cnp.ndarray[double, ndim=1] u_arr = np.empty(d)
    cdef double[::1] u = u_arr
    cdef cnp.ndarray[double, ndim=1] g_arr = None
    cdef cnp.ndarray[double, ndim=2] hess_arr = None
    cdef cnp.ndarray[double, ndim=2] outer_arr = None
    cdef double[::1] g = None
    cdef double[:, ::1] hess = None
    cdef double[:, ::1] outer = None
    if want >= 1:
        g_arr = np.zeros(d)
        g = g_arr
    if want >= 2:
        hess_arr = np.zeros((d, d))
        hess = hess_arr
        outer_arr = np.zeros((d, d))
        outer = outer_arr
    for i in range(lo, hi):
        sig = th[0]
        u[0] = 1.0
        for k in range(1, d):
            u[k] = 0.0
        kmax = q if q < i else i
        for k in range(1, kmax + 1):
            xv = x[i - k]
            if xv > 0.0:
                u[k] = xv
                sig += th[k] * xv
            elif xv < 0.0:
                u[q + k] = -xv
                sig -= th[q + k] * xv
        h = sig * sig
        xi2 = x[i] * x[i]
        val += xi2 / h + log(h)
        if want >= 1:
            w = 1.0 / h - xi2 / (h * h)
            for k in range(d):
                g[k] += w * 2.0 * sig * u[k]
            if want >= 2:
                c2 = 2.0 * xi2 / (h * h * h) - 1.0 / (h * h)
                for k in range(d):
                    for l in range(d):
                        hess[k, l] += (c2 * 4.0 * sig * sig + 2.0 * w) * u[k] * u[l]
                        outer[k, l] += w * w * 4.0 * sig * sig * u[k] * u[l]
    if want == 0:
        return val, None, None, None
    if want == 1:
        return val, g_arr, None, None
    return val, g_arr, hess_arr, outer_arr


def tarch_simulate(double[:, ::1] ths, long long[::1] ends, double[::1] eps):
    cdef Py_ssize_t total = eps.shape[0]
    cdef Py_ssize_t q = (ths.shape[1] - 1) // 2
    cdef cnp.ndarray[double, ndim=1] x_arr = np.zeros(total)
    cdef double[::1] x = x_arr
    cdef Py_ssize_t j, t, k, kmax, start = 0
    cdef double sig, xv
    for j in range(ends.shape[0]):
        for t in range(start, <Py_ssize_t> ends[j]):
            sig = ths[j, 0]
            kmax = q if q < t else t
            for k in range(1, kmax + 1):
                xv = x[t - k]
                if xv > 0.0:
                    sig += ths[j, k] * xv
                elif xv < 0.0:
                    sig -= ths[j, q + k] * xv
            x[t] = sig * eps[t]
        start = <Py_ssize_t> ends[j]
    return x_arr


# ---------------------------------------------------------------------------
# least-squares cost table and suffix DP
# ---------------------------------------------------------------------------


cdef int _solve_small(double[:, ::1] A, double[::1] b, double[::1] out, Py_ssize_t p) nogil:
    """Gaussian elimination with partial pivoting; returns 0 on success."""
    cdef Py_ssize_t i, j, k, piv
    cdef double maxval, tmp, factor
    for i in range(p):
        piv = i
        maxval = fabs(A[i, i])
        for k in range(i + 1, p):
            if fabs(A[k, i]) > maxval:
                maxval = fabs(A[k, i])
                piv = k
        if maxval < 1e-300:
            return 1
        if piv != i:
            for j in range(p):
                tmp = A[i, j]
                A[i, j] = A[piv, j]
                A[piv, j] = tmp
            tmp = b[i]
            b[i] = b[piv]
            b[piv] = tmp
        for k in range(i + 1, p):
            factor = A[k, i] / A[i, i]
            for j in range(i, p):
                A[k, j] -= factor * A[i, j]
            b[k] -= factor * b[i]
    for i in range(p - 1, -1, -1):
        tmp = b[i]
        for j in range(i + 1, p):
            tmp -= A[i, j] * out[j]
        out[i] = tmp / A[i, i]
    return 0


def ar_fill_table(long long[::1] pos, double[:, :, ::1] Sxx, double[:, ::1] Sxy,
                  double[::1] Syy, double[::1] lb, double[::1] ub,
                  double beta_limit, long long min_len):
    cdef Py_ssize_t m = pos.shape[0]
    cdef Py_ssize_t p = Sxy.shape[1]
    cdef cnp.ndarray[double, ndim=2] cost_arr = np.full((m, m), np.inf)
    cdef cnp.ndarray[double, ndim=3] theta_arr = np.zeros((m, m, p))
    cdef cnp.ndarray[cnp.int8_t, ndim=2] status_arr = np.zeros((m, m), dtype=np.int8)
    cdef double[:, ::1] cost = cost_arr
    cdef double[:, :, ::1] theta = theta_arr
    cdef cnp.int8_t[:, ::1] status = status_arr

    cdef cnp.ndarray[double, ndim=2] A_arr = np.empty((p, p))
    cdef cnp.ndarray[double, ndim=1] b_arr = np.empty(p)
    cdef cnp.ndarray[double, ndim=1] phi_arr = np.empty(p)
    cdef double[:, ::1] A = A_arr
    cdef double[::1] b = b_arr
    cdef double[::1] phi = phi_arr

    cdef Py_ssize_t i, j, k, l, a, bb
    cdef double yy, rss, abssum, cmax
    cdef int bad, rc
    for i in range(m):
        a = <Py_ssize_t> pos[i]
        for j in range(i + 1, m):
            bb = <Py_ssize_t> pos[j]
            if bb - a < min_len:
                continue
            for k in range(p):
                b[k] = Sxy[bb, k] - Sxy[a, k]
                for l in range(p):
                    A[k, l] = Sxx[bb, k, l] - Sxx[a, k, l]
            yy = Syy[bb] - Syy[a]
            rc = _solve_small(A, b, phi, p)
            if rc != 0:
                cmax = 0.0
                for k in range(p):
                    if fabs(Sxy[bb, k] - Sxy[a, k]) > cmax:
                        cmax = fabs(Sxy[bb, k] - Sxy[a, k])
                if cmax < 1e-12:
                    cost[i, j] = yy if yy > 0.0 else 0.0
                    status[i, j] = STATUS_OK
                else:
                    status[i, j] = STATUS_REFIT
                continue
            bad = 0
            abssum = 0.0
            for k in range(p):
                if phi[k] < lb[k] or phi[k] > ub[k]:
                    bad = 1
                abssum += fabs(phi[k])
            if bad == 0 and abssum < beta_limit:
                rss = yy
                for k in range(p):
                    # b was overwritten by elimination; recompute c^T phi
                    rss -= (Sxy[bb, k] - Sxy[a, k]) * phi[k]
                if rss < 0.0:
                    rss = 0.0
                cost[i, j] = rss
                for k in range(p):
                    theta[i, j, k] = phi[k]
                status[i, j] = STATUS_OK
            else:
                status[i, j] = STATUS_REFIT
    return cost_arr, theta_arr, status_arr


def dp_suffix(double[:, ::1] cost, Py_ssize_t k_max):
    cdef Py_ssize_t m = cost.shape[0]
    cdef cnp.ndarray[double, ndim=2] G_arr = np.full((k_max + 1, m), np.inf)
    cdef double[:, ::1] G = G_arr
    cdef Py_ssize_t k, i, j
    cdef double best, cand
    G[0, m - 1] = 0.0
    for k in range(1, k_max + 1):
        for i in range(m - 2, -1, -1):
            best = INFINITY
            for j in range(i + 1, m):
                cand = cost[i, j] + G[k - 1, j]
                if cand < best:
                    best = cand
            G[k, i] = best
    return G_arr
