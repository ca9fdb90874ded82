"""Compiled and pure-Python kernels must produce the same numbers."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

import qlbreaks as qb
from qlbreaks import backend

pytestmark = pytest.mark.skipif(
    "c" not in qb.available_backends(), reason="compiled backend not built"
)

RTOL = 1e-10


def _both(fn_name, *args):
    with backend.use_backend("python"):
        py = getattr(backend.kernels(), fn_name)(*args)
    with backend.use_backend("c"):
        cc = getattr(backend.kernels(), fn_name)(*args)
    return py, cc


def _cmp(py, cc):
    if py is None:
        assert cc is None
        return
    if isinstance(py, tuple):
        assert len(py) == len(cc)
        for a, b in zip(py, cc):
            _cmp(a, b)
        return
    assert_allclose(np.asarray(py, dtype=float), np.asarray(cc, dtype=float),
                    rtol=RTOL, atol=1e-12)


@pytest.fixture
def x(rng):
    return rng.standard_normal(300)


class TestKernelEquivalence:
    def test_linmean(self, rng, x):
        c = rng.uniform(-0.2, 0.2, 12)
        _cmp(*_both("linmean_qhat", c, x))
        for want in (0, 1, 2):
            _cmp(*_both("linmean_sums", c, x, 7, 290, want))

    def test_arch(self, rng, x):
        psi = np.array([0.5, 0.2, 0.1])
        _cmp(*_both("arch_qhat", psi, x))
        for want in (0, 1, 2):
            _cmp(*_both("arch_sums", psi, x, 3, 295, want))

    @pytest.mark.parametrize("p,q", [(1, 1), (2, 2), (1, 3)])
    def test_garch(self, rng, x, p, q):
        theta = np.concatenate([[0.4], np.full(q, 0.2 / q), np.full(p, 0.5 / p)])
        _cmp(*_both("garch_sig2", theta, x, p, q, x.shape[0]))
        _cmp(*_both("garch_qhat", theta, x, p, q))
        for want in (0, 1, 2):
            _cmp(*_both("garch_sums", theta, x, p, q, 11, 280, want))

    def test_tarch(self, rng, x):
        th = np.array([0.5, 0.2, 0.1, 0.15, 0.05])
        _cmp(*_both("tarch_qhat", th, x, 2))
        for want in (0, 1, 2):
            _cmp(*_both("tarch_sums", th, x, 2, 5, 299, want))

    def test_simulators(self, rng):
        eps = rng.standard_normal(400)
        ends = np.array([200, 400], dtype=np.int64)
        _cmp(*_both("linmean_simulate", np.array([[0.3, 0.1], [0.6, -0.1]]), ends, eps))
        _cmp(*_both("arch_simulate", np.array([[0.4, 0.3], [0.8, 0.1]]), ends, eps))
        _cmp(*_both("garch_simulate", np.array([[0.4, 0.1], [0.4, 0.2]]),
                    np.array([[0.3], [0.7]]), ends, eps))
        _cmp(*_both("tarch_simulate", np.array([[0.5, 0.2, 0.1], [0.8, 0.1, 0.3]]),
                    ends, eps))

    def test_ar_fill_table(self, rng, x):
        p = 2
        from qlbreaks._pykernels import _lag_matrix
        Z = _lag_matrix(x, p)
        n = x.shape[0]
        Sxx = np.zeros((n + 1, p, p))
        np.cumsum(Z[:, :, None] * Z[:, None, :], axis=0, out=Sxx[1:])
        Sxy = np.zeros((n + 1, p))
        np.cumsum(Z * x[:, None], axis=0, out=Sxy[1:])
        Syy = np.zeros(n + 1)
        np.cumsum(x * x, out=Syy[1:])
        pos = np.arange(0, n + 1, 10, dtype=np.int64)
        lb = -0.99 * np.ones(p)
        ub = 0.99 * np.ones(p)
        (c1, t1, s1), (c2, t2, s2) = _both(
            "ar_fill_table", pos, Sxx, Sxy, Syy, lb, ub, 1.0 - 1e-6, 20
        )
        assert np.array_equal(s1, s2)
        fin = np.isfinite(c1)
        assert np.array_equal(fin, np.isfinite(c2))
        assert_allclose(c1[fin], c2[fin], rtol=1e-9)
        assert_allclose(t1[s1 == 1], t2[s2 == 1], atol=1e-9)

    def test_dp_suffix(self, rng):
        m = 40
        cost = np.full((m, m), np.inf)
        for i in range(m):
            for j in range(i + 1, m):
                if j - i >= 3:
                    cost[i, j] = rng.uniform(0, 5)
        g1, g2 = _both("dp_suffix", cost, 4)
        fin = np.isfinite(g1)
        assert np.array_equal(fin, np.isfinite(g2))
        assert_allclose(g1[fin], g2[fin], rtol=1e-12)


class TestEndToEnd:
    def test_detect_same_answer_both_backends(self):
        model = qb.BreakModel(family=qb.GARCH(1, 1), K_star=2, tau_star=[0.5],
                              thetas=[[0.4, 0.1, 0.3], [0.4, 0.1, 0.8]])
        s = qb.simulate_piecewise(model, 400, seed=77)
        results = {}
        for name in ("python", "c"):
            with backend.use_backend(name):
                s2 = qb.simulate_piecewise(model, 400, seed=77)
                assert_allclose(s2.x, s.x, rtol=1e-12)
                r = qb.detect(s2, qb.GARCH(1, 1), delta=100, min_len=80, K_max=3,
                              seed=77, refine=False)
                results[name] = r
        assert results["python"].K_hat == results["c"].K_hat
        assert results["python"].t_hat.tolist() == results["c"].t_hat.tolist()
        assert results["python"].contrast == pytest.approx(
            results["c"].contrast, rel=1e-8
        )
