import numpy as np
import pytest
from numpy.testing import assert_array_equal

import qlbreaks as qb
from qlbreaks.errors import ConfigurationError, DomainError


class TestInnovations:
    def test_gaussian_unit_variance_at_large_count(self):
        eps = qb.sample_innovations(qb.GAUSSIAN, 10 ** 6, seed=7)
        assert abs(np.var(eps) - 1.0) < 0.01
        assert abs(np.mean(eps)) < 0.01

    def test_student_t_standardized(self):
        eps = qb.sample_innovations(qb.StudentT(8.0), 10 ** 6, seed=11)
        assert abs(np.var(eps) - 1.0) < 0.01

    def test_empty_draw(self):
        assert qb.sample_innovations(qb.GAUSSIAN, 0, seed=0).shape == (0,)

    def test_deterministic(self):
        a = qb.sample_innovations(qb.GAUSSIAN, 100, seed=3)
        b = qb.sample_innovations(qb.GAUSSIAN, 100, seed=3)
        assert_array_equal(a, b)

    def test_low_nu_rejected(self):
        with pytest.raises(ConfigurationError):
            qb.StudentT(2.0)


def _two_regime_ar():
    return qb.BreakModel(family=qb.AR(1), K_star=2, tau_star=[0.5],
                         thetas=[[0.2], [0.7]])


class TestBreakModel:
    def test_contraction_refusal(self):
        with pytest.raises(DomainError):
            qb.BreakModel(family=qb.GARCH(1, 1), K_star=1, tau_star=[],
                          thetas=[[0.4, 0.5, 0.6]])

    def test_identical_regimes_rejected(self):
        with pytest.raises(ConfigurationError):
            qb.BreakModel(family=qb.AR(1), K_star=2, tau_star=[0.5],
                          thetas=[[0.3], [0.3]])

    def test_unordered_fractions_rejected(self):
        with pytest.raises(ConfigurationError):
            qb.BreakModel(family=qb.AR(1), K_star=3, tau_star=[0.7, 0.3],
                          thetas=[[0.1], [0.4], [0.7]])

    def test_break_indices_floor(self):
        m = _two_regime_ar()
        assert m.break_indices(1001).tolist() == [500]

    def test_roundtrip_dict(self):
        m = qb.BreakModel(family=qb.GARCH(1, 1), K_star=2, tau_star=[0.4],
                          thetas=[[0.4, 0.1, 0.3], [0.4, 0.1, 0.8]],
                          innovation=qb.StudentT(8.0), r=2.0)
        m2 = qb.BreakModel.from_dict(m.to_dict())
        assert m2.family.name == m.family.name
        assert m2.innovation.nu == 8.0
        assert np.allclose(m2.thetas[1], m.thetas[1])


class TestSimulatePiecewise:
    def test_zero_ar_is_white_noise(self):
        model = qb.BreakModel(family=qb.AR(1), K_star=1, tau_star=[], thetas=[[0.0]])
        s = qb.simulate_piecewise(model, 500, burn_in=100, seed=5)
        eps = qb.sample_innovations(qb.GAUSSIAN, 600, seed=5)
        assert_array_equal(s.x, eps[100:])

    def test_bit_identical_reruns(self):
        m = _two_regime_ar()
        a = qb.simulate_piecewise(m, 400, seed=9)
        b = qb.simulate_piecewise(m, 400, seed=9)
        assert_array_equal(a.x, b.x)

    def test_single_regime_matches_stationary_wrapper(self):
        fam = qb.GARCH(1, 1)
        model = qb.BreakModel(family=fam, K_star=1, tau_star=[], thetas=[[0.4, 0.1, 0.5]])
        a = qb.simulate_piecewise(model, 300, seed=2)
        b = qb.simulate_stationary(fam, [0.4, 0.1, 0.5], 300, seed=2)
        assert_array_equal(a.x, b.x)

    def test_garch_variance_break_direction(self):
        # unconditional variances 0.667 vs 4.0: the second half should be
        # louder in nearly every replication
        fam = qb.GARCH(1, 1)
        model = qb.BreakModel(family=fam, K_star=2, tau_star=[0.5],
                              thetas=[[0.4, 0.1, 0.3], [0.4, 0.1, 0.8]])
        wins = 0
        for seed in range(100):
            s = qb.simulate_piecewise(model, 2000, seed=seed)
            wins += np.var(s.x[1000:]) > np.var(s.x[:1000])
        assert wins >= 95

    def test_break_point_continuity(self):
        # the post-break value depends on the pre-break parameter
        base = _two_regime_ar()
        alt = qb.BreakModel(family=qb.AR(1), K_star=2, tau_star=[0.5],
                            thetas=[[-0.5], [0.7]])
        xa = qb.simulate_piecewise(base, 200, seed=4).x
        xb = qb.simulate_piecewise(alt, 200, seed=4).x
        assert xa[100] != xb[100]  # same innovations, different regime-1 history

    def test_zero_past_convention(self):
        model = qb.BreakModel(family=qb.AR(1), K_star=1, tau_star=[], thetas=[[0.5]])
        s = qb.simulate_piecewise(model, 50, seed=6, zero_past=True)
        eps = qb.sample_innovations(qb.GAUSSIAN, 50, seed=6)
        assert s.x[0] == eps[0]
        assert s.burn_in == 0

    def test_burn_in_below_lag_horizon_rejected(self):
        model = qb.BreakModel(family=qb.RiemannianAR(L=50), K_star=1, tau_star=[],
                              thetas=[[0.3, 1.5]])
        with pytest.raises(ConfigurationError):
            qb.simulate_piecewise(model, 100, burn_in=10)

    def test_moment_boundedness_envelope(self, rng):
        # windowed second-moment stays under the theoretical bound times a
        # slack factor, across regimes and break points
        r = 2.0
        for trial in range(20):
            fam_pick = trial % 4
            if fam_pick == 0:
                fam = qb.AR(1)
                thetas = [rng.uniform(-0.7, 0.7, 1), rng.uniform(-0.7, 0.7, 1)]
                bound = 1.0 / (1.0 - max(abs(t[0]) for t in thetas))
            elif fam_pick == 1:
                fam = qb.ARCH(1)
                thetas = [np.array([rng.uniform(0.2, 1.0), rng.uniform(0.1, 0.6)])
                          for _ in range(2)]
                bound = max(np.sqrt(t[0]) / np.sqrt(1.0 - t[1]) for t in thetas)
            elif fam_pick == 2:
                fam = qb.GARCH(1, 1)
                thetas = [np.array([rng.uniform(0.2, 0.8), rng.uniform(0.05, 0.3),
                                    rng.uniform(0.1, 0.5)]) for _ in range(2)]
                bound = max(
                    np.sqrt(t[0] / (1.0 - t[2])) / np.sqrt(1.0 - t[1] - t[2])
                    for t in thetas
                )
            else:
                fam = qb.TARCH(1)
                thetas = [np.array([rng.uniform(0.2, 1.0), rng.uniform(0.0, 0.4),
                                    rng.uniform(0.0, 0.4)]) for _ in range(2)]
                fac = qb.GAUSSIAN.abs_moment(r) ** (1.0 / r)
                bound = max(t[0] * fac / (1.0 - fac * max(t[1], t[2])) for t in thetas)
            try:
                model = qb.BreakModel(family=fam, K_star=2, tau_star=[0.5],
                                      thetas=thetas, r=r)
            except (DomainError, ConfigurationError):
                continue
            s = qb.simulate_piecewise(model, 3000, seed=100 + trial)
            roll = np.convolve(np.abs(s.x) ** r, np.ones(200) / 200.0, mode="valid")
            assert np.max(roll) ** (1.0 / r) <= 6.0 * bound, fam.name
