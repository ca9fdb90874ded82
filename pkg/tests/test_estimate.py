import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

import qlbreaks as qb
from qlbreaks.errors import ConfigurationError
from qlbreaks.estimate import (
    PenaltySchedule,
    SegmentCostTable,
    build_cost_table,
    detect,
    dp_segment,
    fit_segment,
    grid_positions,
)
from qlbreaks.likelihood import SegmentRef


class TestPenaltySchedule:
    def test_builtin_values(self):
        n = 400
        assert PenaltySchedule("sqrt_n").beta(n) == pytest.approx(20.0)
        assert PenaltySchedule("bic").beta(n) == pytest.approx(math.log(400))
        assert PenaltySchedule("heavy").beta(n) == pytest.approx(400 / math.log(400))

    def test_custom(self):
        assert PenaltySchedule("custom", 3.5).beta(1000) == 3.5
        with pytest.raises(ConfigurationError):
            PenaltySchedule("custom")
        with pytest.raises(ConfigurationError):
            PenaltySchedule("aic")

    def test_divergence_ordering(self):
        # beta_n grows without bound but stays o(n) for every preset
        for kind in ("sqrt_n", "bic", "heavy"):
            p = PenaltySchedule(kind)
            assert p.beta(10 ** 6) > p.beta(10 ** 3) > 0
            assert p.beta(10 ** 6) / 10 ** 6 < p.beta(10 ** 3) / 10 ** 3


def _ls_slope(x, lo, hi):
    z = np.concatenate([[0.0], x])[lo:hi]  # lagged regressor, zero-padded at s=1
    y = x[lo:hi]
    return float(y @ z) / float(z @ z)


class TestFitSegment:
    def test_ar1_matches_least_squares(self, rng):
        x = qb.simulate_stationary(qb.AR(1), [0.5], 600, seed=21).x
        for _ in range(20):
            lo = int(rng.integers(0, 500))
            hi = lo + int(rng.integers(20, 100))
            fr = fit_segment(SegmentRef(lo, hi), x, qb.AR(1))
            assert abs(fr.theta[0] - _ls_slope(x, lo, hi)) < 1e-8
            assert fr.converged

    def test_constant_zero_series_arch_corner(self):
        x = np.zeros(80)
        fr = fit_segment(SegmentRef(0, 80), x, qb.ARCH(1))
        dom = qb.ARCH(1).default_domain()
        assert fr.theta[0] == pytest.approx(dom.box_lower[0])
        assert fr.theta[1] == pytest.approx(0.0, abs=1e-12)

    def test_arch_consistency_short_mc(self):
        fam = qb.ARCH(1)
        theta_star = np.array([0.5, 0.3])
        hits = 0
        for seed in range(20):
            s = qb.simulate_stationary(fam, theta_star, 5000, seed=seed)
            fr = fit_segment(SegmentRef(0, 5000), s.x, fam, n_restarts=2, seed=seed)
            hits += np.linalg.norm(fr.theta - theta_star) < 0.1
        assert hits >= 19

    def test_warm_start_is_answer_preserving(self, rng):
        fam = qb.GARCH(1, 1)
        s = qb.simulate_stationary(fam, [0.4, 0.1, 0.5], 300, seed=8)
        cold = fit_segment(SegmentRef(0, 300), s.x, fam, n_restarts=3)
        warm = fit_segment(SegmentRef(0, 300), s.x, fam, n_restarts=3,
                           warm_start=np.array([0.2, 0.05, 0.7]))
        assert warm.cost == pytest.approx(cold.cost, rel=1e-6)

    def test_short_segment_rejected(self):
        with pytest.raises(ConfigurationError):
            fit_segment(SegmentRef(0, 2), np.zeros(10), qb.ARCH(1))


class TestCostTable:
    def test_cell_count_unit_grid(self):
        x = np.random.default_rng(0).standard_normal(100)
        table = build_cost_table(x, qb.AR(1), min_len=10, delta=1)
        assert table.n_cells == 4186  # (n-min_len+1)(n-min_len+2)/2

    def test_single_cell_grid(self):
        x = np.random.default_rng(1).standard_normal(60)
        table = build_cost_table(x, qb.AR(1), min_len=10, delta=60)
        assert table.n_cells == 1
        cost, theta, ok = table.cell(0, 60)
        fr = fit_segment(SegmentRef(0, 60), x, qb.AR(1))
        assert cost == pytest.approx(fr.cost, rel=1e-9)

    def test_fast_path_matches_optimizer(self, rng):
        x = qb.simulate_stationary(qb.AR(2), [0.4, -0.3], 200, seed=5).x
        table = build_cost_table(x, qb.AR(2), min_len=12, delta=20)
        for lo, hi in [(0, 40), (40, 120), (0, 200), (160, 200)]:
            cost, theta, ok = table.cell(lo, hi)
            fr = fit_segment(SegmentRef(lo, hi), x, qb.AR(2))
            assert cost == pytest.approx(fr.cost, rel=1e-8)
            assert_allclose(theta, fr.theta, atol=1e-6)

    def test_generic_table_warm_equivalence(self):
        fam = qb.ARCH(1)
        s = qb.simulate_stationary(fam, [0.5, 0.3], 240, seed=9)
        warm = build_cost_table(s.x, fam, min_len=30, delta=30)
        cold = build_cost_table(s.x, fam, min_len=30, delta=30, warm_starts=False)
        fin = np.isfinite(warm.cost)
        assert_allclose(warm.cost[fin], cold.cost[fin], rtol=1e-6)

    def test_split_superadditivity(self, rng):
        x = qb.simulate_stationary(qb.AR(1), [0.3], 150, seed=3).x
        table = build_cost_table(x, qb.AR(1), min_len=10, delta=10)
        for lo, m, hi in [(0, 50, 150), (0, 30, 60), (40, 100, 150), (20, 70, 120)]:
            whole = table.cell(lo, hi)[0]
            parts = table.cell(lo, m)[0] + table.cell(m, hi)[0]
            assert whole >= parts - 1e-8 * (1.0 + abs(whole))


def _random_table(rng, n, min_len):
    pos = grid_positions(n, 1)
    m = pos.shape[0]
    cost = np.full((m, m), np.inf)
    for i in range(m):
        for j in range(i + 1, m):
            if pos[j] - pos[i] >= min_len:
                cost[i, j] = rng.uniform(0.0, 10.0)
    return SegmentCostTable(n=n, min_len=min_len, delta=1, positions=pos,
                            cost=cost, theta=np.zeros((m, m, 1)),
                            converged=np.ones((m, m), dtype=bool))


def _brute_force(table, K_max, beta, k_fixed=None):
    """Exhaustive search over all admissible segmentations; suffix-order
    summation mirrors the DP's accumulation exactly."""
    pos = table.positions
    m = pos.shape[0]
    idx = range(1, m - 1)
    best = (np.inf, None, None)
    ks = [k_fixed] if k_fixed is not None else range(1, K_max + 1)
    for K in ks:
        for combo in itertools.combinations(idx, K - 1):
            cuts = [0] + list(combo) + [m - 1]
            if any(pos[b] - pos[a] < table.min_len for a, b in zip(cuts[:-1], cuts[1:])):
                continue
            total = 0.0
            feasible = True
            for a, b in zip(reversed(cuts[:-1]), reversed(cuts[1:])):
                c = table.cost[a, b]
                if not np.isfinite(c):
                    feasible = False
                    break
                total = c + total
            if not feasible:
                continue
            total = total + beta * K
            if total < best[0]:
                best = (total, K, tuple(int(pos[c]) for c in combo))
    return best


class TestDPSegment:
    def test_matches_exhaustive_enumeration(self, rng):
        for trial in range(25):
            table = _random_table(rng, n=24, min_len=4)
            K_max = int(rng.integers(1, 5))
            beta = float(rng.uniform(0.0, 5.0))
            dp = dp_segment(table, K_max, PenaltySchedule("custom", beta))
            total, K, t = _brute_force(table, K_max, beta)
            assert dp.K_hat == K
            assert tuple(dp.t_hat.tolist()) == t
            assert dp.penalized == total

    def test_all_zero_costs_picks_single_segment(self):
        table = _random_table(np.random.default_rng(0), 24, 4)
        table.cost[np.isfinite(table.cost)] = 0.0
        dp = dp_segment(table, 4, PenaltySchedule("custom", 1.0))
        assert dp.K_hat == 1 and dp.t_hat.size == 0

    def test_zero_penalty_splitting_always_helps_hits_kmax(self):
        # cost = length^2 strictly exceeds the sum over any split
        pos = grid_positions(30, 1)
        m = pos.shape[0]
        cost = np.full((m, m), np.inf)
        for i in range(m):
            for j in range(i + 1, m):
                if pos[j] - pos[i] >= 5:
                    cost[i, j] = float(pos[j] - pos[i]) ** 2
        table = SegmentCostTable(n=30, min_len=5, delta=1, positions=pos,
                                 cost=cost, theta=np.zeros((m, m, 1)),
                                 converged=np.ones((m, m), dtype=bool))
        dp = dp_segment(table, 4, PenaltySchedule("custom", 0.0))
        assert dp.K_hat == 4

    def test_penalty_monotone_k(self, rng):
        table = _random_table(rng, 30, 5)
        prev_k = None
        for beta in (0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0):
            dp = dp_segment(table, 4, PenaltySchedule("custom", beta))
            if prev_k is not None:
                assert dp.K_hat <= prev_k
            prev_k = dp.K_hat

    def test_known_k_ignores_penalty(self, rng):
        table = _random_table(rng, 30, 5)
        t_hats = []
        for kind in ("sqrt_n", "bic", "heavy"):
            dp = dp_segment(table, 4, PenaltySchedule(kind), k_fixed=3)
            t_hats.append(tuple(dp.t_hat.tolist()))
        assert t_hats[0] == t_hats[1] == t_hats[2]

    def test_infeasible_k_skipped(self):
        # min_len=10 on n=24 admits at most 2 segments; K=3,4 must be skipped
        table = _random_table(np.random.default_rng(2), 24, 10)
        fin = np.isfinite(table.cost)
        table.cost[fin] = (table.positions[None, :] - table.positions[:, None])[fin] ** 2.0
        dp = dp_segment(table, 4, PenaltySchedule("custom", 0.0))
        assert dp.K_hat == 2


class TestDetect:
    def test_result_shape_and_consistency(self):
        m = qb.BreakModel(family=qb.AR(1), K_star=2, tau_star=[0.5],
                          thetas=[[0.2], [0.7]])
        s = qb.simulate_piecewise(m, 600, seed=13)
        r = detect(s, qb.AR(1), K_max=4, seed=13)
        assert r.K_hat == len(r.theta_hat) == len(r.segments)
        assert r.penalized == pytest.approx(r.contrast + r.beta_n * r.K_hat)
        assert np.all(np.diff(r.t_hat) > 0)
        bounds = [0] + r.t_hat.tolist() + [600]
        assert min(b - a for a, b in zip(bounds[:-1], bounds[1:])) >= r.min_len
        assert r.K_hat <= 4
        assert_allclose(r.tau_hat, r.t_hat / 600.0)

    def test_doubling_penalty_never_increases_k(self):
        m = qb.BreakModel(family=qb.AR(1), K_star=2, tau_star=[0.5],
                          thetas=[[0.2], [0.7]])
        s = qb.simulate_piecewise(m, 600, seed=29)
        betas = [5.0, 10.0, 20.0, 40.0, 80.0, 160.0]
        ks = [detect(s, qb.AR(1), penalty=PenaltySchedule("custom", b), K_max=4,
                     seed=29).K_hat for b in betas]
        assert all(a >= b for a, b in zip(ks[:-1], ks[1:]))

    def test_known_k_mode_penalty_invariant(self):
        m = qb.BreakModel(family=qb.AR(1), K_star=2, tau_star=[0.4],
                          thetas=[[0.1], [0.6]])
        s = qb.simulate_piecewise(m, 500, seed=31)
        t_hats = [
            detect(s, qb.AR(1), penalty=PenaltySchedule(kind), K_max=4,
                   k_fixed=2, seed=31).t_hat.tolist()
            for kind in ("sqrt_n", "bic", "heavy")
        ]
        assert t_hats[0] == t_hats[1] == t_hats[2]

    def test_coarse_grid_with_refinement(self):
        m = qb.BreakModel(family=qb.AR(1), K_star=2, tau_star=[0.5],
                          thetas=[[0.2], [0.7]])
        s = qb.simulate_piecewise(m, 3000, seed=17)
        r_fine = detect(s, qb.AR(1), delta=1, seed=17)
        r_coarse = detect(s, qb.AR(1), delta=50, refine=True, seed=17)
        assert r_coarse.refined
        assert r_coarse.K_hat == r_fine.K_hat == 2
        # refinement recovers unit-grid accuracy near the coarse optimum
        assert abs(int(r_coarse.t_hat[0]) - int(r_fine.t_hat[0])) <= 50

    def test_deterministic_rerun(self):
        m = qb.BreakModel(family=qb.GARCH(1, 1), K_star=2, tau_star=[0.5],
                          thetas=[[0.4, 0.1, 0.3], [0.4, 0.1, 0.8]])
        s = qb.simulate_piecewise(m, 800, seed=23)
        r1 = detect(s, qb.GARCH(1, 1), delta=40, min_len=60, K_max=3, seed=23)
        r2 = detect(s, qb.GARCH(1, 1), delta=40, min_len=60, K_max=3, seed=23)
        assert r1.to_dict() == r2.to_dict()
