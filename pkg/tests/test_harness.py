import numpy as np
import pytest

import qlbreaks as qb
from qlbreaks.estimate import PenaltySchedule
from qlbreaks.harness import (
    ExperimentConfig,
    aggregate_rows,
    run_experiment,
    run_single,
    score,
)


def _model_ar_break():
    return qb.BreakModel(family=qb.AR(1), K_star=2, tau_star=[0.5],
                         thetas=[[0.2], [0.7]])


def _dummy_result(model, n, seed=0):
    s = qb.simulate_piecewise(model, n, seed=seed)
    return qb.detect(s, model.family, K_max=4, seed=seed)


class TestScore:
    def test_truth_against_itself_is_zero(self):
        model = _model_ar_break()
        n = 600
        result = _dummy_result(model, n, seed=41)
        if result.K_hat == 2:
            # force exact agreement to verify the zero-distance path
            result.t_hat = model.break_indices(n)
        row = score(result, model, n)
        if result.K_hat == 2:
            assert row["t_dist"] == 0.0

    def test_missing_breaks_scored_as_n(self):
        model = _model_ar_break()
        n = 400
        s = qb.simulate_piecewise(model, n, seed=3)
        result = qb.detect(s, model.family, K_max=1, seed=3)  # forced K=1
        row = score(result, model, n)
        assert result.K_hat == 1
        assert row["t_dist"] == n
        assert row["empty_break_vector"]

    def test_two_off_distance(self):
        model = _model_ar_break()
        n = 1000
        result = _dummy_result(model, n, seed=5)
        result.t_hat = np.array([498])
        row = score(result, model, n)
        assert row["t_star"] == [500]
        assert row["t_dist"] == 2.0

    def test_theta_matched_by_midpoint(self):
        model = _model_ar_break()
        n = 600
        result = _dummy_result(model, n, seed=7)
        row = score(result, model, n)
        assert len(row["theta_err"]) == 2
        assert all(np.isfinite(v) for v in row["theta_err"])


class TestRunExperiment:
    def test_single_rep_bookkeeping(self):
        model = qb.BreakModel(family=qb.AR(1), K_star=1, tau_star=[], thetas=[[0.0]])
        cfg = ExperimentConfig(model=model, n_list=[200],
                               penalties=[PenaltySchedule("sqrt_n")],
                               replications=1, seed_base=11, K_max=3)
        report = run_experiment(cfg)
        assert len(report.rows) == 1
        cell = report.cells["n=200,penalty=sqrt_n"]
        assert cell["replications"] == 1
        assert sum(cell["k_hist"].values()) == 1

    def test_deterministic_report(self):
        cfg = ExperimentConfig(model=_model_ar_break(), n_list=[300],
                               penalties=[PenaltySchedule("sqrt_n")],
                               replications=2, seed_base=5, K_max=3)
        a = run_experiment(cfg).to_dict()
        b = run_experiment(cfg).to_dict()
        # everything except wall-clock timings is reproducible byte for byte
        for rep in a["rows"] + b["rows"]:
            rep.pop("wall_s", None)
        for cell in list(a["cells"].values()) + list(b["cells"].values()):
            cell.pop("wall_s", None)
        assert a == b

    def test_worker_count_does_not_change_output(self):
        cfg = ExperimentConfig(model=_model_ar_break(), n_list=[300],
                               penalties=[PenaltySchedule("sqrt_n")],
                               replications=3, seed_base=7, K_max=3)
        serial = run_experiment(cfg, workers=1).to_dict()
        parallel = run_experiment(cfg, workers=2).to_dict()
        # wall-clock differs between runs; compare everything else
        for rep in serial["rows"] + parallel["rows"]:
            rep.pop("wall_s", None)
        for cell in list(serial["cells"].values()) + list(parallel["cells"].values()):
            cell.pop("wall_s", None)
        assert serial["rows"] == parallel["rows"]
        assert serial["cells"] == parallel["cells"]

    def test_aggregation_equals_recomputation(self):
        cfg = ExperimentConfig(model=_model_ar_break(), n_list=[300],
                               penalties=[PenaltySchedule("sqrt_n")],
                               replications=4, seed_base=3, K_max=3)
        report = run_experiment(cfg)
        again = aggregate_rows(report.rows)
        key = "n=300,penalty=sqrt_n"
        a = dict(report.cells[key])
        b = dict(again)
        a.pop("wall_s")
        b.pop("wall_s")
        assert a == b

    def test_replication_errors_recorded_not_fatal(self):
        # n too small for K_max*min_len triggers a per-rep error row
        model = qb.BreakModel(family=qb.AR(1), K_star=1, tau_star=[], thetas=[[0.3]])
        cfg = ExperimentConfig(model=model, n_list=[12],
                               penalties=[PenaltySchedule("sqrt_n")],
                               replications=2, seed_base=0, K_max=2, min_len=40)
        report = run_experiment(cfg)
        assert all(r["error"] is not None for r in report.rows)
        assert report.cells["n=12,penalty=sqrt_n"]["failed"] == 2

    def test_run_single_row_fields(self):
        model = _model_ar_break()
        cfg = ExperimentConfig(model=model, n_list=[400],
                               penalties=[PenaltySchedule("sqrt_n")],
                               replications=1, seed_base=2, K_max=3)
        row = run_single(model, 400, PenaltySchedule("sqrt_n"), seed=2, config=cfg)
        for key in ("k_hat", "k_correct", "t_dist", "theta_err", "coverage",
                    "contrast", "penalized", "wall_s"):
            assert key in row
