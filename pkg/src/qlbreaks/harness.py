"""Monte Carlo experiment driver: replicated simulate -> detect -> score
cycles with reproducible seeding, concurrent replications and JSON-ready
reports."""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .estimate import PenaltySchedule, SegmentationResult, detect
from .simulate import BreakModel, simulate_piecewise


@dataclass
class ExperimentConfig:
    """One experiment: a ground-truth model crossed with sample sizes and
    penalty schedules, replicated ``replications`` times with seeds
    ``seed_base + rep``."""

    model: BreakModel
    n_list: list[int]
    penalties: list[PenaltySchedule]
    replications: int
    seed_base: int = 0
    K_max: int = 5
    min_len: int | None = None
    delta: int | None = None
    burn_in: int = 500
    level: float = 0.95
    refine: bool = True
    k_fixed: int | None = None
    n_restarts: int = 5
    table_restarts: int = 0

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise ConfigurationError("replications must be >= 1")
        if not self.n_list:
            raise ConfigurationError("n_list must be nonempty")
        if not self.penalties:
            raise ConfigurationError("need at least one penalty schedule")


def _psd_power(mat: np.ndarray, power: float) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    vals = np.clip(vals, 0.0, None)
    with np.errstate(divide="ignore"):
        pw = np.where(vals > 0, vals ** power, 0.0)
    return (vecs * pw) @ vecs.T


def _break_distance(t_hat: np.ndarray, t_star: np.ndarray, n: int):
    """Distance between break vectors.

    Elementwise max when the counts agree; otherwise the one-sided
    max-min distance, with the convention that an empty vector against a
    nonempty one scores n.
    """
    a, b = np.asarray(t_hat, dtype=float), np.asarray(t_star, dtype=float)
    if a.size == b.size:
        if a.size == 0:
            return 0.0, False
        return float(np.max(np.abs(a - b))), False
    if a.size == 0 or b.size == 0:
        return float(n), True
    return float(np.max([np.min(np.abs(a - y)) for y in b])), False


def score(result: SegmentationResult, truth: BreakModel, n: int) -> dict:
    """Per-run metrics of a detection result against the ground truth."""
    t_star = truth.break_indices(n)
    k_correct = result.K_hat == truth.K_star
    t_dist, empty_flag = _break_distance(result.t_hat, t_star, n)
    bounds_star = np.concatenate([[0], t_star, [n]])
    theta_err = []
    theta_err_vec = []
    coverage = []
    std_z = []
    for j in range(truth.K_star):
        mid = max(1, int((bounds_star[j] + bounds_star[j + 1]) // 2))
        seg = next(s for s in result.segments if s.lo < mid <= s.hi)
        diff = seg.theta - truth.thetas[j]
        theta_err.append(float(np.linalg.norm(diff)))
        theta_err_vec.append(diff.tolist())
        if seg.conf_int is not None:
            ci = seg.conf_int
            covered = (ci[:, 0] <= truth.thetas[j]) & (truth.thetas[j] <= ci[:, 1])
            coverage.append(covered.tolist())
        else:
            coverage.append(None)
        if seg.F_hat is not None and seg.G_hat is not None:
            S = _psd_power(seg.F_hat, 0.5) @ _psd_power(seg.G_hat, -0.5) @ _psd_power(seg.F_hat, 0.5)
            z = np.sqrt(seg.hi - seg.lo) * (S @ diff)
            std_z.append(z.tolist())
        else:
            std_z.append(None)
    return {
        "k_hat": result.K_hat,
        "k_star": truth.K_star,
        "k_correct": bool(k_correct),
        "t_hat": result.t_hat.tolist(),
        "t_star": t_star.tolist(),
        "t_dist": t_dist,
        "tau_dist": t_dist / n,
        "empty_break_vector": empty_flag,
        "theta_err": theta_err,
        "theta_err_vec": theta_err_vec,
        "coverage": coverage,
        "std_z": std_z,
        "contrast": result.contrast,
        "penalized": result.penalized,
    }


def run_single(model: BreakModel, n: int, penalty: PenaltySchedule, seed: int,
               config: ExperimentConfig) -> dict:
    """One simulate -> detect -> score cycle."""
    t0 = time.perf_counter()
    sample = simulate_piecewise(model, n, burn_in=config.burn_in, seed=seed)
    result = detect(
        sample, model.family, penalty=penalty, K_max=config.K_max,
        min_len=config.min_len, delta=config.delta, refine=config.refine,
        k_fixed=config.k_fixed, n_restarts=config.n_restarts,
        table_restarts=config.table_restarts, seed=seed, level=config.level,
    )
    row = score(result, model, n)
    row["wall_s"] = time.perf_counter() - t0
    return row


def _run_cell_rep(args):
    config, n, penalty, rep = args
    seed = config.seed_base + rep
    try:
        row = run_single(config.model, n, penalty, seed, config)
        row.update({"rep": rep, "seed": seed, "n": n, "penalty": penalty.kind,
                    "error": None})
    except Exception as exc:  # recorded per-rep, not fatal
        row = {"rep": rep, "seed": seed, "n": n, "penalty": penalty.kind,
               "error": f"{type(exc).__name__}: {exc}"}
    return row


def _worker_count(workers: int | None) -> int:
    if workers is not None and workers >= 1:
        return workers
    env = os.environ.get("QLBREAKS_WORKERS")
    if env:
        return max(1, int(env))
    return 1


def aggregate_rows(rows: list[dict]) -> dict:
    """Cell-level aggregates recomputed from the raw per-rep rows."""
    ok = [r for r in rows if r.get("error") is None]
    out: dict = {"replications": len(rows), "failed": len(rows) - len(ok)}
    if not ok:
        return out
    k_star = ok[0]["k_star"]
    k_hats = np.array([r["k_hat"] for r in ok])
    out["freq_k_correct"] = float(np.mean(k_hats == k_star))
    hist: dict[int, int] = {}
    for k in k_hats:
        hist[int(k)] = hist.get(int(k), 0) + 1
    out["k_hist"] = {str(k): v for k, v in sorted(hist.items())}
    t_all = np.array([r["t_dist"] for r in ok])
    out["t_dist_quantiles"] = {
        q: float(np.quantile(t_all, float(q))) for q in ("0.5", "0.75", "0.9")
    }
    matched = [r for r in ok if r["k_correct"]]
    if matched:
        tm = np.array([r["t_dist"] for r in matched])
        out["t_dist_quantiles_matched"] = {
            q: float(np.quantile(tm, float(q))) for q in ("0.5", "0.75", "0.9")
        }
        errs = np.array([r["theta_err_vec"] for r in matched])  # (R, K*, d)
        out["theta_bias"] = np.mean(errs, axis=0).tolist()
        out["theta_rmse"] = np.sqrt(np.mean(errs ** 2, axis=0)).tolist()
        cov_rows = [r["coverage"] for r in matched if all(c is not None for c in r["coverage"])]
        if cov_rows:
            out["ci_coverage"] = np.mean(np.asarray(cov_rows, dtype=float), axis=0).tolist()
    walls = np.array([r.get("wall_s", np.nan) for r in ok], dtype=float)
    out["wall_s"] = {"mean": float(np.nanmean(walls)), "max": float(np.nanmax(walls))}
    return out


@dataclass
class ExperimentReport:
    config: dict
    rows: list[dict] = field(default_factory=list)
    cells: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"schema_version": 1, "config": self.config,
                "cells": self.cells, "rows": self.rows}


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> ExperimentReport:
    """Run all (n, penalty) cells of the experiment.

    Replications execute concurrently when more than one worker is
    configured (``QLBREAKS_WORKERS`` or the ``workers`` argument); the report
    is assembled in replication order so the output is identical for any
    worker count.
    """
    nworkers = _worker_count(workers)
    tasks = [
        (config, n, pen, rep)
        for n in config.n_list
        for pen in config.penalties
        for rep in range(config.replications)
    ]
    if nworkers == 1:
        rows = [_run_cell_rep(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            rows = list(pool.map(_run_cell_rep, tasks, chunksize=1))
    rows.sort(key=lambda r: (r["n"], r["penalty"], r["rep"]))
    report = ExperimentReport(config=_config_dict(config), rows=rows)
    for n in config.n_list:
        for pen in config.penalties:
            cell_rows = [r for r in rows if r["n"] == n and r["penalty"] == pen.kind]
            report.cells[f"n={n},penalty={pen.kind}"] = aggregate_rows(cell_rows)
    return report


def _config_dict(config: ExperimentConfig) -> dict:
    return {
        "model": config.model.to_dict(),
        "n_list": list(config.n_list),
        "penalties": [
            {"kind": p.kind, "custom_beta": p.custom_beta} for p in config.penalties
        ],
        "replications": config.replications,
        "seed_base": config.seed_base,
        "K_max": config.K_max,
        "min_len": config.min_len,
        "delta": config.delta,
        "burn_in": config.burn_in,
        "level": config.level,
        "refine": config.refine,
        "k_fixed": config.k_fixed,
        "n_restarts": config.n_restarts,
        "table_restarts": config.table_restarts,
    }
