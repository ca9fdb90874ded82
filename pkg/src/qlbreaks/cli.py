"""Command-line interface.

Subcommands
-----------
``simulate``  generate a piecewise path; writes a single-column CSV plus a
              JSON sidecar with the generating model.
``detect``    run break detection on a CSV series; prints or writes the
              result JSON; ``--truth`` scores against a sidecar.
``mc``        replicated simulate -> detect -> score experiment; writes a
              JSON report and a per-replication CSV table.

A ``--config FILE`` (JSON) can accompany any subcommand; entries in the file
override the corresponding command-line flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, DomainError, ParameterError, QLBreaksError
from .estimate import PenaltySchedule, detect
from .families import make_family
from .harness import ExperimentConfig, run_experiment, score
from .innovations import innovation_from_dict
from .simulate import BreakModel, simulate_piecewise


def _parse_theta_list(items: list[str]) -> list[np.ndarray]:
    return [np.array([float(v) for v in item.split(",")], dtype=float) for item in items]


def _parse_float_list(item: str | None) -> list[float]:
    if not item:
        return []
    return [float(v) for v in item.split(",")]


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc


def _setting(config: dict, key: str, flag_value, default):
    """Config file overrides flags; flags override defaults."""
    if key in config and config[key] is not None:
        return config[key]
    if flag_value is not None:
        return flag_value
    return default


def _build_family(config: dict, args) -> "ModelFamily":
    name = _setting(config, "family", args.family, None)
    if name is None:
        raise ConfigurationError("a model family is required (--family or config)")
    return make_family(
        name,
        p=_int_or_none(_setting(config, "p", args.p, None)),
        q=_int_or_none(_setting(config, "q", args.q, None)),
        L=_int_or_none(_setting(config, "L", args.L, None)),
    )


def _int_or_none(v):
    return None if v is None else int(v)


def _build_model(config: dict, args) -> BreakModel:
    family = _build_family(config, args)
    theta_spec = _setting(config, "theta", args.theta, None)
    if not theta_spec:
        raise ConfigurationError("at least one --theta (one per regime) is required")
    if isinstance(theta_spec[0], str):
        thetas = _parse_theta_list(theta_spec)
    else:
        thetas = [np.atleast_1d(np.asarray(t, dtype=float)) for t in theta_spec]
    tau_spec = _setting(config, "tau", args.tau, "")
    tau = np.asarray(tau_spec if isinstance(tau_spec, list) else _parse_float_list(tau_spec))
    innovation_spec = _setting(config, "innovation", args.innovation, "gaussian")
    if isinstance(innovation_spec, str) and innovation_spec == "student_t":
        nu = _setting(config, "nu", args.nu, None)
        if nu is None:
            raise ConfigurationError("student_t innovations require --nu")
        innovation_spec = {"law": "student_t", "nu": float(nu)}
    return BreakModel(
        family=family,
        K_star=len(thetas),
        tau_star=tau,
        thetas=thetas,
        innovation=innovation_from_dict(innovation_spec),
        r=float(_setting(config, "r", args.r, 2.0)),
    )


def _build_penalty(config: dict, args) -> PenaltySchedule:
    kind = _setting(config, "penalty", args.penalty, "sqrt_n")
    beta = _setting(config, "beta", getattr(args, "beta", None), None)
    if kind == "custom":
        return PenaltySchedule("custom", None if beta is None else float(beta))
    return PenaltySchedule(kind)


def _read_series(path: str) -> np.ndarray:
    try:
        data = np.loadtxt(path, dtype=float, ndmin=1)
    except (OSError, ValueError) as exc:
        raise ConfigurationError(f"malformed CSV series file {path}: {exc}") from exc
    if data.ndim != 1:
        raise ConfigurationError(f"malformed CSV series file {path}: expected one column")
    return data


def _write_json(obj: dict, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _cmd_simulate(args) -> int:
    config = _load_config(args.config)
    model = _build_model(config, args)
    n = int(_setting(config, "n", args.n, None) or 0)
    if n < 1:
        raise ConfigurationError("--n is required and must be >= 1")
    seed = int(_setting(config, "seed", args.seed, 0))
    burn_in = int(_setting(config, "burn_in", args.burn_in, 500))
    sample = simulate_piecewise(model, n, burn_in=burn_in, seed=seed,
                                zero_past=bool(args.zero_past))
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{args.name}.csv"
    np.savetxt(csv_path, sample.x, fmt="%.17g")
    sidecar = {
        "schema_version": 1,
        **model.to_dict(),
        "n": n,
        "seed": seed,
        "burn_in": sample.burn_in,
        "true_breaks": None if sample.true_breaks is None else sample.true_breaks.tolist(),
    }
    _write_json(sidecar, out / f"{args.name}.json")
    print(f"wrote {csv_path}")
    return 0


def _cmd_detect(args) -> int:
    config = _load_config(args.config)
    family = _build_family(config, args)
    x = _read_series(args.input)
    penalty = _build_penalty(config, args)
    k_fixed = _int_or_none(_setting(config, "k_fixed", args.k_fixed, None))
    result = detect(
        x, family,
        penalty=penalty,
        K_max=int(_setting(config, "K_max", args.k_max, 5)),
        min_len=_int_or_none(_setting(config, "min_len", args.min_len, None)),
        delta=_int_or_none(_setting(config, "grid", args.grid, None)),
        refine=not args.no_refine,
        k_fixed=k_fixed,
        seed=int(_setting(config, "seed", args.seed, 0)),
        level=float(_setting(config, "level", args.level, 0.95)),
    )
    payload = result.to_dict()
    if args.truth:
        try:
            truth_spec = json.loads(Path(args.truth).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read truth sidecar {args.truth}: {exc}") from exc
        truth = BreakModel.from_dict(truth_spec)
        payload["score"] = score(result, truth, x.shape[0])
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "result.json").write_text(text + "\n")
        print(f"wrote {out / 'result.json'}")
    else:
        print(text)
    return 0


def _cmd_mc(args) -> int:
    config = _load_config(args.config)
    model = _build_model(config, args)
    n_spec = _setting(config, "n", args.n, None)
    if n_spec is None:
        raise ConfigurationError("--n is required")
    n_list = [int(v) for v in (n_spec if isinstance(n_spec, list) else [n_spec])]
    pen_spec = _setting(config, "penalty", args.penalty, "sqrt_n")
    pen_kinds = pen_spec if isinstance(pen_spec, list) else [pen_spec]
    beta = _setting(config, "beta", args.beta, None)
    penalties = [
        PenaltySchedule(k) if k != "custom" else PenaltySchedule("custom", float(beta))
        for k in pen_kinds
    ]
    exp = ExperimentConfig(
        model=model,
        n_list=n_list,
        penalties=penalties,
        replications=int(_setting(config, "replications", args.replications, 1)),
        seed_base=int(_setting(config, "seed", args.seed, 0)),
        K_max=int(_setting(config, "K_max", args.k_max, 5)),
        min_len=_int_or_none(_setting(config, "min_len", args.min_len, None)),
        delta=_int_or_none(_setting(config, "grid", args.grid, None)),
        burn_in=int(_setting(config, "burn_in", args.burn_in, 500)),
        level=float(_setting(config, "level", args.level, 0.95)),
        refine=not args.no_refine,
        k_fixed=_int_or_none(_setting(config, "k_fixed", args.k_fixed, None)),
    )
    report = run_experiment(exp, workers=args.workers)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    _write_json(report.to_dict(), out / "report.json")
    _write_rows_csv(report.rows, out / "rows.csv")
    print(f"wrote {out / 'report.json'}")
    return 0


def _write_rows_csv(rows: list[dict], path: Path) -> None:
    cols = ["rep", "seed", "n", "penalty", "k_star", "k_hat", "k_correct",
            "t_dist", "tau_dist", "contrast", "penalized", "wall_s", "error"]
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join("" if r.get(c) is None else str(r.get(c)) for c in cols))
    path.write_text("\n".join(lines) + "\n")


def _add_family_args(sp) -> None:
    sp.add_argument("--family", help="ar | riemannian_ar | arch | garch | tarch")
    sp.add_argument("--p", type=int, help="AR order / GARCH lag order p")
    sp.add_argument("--q", type=int, help="ARCH/GARCH/TARCH order q")
    sp.add_argument("--L", type=int, help="truncation lag for riemannian_ar")
    sp.add_argument("--config", help="JSON config file; entries override flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlbreaks",
        description="Multiple change-point detection by penalized quasi-likelihood",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="simulate a piecewise path")
    _add_family_args(ps)
    ps.add_argument("--theta", action="append",
                    help="per-regime parameters, comma separated; repeat per regime")
    ps.add_argument("--tau", help="comma-separated break fractions in (0,1)")
    ps.add_argument("--n", type=int)
    ps.add_argument("--seed", type=int)
    ps.add_argument("--burn-in", dest="burn_in", type=int)
    ps.add_argument("--innovation", choices=["gaussian", "student_t"])
    ps.add_argument("--nu", type=float, help="degrees of freedom for student_t")
    ps.add_argument("--r", type=float, help="moment order used for the contraction check")
    ps.add_argument("--zero-past", action="store_true",
                    help="start from a zero past instead of burning in")
    ps.add_argument("--out", help="output directory")
    ps.add_argument("--name", default="series", help="basename for the CSV/JSON pair")
    ps.set_defaults(func=_cmd_simulate)

    pd = sub.add_parser("detect", help="detect breaks in a CSV series")
    _add_family_args(pd)
    pd.add_argument("--input", required=True, help="single-column CSV path")
    pd.add_argument("--penalty", choices=["sqrt_n", "bic", "heavy", "custom"])
    pd.add_argument("--beta", type=float, help="penalty value for --penalty custom")
    pd.add_argument("--k-max", dest="k_max", type=int)
    pd.add_argument("--k-fixed", dest="k_fixed", type=int,
                    help="fix the number of segments (penalty then irrelevant)")
    pd.add_argument("--min-len", dest="min_len", type=int)
    pd.add_argument("--grid", type=int, help="candidate-break grid step")
    pd.add_argument("--no-refine", action="store_true")
    pd.add_argument("--seed", type=int)
    pd.add_argument("--level", type=float)
    pd.add_argument("--truth", help="sidecar JSON; adds a score section to the output")
    pd.add_argument("--out", help="output directory (default: print to stdout)")
    pd.set_defaults(func=_cmd_detect)

    pm = sub.add_parser("mc", help="Monte Carlo experiment")
    _add_family_args(pm)
    pm.add_argument("--theta", action="append")
    pm.add_argument("--tau")
    pm.add_argument("--n", type=int)
    pm.add_argument("--innovation", choices=["gaussian", "student_t"])
    pm.add_argument("--nu", type=float)
    pm.add_argument("--r", type=float)
    pm.add_argument("--penalty", choices=["sqrt_n", "bic", "heavy", "custom"])
    pm.add_argument("--beta", type=float)
    pm.add_argument("--replications", type=int)
    pm.add_argument("--seed", type=int)
    pm.add_argument("--k-max", dest="k_max", type=int)
    pm.add_argument("--k-fixed", dest="k_fixed", type=int)
    pm.add_argument("--min-len", dest="min_len", type=int)
    pm.add_argument("--grid", type=int)
    pm.add_argument("--burn-in", dest="burn_in", type=int)
    pm.add_argument("--level", type=float)
    pm.add_argument("--no-refine", action="store_true")
    pm.add_argument("--workers", type=int, help="overrides QLBREAKS_WORKERS")
    pm.add_argument("--out", help="output directory")
    pm.set_defaults(func=_cmd_mc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: parameter outside the admissible domain: {exc}", file=sys.stderr)
        return 1
    except ParameterError as exc:
        print(f"error: invalid parameter vector: {exc}", file=sys.stderr)
        return 1
    except ConfigurationError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 1
    except QLBreaksError as exc:  # pragma: no cover
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
