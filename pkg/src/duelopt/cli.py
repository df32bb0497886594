"""Command-line entry point.

Commands
--------
verify        run a check suite, write report.jsonl + summary.csv
coeffs        fit inverse-link coefficients and print the table
estimate-gap  Monte Carlo the gap estimator at one configuration
optimize      run comparison-SGD and write the run report + trace

Configuration is a flat JSON file (schema_version 1) whose keys mirror
the command-line flags; flags override file values.  Unknown keys are a
hard error.  Exit codes: 0 success, 1 any failed check, 2 bad
configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import verify
from .errors import ConfigError, DueloptError, FitError
from .estimator import (
    EstimatorConfig,
    TruncationSchedule,
    default_beta,
    predicted_cost,
)
from .links import (
    LOGISTIC,
    LINK_KINDS,
    LinkSpec,
    fit_odd_coefficients,
    interval_for_gap_bound,
    logistic_coefficients,
)
from .objectives import make_objective
from .optimizer import AUTO, SGDParams, run as run_sgd
from .verify import MonteCarloCheck, make_check

SCHEMA_VERSION = 1

_CSV_COLUMNS = ("check_name", "n", "estimate", "se", "target", "rule", "pass")

_KNOWN_KEYS = {
    "schema_version", "command", "seed", "workers", "deterministic", "output",
    "suite", "replicates", "link", "tau", "gap_bound", "gap", "beta",
    "tolerance", "max_terms", "objective", "dimension", "delta", "epsilon",
    "eta", "iterations", "initial_gap_bound", "variance_constant", "x0",
    "pieces", "box_radius", "objective_seed", "trace_points",
}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(cfg) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    version = cfg.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}")
    return cfg


def _merge(cfg: dict, args: argparse.Namespace, key: str, default=None):
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    if key in cfg and cfg[key] is not None:
        return cfg[key]
    return default


def _json_default(value):
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def _check_row(check: MonteCarloCheck) -> dict:
    return {
        "check_name": check.name,
        "n": check.replicates_n,
        "estimate": check.point_estimate,
        "se": check.standard_error,
        "target": check.target,
        "rule": check.rule,
        "rule_params": list(check.rule_params),
        "bias_allowance": check.bias_allowance,
        "provenance": check.provenance,
        "pass": check.passed,
        "extra": check.extra,
    }


def write_reports(outdir: Path, checks: list, config_echo: dict,
                  deterministic: bool) -> None:
    """report.jsonl (full rows) and summary.csv (fixed column order)."""
    outdir.mkdir(parents=True, exist_ok=True)
    header = {"record": "config", "schema_version": SCHEMA_VERSION, **config_echo}
    if not deterministic:
        header["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    with open(outdir / "report.jsonl", "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True, default=_json_default) + "\n")
        for check in checks:
            fh.write(json.dumps({"record": "check", **_check_row(check)},
                                sort_keys=True, default=_json_default) + "\n")
    with open(outdir / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_COLUMNS)
        for check in checks:
            writer.writerow([
                check.name, check.replicates_n, repr(check.point_estimate),
                repr(check.standard_error), repr(check.target),
                _rule_label(check), "pass" if check.passed else "FAIL",
            ])


def _rule_label(check: MonteCarloCheck) -> str:
    if check.rule_params:
        inner = ",".join(f"{p:g}" for p in check.rule_params)
        return f"{check.rule}[{inner}]"
    return check.rule


def _finish(checks: list, outdir: Path, echo: dict, deterministic: bool) -> int:
    write_reports(outdir, checks, echo, deterministic)
    failed = [c for c in checks if not c.passed]
    for check in checks:
        status = "pass" if check.passed else "FAIL"
        print(f"{status}  {check.name}: estimate={check.point_estimate:.6g} "
              f"target={check.target:.6g} rule={_rule_label(check)}")
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed; "
          f"reports in {outdir}")
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _cmd_verify(cfg, args) -> int:
    seed = int(_merge(cfg, args, "seed", 0))
    workers = int(_merge(cfg, args, "workers", 1))
    suite = _merge(cfg, args, "suite", "core")
    replicates = int(_merge(cfg, args, "replicates", 200_000))
    outdir = Path(_merge(cfg, args, "output", "reports"))
    deterministic = bool(_merge(cfg, args, "deterministic", False))
    if suite == "core":
        checks = verify.core_suite(seed, n=replicates, workers=workers)
    elif suite == "acceptance":
        checks = verify.acceptance_suite(seed, workers=workers, n=max(replicates, 10**6))
    else:
        raise ConfigError(f"unknown suite {suite!r}; expected 'core' or 'acceptance'")
    echo = {"command": "verify", "suite": suite, "seed": seed,
            "workers": workers, "replicates": replicates}
    return _finish(checks, outdir, echo, deterministic)


def _build_link(cfg, args) -> tuple[LinkSpec, float]:
    kind = _merge(cfg, args, "link", LOGISTIC)
    if kind not in LINK_KINDS:
        raise ConfigError(f"unknown link {kind!r}; expected one of {LINK_KINDS}")
    tau = float(_merge(cfg, args, "tau", 0.5))
    gap_bound = float(_merge(cfg, args, "gap_bound", 1.0))
    if tau <= 0 or gap_bound <= 0:
        raise ConfigError("tau and gap bound must be positive")
    return LinkSpec(kind=kind, tau=tau), gap_bound


def _cmd_coeffs(cfg, args) -> int:
    link, gap_bound = _build_link(cfg, args)
    tolerance = float(_merge(cfg, args, "tolerance", 1e-8))
    max_terms = int(_merge(cfg, args, "max_terms", 160))
    outdir = Path(_merge(cfg, args, "output", "reports"))
    deterministic = bool(_merge(cfg, args, "deterministic", False))
    interval = interval_for_gap_bound(link, gap_bound)
    try:
        if link.kind == LOGISTIC:
            series = logistic_coefficients(max_terms, interval)
        else:
            series = fit_odd_coefficients(link, interval, tolerance, max_terms)
    except FitError as exc:
        print(f"fit failed: {exc}", file=sys.stderr)
        check = make_check(f"coeffs/{link.kind}/sup-residual", 0, exc.best_residual,
                           0.0, tolerance, verify.RULE_THRESHOLD)
        echo = {"command": "coeffs", "link": link.kind, "tau": link.tau,
                "gap_bound": gap_bound, "tolerance": tolerance, "max_terms": max_terms}
        return _finish([check], outdir, echo, deterministic)

    print(f"# {link.kind} inverse on [{interval.p_minus:.6f}, {interval.p_plus:.6f}] "
          f"(alpha={interval.alpha:.6f})")
    print(f"# terms={series.num_terms} basis={series.basis} "
          f"sup_residual={series.sup_residual:.3e} "
          f"decay: |c_k| <= {series.decay_c:.4g} * {series.decay_rho:.4f}^k")
    for degree, c in zip(series.degrees(), series.coefficients):
        print(f"c[{degree}] = {c!r}")
    checks = [
        make_check(f"coeffs/{link.kind}/sup-residual", 0, series.sup_residual, 0.0,
                   tolerance, verify.RULE_THRESHOLD,
                   extra={"terms": series.num_terms}),
        make_check(f"coeffs/{link.kind}/decay-rho", 0, series.decay_rho, 0.0, 1.0,
                   verify.RULE_THRESHOLD),
    ]
    echo = {"command": "coeffs", "link": link.kind, "tau": link.tau,
            "gap_bound": gap_bound, "tolerance": tolerance, "max_terms": max_terms}
    return _finish(checks, outdir, echo, deterministic)


def _cmd_estimate_gap(cfg, args) -> int:
    link, gap_bound = _build_link(cfg, args)
    seed = int(_merge(cfg, args, "seed", 0))
    workers = int(_merge(cfg, args, "workers", 1))
    replicates = int(_merge(cfg, args, "replicates", 10**6))
    gap = float(_merge(cfg, args, "gap", 0.5))
    outdir = Path(_merge(cfg, args, "output", "reports"))
    deterministic = bool(_merge(cfg, args, "deterministic", False))
    if abs(gap) > gap_bound:
        raise ConfigError(f"|gap|={abs(gap)} exceeds the gap bound {gap_bound}")
    interval = interval_for_gap_bound(link, gap_bound)
    tolerance = float(_merge(cfg, args, "tolerance", 1e-8))
    max_terms = int(_merge(cfg, args, "max_terms", 160))
    if link.kind == LOGISTIC:
        series = logistic_coefficients(200, interval)
    else:
        series = fit_odd_coefficients(link, interval, tolerance, max_terms)
    beta_opt = _merge(cfg, args, "beta", "auto")
    if beta_opt == "auto":
        beta = default_beta(interval, None if link.kind == LOGISTIC else series)
    else:
        beta = float(beta_opt)
    schedule = TruncationSchedule(beta=beta)
    config = EstimatorConfig(link=link, series=series, schedule=schedule, interval=interval)

    checks = verify.check_unbiasedness(link, series, schedule, [gap], replicates,
                                       seed, workers, name_prefix="estimate-gap")
    checks.append(verify.check_cost(schedule, config.path, replicates, seed, workers,
                                    name_prefix="estimate-gap/cost"))
    echo = {"command": "estimate-gap", "link": link.kind, "tau": link.tau,
            "gap_bound": gap_bound, "gap": gap, "beta": beta, "seed": seed,
            "replicates": replicates,
            "predicted_cost": predicted_cost(schedule, config.path)}
    return _finish(checks, outdir, echo, deterministic)


def _cmd_optimize(cfg, args) -> int:
    seed = int(_merge(cfg, args, "seed", 0))
    outdir = Path(_merge(cfg, args, "output", "reports"))
    deterministic = bool(_merge(cfg, args, "deterministic", False))
    name = _merge(cfg, args, "objective", "abs1d")
    dimension = int(_merge(cfg, args, "dimension", 1))
    objective = make_objective(
        name, dimension,
        pieces=int(_merge(cfg, args, "pieces", 5)),
        seed=int(_merge(cfg, args, "objective_seed", 2024)),
        box_radius=float(_merge(cfg, args, "box_radius", 6.0)),
    )
    delta = float(_merge(cfg, args, "delta", 0.1))
    epsilon = float(_merge(cfg, args, "epsilon", 0.3))
    kind = _merge(cfg, args, "link", LOGISTIC)
    gap_bound = 2.0 * objective.lipschitz_constant * delta
    tau = _merge(cfg, args, "tau", None)
    link = LinkSpec(kind=kind, tau=float(tau) if tau is not None else gap_bound / 2.0)
    interval = interval_for_gap_bound(link, gap_bound)
    if kind == LOGISTIC:
        series = logistic_coefficients(200, interval)
        series_for_beta = None
    else:
        series = fit_odd_coefficients(
            link, interval, float(_merge(cfg, args, "tolerance", 1e-8)),
            int(_merge(cfg, args, "max_terms", 160)))
        series_for_beta = series
    beta_opt = _merge(cfg, args, "beta", "auto")
    beta = default_beta(interval, series_for_beta) if beta_opt == "auto" else float(beta_opt)
    schedule = TruncationSchedule(beta=beta)
    config = EstimatorConfig(link=link, series=series, schedule=schedule, interval=interval)

    variance_constant = _merge(cfg, args, "variance_constant", "auto")
    if variance_constant == "auto":
        scaling = verify.check_second_moment_scaling(
            LOGISTIC, (0.1, 0.2, 0.4, 0.8), 200_000, seed,
            int(_merge(cfg, args, "workers", 1)))
        variance_constant = scaling.extra["c_delta"]
    variance_constant = float(variance_constant)

    eta_opt = _merge(cfg, args, "eta", AUTO)
    iter_opt = _merge(cfg, args, "iterations", AUTO)
    sgd = SGDParams(
        delta=delta, epsilon_target=epsilon,
        eta=AUTO if eta_opt == AUTO else float(eta_opt),
        iterations=AUTO if iter_opt == AUTO else int(iter_opt),
        initial_gap_bound=float(_merge(cfg, args, "initial_gap_bound", 1.0)),
        variance_constant=variance_constant,
        seed=seed,
        trace_points=int(_merge(cfg, args, "trace_points", 1000)),
    )
    x0_opt = _merge(cfg, args, "x0", None)
    if x0_opt is None:
        x0 = np.ones(objective.dimension)
    elif isinstance(x0_opt, str):
        x0 = np.array([float(v) for v in x0_opt.split(",")])
    else:
        x0 = np.asarray(x0_opt, dtype=float)

    report = run_sgd(objective, link, sgd, config, x0)

    outdir.mkdir(parents=True, exist_ok=True)
    payload = {
        "record": "run-report",
        "output_point": list(report.output_point),
        "output_index": report.output_index,
        "iterations": report.iterations,
        "step_size": report.step_size,
        "total_comparisons": report.total_comparisons,
        "mean_cost_per_iteration": report.mean_cost_per_iteration,
        "stationarity_estimate": report.stationarity_estimate,
        "stationarity_se": report.stationarity_se,
        "config": report.config_echo,
    }
    if not deterministic:
        payload["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    with open(outdir / "run_report.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2, default=_json_default)
        fh.write("\n")
    with open(outdir / "trace.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"x{i}" for i in range(objective.dimension)])
        for t, point in report.iterate_trace:
            writer.writerow([t] + [repr(v) for v in point])
    print(f"iterations={report.iterations} eta={report.step_size:.6g} "
          f"comparisons={report.total_comparisons} "
          f"stationarity={report.stationarity_estimate:.6g} "
          f"(se {report.stationarity_se:.2g}); reports in {outdir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="duelopt",
        description="Nonsmooth optimization from noisy pairwise comparisons.")
    parser.add_argument("--config", help="JSON config file (flags override it)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--deterministic", action="store_const", const=True,
                        help="omit timestamps so reports are byte-reproducible")
    parser.add_argument("--output", help="report directory (default: reports)")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("verify", help="run a statistical check suite")
    p.add_argument("--suite", choices=("core", "acceptance"))
    p.add_argument("--replicates", type=int)

    p = sub.add_parser("coeffs", help="fit inverse-link series coefficients")
    p.add_argument("--link", choices=LINK_KINDS)
    p.add_argument("--tau", type=float)
    p.add_argument("--gap-bound", "--B", dest="gap_bound", type=float)
    p.add_argument("--tolerance", "--tol", dest="tolerance", type=float)
    p.add_argument("--max-terms", dest="max_terms", type=int)

    p = sub.add_parser("estimate-gap", help="Monte Carlo the gap estimator")
    p.add_argument("--link", choices=LINK_KINDS)
    p.add_argument("--tau", type=float)
    p.add_argument("--gap-bound", "--B", dest="gap_bound", type=float)
    p.add_argument("--gap", type=float)
    p.add_argument("--beta")
    p.add_argument("--replicates", type=int)
    p.add_argument("--tolerance", "--tol", dest="tolerance", type=float)
    p.add_argument("--max-terms", dest="max_terms", type=int)

    p = sub.add_parser("optimize", help="run comparison-SGD")
    p.add_argument("--objective", choices=("abs1d", "l1norm", "maxaffine", "quadratic"))
    p.add_argument("--dimension", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--eta")
    p.add_argument("--T", dest="iterations")
    p.add_argument("--link", choices=LINK_KINDS)
    p.add_argument("--tau", type=float)
    p.add_argument("--beta")
    p.add_argument("--variance-constant", dest="variance_constant")
    p.add_argument("--initial-gap-bound", dest="initial_gap_bound", type=float)
    p.add_argument("--x0")
    p.add_argument("--trace-points", dest="trace_points", type=int)
    return parser


_COMMANDS = {
    "verify": _cmd_verify,
    "coeffs": _cmd_coeffs,
    "estimate-gap": _cmd_estimate_gap,
    "optimize": _cmd_optimize,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        command = args.command or cfg.get("command")
        if command is None:
            parser.print_help()
            return 2
        if command not in _COMMANDS:
            raise ConfigError(f"unknown command {command!r}")
        return _COMMANDS[command](cfg, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DueloptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
