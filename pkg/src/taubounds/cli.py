"""Command-line interface: analyze a CSV, simulate a configuration, reproduce
the bundled scenario results.

Exit codes: 0 success, 1 I/O failure, 2 validation failure. Every output is
a pure function of the flags and the seed, independent of the worker count.
"""

from __future__ import annotations

import argparse
import importlib.resources
import json
import os
import sys

import jsonschema
import numpy as np

from . import __version__
from .data import read_csv, write_csv
from .errors import TauBoundsError
from .estimator import CdfTable, MarginMode, analyze
from .mgp import (
    SCENARIOS,
    CopulaSpec,
    CovariateScale,
    MgpConfig,
    population_bounds,
    scenario_manifest,
    simulate_dataset,
)

_SCALES = {
    "uniform01": CovariateScale.UNIFORM01,
    "normal-score": CovariateScale.NORMAL_SCORE,
}


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("TAUBOUNDS_WORKERS", "1")))
    except ValueError:
        return 1


def _dump_json(obj, path=None) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _report_schema() -> dict:
    with importlib.resources.files("taubounds").joinpath("report_schema.json").open(
            "r", encoding="utf-8") as fh:
        return json.load(fh)


def _validated_report(report) -> dict:
    payload = report.to_report_dict()
    jsonschema.validate(payload, _report_schema())
    return payload


# ---------------------------------------------------------------------------
# analyze


def _margins_from_args(args) -> MarginMode:
    if args.margins == "uniform01":
        return MarginMode.uniform01()
    if args.margins == "unknown":
        return MarginMode.unknown()
    if not args.x_cdf or not args.y_cdf:
        raise ValueError("--margins from-file requires --x-cdf and --y-cdf")
    return MarginMode.from_tables(CdfTable.from_csv(args.x_cdf),
                                  CdfTable.from_csv(args.y_cdf))


def _format_interval(interval) -> str:
    out = f"[{interval.lower:+.6f}, {interval.upper:+.6f}]"
    if interval.se_lower is not None and np.isfinite(interval.se_lower) \
            and interval.se_upper is not None and np.isfinite(interval.se_upper):
        out += f" (se {interval.se_lower:.2e}, {interval.se_upper:.2e})"
    return out


def _cmd_analyze(args) -> int:
    dataset = read_csv(args.input)
    margins = _margins_from_args(args)
    report = analyze(dataset, margins, theta=args.theta,
                     se_guard=args.se_guard, seed=args.seed)
    payload = _validated_report(report)

    if args.output is not None:
        _dump_json(payload, args.output)
    if args.format == "json":
        if args.output is None:
            _dump_json(payload)
    else:
        counts = ", ".join(f"z={z}: {c}" for z, c in
                           enumerate(report.pattern_counts, start=1))
        print(f"n = {report.n} ({counts})")
        print(f"margins: {report.margins.kind.value}"
              + (f", theta = {report.theta}" if report.theta is not None else ""))
        print(f"worst-case (raw):     {_format_interval(report.worst_case_raw)}")
        print(f"worst-case (clipped): {_format_interval(report.worst_case_clipped)}")
        if report.refined_raw is not None:
            print(f"refined (raw):        {_format_interval(report.refined_raw)}")
            print(f"refined (clipped):    {_format_interval(report.refined_clipped)}")
        print(f"decision: {report.decision.value}")
        if args.output is not None:
            print(f"report written to {args.output}")
    return 0


# ---------------------------------------------------------------------------
# simulate


def _parse_gamma(text: str) -> np.ndarray:
    if text.strip() == "zeros":
        return np.zeros((4, 2))
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    if len(parts) != 8:
        raise ValueError("--gamma needs 8 comma-separated numbers "
                         "(x and y coefficients for patterns 1..4) or 'zeros'")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ValueError(f"--gamma contains a non-numeric entry in {text!r}") from None
    return np.asarray(values, dtype=float).reshape(4, 2)


def _config_from_args(args) -> MgpConfig:
    scale = _SCALES[args.covariate_scale]
    if args.scenario is not None:
        if args.rho is not None or args.gamma is not None:
            raise ValueError("--scenario is mutually exclusive with --rho/--gamma")
        return SCENARIOS[args.scenario].config(scale)
    if args.rho is None:
        raise ValueError("either --scenario or --rho (with --gamma) is required")
    gamma = _parse_gamma(args.gamma if args.gamma is not None else "zeros")
    return MgpConfig(gamma, CopulaSpec.gaussian(args.rho), scale)


def _bounds_payload(pb) -> dict:
    def block(interval):
        if interval is None:
            return None
        return {
            "lower": interval.lower,
            "upper": interval.upper,
            "se_lower": interval.se_lower,
            "se_upper": interval.se_upper,
        }

    return {
        "worst_case": block(pb.worst_case),
        "refined": block(pb.refined),
        "p_z": [float(p) for p in pb.p_z],
        "p_z_se": [float(s) for s in pb.p_z_se],
        "theta": pb.theta,
        "theta_hat": pb.theta_hat,
        "theta_hat_se": pb.theta_hat_se,
        "draws": pb.draws,
        "seed": pb.seed,
    }


def _cmd_simulate(args) -> int:
    config = _config_from_args(args)
    dataset = simulate_dataset(config, args.n, args.seed, workers=args.workers)
    write_csv(dataset, args.output)
    counts = dataset.pattern_counts()
    print(f"wrote {len(dataset)} records to {args.output} "
          f"(pattern counts {counts.tolist()})")
    if args.bounds_output is not None:
        pb = population_bounds(config, theta=args.theta, draws=args.draws,
                               seed=args.seed, workers=args.workers,
                               warn_on_theta_mismatch=False)
        _dump_json(_bounds_payload(pb), args.bounds_output)
        print(f"population bounds written to {args.bounds_output}")
    return 0


# ---------------------------------------------------------------------------
# reproduce


def _cmd_reproduce(args) -> int:
    if args.export_scenarios is not None:
        _dump_json(scenario_manifest(), args.export_scenarios)

    tolerance = 0.005 if args.strict else args.tolerance
    scales = list(_SCALES.values()) if args.scale == "both" else [_SCALES[args.scale]]
    results = []
    matched = {scale: True for scale in scales}
    for name in ("P1", "P2", "P3"):
        scenario = SCENARIOS[name]
        theta = args.theta if args.theta is not None else scenario.theta
        for scale in scales:
            pb = population_bounds(scenario.config(scale), theta=theta,
                                   draws=args.draws, seed=args.seed,
                                   workers=args.workers,
                                   warn_on_theta_mismatch=False)
            measured = {
                "refined_lower": pb.refined.lower,
                "refined_upper": pb.refined.upper,
            }
            deviations = {key: measured[key] - target
                          for key, target in scenario.targets.items()}
            within = all(abs(d) <= tolerance for d in deviations.values())
            from .bounds import clip, decide
            decision = decide(clip(pb.refined))
            decision_ok = decision is scenario.expected_decision
            if not (within and decision_ok):
                matched[scale] = False
            results.append({
                "scenario": name,
                "covariate_scale": scale.value,
                "theta": theta,
                "worst_case": {"lower": pb.worst_case.lower,
                               "upper": pb.worst_case.upper,
                               "se_lower": pb.worst_case.se_lower,
                               "se_upper": pb.worst_case.se_upper},
                "refined": {"lower": pb.refined.lower,
                            "upper": pb.refined.upper,
                            "se_lower": pb.refined.se_lower,
                            "se_upper": pb.refined.se_upper},
                "p_z": [float(p) for p in pb.p_z],
                "theta_hat": pb.theta_hat,
                "decision": decision.value,
                "expected_decision": scenario.expected_decision.value,
                "decision_matches": decision_ok,
                "targets": dict(scenario.targets),
                "deviations": deviations,
                "within_tolerance": within,
            })

    matched_convention = next((s.value for s in scales if matched[s]), None)
    payload = {
        "tool_version": __version__,
        "draws": args.draws,
        "seed": args.seed,
        "tolerance": tolerance,
        "matched_convention": matched_convention,
        "results": results,
    }
    if args.output is not None:
        _dump_json(payload, args.output)

    header = (f"{'scenario':9s} {'scale':13s} {'refined interval':34s} "
              f"{'decision':21s} {'targets':24s} ok")
    print(header)
    print("-" * len(header))
    for row in results:
        ref = row["refined"]
        targets = ", ".join(f"{k.split('_')[1][:2]}~{v:+.4f}"
                            for k, v in row["targets"].items())
        flag = "yes" if row["within_tolerance"] and row["decision_matches"] else "NO"
        print(f"{row['scenario']:9s} {row['covariate_scale']:13s} "
              f"[{ref['lower']:+.4f}, {ref['upper']:+.4f}]{'':14s} "
              f"{row['decision']:21s} {targets:24s} {flag}")
    print(f"matched convention: {matched_convention or 'none'} "
          f"(tolerance {tolerance})")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="taubounds",
        description="Identified sets for Kendall's tau under missing data "
                    "of unknown form.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="compute bounds and a decision for a CSV dataset")
    pa.add_argument("--input", required=True, help="CSV with header x,y; empty or NA cells are missing")
    pa.add_argument("--output", default=None, help="write the JSON report here")
    pa.add_argument("--margins", choices=("uniform01", "from-file", "unknown"),
                    default="uniform01")
    pa.add_argument("--x-cdf", default=None, help="CDF table CSV for x (from-file margins)")
    pa.add_argument("--y-cdf", default=None, help="CDF table CSV for y (from-file margins)")
    pa.add_argument("--theta", type=float, default=None,
                    help="median-quadrant probability for refined bounds")
    pa.add_argument("--se-guard", type=float, default=0.0,
                    help="widen the decisive interval by this many standard errors")
    pa.add_argument("--seed", type=int, default=0)
    pa.add_argument("--format", choices=("plain", "json"), default="plain")
    pa.set_defaults(func=_cmd_analyze)

    ps = sub.add_parser("simulate", help="simulate an incomplete dataset")
    ps.add_argument("--scenario", choices=sorted(SCENARIOS), default=None)
    ps.add_argument("--rho", type=float, default=None,
                    help="Gaussian copula correlation (0 gives independence)")
    ps.add_argument("--gamma", default=None,
                    help="8 comma-separated logit coefficients (x,y per pattern 1..4) or 'zeros'")
    ps.add_argument("--covariate-scale", choices=sorted(_SCALES), default="uniform01")
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--workers", type=int, default=_default_workers())
    ps.add_argument("--output", required=True, help="CSV path for the dataset")
    ps.add_argument("--bounds-output", default=None,
                    help="also write the population bound report here")
    ps.add_argument("--theta", type=float, default=None,
                    help="theta for the optional population bound report")
    ps.add_argument("--draws", type=int, default=1_000_000,
                    help="Monte Carlo draws for the optional bound report")
    ps.set_defaults(func=_cmd_simulate)

    pr = sub.add_parser("reproduce",
                        help="recompute the bundled scenario results and check their targets")
    pr.add_argument("--draws", type=int, default=10_000_000)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--theta", type=float, default=None,
                    help="override the scenarios' theta (default 0.4)")
    pr.add_argument("--workers", type=int, default=_default_workers())
    pr.add_argument("--scale", choices=("both", "uniform01", "normal-score"),
                    default="both")
    pr.add_argument("--tolerance", type=float, default=0.02)
    pr.add_argument("--strict", action="store_true",
                    help="use the strict tolerance 0.005")
    pr.add_argument("--output", default=None, help="write JSON results here")
    pr.add_argument("--export-scenarios", default=None,
                    help="write the scenario constants manifest here")
    pr.set_defaults(func=_cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TauBoundsError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
