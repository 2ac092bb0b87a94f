"""Command-line harness.

Subcommands map onto the experiment operations; every invocation reads a
config file, takes an optional seed override, and writes machine-readable
outputs (headerless full-precision CSV, JSON with stable key order and
the resolved config embedded) under the output directory.

Exit codes: 0 success, 1 experiment failure, 2 usage error, 3 unreadable
config.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments
from .config import (
    ConfigError,
    load_config,
    load_dataset,
    mixture_box,
    mixture_spec,
    mixture_start,
    resolved_dict,
    sampler_config,
    write_dataset_csv,
)
from .samplers import SamplingError, run_chain
from .spline import Dataset
from .targets import MixtureSpec, TargetDensity, mixture_target

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hararms",
        description="Hit-and-run ARMS sampling experiments")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="INI config file")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--verbose", "-v", action="count", default=0)

    common(sub.add_parser("gen-data", help="generate a synthetic dataset"))
    common(sub.add_parser("sample-mixture",
                          help="run the Gibbs-ARMS vs HARARMS comparison"))
    common(sub.add_parser("sample-1d",
                          help="1-D ARMS on a configured normal mixture"))
    p = sub.add_parser("grid-loglik", help="knot log-likelihood grid scan")
    common(p)
    p = sub.add_parser("fit-spline", help="free-knot HARARMS fit")
    common(p)
    p.add_argument("--knots", type=int, default=None,
                   help="override [spline] knots")
    p = sub.add_parser("select-model",
                       help="AIC/BIC selection over fit_K*.json reports")
    common(p)
    return parser


def _write_csv(path: Path, arr) -> None:
    np.savetxt(path, np.atleast_2d(arr), delimiter=",", fmt="%.17g")


def _write_json(path: Path, payload: dict, parser, seed) -> None:
    payload = dict(payload)
    payload["config"] = resolved_dict(parser)
    payload["seed"] = seed
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _report_dict(report) -> dict:
    return dataclasses.asdict(report)


def cmd_gen_data(args, parser) -> int:
    data = load_dataset(parser)
    out = Path(args.out)
    write_dataset_csv(data, out / "data.csv")
    seed = int(parser["dataset"].get("seed", 0))
    _write_json(out / "data.json",
                {"n": len(data), "generating_spec": data.generating_spec},
                parser, seed)
    return EXIT_OK


def cmd_sample_mixture(args, parser) -> int:
    spec = mixture_spec(parser)
    cfg = sampler_config(parser, args.seed)
    start = mixture_start(parser)
    rep_g, rep_h, samples_g, samples_h = experiments.run_mixture_comparison(
        spec, cfg, start, mixture_box(parser))
    out = Path(args.out)
    _write_csv(out / "samples.csv", samples_h)
    _write_csv(out / "samples_gibbs.csv", samples_g)
    _write_json(out / "mixture_report.json",
                {"hararms": _report_dict(rep_h),
                 "gibbs_arms": _report_dict(rep_g)},
                parser, cfg.seed)
    return EXIT_OK


def _target_1d(parser) -> TargetDensity:
    sec = parser["target1d"]
    means = [float(t) for t in sec["means"].split(",")]
    sds = [float(t) for t in sec["sds"].split(",")]
    weights = [float(t) for t in sec["weights"].split(",")]
    lo, hi = (float(t) for t in sec["support"].split(","))
    m = np.array(means)
    s = np.array(sds)
    w = np.array(weights)

    def logf(x):
        x = float(np.atleast_1d(x)[0])
        comp = (np.log(w) - 0.5 * np.log(2.0 * np.pi) - np.log(s)
                - 0.5 * ((x - m) / s) ** 2)
        top = np.max(comp)
        return float(top + np.log(np.sum(np.exp(comp - top))))

    return TargetDensity(dim=1, log_density=logf,
                         bounding_box=np.array([[lo, hi]]))


def cmd_sample_1d(args, parser) -> int:
    cfg = sampler_config(parser, args.seed)
    target = _target_1d(parser)
    lo, hi = target.bounding_box[0]
    x0 = 0.5 * (lo + hi)
    if not np.isfinite(target.log_density(np.array([x0]))):
        raise SamplingError("midpoint of the support has zero density")
    samples, _ = run_chain("gibbs_arms", target, cfg, [x0])
    _write_csv(Path(args.out) / "samples.csv", samples)
    return EXIT_OK


def cmd_grid_loglik(args, parser) -> int:
    data = load_dataset(parser)
    sec = parser["grid"]
    start = float(sec["start"])
    stop = float(sec["stop"])
    step = float(sec["step"])
    k = int(sec.get("knots", 1))
    grid = np.arange(start, stop + 0.5 * step, step)
    scan = experiments.grid_loglik(data, k, grid)
    out = Path(args.out)
    if k == 1:
        _write_csv(out / "grid_K1.csv",
                   np.column_stack([scan.grid, scan.values]))
    else:
        gi, gj = np.meshgrid(scan.grid, scan.grid, indexing="ij")
        _write_csv(out / "grid_K2.csv",
                   np.column_stack([gi.ravel(), gj.ravel(),
                                    scan.values.ravel()]))
    seed = args.seed if args.seed is not None else \
        int(parser["dataset"].get("seed", 0))
    _write_json(out / f"grid_maxima_K{k}.json",
                {"n_knots": k,
                 "local_maxima": [{"knots": list(kn), "log_likelihood": v}
                                  for kn, v in scan.local_maxima]},
                parser, seed)
    return EXIT_OK


def cmd_fit_spline(args, parser) -> int:
    data = load_dataset(parser)
    sec = parser["spline"]
    degree = int(sec.get("degree", 1))
    k = args.knots if args.knots is not None else int(sec["knots"])
    cfg = sampler_config(parser, args.seed)
    report = experiments.fit_free_knot(data, k, degree, cfg)
    _write_json(Path(args.out) / f"fit_K{k}.json", _report_dict(report),
                parser, cfg.seed)
    return EXIT_OK


def cmd_select_model(args, parser) -> int:
    out = Path(args.out)
    reports = []
    for path in sorted(out.glob("fit_K*.json")):
        with open(path) as fh:
            payload = json.load(fh)
        reports.append(experiments.KnotFitReport(
            n_knots=payload["n_knots"], degree=payload["degree"],
            knots=payload["knots"], quantiles_5=payload["quantiles_5"],
            quantiles_95=payload["quantiles_95"],
            log_likelihood=payload["log_likelihood"],
            aic=payload["aic"], bic=payload["bic"],
            n_parameters=payload["n_parameters"], seed=payload["seed"]))
    if not reports:
        raise SamplingError(f"no fit_K*.json reports found under {out}")
    sel = experiments.model_selection(reports)
    seed = args.seed if args.seed is not None else reports[0].seed
    _write_json(out / "selection.json",
                {"aic_k": sel.aic_k, "bic_k": sel.bic_k,
                 "delta_ll": [{"from_k": k, "delta": d}
                              for k, d in sel.delta_ll]},
                parser, seed)
    return EXIT_OK


COMMANDS = {
    "gen-data": cmd_gen_data,
    "sample-mixture": cmd_sample_mixture,
    "sample-1d": cmd_sample_1d,
    "grid-loglik": cmd_grid_loglik,
    "fit-spline": cmd_fit_spline,
    "select-model": cmd_select_model,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    Path(args.out).mkdir(parents=True, exist_ok=True)
    try:
        return COMMANDS[args.subcommand](args, config)
    except (ConfigError, SamplingError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
