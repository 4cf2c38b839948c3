"""Command line front end.

    kdevidence reproduce [--seed 1702] [--n-post 1000] [--output json]
    kdevidence estimate --samples draws.txt --data data.txt --sigma 3 ...
    kdevidence oracle --data data.txt --sigma 3 --theta0 0 --sigma0 10
    kdevidence sweep --n-post-list 500,4000,32000 --replications 50

Errors go to stderr as one line ``E_CODE: message``.  Exit status: 0 ok,
2 usage, 3 numerical or diagnostic failure, 4 I/O or parse failure.
"""

import argparse
import csv
import json
import sys
import time

from . import __version__
from .errors import EmptyDataset, EvidenceError, SampleFileError, SampleTooSmall
from .estimator import estimate_evidence
from .experiment import SWEEP_COLUMNS, ExperimentReport, RunConfig, run_reproduce, run_sweep
from .kde import KdeConfig, kde_fit_grid
from .model import (
    NormalModelConfig,
    dataset_from_values,
    normal_log_marginal_closed_form,
    normal_model,
    normal_posterior_params,
)
from .oracle import QuadratureConfig, default_quadrature_config, quadrature_log_marginal
from .sampling import read_sample, read_values, write_sample, write_values

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_at_least(lo, name):
    def parse(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {text!r}")
        if value < lo:
            raise argparse.ArgumentTypeError(f"{name} must be >= {lo}, got {value}")
        return value

    return parse


def _positive_float(name):
    def parse(text):
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}")
        if not (value > 0 and value != float("inf")):
            raise argparse.ArgumentTypeError(f"{name} must be positive, got {text}")
        return value

    return parse


def _finite_float(text):
    value = float(text)
    if value != value or value in (float("inf"), float("-inf")):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return value


def _seed(text):
    value = _int_at_least(0, "seed")(text)
    if value >= 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def _bandwidth(text):
    if text.lower() == "silverman":
        return "silverman"
    return _positive_float("--kde-bandwidth")(text)


def _n_post_list(text):
    parse = _int_at_least(2, "n_post")
    return [parse(tok) for tok in text.split(",") if tok.strip()]


def _add_model_flags(p):
    p.add_argument("--sigma", type=_positive_float("--sigma"), default=3.0, help="known observation sd")
    p.add_argument("--theta0", type=_finite_float, default=0.0, help="prior mean")
    p.add_argument("--sigma0", type=_positive_float("--sigma0"), default=10.0, help="prior sd")


def _add_kde_flags(p, eval_mode="direct"):
    p.add_argument("--kde-bandwidth", type=_bandwidth, default="silverman",
                   help="'silverman' or a fixed positive bandwidth")
    p.add_argument("--kde-grid-size", type=_int_at_least(2, "--kde-grid-size"), default=401)
    p.add_argument("--kde-padding", type=_positive_float("--kde-padding"), default=6.0,
                   help="grid padding in bandwidths")
    p.add_argument("--eval-mode", choices=("direct", "grid-interp"), default=eval_mode)


def _add_run_flags(p):
    p.add_argument("--seed", type=_seed, default=1702)
    p.add_argument("--n-obs", type=_int_at_least(1, "n_obs"), default=25)
    p.add_argument("--true-mean", type=_finite_float, default=-1.0)
    _add_model_flags(p)
    p.add_argument("--n-post", type=_int_at_least(2, "n_post"), default=1000)


def _add_output_flag(p):
    p.add_argument("--output", choices=("text", "json"), default="text")


def build_parser():
    parser = _Parser(prog="kdevidence", description="Kernel-density plug-in marginal likelihood.")
    parser.add_argument("--version", action="version", version=f"kdevidence {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reproduce", help="simulate the Normal-Normal experiment")
    _add_run_flags(p)
    p.add_argument("--posterior-seed", type=_seed, default=None,
                   help="draw the posterior sample from its own stream (reruns a sweep cell)")
    _add_kde_flags(p)
    _add_output_flag(p)
    p.add_argument("--export-samples", metavar="PATH")
    p.add_argument("--export-data", metavar="PATH")
    p.add_argument("--export-grid", metavar="PATH", help="write the fitted KDE grid as CSV")

    p = sub.add_parser("estimate", help="estimate the evidence from a sample file")
    p.add_argument("--samples", required=True, metavar="PATH", help="posterior draws, one per line")
    p.add_argument("--data", required=True, metavar="PATH", help="observations, one per line")
    _add_model_flags(p)
    _add_kde_flags(p)
    _add_output_flag(p)

    p = sub.add_parser("oracle", help="evidence by adaptive quadrature")
    p.add_argument("--data", required=True, metavar="PATH", help="observations, one per line")
    _add_model_flags(p)
    p.add_argument("--center", type=_finite_float, default=None, help="window center (default: posterior mean)")
    p.add_argument("--scale", type=_positive_float("--scale"), default=None,
                   help="window scale (default: max of posterior sd and sigma0)")
    p.add_argument("--half-width-sds", type=_positive_float("--half-width-sds"), default=12.0,
                   help="window half width in units of scale")
    p.add_argument("--abs-tol", type=_positive_float("--abs-tol"), default=1e-10, help="absolute tolerance")
    p.add_argument("--max-depth", type=_int_at_least(1, "--max-depth"), default=40, help="bisection depth limit")
    _add_output_flag(p)

    p = sub.add_parser("sweep", help="evidence error against posterior sample size")
    _add_run_flags(p)
    p.add_argument("--n-post-list", type=_n_post_list, default=[500, 4000, 32000])
    p.add_argument("--replications", type=_int_at_least(1, "--replications"), default=50)
    _add_kde_flags(p, eval_mode="grid-interp")
    p.add_argument("--out", metavar="PATH", help="CSV destination (default stdout)")
    return parser


def _kde_config(args):
    return KdeConfig(
        bandwidth=args.kde_bandwidth,
        grid_size=args.kde_grid_size,
        padding_bandwidths=args.kde_padding,
        eval_mode=args.eval_mode,
    )


def _run_config(args):
    return RunConfig(
        seed=args.seed,
        n_obs=args.n_obs,
        true_mean=args.true_mean,
        sigma=args.sigma,
        theta0=args.theta0,
        sigma0=args.sigma0,
        n_post=args.n_post,
        kde=_kde_config(args),
        posterior_seed=getattr(args, "posterior_seed", None),
    )


def _dump_json(payload, out):
    out.write(json.dumps(payload, indent=2))
    out.write("\n")


def _print_report(report: ExperimentReport, out):
    d = report.diagnostics
    if report.log_theoretical is not None:
        out.write(f"Theoretical:  {report.log_theoretical!r}\n")
    out.write(f"Estimate:     {report.log_estimate!r}\n")
    if report.abs_error is not None:
        out.write(f"Abs. error:   {report.abs_error!r}\n")
    out.write(
        f"N = {d['n_samples']}, log-weight sd = {d['log_weight_sd']:.6g}, "
        f"range = [{d['log_weight_min']:.10g}, {d['log_weight_max']:.10g}]\n"
    )


def cmd_reproduce(args, out):
    cfg = _run_config(args)
    keep = {}
    report = run_reproduce(cfg, keep=keep)
    if args.export_samples:
        write_sample(args.export_samples, keep["sample"])
    if args.export_data:
        write_values(args.export_data, keep["data"].values,
                     [f"# data seed={cfg.seed} n={cfg.n_obs} mean={cfg.true_mean!r} sd={cfg.sigma!r}"])
    if args.export_grid:
        kde_fit_grid(keep["sample"].draws, cfg.kde).to_csv(args.export_grid)
    if args.output == "json":
        _dump_json(report.to_dict(), out)
    else:
        _print_report(report, out)
    return EXIT_OK


def _read_data(path):
    values, _ = read_values(path)
    return dataset_from_values(values)


def cmd_estimate(args, out):
    t0 = time.perf_counter()
    sample = read_sample(args.samples)
    data = _read_data(args.data)
    mcfg = NormalModelConfig(sigma=args.sigma, theta0=args.theta0, sigma0=args.sigma0)
    kde = _kde_config(args)
    est = estimate_evidence(normal_model(mcfg), data, sample, kde)
    config = {
        "samples": args.samples,
        "data": args.data,
        "sigma": mcfg.sigma,
        "theta0": mcfg.theta0,
        "sigma0": mcfg.sigma0,
        "kde": kde.as_dict(),
        "provenance": sample.provenance.as_dict(),
    }
    report = ExperimentReport.from_estimate(
        config, est, normal_log_marginal_closed_form(data, mcfg),
        1000.0 * (time.perf_counter() - t0),
    )
    if args.output == "json":
        _dump_json(report.to_dict(), out)
    else:
        _print_report(report, out)
    return EXIT_OK


def cmd_oracle(args, out):
    data = _read_data(args.data)
    mcfg = NormalModelConfig(sigma=args.sigma, theta0=args.theta0, sigma0=args.sigma0)
    base = default_quadrature_config(mcfg, normal_posterior_params(data, mcfg))
    qcfg = QuadratureConfig(
        center=base.center if args.center is None else args.center,
        scale=base.scale if args.scale is None else args.scale,
        half_width_sds=args.half_width_sds,
        abs_tol=args.abs_tol,
        max_depth=args.max_depth,
    )
    log_quad = quadrature_log_marginal(normal_model(mcfg), data, qcfg)
    log_closed = normal_log_marginal_closed_form(data, mcfg)
    if args.output == "json":
        _dump_json(
            {
                "config": {"data": args.data, "sigma": mcfg.sigma, "theta0": mcfg.theta0,
                           "sigma0": mcfg.sigma0, "center": qcfg.center, "scale": qcfg.scale,
                           "half_width_sds": qcfg.half_width_sds, "abs_tol": qcfg.abs_tol,
                           "max_depth": qcfg.max_depth},
                "log_quadrature": log_quad,
                "log_closed_form": log_closed,
                "difference": log_quad - log_closed,
            },
            out,
        )
    else:
        out.write(f"Quadrature:   {log_quad!r}\n")
        out.write(f"Closed form:  {log_closed!r}\n")
        out.write(f"Difference:   {log_quad - log_closed!r}\n")
    return EXIT_OK


def cmd_sweep(args, out):
    cfg = _run_config(args)
    rows = run_sweep(cfg, args.n_post_list, args.replications)
    fh = open(args.out, "w", newline="") if args.out else out
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in SWEEP_COLUMNS])
    finally:
        if args.out:
            fh.close()
    return EXIT_OK


COMMANDS = {
    "reproduce": cmd_reproduce,
    "estimate": cmd_estimate,
    "oracle": cmd_oracle,
    "sweep": cmd_sweep,
}


def _fail(code, message, status, err):
    err.write(f"{code}: {' '.join(str(message).split())}\n")
    return status


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail("E_USAGE", exc, EXIT_USAGE, err)
    try:
        return COMMANDS[args.command](args, out)
    except SampleFileError as exc:
        return _fail(exc.code, exc, EXIT_IO, err)
    except (SampleTooSmall, EmptyDataset) as exc:
        # raised from input files for these commands
        status = EXIT_IO if args.command in ("estimate", "oracle") else EXIT_NUMERIC
        return _fail(exc.code, exc, status, err)
    except EvidenceError as exc:
        return _fail(exc.code, exc, EXIT_NUMERIC, err)
    except OSError as exc:
        return _fail("E_IO", exc, EXIT_IO, err)
