"""Command-line interface.

Subcommands cover the full pipeline: simulating the benchmark models,
estimating spectra, evaluating spectral-mean and ratio statistics,
running the three bootstrap procedures with optional confidence
intervals, tuning b and h, and executing the preset experiments (CSV
plus rendered figures).
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import harness, report
from .bootstrap import (
    BootstrapOptions,
    cbp_closed_form_variance,
    cbp_draws,
    confidence_interval,
    hybrid_draws,
    mpb_draws,
    mpb_variance,
)
from .dgp import ModelSpec, simulate_model
from .harness import ExperimentConfig, preset_configs
from .rng import substream
from .spectral import (
    fourier_grid,
    kernel_smoothed_estimate,
    parzen_lag_window,
    periodogram,
    subsample_periodograms,
    averaged_subsample_estimate,
)
from .stats import parse_phi, ratio_statistic, spectral_mean
from .tuning import cv_bandwidth, select_block_length

__all__ = ["main"]


def _read_series(path) -> np.ndarray:
    values = [float(line.strip()) for line in Path(path).read_text().splitlines() if line.strip()]
    return np.asarray(values)


def _write_lines(path, values) -> None:
    text = "\n".join(f"{v:.12g}" for v in values) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_csv(path, header, rows) -> None:
    if path is None:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(rows)
    else:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)


def _cmd_simulate(args) -> int:
    spec = ModelSpec(args.model, theta=args.theta, phi=args.phi_coef,
                     a0=args.a0, a1=args.a1)
    series = simulate_model(spec, args.n, substream(args.seed, "simulate"))
    _write_lines(args.out, series.values)
    return 0


def _density_from_args(values, method, param):
    if method == "parzen":
        return parzen_lag_window(values, int(param))
    if method == "kernel":
        return kernel_smoothed_estimate(values, float(param))
    if method == "welch":
        return averaged_subsample_estimate(subsample_periodograms(values, int(param)))
    raise ValueError(f"unknown spectral method {method!r}")


def _cmd_spectrum(args) -> int:
    values = _read_series(args.input)
    grid = fourier_grid(args.grid if args.grid else values.size)
    if args.method == "periodogram":
        table = periodogram(values, grid if args.grid else None).values
    else:
        table = _density_from_args(values, args.method, args.param)(grid.frequencies)
    _write_csv(args.out, ("frequency", "value"),
               [(f"{f:.12g}", f"{v:.12g}") for f, v in zip(grid.frequencies, table)])
    return 0


def _cmd_stat(args) -> int:
    phi = parse_phi(args.phi)
    with open(args.input, newline="") as fh:
        rows = list(csv.DictReader(fh))
    freqs = np.array([float(r["frequency"]) for r in rows])
    values = np.array([float(r["value"]) for r in rows])
    positive = freqs > 0
    m = int(round(2.0 * np.pi / freqs[positive].min()))
    grid = fourier_grid(m)
    order = np.argsort(freqs[positive])
    table = (grid, values[positive][order])
    mean = spectral_mean(phi, table)
    out = [("mean", f"{mean.value:.12g}")]
    if args.kind in ("ratio", "both"):
        out.append(("ratio", f"{ratio_statistic(phi, table).value:.12g}"))
    _write_csv(args.out, ("kind", "value"), out if args.kind != "mean" else out[:1])
    return 0


def _cmd_bootstrap(args) -> int:
    values = _read_series(args.input)
    phi = parse_phi(args.phi)
    f_hat = _density_from_args(values, args.f_method, args.f_param)
    options = BootstrapOptions(values.size, args.b, args.M, seed=args.seed,
                               mpb_scheme=args.mpb_scheme)
    if args.method == "mpb":
        draw_set = mpb_draws(values, f_hat, phi, options)
        var_report = mpb_variance(values, f_hat, phi, options)
    elif args.method == "cbp":
        draw_set = cbp_draws(values, f_hat, phi, options, kind=args.stat)
        var_report = cbp_closed_form_variance(values, f_hat, phi, options, kind=args.stat)
    else:
        draw_set = hybrid_draws(values, f_hat, phi, options, kind=args.stat)
        var_report = draw_set.extras["variance"]

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_lines(out_dir / "draws.csv", draw_set.draws)
    rows = [("var_star", f"{var_report.var_star:.12g}"), ("method", var_report.method)]
    rows += [(k, f"{v:.12g}") for k, v in var_report.components.items()]
    rows += [(k, f"{v:.12g}") for k, v in var_report.diagnostics.items()]
    _write_csv(out_dir / "variance.csv", ("key", "value"), rows)
    if args.ci is not None:
        ci = confidence_interval(values, f_hat, phi, options, kind=args.stat, alpha=args.ci)
        _write_csv(out_dir / "ci.csv", ("key", "value"),
                   [("lower", f"{ci.lower:.12g}"), ("upper", f"{ci.upper:.12g}"),
                    ("level", f"{ci.level:.12g}"), ("estimate", f"{ci.estimate:.12g}"),
                    ("studentizer", f"{ci.studentizer:.12g}")])
    print(f"wrote bootstrap outputs to {out_dir}")
    return 0


def _cmd_select_b(args) -> int:
    values = _read_series(args.input)
    lo, hi, step = (int(v) for v in args.grid.split(":"))
    report_obj = select_block_length(values, parse_phi(args.phi),
                                     range(lo, hi + 1, step), L=args.L, seed=args.seed)
    _write_csv(args.out, ("b", "mse"),
               [(int(b), f"{v:.12g}") for b, v in zip(report_obj.b_grid, report_obj.mse)])
    print(f"selected b = {report_obj.b_star} (AR order {report_obj.ar_order}, "
          f"target {report_obj.target:.6g})")
    return 0


def _cmd_cv_bandwidth(args) -> int:
    values = _read_series(args.input)
    grid = [float(v) for v in args.grid.split(",")]
    sel = cv_bandwidth(values, grid)
    _write_csv(args.out, ("h", "cv"),
               [(f"{h:.12g}", f"{v:.12g}") for h, v in zip(sel.grid, sel.scores)])
    print(f"selected h = {sel.bandwidth:.6g}")
    return 0


def _parse_config_file(path) -> ExperimentConfig:
    fields: dict = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()
    model = ModelSpec(fields.pop("model", "I"))
    ints = {k: int(fields[k]) for k in ("n", "M", "R", "ref_reps", "seed") if k in fields}
    kwargs = dict(model=model, **ints)
    if "phi" in fields:
        kwargs["phi"] = parse_phi(fields["phi"])
    if "kind" in fields:
        kwargs["kind"] = fields["kind"]
    if "methods" in fields:
        kwargs["methods"] = tuple(fields["methods"].split(","))
    if "b_values" in fields:
        kwargs["b_values"] = tuple(int(v) for v in fields["b_values"].split(","))
    if "density_method" in fields:
        kwargs["density_method"] = fields["density_method"]
    if "density_param" in fields:
        kwargs["density_param"] = float(fields["density_param"])
    return ExperimentConfig(**kwargs)


def _cmd_experiment(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.config:
        configs = [_parse_config_file(args.config)]
        name = Path(args.config).stem
    else:
        configs = preset_configs(args.preset, scale=args.scale, seed=args.seed)
        name = args.preset

    dist_rows, std_rows = [], []
    for config in configs:
        if config.kind == "ratio" and config.methods == ("cbp",):
            std_rows.extend(harness.run_std_experiment(config).rows)
        else:
            dist_rows.extend(harness.run_distribution_experiment(config).rows)
        print(f"finished model {config.model.model_id}, n = {config.n}")
    written = []
    if dist_rows:
        path = out_dir / f"{name}_d1.csv"
        harness.write_csv(path, harness.DIST_CSV_HEADER, dist_rows)
        written.append(path)
        if args.plot:
            written += report.render_distance_curves(dist_rows, out_dir, stem=f"{name}_d1")
    if std_rows:
        path = out_dir / f"{name}_std.csv"
        harness.write_csv(path, harness.STD_CSV_HEADER, std_rows)
        written.append(path)
        if args.plot:
            written += report.render_std_chart(std_rows, out_dir, stem=f"{name}_std")
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_report(args) -> int:
    for path in report.render_directory(args.input):
        print(f"wrote {path}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdboot",
                                     description="frequency-domain bootstrap toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a benchmark model")
    p.add_argument("--model", required=True, choices=("I", "II", "III", "IV"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--theta", type=float, default=-0.7)
    p.add_argument("--phi-coef", type=float, default=-0.7)
    p.add_argument("--a0", type=float, default=0.3)
    p.add_argument("--a1", type=float, default=0.5)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("spectrum", help="estimate a spectral density")
    p.add_argument("--method", required=True,
                   choices=("welch", "parzen", "kernel", "periodogram"))
    p.add_argument("--param", type=float, default=0.0,
                   help="block length (welch), truncation lag (parzen), or bandwidth (kernel)")
    p.add_argument("--grid", type=int, default=0, help="grid order (defaults to series length)")
    p.add_argument("--input", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("stat", help="spectral mean / ratio statistic of a stored periodogram")
    p.add_argument("--phi", required=True, help="cos:h, indicator:x, or one")
    p.add_argument("--kind", choices=("mean", "ratio", "both"), default="both")
    p.add_argument("--input", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_stat)

    p = sub.add_parser("bootstrap", help="run one bootstrap procedure on a series")
    p.add_argument("--method", required=True, choices=("mpb", "cbp", "hybrid"))
    p.add_argument("--stat", choices=("mean", "ratio"), default="mean")
    p.add_argument("--phi", required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--M", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mpb-scheme", choices=("exponential", "empirical"), default="exponential")
    p.add_argument("--f-method", choices=("parzen", "kernel", "welch"), default="parzen")
    p.add_argument("--f-param", type=float, default=25)
    p.add_argument("--ci", type=float, default=None, help="alpha for an equal-tailed interval")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_bootstrap)

    p = sub.add_parser("select-b", help="choose the block length from the data")
    p.add_argument("--phi", required=True)
    p.add_argument("--grid", required=True, help="bmin:bmax:step")
    p.add_argument("--L", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_select_b)

    p = sub.add_parser("cv-bandwidth", help="choose the smoothing bandwidth from the data")
    p.add_argument("--grid", required=True, help="comma-separated bandwidths")
    p.add_argument("--input", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_cv_bandwidth)

    p = sub.add_parser("experiment", help="run a preset or configured experiment")
    p.add_argument("--preset", choices=("figure1", "figure2", "table1"), default=None)
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--scale", choices=("desk", "paper"), default="desk")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plot", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("report", help="render figures from experiment CSVs")
    p.add_argument("--input", required=True)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "experiment" and not (args.preset or args.config):
        parser.error("experiment needs --preset or --config")
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
