"""Command-line entry point: ``riskprofile {score,profile,bench,dist}``.

Exit codes: 0 success, 2 input or configuration error, 3 a numerical flag
was raised (partial results are still written).
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .coupled_distributions import (
    CoupledGaussian1D,
    cg_cdf,
    cg_pdf,
    cg_sample,
    coupled_avg_identities,
)
from .errors import ClampWarning, SupportMismatchWarning
from .forecast_bench import ExperimentConfig, run_sweep
from .formats import (
    FormatError,
    coerce_fields,
    dumps_report,
    parse_dims,
    read_config_file,
    read_forecast_file,
    write_csv,
)
from .risk_profile import make_r_grid, metric_summary, profile_curve, surprisal

log = logging.getLogger("riskprofile")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

# config keys that are not ExperimentConfig fields
EXTRA_KEYS = ("r_min", "r_max", "r_step", "out", "curves_dir", "workers")


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            yield fh


def _grid(args):
    return make_r_grid(args.r_min, args.r_max, args.r_step)


def _score_one(records, floor):
    s = metric_summary(records.realized_prob, floor)
    fs = np.maximum(records.realized_prob, floor) if floor else records.realized_prob
    report = {
        "N": int(records.realized_prob.size),
        "decisiveness": s.decisiveness,
        "accuracy": s.accuracy,
        "robustness": s.robustness,
        "surprisal": surprisal(fs),
        "n_zero": s.n_zero,
    }
    if records.correct is not None:
        report["pct_correct"] = float(np.mean(records.correct))
    return report


def cmd_score(args) -> int:
    records = read_forecast_file(args.input)
    groups = list(records.groups())
    if groups[0][0] is None:
        report = _score_one(records, args.floor)
    else:
        report = {"models": {mid: _score_one(rec, args.floor) for mid, rec in groups}}
    with _output(args.out) as fh:
        fh.write(dumps_report(report))
    return EXIT_OK


def cmd_profile(args) -> int:
    records = read_forecast_file(args.input)
    grid = _grid(args)
    groups = list(records.groups())
    with _output(args.out) as fh:
        if groups[0][0] is None:
            curve = profile_curve(records.realized_prob, grid, args.floor)
            write_csv(fh, ("r", "value"), list(curve))
        else:
            rows = []
            for mid, rec in groups:
                curve = profile_curve(rec.realized_prob, grid, args.floor)
                rows.extend((mid, r, v) for r, v in curve)
            write_csv(fh, ("model_id", "r", "value"), rows)
    return EXIT_OK


BENCH_FLAGS = {
    "dims": "dims_swept",
    "trials": "n_trials",
    "model_rd": "model_r_D",
    "separation": "class_separation",
    "n_train": "n_train",
    "n_test": "n_test",
    "n_features": "n_features",
    "n_informative": "n_informative",
    "sigma_fit": "sigma_fit",
    "seed": "seed",
}


def _bench_settings(args):
    """Merge config-file values with command-line flags (flags win)."""
    values = {}
    if args.config:
        raw = read_config_file(args.config)
        known = {f for f in ExperimentConfig.__dataclass_fields__} | set(EXTRA_KEYS)
        unknown = sorted(set(raw) - known)
        if unknown:
            raise FormatError(f"unknown config key '{unknown[0]}'")
        values.update(coerce_fields(ExperimentConfig, raw))
        for key in EXTRA_KEYS:
            if key in raw:
                try:
                    values[key] = raw[key] if key in ("out", "curves_dir") else (
                        int(raw[key]) if key == "workers" else float(raw[key]))
                except ValueError:
                    raise FormatError(f"{key}: cannot parse {raw[key]!r}") from None
    for flag, name in BENCH_FLAGS.items():
        v = getattr(args, flag)
        if v is not None:
            values[name] = v
    for key in EXTRA_KEYS:
        v = getattr(args, key)
        if v is not None:
            values[key] = v
    extra = {k: values.pop(k) for k in EXTRA_KEYS if k in values}
    return ExperimentConfig(**values), extra


def cmd_bench(args) -> int:
    cfg, extra = _bench_settings(args)
    grid = make_r_grid(extra.get("r_min", -1.0), extra.get("r_max", 1.0), extra.get("r_step", 0.1))
    log.info("bench: %d trials over dims %s, model_r_D=%g", cfg.n_trials, cfg.dims_swept, cfg.model_r_D)
    result = run_sweep(cfg, grid, workers=extra.get("workers", 1))

    means = {k: result.mean(k) for k in ("pct_correct", "decisiveness", "accuracy", "robustness")}
    rows = [(int(d), *(means[k][i] for k in means)) for i, d in enumerate(result.dims)]
    out = extra.get("out")
    with _output(out) as fh:
        write_csv(fh, ("dims", *means), rows)

    clamped = [f for f in result.flags if f[0] == "variance_clamped"]
    zero_lik = [f for f in result.flags if f[0] == "zero_likelihood"]
    meta = {
        "version": __version__,
        "config": {k: (list(v) if isinstance(v, tuple) else v)
                   for k, v in vars(cfg).items()},
        "r_grid": [float(r) for r in grid],
        "n_variance_clamped": len(clamped),
        "n_zero_likelihood_runs": len(zero_lik),
        "mean_zero_forecasts": [float(v) for v in result.n_zero.mean(axis=1)],
    }
    if out and out != "-":
        Path(str(out) + ".meta.json").write_text(dumps_report(meta))
    else:
        sys.stderr.write(dumps_report(meta))

    curves_dir = extra.get("curves_dir")
    if curves_dir:
        cdir = Path(curves_dir)
        cdir.mkdir(parents=True, exist_ok=True)
        mean_curve = result.mean_curve()
        for i, d in enumerate(result.dims):
            with open(cdir / f"profile_dims{int(d)}.csv", "w", newline="") as fh:
                write_csv(fh, ("r", "value"), zip(grid.tolist(), mean_curve[i].tolist()))

    if clamped:
        log.warning("variance clamped in %d (dims, trial) fits", len(clamped))
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_dist(args) -> int:
    if args.dist_cmd == "identities":
        report = coupled_avg_identities()
        rows = [vars(row) for row in report.rows]
        with _output(args.out) as fh:
            fh.write(dumps_report({
                "max_rel_dev": report.max_rel_dev,
                "any_flagged": report.any_flagged,
                "rows": rows,
            }))
        return EXIT_NUMERIC if report.any_flagged else EXIT_OK

    dist = CoupledGaussian1D(args.mu, args.sigma, args.r_d)
    if args.dist_cmd == "pdf":
        x = np.asarray(args.x, dtype=float)
        with _output(args.out) as fh:
            write_csv(fh, ("x", "pdf", "cdf"),
                      zip(x.tolist(), np.atleast_1d(cg_pdf(dist, x)).tolist(),
                          np.atleast_1d(cg_cdf(dist, x)).tolist()))
        return EXIT_OK

    x, acc = cg_sample(dist, args.n, seed=args.seed, return_acceptance=True)
    log.info("acceptance rate %.6f", acc)
    with _output(args.out) as fh:
        fh.writelines(f"{v!r}\n" for v in x.tolist())
    return EXIT_OK


def _add_grid_flags(p, defaults=True):
    d = (-1.0, 1.0, 0.1) if defaults else (None, None, None)
    p.add_argument("--r-min", type=float, default=d[0], help="lowest risk bias (default -1)")
    p.add_argument("--r-max", type=float, default=d[1], help="highest risk bias (default 1)")
    p.add_argument("--r-step", type=float, default=d[2], help="grid step (default 0.1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskprofile",
        description="Score probabilistic forecasts with Risk Profiles and run coupled-Gaussian benchmarks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="decisiveness, accuracy and robustness of a forecast file")
    p.add_argument("input", help="CSV with a realized_prob column")
    p.add_argument("--floor", type=float, default=0.0, help="raise forecasts to this floor (default off)")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("profile", help="Risk Profile curve of a forecast file")
    p.add_argument("input", help="CSV with a realized_prob column")
    _add_grid_flags(p)
    p.add_argument("--floor", type=float, default=0.0, help="raise forecasts to this floor (default off)")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("bench", help="overfitting sweep over modelled dimensions")
    p.add_argument("--config", help="flat key = value file; flags override its values")
    p.add_argument("--dims", type=parse_dims, help="dimension counts, e.g. 1-10 or 2,4,6")
    p.add_argument("--trials", type=int)
    p.add_argument("--model-rd", dest="model_rd", type=float, help="tail shape of the model")
    p.add_argument("--separation", type=float, help="class mean offset on informative features")
    p.add_argument("--n-train", type=int)
    p.add_argument("--n-test", type=int)
    p.add_argument("--n-features", type=int)
    p.add_argument("--n-informative", type=int)
    p.add_argument("--sigma-fit", choices=("variance", "moment"))
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, help="worker processes (results do not depend on it)")
    _add_grid_flags(p, defaults=False)
    p.add_argument("--out", help="CSV output path; metadata goes to OUT.meta.json")
    p.add_argument("--curves-dir", dest="curves_dir", help="write the mean Risk Profile per dims here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("dist", help="coupled Gaussian density, sampling and identity checks")
    dsub = p.add_subparsers(dest="dist_cmd", required=True)
    for name, help_ in (("pdf", "density and CDF at given points"), ("sample", "draw samples")):
        q = dsub.add_parser(name, help=help_)
        q.add_argument("--r-d", dest="r_d", type=float, required=True, help="tail shape r_D > -2")
        q.add_argument("--mu", type=float, default=0.0)
        q.add_argument("--sigma", type=float, default=1.0)
        q.add_argument("--out")
        if name == "pdf":
            q.add_argument("--x", type=float, nargs="+", required=True)
        else:
            q.add_argument("--n", type=int, required=True)
            q.add_argument("--seed", type=int, default=0)
    q = dsub.add_parser("identities", help="average-uncertainty identity table")
    q.add_argument("--out")
    p.set_defaults(func=cmd_dist)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ClampWarning)
            warnings.simplefilter("ignore", SupportMismatchWarning)
            return args.func(args)
    except (ValueError, OSError) as exc:
        # InputError, DomainError and ParameterError are ValueErrors
        print(f"riskprofile: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ArithmeticError as exc:
        print(f"riskprofile: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
