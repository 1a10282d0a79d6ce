"""Command line interface: ``run``, ``sample`` and ``pdf`` subcommands."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace

import numpy as np

from . import distributions as dist
from .config import ConfigError, RunConfig, parse_bool
from .experiment import CellError, noise_preset, replay_cell, run_campaign
from .report import format_float, render_fit_svg, write_csv, write_json
from .sampling import (
    RngStream,
    sample_gaussian,
    sample_stable,
    sample_stretched_gaussian_ar,
    sample_stretched_gaussian_exact,
)

log = logging.getLogger("lsqnoise")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _u64(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {v}")
    return v


def _bool(text):
    try:
        return parse_bool(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _kv(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    k, v = text.split("=", 1)
    try:
        return k.strip(), float(v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{k.strip()}: not a number: {v!r}") from None


_PARAM_TYPES = {
    "gaussian": dist.GaussianParams,
    "stable": dist.StableParams,
    "stretched": dist.StretchedGaussianParams,
    "levy": dist.OneSidedLevyParams,
}


def _build_params(family, pairs):
    if family in ("fa", "fb", "fc"):
        base = noise_preset(family).params
        cls = type(base)
    else:
        base, cls = None, _PARAM_TYPES[family]
    kwargs = dict(pairs)
    try:
        if base is not None:
            return replace(base, **kwargs)
        return cls(**kwargs)
    except TypeError:
        allowed = ", ".join(f for f in cls.__dataclass_fields__)
        raise UsageError(f"bad parameters {sorted(kwargs)} for {family}; allowed: {allowed}") from None


def cmd_run(args) -> int:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if cfg.seed is not None and cfg.seed != args.seed:
        raise ConfigError("seed", f"config seed {cfg.seed} disagrees with --seed {args.seed}")
    overrides = {"seed": args.seed}
    if args.out is not None:
        overrides["out"] = args.out
    if args.plots is not None:
        overrides["plots"] = args.plots
    if args.n is not None:
        overrides["n"] = args.n
    if args.workers is not None:
        overrides["workers"] = args.workers
    cfg = replace(cfg, **overrides).validate()

    models, noises = cfg.model_specs(), cfg.noise_specs()
    report = run_campaign(models, noises, cfg.levels, cfg.seeds, n=cfg.n,
                          master_seed=cfg.seed, workers=cfg.workers)
    os.makedirs(cfg.out, exist_ok=True)
    write_csv(report, os.path.join(cfg.out, "report.csv"))
    write_json(report, os.path.join(cfg.out, "report.json"))
    with open(os.path.join(cfg.out, "config.cfg"), "w", encoding="utf-8") as fh:
        fh.write(cfg.to_text())
    if cfg.plots:
        seed = cfg.seeds[0]
        for m in models:
            for lv in cfg.levels:
                trials = {nz.name: replay_cell(cfg.seed, cfg.n, m, nz, lv, seed) for nz in noises}
                title = f"{m.family.value} model, {lv:g}% noise (seed {seed})"
                path = os.path.join(cfg.out, f"fit_{m.family.value}_{lv:g}pct.svg")
                with open(path, "w", encoding="utf-8") as fh:
                    fh.write(render_fit_svg(title, trials))
    if {"FA", "FB", "FC"} <= {nz.name for nz in noises}:
        for o in report.ordering_table():
            log.info("%s %g%%: P(FA<FC<FB) rerr1=%.3f rerr2=%.3f  P(FB>FA)=%.3f",
                     o.model, o.level_percent, o.rerr1_fraction, o.rerr2_fraction, o.fb_over_fa)
    log.info("wrote %d rows to %s", len(report.rows), cfg.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    p = _build_params(args.family, args.param)
    rng = RngStream(args.seed, 0)
    if args.n < 0:
        raise UsageError("--n must be >= 0")
    if args.n == 0:
        return EXIT_OK
    if isinstance(p, dist.GaussianParams):
        xs = sample_gaussian(rng, p, args.n)
    elif isinstance(p, dist.StableParams):
        xs = sample_stable(rng, p, args.n)
    elif isinstance(p, dist.StretchedGaussianParams):
        sampler = sample_stretched_gaussian_exact if args.method == "exact" else sample_stretched_gaussian_ar
        xs = sampler(rng, p, args.n)
    else:
        raise UsageError(f"sampling is not supported for family {args.family!r}")
    sys.stdout.write("".join(format_float(v) + "\n" for v in xs))
    return EXIT_OK


_PDFS = {
    dist.GaussianParams: dist.gaussian_pdf,
    dist.OneSidedLevyParams: dist.levy_pdf,
    dist.StretchedGaussianParams: dist.stretched_gaussian_pdf,
}


def cmd_pdf(args) -> int:
    p = _build_params(args.family, args.param)
    pdf = _PDFS.get(type(p))
    if pdf is None:
        raise UsageError(f"no closed-form density for family {args.family!r}")
    if not args.xmin < args.xmax:
        raise UsageError("--xmin must be below --xmax")
    if args.steps < 2:
        raise UsageError("--steps must be >= 2")
    xs = np.linspace(args.xmin, args.xmax, args.steps)
    ys = pdf(xs, p)
    sys.stdout.write("".join(f"{format_float(x)},{format_float(y)}\n" for x, y in zip(xs, ys)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lsqnoise",
        description="Least-squares fitting under Gaussian and non-Gaussian noise.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a fitting campaign and write reports")
    run.add_argument("--config", metavar="PATH", help="key = value config file (default: built-in campaign)")
    run.add_argument("--seed", type=_u64, required=True, metavar="U64", help="master seed")
    run.add_argument("--out", metavar="DIR", help="output directory")
    run.add_argument("--plots", type=_bool, metavar="BOOL", help="write SVG fit plots")
    run.add_argument("--n", type=int, metavar="COUNT", help="observations per trial")
    run.add_argument("--workers", type=int, metavar="K", help="worker processes")
    run.set_defaults(func=cmd_run)

    families = ["gaussian", "stable", "stretched", "fa", "fb", "fc"]
    sample = sub.add_parser("sample", help="print variates, one per line")
    sample.add_argument("family", choices=families)
    sample.add_argument("-p", "--param", type=_kv, action="append", default=[], metavar="NAME=VALUE")
    sample.add_argument("--n", type=int, required=True, metavar="COUNT")
    sample.add_argument("--seed", type=_u64, required=True, metavar="U64")
    sample.add_argument("--method", choices=["ar", "exact"], default="ar",
                        help="stretched Gaussian sampler (default: ar)")
    sample.set_defaults(func=cmd_sample)

    pdf = sub.add_parser("pdf", help="print x,density pairs on an even grid")
    pdf.add_argument("family", choices=["gaussian", "levy", "stretched", "fa", "fc"])
    pdf.add_argument("-p", "--param", type=_kv, action="append", default=[], metavar="NAME=VALUE")
    pdf.add_argument("--xmin", type=float, required=True)
    pdf.add_argument("--xmax", type=float, required=True)
    pdf.add_argument("--steps", type=int, default=201)
    pdf.set_defaults(func=cmd_pdf)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, UsageError, dist.ParameterError) as exc:
        print(f"lsqnoise: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CellError as exc:
        print(f"lsqnoise: error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"lsqnoise: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
