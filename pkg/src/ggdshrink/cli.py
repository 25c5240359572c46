"""``ggdshrink`` command-line front end."""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

from ggdshrink.benchmark import SYNTHETIC_SIGMA, benchmark_image, benchmark_synthetic
from ggdshrink.bayes import ConvergenceError
from ggdshrink.estimation import estimate_noise_mad
from ggdshrink.io import PgmError, emit_csv, read_pgm, write_pgm, write_raw_coeffs
from ggdshrink.metrics import psnr, ssim
from ggdshrink.pipeline import add_noise, denoise, estimate_subband
from ggdshrink.thresholds import (
    DEFAULT_BETAS,
    DEFAULT_SIGMA_WS,
    DEFAULT_SIGMA_YBARS,
    NonUnimodalError,
    RuleKind,
    ThresholdRule,
    fit_threshold_surface,
)
from ggdshrink.wavelet import dwt2_forward

logger = logging.getLogger("ggdshrink")

EXIT_USAGE = 2
EXIT_IO = 3
EXIT_FORMAT = 4
EXIT_NUMERIC = 5


class UsageError(ValueError):
    pass


def parse_list(text: str) -> list[float]:
    """Comma list of numbers; ``a..b`` or ``a..b:step`` expands a range (default step 5)."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            rng, _, step = part.partition(":")
            lo, hi = (float(x) for x in rng.split(".."))
            step = float(step) if step else 5.0
            if step <= 0:
                raise UsageError(f"range step must be positive in {part!r}")
            k = 0
            while lo + k * step <= hi + 1e-9:
                out.append(lo + k * step)
                k += 1
        else:
            out.append(float(part))
    if not out:
        raise UsageError(f"empty list {text!r}")
    return out


def parse_rules(text: str) -> list[ThresholdRule]:
    try:
        return [ThresholdRule.parse(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _levels(text):
    v = int(text)
    if not 1 <= v <= 8:
        raise argparse.ArgumentTypeError("levels must be in [1, 8]")
    return v


def _input_path(p):
    if not Path(p).is_file():
        raise FileNotFoundError(f"input file not found: {p}")
    return p


def _output_path(p):
    parent = Path(p).resolve().parent
    if not parent.is_dir():
        raise FileNotFoundError(f"output directory does not exist: {parent}")
    return p


def cmd_denoise(args):
    _input_path(args.input)
    _output_path(args.output)
    rule = parse_rules(args.rule)
    if len(rule) != 1:
        raise UsageError("denoise takes exactly one rule")
    img = read_pgm(args.input)
    out, report = denoise(img, rule[0], args.levels, args.beta_pin)
    write_pgm(out, args.output)
    print(f"sigma_w_hat={report.sigma_w_hat:.6g} rule={rule[0].name} levels={report.levels} "
          f"elapsed_s={report.elapsed:.3f}")


def cmd_add_noise(args):
    _input_path(args.input)
    _output_path(args.output)
    img = read_pgm(args.input)
    noisy = add_noise(img, args.snr, args.seed)
    if args.raw_out:
        _output_path(args.raw_out)
        write_raw_coeffs(noisy.pixels, args.raw_out)
    write_pgm(noisy.clamped(), args.output)


def cmd_metrics(args):
    ref = read_pgm(_input_path(args.ref))
    test = read_pgm(_input_path(args.test))
    print(f"psnr_db={psnr(ref, test):.4f}")
    print(f"ssim={ssim(ref, test):.6f}")


def cmd_estimate(args):
    img = read_pgm(_input_path(args.input))
    pyr = dwt2_forward(img, args.levels)
    if args.dump:
        _output_path(args.dump)
        write_raw_coeffs(pyr.packed(), args.dump)
    sigma_w = estimate_noise_mad(pyr.band(1, "HH"))
    rules = [ThresholdRule(k) for k in RuleKind if k is not RuleKind.FIXED]
    w = csv.writer(sys.stdout, lineterminator="\n")
    print(f"# sigma_w_hat={sigma_w:.6g}")
    w.writerow(["band", "n", "sigma_y", "sigma_ybar", "kurtosis", "beta_hat"]
               + [f"T_{r.name}" for r in rules])
    for level, name, arr in pyr.subbands():
        est = estimate_subband(arr, sigma_w, True)
        ts = [r.threshold(sigma_w, est.sigma_ybar, est.beta_hat) for r in rules]
        w.writerow([f"{name}{level}", arr.size, f"{math.sqrt(est.var_noisy):.6g}",
                    f"{est.sigma_ybar:.6g}", f"{est.kurtosis:.6g}",
                    "" if est.beta_hat is None else f"{est.beta_hat:.6g}"]
                   + [f"{t:.6g}" for t in ts])


def cmd_bench_synth(args):
    _output_path(args.out)
    rows = benchmark_synthetic(parse_list(args.betas), parse_list(args.snrs),
                               parse_rules(args.rules), runs=args.runs, n=args.n,
                               seed=args.seed, sigma=args.sigma, beta_pin=args.beta_pin,
                               workers=args.workers)
    emit_csv(rows, args.out)


def cmd_bench_image(args):
    _input_path(args.input)
    _output_path(args.out)
    img = read_pgm(args.input)
    rows = benchmark_image(img, parse_list(args.snrs), parse_rules(args.rules),
                           runs=args.runs, seed=args.seed, levels=args.levels,
                           beta_pin=args.beta_pin, workers=args.workers)
    emit_csv(rows, args.out)


def cmd_fit_surface(args):
    _output_path(args.out)
    res = fit_threshold_surface(parse_list(args.betas), parse_list(args.sigma_ws),
                                parse_list(args.sigma_ybars), workers=args.workers)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["name", "beta", "value"])
        w.writerow(["a", "", f"{res.a:.6f}"])
        w.writerow(["b1", "", f"{res.b1:.6f}"])
        for b in sorted(res.b2_samples):
            w.writerow(["b2", f"{b:g}", f"{res.b2_samples[b]:.6f}"])
            w.writerow(["b3", f"{b:g}", f"{res.b3_samples[b]:.6f}"])
        w.writerow(["residual", "", f"{res.residual:.6f}"])
        for b, sw, sy, T in res.points:
            w.writerow([f"T*(sigma_w={sw:g},sigma_ybar={sy:g})", f"{b:g}", f"{T:.6f}"])
    print(f"a={res.a:.4f} b1={res.b1:.4f} residual={res.residual:.4g} "
          f"points={len(res.points)} failures={len(res.failures)}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ggdshrink", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("denoise", help="denoise a PGM image")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--out", dest="output", required=True)
    d.add_argument("--rule", default="rbayes", help="rbayes|bayes|lseb|map|fixed:T")
    d.add_argument("--levels", type=_levels, default=5)
    d.add_argument("--beta-pin", type=float, default=None)
    d.set_defaults(func=cmd_denoise)

    n = sub.add_parser("add-noise", help="add white Gaussian noise at a given SNR")
    n.add_argument("--in", dest="input", required=True)
    n.add_argument("--out", dest="output", required=True)
    n.add_argument("--snr", type=float, required=True)
    n.add_argument("--seed", type=int, default=0)
    n.add_argument("--raw-out", default=None, help="also dump the unclipped noisy image")
    n.set_defaults(func=cmd_add_noise)

    m = sub.add_parser("metrics", help="PSNR and SSIM of a test image against a reference")
    m.add_argument("--ref", required=True)
    m.add_argument("--test", required=True)
    m.set_defaults(func=cmd_metrics)

    e = sub.add_parser("estimate", help="per-subband estimates and thresholds")
    e.add_argument("--in", dest="input", required=True)
    e.add_argument("--levels", type=_levels, default=5)
    e.add_argument("--dump", default=None, help="write packed coefficients as a raw dump")
    e.set_defaults(func=cmd_estimate)

    bs = sub.add_parser("bench-synth", help="synthetic GGD benchmark to CSV")
    bs.add_argument("--betas", default="0.1,0.3,0.5,0.8,1.0")
    bs.add_argument("--snrs", default="5..30")
    bs.add_argument("--rules", default="rbayes,bayes,lseb")
    bs.add_argument("--runs", type=int, default=100)
    bs.add_argument("--n", type=int, default=2 ** 18)
    bs.add_argument("--seed", type=int, default=7)
    bs.add_argument("--sigma", type=float, default=SYNTHETIC_SIGMA)
    bs.add_argument("--beta-pin", type=float, default=None)
    bs.add_argument("--workers", type=int, default=1)
    bs.add_argument("--out", required=True)
    bs.set_defaults(func=cmd_bench_synth)

    bi = sub.add_parser("bench-image", help="image benchmark to CSV")
    bi.add_argument("--in", dest="input", required=True)
    bi.add_argument("--snrs", default="5..30")
    bi.add_argument("--rules", default="rbayes,bayes")
    bi.add_argument("--runs", type=int, default=100)
    bi.add_argument("--seed", type=int, default=7)
    bi.add_argument("--levels", type=_levels, default=5)
    bi.add_argument("--beta-pin", type=float, default=None)
    bi.add_argument("--workers", type=int, default=1)
    bi.add_argument("--out", required=True)
    bi.set_defaults(func=cmd_bench_image)

    fs = sub.add_parser("fit-surface", help="fit the threshold surface to optimal thresholds")
    fs.add_argument("--betas", default=",".join(map(str, DEFAULT_BETAS)))
    fs.add_argument("--sigma-ws", default=",".join(map(str, DEFAULT_SIGMA_WS)))
    fs.add_argument("--sigma-ybars", default=",".join(map(str, DEFAULT_SIGMA_YBARS)))
    fs.add_argument("--workers", type=int, default=1)
    fs.add_argument("--out", required=True)
    fs.set_defaults(func=cmd_fit_surface)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PgmError as exc:
        print(f"error: format: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConvergenceError, NonUnimodalError) as exc:
        print(f"error: numeric: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: value: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
