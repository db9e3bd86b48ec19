"""Command line entry point: ``reflectlab <subcommand> [options]``.

Exit status is 0 iff every check of the subcommand passed.  JSON reports are
written with sorted keys and embed the full run configuration.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from contextlib import contextmanager

import numpy as np

from . import exact, statverify
from .lattice import LatticeWalk, discrete_push_down, discrete_push_up
from .paths import SampledPath, push_down, push_up
from .walks import (SEED_MAX, extract_kdp, reflect_triple, simulate_triple)

TRAJECTORY_COLUMNS = ("t", "m", "u", "l", "u_ref", "l_ref", "k", "d", "p")


class CLIError(Exception):
    pass


def _seed(text):
    value = int(text)
    if not 0 <= value <= SEED_MAX:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _alpha(text):
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return value


@contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _write_json(report, path):
    with _open_out(path) as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def read_path_csv(path: str) -> tuple[list[str], np.ndarray]:
    """Read a ``t,value`` CSV.  Returns the raw time strings and the values."""
    times, values = [], []
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise CLIError(f"{path}: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "value"]:
            raise CLIError(f"{path}:1: expected header 't,value'")
        for row in reader:
            if not row:
                continue
            if len(row) != 2:
                raise CLIError(f"{path}:{reader.line_num}: expected 2 fields, got {len(row)}")
            try:
                float(row[0])
                values.append(float(row[1]))
            except ValueError:
                raise CLIError(f"{path}:{reader.line_num}: not a number: {row!r}") from None
            times.append(row[0].strip())
    if not values:
        raise CLIError(f"{path}: no data rows")
    return times, np.array(values)


def _grid(path, times):
    t = np.array([float(s) for s in times])
    if t.size == 1:
        return t[0], 1.0
    dt = t[1] - t[0]
    if not dt > 0:
        raise CLIError(f"{path}:3: times must increase")
    # rows are at lines 2, 3, ... of the file
    off = np.flatnonzero(~np.isclose(np.diff(t), dt, rtol=1e-9, atol=0.0))
    if off.size:
        raise CLIError(f"{path}:{off[0] + 3}: non-uniform grid")
    return t[0], dt


def cmd_reflect(args):
    tx, xv = read_path_csv(args.path)
    tb, bv = read_path_csv(args.barrier)
    if args.mode == "continuous":
        t0x, dtx = _grid(args.path, tx)
        t0b, dtb = _grid(args.barrier, tb)
        x = SampledPath(xv, dtx, t0x)
        b = SampledPath(bv, dtb, t0b)
        fn = push_up if args.direction == "up" else push_down
        result = fn(x, b).values.tolist()
        xv_out, bv_out = xv.tolist(), bv.tolist()
    else:
        if tx != tb:
            raise ValueError("incompatible grids")
        t = np.array([float(s) for s in tx])
        if not np.array_equal(t, np.arange(t.size) + t[0]) or t[0] != round(t[0]):
            raise CLIError(f"{args.path}: discrete mode needs consecutive integer times")
        x = LatticeWalk.from_values(xv)
        b = LatticeWalk.from_values(bv)
        fn = discrete_push_up if args.direction == "up" else discrete_push_down
        result = fn(x, b).values.tolist()
        xv_out, bv_out = x.values.tolist(), b.values.tolist()
    with _open_out(args.output) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "path", "barrier", "reflected"])
        w.writerows(zip(tx, xv_out, bv_out, result))
    return True


def trajectory_rows(steps: int, seed: int):
    t = reflect_triple(simulate_triple(steps, seed))
    kdp = extract_kdp(t)
    cols = [t.m.values, t.u.values, t.l.values, t.u_reflected.values, t.l_reflected.values]
    for i, s in enumerate(kdp):
        yield [i] + [int(c[i]) for c in cols] + [s.k, s.d, s.p]


def cmd_simulate(args):
    rows = list(trajectory_rows(args.steps, args.seed))
    if args.format == "json":
        _write_json({"config": _config(args),
                     "rows": [dict(zip(TRAJECTORY_COLUMNS, r)) for r in rows]}, args.output)
    else:
        with _open_out(args.output) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRAJECTORY_COLUMNS)
            w.writerows(rows)
    return True


def cmd_verify_kernel(args):
    kernel = exact.verify_kernel(args.d_max)
    moments = exact.verify_generator_moments(args.moments_d_max)
    report = {"config": _config(args), "kernel": kernel, "generator_moments": moments,
              "pass": kernel["pass"] and moments["pass"]}
    _write_json(report, args.output)
    return report["pass"]


def cmd_verify_lemma(args):
    lemma = exact.verify_lemma_identities(args.n_max)
    marginal = exact.verify_marginal_agreement(min(args.n_max, 12))
    report = {"config": _config(args), "lemma": lemma, "marginal_agreement": marginal,
              "pass": lemma["pass"] and marginal["pass"]}
    _write_json(report, args.output)
    return report["pass"]


def _write_samples(path, columns: dict):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial"] + list(columns))
        for i, row in enumerate(zip(*columns.values())):
            w.writerow([i] + [float(v) for v in row])


def _experiment_entry(name, report, control):
    out = report.to_dict()
    out["experiment"] = name
    out["negative_control"] = control.to_dict()
    out["negative_control"]["expected_pass"] = False
    return out


def cmd_verify_bessel(args):
    params = dict(n_steps=args.steps, trials=args.trials, seed=args.seed, alpha=args.alpha)
    rep = statverify.mc_bessel_experiment(**params)
    ctrl = statverify.mc_bessel_experiment(**params, oracle=statverify.HALF_NORMAL)
    entry = _experiment_entry("bessel", rep, ctrl)
    ok = rep.passed and not ctrl.passed
    if args.samples:
        _write_samples(args.samples, {"bessel": statverify.bessel_samples(
            args.steps, args.trials, args.seed)})
    _write_json({"config": _config(args), "reports": [entry], "pass": ok}, args.output)
    return ok


def cmd_verify_reflected_bm(args):
    params = dict(n_steps=args.steps, trials=args.trials, seed=args.seed, alpha=args.alpha)
    reps = statverify.mc_reflected_bm_experiment(**params)
    ctrls = statverify.mc_reflected_bm_experiment(**params, oracle=statverify.BES3)
    entries = [_experiment_entry(k, reps[k], ctrls[k]) for k in reps]
    ok = all(r.passed for r in reps.values()) and not any(c.passed for c in ctrls.values())
    if args.samples:
        _write_samples(args.samples, statverify.reflected_bm_samples(
            args.steps, args.trials, args.seed))
    _write_json({"config": _config(args), "reports": entries, "pass": ok}, args.output)
    return ok


def cmd_emit_dist(args):
    if args.experiment == "bessel":
        samples = statverify.bessel_samples(args.steps, args.trials, args.seed)
        oracle = statverify.BES3
    else:
        samples = statverify.reflected_bm_samples(args.steps, args.trials, args.seed)[
            args.experiment]
        oracle = statverify.HALF_NORMAL
    values, counts = np.unique(samples, return_counts=True)
    ecdf = np.cumsum(counts) / samples.size
    with _open_out(args.output) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["value", "empirical_cdf", "oracle_cdf"])
        w.writerows(zip(values.tolist(), ecdf.tolist(), oracle.cdf(values).tolist()))
    return True


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reflectlab",
        description="Skorohod reflection of walks and paths, exact and Monte Carlo checks.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("-o", "--output", default="-", help="output file (default stdout)")
        p.set_defaults(func=func)
        return p

    p = add("reflect", cmd_reflect, "reflect a path CSV on a barrier CSV")
    p.add_argument("--path", required=True, help="CSV with header t,value")
    p.add_argument("--barrier", required=True, help="CSV with header t,value")
    p.add_argument("--mode", choices=("continuous", "discrete"), default="continuous")
    p.add_argument("--direction", choices=("up", "down"), default="up")

    p = add("simulate", cmd_simulate, "simulate one coupled triple and its (k, d, p) chain")
    p.add_argument("--steps", type=_positive, required=True)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = add("verify-kernel", cmd_verify_kernel, "exact step law vs kernel, generator moments")
    p.add_argument("--d-max", type=_positive, default=50)
    p.add_argument("--moments-d-max", type=_positive, default=1000)

    p = add("verify-lemma", cmd_verify_lemma, "exact history DP for the conditional identities")
    p.add_argument("--n-max", type=int, default=10)

    for name, func in (("verify-bessel", cmd_verify_bessel),
                       ("verify-reflected-bm", cmd_verify_reflected_bm)):
        p = add(name, func, "Monte Carlo KS test at t = 1")
        p.add_argument("--steps", type=_positive, default=10_000)
        p.add_argument("--trials", type=_positive, default=20_000)
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--alpha", type=_alpha, default=0.01)
        p.add_argument("--samples", help="also write raw samples to this CSV")

    p = add("emit-dist", cmd_emit_dist, "empirical vs limit CDF for plotting")
    p.add_argument("--experiment", choices=("bessel", "x_hat", "y_hat"), default="bessel")
    p.add_argument("--steps", type=_positive, default=10_000)
    p.add_argument("--trials", type=_positive, default=20_000)
    p.add_argument("--seed", type=_seed, default=0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand == "verify-lemma" and args.n_max < 0:
        parser.error("--n-max must be non-negative")
    if args.subcommand == "emit-dist" and (args.steps < statverify.MIN_STEPS
                                           or args.trials < statverify.MIN_TRIALS):
        parser.error(f"--steps must be >= {statverify.MIN_STEPS} "
                     f"and --trials >= {statverify.MIN_TRIALS}")
    try:
        ok = args.func(args)
    except (CLIError, ValueError, exact.HistoryCapExceeded) as exc:
        print(f"reflectlab {args.subcommand}: error: {exc}", file=sys.stderr)
        return 1
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
