"""Command-line front end.

Every command writes one table (CSV with a header row, or JSON with a
``manifest`` object and a ``data`` array) to ``--out`` or stdout.  For CSV the
run manifest goes to ``<out>.manifest.json`` (stderr when writing to stdout)
so that data files are byte-identical across identical invocations.  The
manifest timestamp honours ``SOURCE_DATE_EPOCH``.

Exit codes: 0 success, 1 invariant violation, 2 invalid arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, bounds, exact, simulate
from .model import ModelConfig, Rule, Variant, as_fraction
from .stats import summarize

RATIONAL_LIMIT = 300


class UsageError(Exception):
    pass


def _cell(value):
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if value is None:
        return ""
    return value


def _manifest(command: str, args: argparse.Namespace) -> dict:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
    return {
        "subcommand": command,
        "parameters": params,
        "seed": params.get("seed"),
        "version": __version__,
        "timestamp": now.isoformat(),
    }


def _render(columns: list[str], rows: list[dict], fmt: str, manifest: dict) -> str:
    if fmt == "json":
        data = [{c: _cell(r.get(c)) for c in columns} for r in rows]
        return json.dumps({"manifest": manifest, "data": data}, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _emit(args, columns, rows, out=None):
    manifest = _manifest(args.command, args)
    text = _render(columns, rows, args.format, manifest)
    out = out if out is not None else args.out
    if out:
        path = Path(out)
        path.write_text(text)
        if args.format == "csv":
            Path(f"{path}.manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    else:
        sys.stdout.write(text)
        if args.format == "csv":
            sys.stderr.write(json.dumps(manifest) + "\n")


def _side_path(out: str, tag: str) -> str:
    path = Path(out)
    return str(path.with_name(f"{path.stem}.{tag}{path.suffix}"))


def _alpha(args):
    if args.alpha is None:
        return None
    try:
        return as_fraction(args.alpha)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"invalid --alpha {args.alpha!r}") from exc


def _config(args) -> ModelConfig:
    rule = Rule(args.rule)
    alpha = _alpha(args)
    if rule is Rule.BATCH and alpha is None:
        raise UsageError("--rule batch requires --alpha")
    try:
        return ModelConfig(args.n, Variant(args.variant), rule,
                           alpha if rule is Rule.BATCH else None, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _mode(args) -> str:
    if args.mode:
        return args.mode
    return "rational" if args.n <= RATIONAL_LIMIT else "float"


# --- commands -----------------------------------------------------------------


def cmd_simulate(args) -> int:
    config = _config(args)
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    lower = simulate.log2_ceil(config.n)
    if args.table == "trajectory":
        summary = simulate.trajectory(config, args.tmax, args.trials, args.seed)
        rows = [
            {"t": int(t), "mean": m, "q05": a, "median": b, "q95": c}
            for t, m, a, b, c in zip(summary.t, summary.mean, summary.q05,
                                     summary.median, summary.q95)
        ]
        _emit(args, ["t", "mean", "q05", "median", "q95"], rows)
        return 0
    try:
        samples = simulate.sample_wakeup(config, args.trials, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    values = samples.values
    if args.table == "samples":
        rows = [{"trial": i, "value": int(v)} for i, v in enumerate(values)]
        _emit(args, ["trial", "value"], rows)
    else:
        s = summarize(values)
        row = {
            "n": config.n, "variant": config.variant.value, "rule": config.rule.value,
            "alpha": config.alpha, "trials": args.trials, "seed": args.seed,
            "mean": s.mean, "variance": s.variance, "ci_low": s.ci_low, "ci_high": s.ci_high,
            "min": int(s.min), "max": int(s.max), "log2_lower": lower,
        }
        _emit(args, list(row), [row])
    if values.min() < lower:
        print(f"invariant violated: a wakeup time below ceil(log2 n) = {lower}", file=sys.stderr)
        return 1
    return 0


def cmd_exact(args) -> int:
    n = args.n
    if n < 2:
        raise UsageError("--n must be at least 2")
    if not 0 < args.eps < 1:
        raise UsageError("--eps must lie in (0, 1)")
    mode = _mode(args)
    variant = Variant(args.variant)
    if args.table == "kernel":
        kernel = exact.transition_kernel(n, mode, variant)
        rows = []
        for k in range(1, n):
            for j in range(min(k, n - k) + 1):
                p = kernel.prob(k, j)
                if mode == "rational":
                    rows.append({"k": k, "j": j, "num": p.numerator, "den": p.denominator})
                else:
                    rows.append({"k": k, "j": j, "num": float(p), "den": 1})
        _emit(args, ["k", "j", "num", "den"], rows)
    elif args.table == "pmf":
        pmf = exact.wakeup_pmf(n, args.eps, mode, variant)
        rows = [{"t": int(t), "mass": float(m)} for t, m in zip(pmf.support, pmf.masses)]
        _emit(args, ["t", "mass"], rows)
    elif args.table == "sigma":
        sigma = exact.expected_sigma(n, mode, variant)
        rows = [{"k": k, "expected": sigma[k]} for k in range(1, n + 1)]
        _emit(args, ["k", "expected"], rows)
    else:
        mean = exact.expected_wakeup(n, mode, variant)
        lower, reference = bounds.reference_curve(n)
        row = {"n": n, "variant": variant.value, "mode": mode, "expected_T": mean,
               "log2_lower": lower, "reference": reference}
        _emit(args, list(row), [row])
        if mean < lower:
            print("invariant violated: E[T_n] below ceil(log2 n)", file=sys.stderr)
            return 1
    return 0


def _parse_probs(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"invalid probability list {text!r}") from exc


def cmd_couplings(args) -> int:
    which = ["I", "II", "III", "V"] if args.which == "all" else [args.which]
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    qs = _parse_probs(args.qs)
    if "I" in which:
        if not qs or any(not 0 <= q <= 1 for q in qs) or not 0 <= args.p <= 1:
            raise UsageError("--qs and --p must be probabilities")
        if any(q <= args.p for q in qs):
            raise UsageError("every --qs entry must exceed --p")
    if "III" in which and args.n < 4:
        raise UsageError("claim III needs --n >= 4")
    if ("II" in which and args.n < 2) or ("V" in which and args.n < 3):
        raise UsageError("--n too small for the requested claim")
    alpha = _alpha(args)
    if "V" in which and not (alpha is not None and 0 < alpha < Fraction(1, 3)):
        raise UsageError("claim V needs 0 < --alpha < 1/3")

    reports = []
    for claim in which:
        if claim == "I":
            rep = simulate.coupled_bernoulli(qs, args.p, args.trials, args.seed)
        elif claim == "II":
            rep = simulate.coupled_selfloop(args.n, args.trials, args.seed)
        elif claim == "III":
            rep = simulate.coupled_phase(args.n, args.trials, args.seed)
        else:
            rep = simulate.coupled_batch(args.n, alpha, args.trials, args.seed, args.tmax)
        reports.append(rep)

    rows = []
    for rep in reports:
        worst = max((c.worst_gap - c.slack for c in rep.checks.values()), default=None)
        rows.append({
            "claim": rep.claim, "n": None if rep.claim == "I" else args.n,
            "trials": rep.trials, "violations": rep.violations,
            "mean_x": float(rep.x.mean()), "mean_y": float(rep.y.mean()),
            "distributional": None if not rep.checks else all(c.passed for c in rep.checks.values()),
            "worst_excess": worst, "passed": rep.passed,
        })
        if args.out:
            pairs = [{"trial": i, "x": int(a), "y": int(b)} for i, (a, b) in enumerate(zip(rep.x, rep.y))]
            _emit(args, ["trial", "x", "y"], pairs, out=_side_path(args.out, rep.claim))
    _emit(args, ["claim", "n", "trials", "violations", "mean_x", "mean_y",
                 "distributional", "worst_excess", "passed"], rows)
    failed = [rep.claim for rep in reports if not rep.passed]
    if failed:
        print(f"coupling check failed for: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def cmd_bounds(args) -> int:
    alpha = _alpha(args)
    if alpha is None:
        raise UsageError("--alpha is required")
    try:
        p_star = bounds.p_star_bound(alpha)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.n_min < 3 or args.n_max < args.n_min:
        raise UsageError("need 3 <= --n-min <= --n-max")
    rows = []
    unsound = below_p_star = 0
    for n in range(args.n_min, args.n_max + 1):
        for k in bounds.admissible_ks(n, alpha, args.k_policy):
            rep = bounds.bound_report(n, k, alpha)
            q_emp = None
            if args.mc_trials > 0:
                seed = args.seed + 1_000_003 * n + k
                q_emp = simulate.empirical_q(n, k, alpha, args.mc_trials, seed, workers=1)
                se = math.sqrt(max(q_emp * (1 - q_emp), 1.0 / args.mc_trials) / args.mc_trials)
                if q_emp + 3 * se < rep.q_raw:
                    unsound += 1
            if not rep.dominates_p_star:
                below_p_star += 1
            rows.append({"n": n, "k": k, "alpha": alpha, "meanX": rep.mean_x,
                         "qLower": rep.q_raw, "qEmpirical": q_emp, "pStar": p_star})
    _emit(args, ["n", "k", "alpha", "meanX", "qLower", "qEmpirical", "pStar"], rows)
    status = 0
    if unsound:
        print(f"invariant violated: {unsound} rows with qEmpirical below qLower", file=sys.stderr)
        status = 1
    if below_p_star:
        print(f"invariant violated: {below_p_star} of {len(rows)} rows have qLower < pStar",
              file=sys.stderr)
        status = 1
    return status


def cmd_compare(args) -> int:
    n = args.n
    if n < 2:
        raise UsageError("--n must be at least 2")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    mode = _mode(args)
    mean = exact.expected_wakeup(n, mode)
    samples = simulate.sample_wakeup(ModelConfig(n, seed=args.seed), args.trials, args.seed)
    s = summarize(samples.values)
    lower, reference = bounds.reference_curve(n)
    row = {"n": n, "mode": mode, "exact_mean": mean, "sim_mean": s.mean,
           "ci_low": s.ci_low, "ci_high": s.ci_high,
           "recursion_finish": exact.recursion_finish_time(n),
           "log2_lower": lower, "reference": reference}
    _emit(args, list(row), [row])
    return 0


# --- parser -------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, seed=True):
    if seed:
        p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frogsim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Monte Carlo wakeup times")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--variant", choices=["simple", "loop"], default="simple")
    p.add_argument("--rule", choices=["full", "batch"], default="full")
    p.add_argument("--alpha", default=None)
    p.add_argument("--table", choices=["summary", "samples", "trajectory"], default="summary")
    p.add_argument("--tmax", type=int, default=50)
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("exact", help="exact kernel, PMF and expectations")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, default=1e-9)
    p.add_argument("--mode", choices=["rational", "float"], default=None)
    p.add_argument("--variant", choices=["simple", "loop"], default="simple")
    p.add_argument("--table", choices=["summary", "kernel", "pmf", "sigma"], default="summary")
    _common(p, seed=False)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("couplings", help="per-path and distributional coupling checks")
    p.add_argument("--which", choices=["I", "II", "III", "V", "all"], default="all")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--alpha", default="1/10")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--qs", default="0.6,0.7,0.8,0.9")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--tmax", type=int, default=50)
    _common(p)
    p.set_defaults(func=cmd_couplings)

    p = sub.add_parser("bounds", help="sweep of the batch-waking bounds")
    p.add_argument("--alpha", default="1/10")
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=100)
    p.add_argument("--k-policy", choices=["all", "ends"], default="all")
    p.add_argument("--mc-trials", type=int, default=2000)
    _common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("compare", help="exact vs simulated vs reference curves")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--mode", choices=["rational", "float"], default=None)
    _common(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"frogsim {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
