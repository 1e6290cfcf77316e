"""Command-line front end.

Subcommands: sigma0, prime-zeta, scan, certify, mc, table.  Exit codes:
0 success, 2 usage error (argparse), 1 computation error -- including a
certification that soundly fails (the refusal is correct behavior, but
the requested certificate was not produced).

Output goes to stdout or --output, UTF-8 and newline-terminated.  JSON
payloads carry a `schema: 1` field; CSV always starts with its header
row `t_min,re_zeta_min,t_start,t_end,length`, values rounded to 4
decimal places (the reference table's convention).  Environment:
REZETA_THREADS (default thread count) and REZETA_CHECKPOINT_DIR
(directory for relative --checkpoint paths).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from mpmath import mp

from .errors import RezetaError

SCHEMA = 1
CSV_HEADER = "t_min,re_zeta_min,t_start,t_end,length"
LONGRUN_TRIALS = 10 ** 9
LONGRUN_RANGE = (10.0, 16_656_259.0)


def _threads_default() -> int:
    try:
        return max(1, int(os.environ.get("REZETA_THREADS", "1")))
    except ValueError:
        return 1


def _checkpoint_path(arg: Optional[str]) -> Optional[str]:
    if arg is None:
        return None
    base = os.environ.get("REZETA_CHECKPOINT_DIR")
    if base and not os.path.isabs(arg):
        return os.path.join(base, arg)
    return arg


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rezeta",
        description="Negative values of Re zeta on sigma = 1: the constant "
                    "sigma0, window scanning/certification, density estimation.",
    )
    sub = p.add_subparsers(dest="cmd", required=True, metavar="SUBCOMMAND")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", metavar="FILE", help="write output here instead of stdout")

    q = sub.add_parser("sigma0", parents=[common],
                       help="solve sum_p arcsin(p^-sigma) = pi/2 to D digits")
    q.add_argument("--digits", type=int, default=30)
    q.add_argument("--method", choices=["logzeta", "arcsin"], default="logzeta")
    q.add_argument("--strategy", choices=["hybrid", "bisect", "convex"], default="hybrid")
    q.add_argument("--emit", choices=["text", "json"], default="text")

    q = sub.add_parser("prime-zeta", parents=[common],
                       help="P(sigma) = sum_p p^-sigma with a guaranteed error bound")
    q.add_argument("--sigma", required=True,
                   help="abscissa > 1.05 (decimal string, parsed at working precision)")
    q.add_argument("--digits", type=int, default=30, help="target decimal accuracy")
    q.add_argument("--bits", type=int, default=None,
                   help="working precision override (default: digits-derived)")
    q.add_argument("--emit", choices=["text", "json"], default="text")

    q = sub.add_parser("scan", parents=[common],
                       help="find and certify sign windows of Re zeta(1+it)")
    q.add_argument("--from", dest="t_from", type=float, default=None)
    q.add_argument("--to", dest="t_to", type=float, default=None)
    q.add_argument("--coarse-step", type=float, default=0.01)
    q.add_argument("--refine-tol", type=float, default=1e-8)
    q.add_argument("--margin", type=float, default=0.05)
    q.add_argument("--emit", choices=["text", "csv", "json"], default="text")
    q.add_argument("--checkpoint", metavar="FILE")
    q.add_argument("--threads", type=int, default=None)
    q.add_argument("--long-run", action="store_true",
                   help="default --from/--to to the full documented range")

    q = sub.add_parser("certify", parents=[common],
                       help="prove Re zeta(1+it) > 0 on a range (or report where not)")
    q.add_argument("--from", dest="t_from", type=float, required=True)
    q.add_argument("--to", dest="t_to", type=float, required=True)
    q.add_argument("--margin", type=float, default=0.05)
    q.add_argument("--emit", choices=["text", "json"], default="text")

    q = sub.add_parser("mc", parents=[common],
                       help="Monte Carlo estimate of the negativity density d(sigma)")
    q.add_argument("--sigma", type=float, required=True)
    q.add_argument("--trials", type=int, default=None)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--streams", type=int, default=1)
    q.add_argument("--cutoff", type=int, default=None)
    q.add_argument("--emit", choices=["text", "json"], default="text")
    q.add_argument("--long-run", action="store_true",
                   help=f"default --trials to {LONGRUN_TRIALS:.0e} (overnight scale)")

    q = sub.add_parser("table", parents=[common],
                       help="replay the reference windows (scan +-0.5 around each)")
    q.add_argument("--rows", type=int, default=None, help="how many rows (default 5)")
    q.add_argument("--emit", choices=["text", "csv", "json"], default="text")
    q.add_argument("--threads", type=int, default=None)
    q.add_argument("--long-run", action="store_true", help="default --rows to all 50")
    return p


# -- formatting ----------------------------------------------------------------

def _csv_rows(windows) -> str:
    lines = [CSV_HEADER]
    for w in windows:
        lines.append(f"{w.t_min:.4f},{w.min_value:.4f},{w.t_start:.4f},"
                     f"{w.t_end:.4f},{w.length:.4f}")
    return "\n".join(lines)


def _windows_json(windows) -> list:
    return [w.as_dict() for w in windows]


def _certified_json(certified) -> list:
    out = []
    for c in certified:
        steps = [h for (_, _, h) in c.step_log]
        out.append({
            "t_lo": c.t_lo, "t_hi": c.t_hi, "steps": len(c.step_log),
            "min_step": min(steps) if steps else None,
        })
    return out


# -- subcommand handlers: return (payload text, exit code) ----------------------

def _cmd_sigma0(args) -> tuple[str, int]:
    from .sigma0 import solve_sigma0
    r = solve_sigma0(args.digits, method=args.method, strategy=args.strategy)
    width = r.bracket.hi - r.bracket.lo
    if args.emit == "json":
        return json.dumps({
            "schema": SCHEMA, "command": "sigma0", "digits": r.digits,
            "method": r.method, "strategy": r.strategy, "value": r.decimal,
            "enclosure_width": mp.nstr(width, 3), "evaluations": r.evaluations,
        }), 0
    return (f"sigma0 = {r.decimal}\n"
            f"digits: {r.digits}   enclosure width: {mp.nstr(width, 3)}\n"
            f"evaluations: {r.evaluations}   method: {r.method}   "
            f"strategy: {r.strategy}"), 0


def _cmd_prime_zeta(args) -> tuple[str, int]:
    from .kernel import PrecisionContext
    from .primezeta import prime_zeta
    if args.digits < 1:
        raise RezetaError(f"--digits must be >= 1, got {args.digits}")
    eps = mp.mpf(10) ** (-args.digits)
    bits = args.bits if args.bits else PrecisionContext.from_digits(args.digits).bits
    ctx = PrecisionContext(bits=bits)
    value = prime_zeta(args.sigma, eps, ctx)
    shown = mp.nstr(value, args.digits + 2, strip_zeros=False)
    if args.emit == "json":
        return json.dumps({
            "schema": SCHEMA, "command": "prime-zeta", "sigma": args.sigma,
            "value": shown, "error_bound": f"1e-{args.digits}", "bits": bits,
        }), 0
    return f"P({args.sigma}) = {shown}   (error <= 1e-{args.digits})", 0


def _scan_args(args) -> tuple[float, float]:
    t_from, t_to = args.t_from, args.t_to
    if args.long_run:
        t_from = LONGRUN_RANGE[0] if t_from is None else t_from
        t_to = LONGRUN_RANGE[1] if t_to is None else t_to
    if t_from is None or t_to is None:
        raise RezetaError("--from and --to are required (or use --long-run)")
    return t_from, t_to


def _cmd_scan(args) -> tuple[str, int]:
    from .linescan import scan
    t_from, t_to = _scan_args(args)
    threads = args.threads if args.threads else _threads_default()
    rep = scan(t_from, t_to, coarse_step=args.coarse_step,
               refine_tol=args.refine_tol, margin=args.margin,
               threads=threads, checkpoint=_checkpoint_path(args.checkpoint))
    if args.emit == "csv":
        return _csv_rows(rep.windows), 0
    if args.emit == "json":
        return json.dumps({
            "schema": SCHEMA, "command": "scan", "t_lo": rep.t_lo,
            "t_hi": rep.t_hi, "coarse_step": rep.coarse_step,
            "refine_tol": rep.refine_tol, "windows": _windows_json(rep.windows),
            "certified": _certified_json(rep.certified),
            "evaluations": rep.evaluations, "empirical_d": rep.empirical_d,
        }), 0
    lines = [f"scanned [{rep.t_lo}, {rep.t_hi}]  "
             f"({rep.evaluations} evaluations, {len(rep.windows)} window(s))"]
    for w in rep.windows:
        lines.append(f"  window ({w.t_start:.8f}, {w.t_end:.8f})  "
                     f"length {w.length:.8f}  min {w.min_value:.7f} at t = {w.t_min:.4f}")
    for c in rep.certified:
        lines.append(f"  certified positive on [{c.t_lo:.4f}, {c.t_hi:.4f}]"
                     f"  ({len(c.step_log)} steps)")
    lines.append(f"window measure / scanned length = {rep.empirical_d:.4e}")
    return "\n".join(lines), 0


def _cmd_certify(args) -> tuple[str, int]:
    from .linescan import CertifiedRange, certify_positive
    res = certify_positive(args.t_from, args.t_to, margin=args.margin)
    ok = isinstance(res, CertifiedRange)
    if args.emit == "json":
        body = {"schema": SCHEMA, "command": "certify", "t_lo": args.t_from,
                "t_hi": args.t_to, "margin": args.margin, "certified": ok,
                "steps": len(res.step_log)}
        if not ok:
            body.update({"t_fail": res.t_fail, "reason": res.reason})
        return json.dumps(body), 0 if ok else 1
    if ok:
        return (f"certified: Re zeta(1+it) > 0 on [{args.t_from}, {args.t_to}]  "
                f"({len(res.step_log)} steps, margin {args.margin})"), 0
    return (f"NOT certified: walk failed at t = {res.t_fail:.6f} ({res.reason}) "
            f"after {res.steps} steps -- candidate negative region, not a disproof"), 1


def _cmd_mc(args) -> tuple[str, int]:
    from .montecarlo import DEFAULT_CUTOFF, ModelConfig, estimate_d
    trials = args.trials
    if trials is None:
        if not args.long_run:
            raise RezetaError("--trials is required (or use --long-run)")
        trials = LONGRUN_TRIALS
        print(f"long-run mode: {trials} trials; expect hours at cutoff >= 1e4",
              file=sys.stderr)
    cutoff = args.cutoff if args.cutoff else DEFAULT_CUTOFF
    config = ModelConfig(sigma=args.sigma, trials=trials, seed=args.seed,
                         streams=args.streams, prime_cutoff=cutoff)
    s = estimate_d(config, threads=_threads_default())
    if args.emit == "json":
        body = {"schema": SCHEMA, "command": "mc"}
        body.update(s.as_dict())
        return json.dumps(body), 0
    return (f"d({s.sigma}) ~ {s.d_hat:.4e}   "
            f"[{s.ci95[0]:.4e}, {s.ci95[1]:.4e}] 95% ({s.ci_method})\n"
            f"negative_hits: {s.negative_hits} / {s.trials}   "
            f"mean Re Z = {s.mean:.5f}   variance = {s.variance:.5f}\n"
            f"cutoff: {s.prime_cutoff} (arg tail rms ~ {s.arg_tail_rms:.1e})   "
            f"seed: {s.seed}   streams: {s.streams}"), 0


def _cmd_table(args) -> tuple[str, int]:
    from .linescan import find_negative_windows
    from .table_data import ROWS
    rows = args.rows
    if rows is None:
        rows = len(ROWS) if args.long_run else 5
    if not 1 <= rows <= len(ROWS):
        raise RezetaError(f"--rows must be in [1, {len(ROWS)}], got {rows}")
    windows = []
    for (t_min, _, _) in ROWS[:rows]:
        found = find_negative_windows(t_min - 0.5, t_min + 0.5, 0.01, 1e-8)
        windows.extend(found)
    if args.emit == "csv":
        return _csv_rows(windows), 0
    if args.emit == "json":
        return json.dumps({"schema": SCHEMA, "command": "table", "rows": rows,
                           "windows": _windows_json(windows)}), 0
    lines = [f"{'t_min':>14}  {'re_zeta_min':>11}  {'length':>8}   reference"]
    for w, (t_ref, v_ref, len_ref) in zip(windows, ROWS[:rows]):
        agree = (f"{w.t_min:.4f}" == f"{t_ref:.4f}"
                 and f"{w.min_value:.4f}" == f"{v_ref:.4f}"
                 and f"{w.length:.4f}" == f"{len_ref:.4f}")
        lines.append(f"{w.t_min:14.4f}  {w.min_value:11.4f}  {w.length:8.4f}   "
                     f"{'match' if agree else f'REF {t_ref} {v_ref} {len_ref}'}")
    return "\n".join(lines), 0


_DISPATCH = {
    "sigma0": _cmd_sigma0,
    "prime-zeta": _cmd_prime_zeta,
    "scan": _cmd_scan,
    "certify": _cmd_certify,
    "mc": _cmd_mc,
    "table": _cmd_table,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        payload, code = _DISPATCH[args.cmd](args)
        text = payload if payload.endswith("\n") else payload + "\n"
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except (RezetaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return code


if __name__ == "__main__":
    sys.exit(main())
