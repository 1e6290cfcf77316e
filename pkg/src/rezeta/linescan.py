"""Sign scanning of Re zeta(1+it): window detection, refinement, and
certified positivity.

Evaluation strategy.  Table-resolution work (4 decimal places, endpoint
locations to ~1e-8) fits comfortably in float64, so the scanner runs on a
vectorized Euler-Maclaurin evaluator:

    zeta(1+it) = sum_{n<N} n^(-1-it) + N^(-it)/(it) + N^(-1-it)/2
                 + sum_i B_2i/(2i)! (s)_(2i-1) N^(-s-2i+1),   N ~ t/3 + 64.

On a uniform grid the phase factors exp(-it ln n) advance by one complex
multiply per n per grid point (E <- E * exp(-ih ln n)), which beats fresh
cos/sin by an order of magnitude.  Grids are evaluated in fixed blocks of
4096 points with the rotators re-synced at every block start, so results
are bit-identical regardless of thread count or resume point.  Empirical
accuracy of the fast path is ~1e-10 absolute at t ~ 7e5 -- five orders
below the 4-decimal targets and three below what endpoint refinement
needs; reported window endpoints are additionally sign-confirmed by the
arbitrary-precision kernel at 96 bits.

Certification is the argument-slope argument: on sigma = 1 zeta has no
zeros, so Re zeta(1+it) > 0 iff |arg zeta(1+it)| < pi/2, and the argument
moves no faster than slope_bound(t); from headroom pi/2 - |arg| - margin
a step of headroom/slope_bound(far end) is certified.  A failure is a
place the walk ran out of headroom, i.e. a candidate negative region --
never a disproof.
"""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import factorial
from typing import Optional, Union

import numpy as np

from .errors import DomainError, EvaluatorError
from .kernel import PrecisionContext, _bernoulli_fraction, zeta_complex
from .rootfind import find_zero

BLOCK = 4096           # grid points per evaluation block (determinism unit)
CHECKPOINT_BLOCKS = 3  # checkpoint cadence ~ every 1.2e4 evaluations
STEP_MIN = 1e-6        # certification step underflow threshold
CONFIRM_BITS = 96      # kernel precision for endpoint sign confirmation


def slope_bound(t: float) -> float:
    """Bound on |d/dt arg zeta(1+it)| = |Re zeta'/zeta|: (3/4) log(t^2+4) + 7.

    Stated (and used) only for t >= 10; increasing in t.
    """
    if t < 10:
        raise DomainError(f"slope bound only valid for t >= 10, got {t}")
    return 0.75 * math.log(t * t + 4.0) + 7.0


# -- float64 Euler-Maclaurin fast path ---------------------------------------

_BOF: list[float] = [0.0]  # B_2i/(2i)! as floats, index i


def _bof(i: int) -> float:
    while len(_BOF) <= i:
        k = len(_BOF)
        _BOF.append(float(_bernoulli_fraction(2 * k)) / factorial(2 * k))
    return _BOF[i]


_buckets: dict[int, tuple[np.ndarray, np.ndarray]] = {}  # N -> (ln n, 1/n)
_BUCKET_ENTRY_CAP = 12_000_000  # total cached terms (~300 MB) before eviction


def _bucket(N: int) -> tuple[np.ndarray, np.ndarray]:
    """(ln n, 1/n as complex) for n = 2..N-1, cached; N quantized upstream."""
    got = _buckets.get(N)
    if got is None:
        n = np.arange(2, N, dtype=np.float64)
        got = (np.log(n), (1.0 / n).astype(np.complex128))
        while _buckets and sum(_buckets) + N > _BUCKET_ENTRY_CAP:
            _buckets.pop(next(iter(_buckets)))
        _buckets[N] = got
    return got


def _n_for(t: float) -> int:
    N = max(32, int(math.ceil(t / 3.0)) + 64)
    return ((N + BLOCK - 1) // BLOCK) * BLOCK  # quantize for bucket reuse


def _grid_eval(t0: float, h: float, count: int) -> np.ndarray:
    """zeta(1+it) for t = t0, t0+h, ..., t0+(count-1)h as complex128.

    One fresh exp per call; within the call phases advance by rotation.
    Callers keep count <= BLOCK so rounding drift never exceeds a block.
    """
    t_hi = t0 + h * max(0, count - 1)
    N = _n_for(max(abs(t0), abs(t_hi)))
    lnn, invn = _bucket(N)
    t = t0 + h * np.arange(count)
    s = 1.0 + 1j * t

    E = np.exp(-1j * t0 * lnn)
    out = np.empty(count, dtype=np.complex128)
    if count > 1:
        R = np.exp(-1j * h * lnn)
        for j in range(count):
            out[j] = np.dot(invn, E)
            E *= R
    else:
        out[0] = np.dot(invn, E)

    nIT = np.exp(-1j * t * math.log(N))  # N^(-it), vector over the grid
    tail = nIT / (1j * t) + nIT / (2.0 * N)
    T = s * nIT / float(N) ** 2          # (s)_(2i-1) N^(-s-2i+1), i = 1
    NN = float(N) ** 2
    t_max = float(np.max(np.abs(t)))
    for i in range(1, 25):
        term = _bof(i) * T
        tail += term
        # remainder <= |next term| * |s+2i+1|/(2i+2); stop when that is dust
        if float(np.max(np.abs(term))) * 0.228 * (t_max / (2 * i + 2) + 1) < 1e-13:
            break
        T *= (s + (2 * i - 1)) * (s + 2 * i) / NN
    return 1.0 + out + tail


class _FastZeta:
    """Scalar fast-path evaluator with an evaluation counter."""

    def __init__(self):
        self.evals = 0

    def zeta(self, t: float) -> complex:
        self.evals += 1
        return complex(_grid_eval(t, 0.0, 1)[0])

    def re(self, t: float) -> float:
        return self.zeta(t).real


def sample_line(t_lo: float, t_hi: float, step: float) -> tuple[np.ndarray, np.ndarray]:
    """(t grid, Re zeta(1+it) values) over [t_lo, t_hi] at the given step.

    Dense-sampling helper for oracles and plots; block-deterministic.
    """
    if not 0 < t_lo < t_hi:
        raise DomainError("need 0 < t_lo < t_hi")
    count = int(math.floor((t_hi - t_lo) / step)) + 1
    t = t_lo + step * np.arange(count)
    vals = np.empty(count)
    for start in range(0, count, BLOCK):
        m = min(BLOCK, count - start)
        vals[start:start + m] = _grid_eval(t_lo + start * step, step, m).real
    return t, vals


def re_zeta_line(t, prec: Optional[PrecisionContext] = None):
    """Re zeta(1+it).  With prec, delegates to the kernel and inherits its
    error contract (returns mpf); without, uses the float64 fast path."""
    if prec is not None:
        return zeta_complex((1, t), prec).real
    tf = float(t)
    if tf == 0:
        raise DomainError("t must be nonzero (pole of zeta at s = 1)")
    return _FastZeta().re(tf)


# -- certified positivity ------------------------------------------------------

@dataclass(frozen=True)
class CertifiedRange:
    t_lo: float
    t_hi: float
    step_log: list  # (t, arg zeta(1+it), step) per evaluation point


@dataclass(frozen=True)
class CertifyFailure:
    """Outcome of a walk that ran out of argument headroom.

    Points strictly before t_fail are still certified positive (the step
    log covers [t_lo, t_fail]); t_fail itself is the first point whose
    positivity the walk could not establish with the requested margin.
    """
    t_fail: float
    reason: str   # "headroom" (|arg| reached pi/2 - margin) or "step-underflow"
    step_log: list

    @property
    def steps(self) -> int:
        return len(self.step_log)


def certify_positive(
    t_lo: float, t_hi: float, margin: float = 0.05
) -> Union[CertifiedRange, CertifyFailure]:
    """Walk [t_lo, t_hi] proving Re zeta(1+it) > 0, or report where not.

    At each point the argument headroom pi/2 - |arg| - margin buys a step
    h with h * slope_bound(t + h) <= headroom: first h1 = headroom/
    slope_bound(t), then h = headroom/slope_bound(t + h1) <= h1, which is
    sound because the bound increases.  Success certifies positivity on
    the whole range; failure reports the first point whose headroom (or
    step size) vanished -- a candidate negative region, not a disproof.
    """
    if t_lo < 10:
        raise DomainError(f"certification needs t_lo >= 10, got {t_lo}")
    if t_hi < t_lo:
        raise DomainError(f"need t_hi >= t_lo, got [{t_lo}, {t_hi}]")
    if margin <= 0:
        raise DomainError("margin must be positive")
    if t_hi == t_lo:
        return CertifiedRange(t_lo, t_hi, [])

    ev = _FastZeta()
    log: list[tuple[float, float, float]] = []
    t = t_lo
    while True:
        z = ev.zeta(t)
        a = abs(math.atan2(z.imag, z.real))
        headroom = math.pi / 2 - a - margin
        if headroom <= 0:
            return CertifyFailure(t, "headroom", log)
        h = headroom / slope_bound(t + headroom / slope_bound(t))
        if h < STEP_MIN:
            return CertifyFailure(t, "step-underflow", log)
        log.append((t, a, h))
        t += h
        if t >= t_hi:
            return CertifiedRange(t_lo, t_hi, log)


# -- window detection ----------------------------------------------------------

@dataclass(frozen=True)
class NegativeWindow:
    t_start: float
    t_end: float
    t_min: float
    min_value: float
    length: float

    def as_dict(self) -> dict:
        return {
            "t_start": self.t_start, "t_end": self.t_end, "t_min": self.t_min,
            "min_value": self.min_value, "length": self.length,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NegativeWindow":
        return cls(d["t_start"], d["t_end"], d["t_min"], d["min_value"], d["length"])


@dataclass(frozen=True)
class ScanReport:
    t_lo: float
    t_hi: float
    coarse_step: float
    refine_tol: float
    windows: list[NegativeWindow]
    certified: list[CertifiedRange]
    evaluations: int
    empirical_d: float  # window measure / scanned length (local density)


def empirical_d(windows: list[NegativeWindow], T: float) -> float:
    """(sum of window lengths)/T -- the density estimate with explicit
    normalization T; every window must lie inside [0, T]."""
    if T <= 0:
        raise DomainError("T must be positive")
    for w in windows:
        if w.t_start < 0 or w.t_end > T:
            raise DomainError(f"window ({w.t_start}, {w.t_end}) outside [0, {T}]")
    return sum(w.length for w in windows) / T


def _refine_crossing(ev: _FastZeta, a: float, b: float, tol: float) -> float:
    """Sign-change location in (a, b) to +-tol/2 (bracket midpoint)."""
    r = find_zero(ev.re, a, b, tol)
    return float((r.bracket.lo + r.bracket.hi) / 2)


def _confirm_endpoint(t_cross: float, delta: float, rising: bool) -> None:
    """Kernel (96-bit) sign check on both sides of a refined endpoint.

    rising=False: start edge (+ before, - after); rising=True: end edge.
    A disagreement with the fast path is an evaluator defect, not a finding.
    """
    ctx = PrecisionContext(bits=CONFIRM_BITS)
    before = float(zeta_complex((1, t_cross - delta), ctx).real)
    after = float(zeta_complex((1, t_cross + delta), ctx).real)
    want = (-1.0, 1.0) if rising else (1.0, -1.0)
    if math.copysign(1, before) != want[0] or math.copysign(1, after) != want[1]:
        raise EvaluatorError(
            f"kernel sign check failed at crossing {t_cross}: "
            f"zeta({t_cross} -+ {delta}) has signs ({before:.2e}, {after:.2e})"
        )


def _locate_minimum(ev: _FastZeta, t_start: float, t_mid: float, t_end: float,
                    tol: float, fallback: float) -> tuple[float, float]:
    """Golden-section minimum of Re zeta inside a window, in offset
    coordinates so the tolerance is effectively absolute in t.  A window
    so shallow that the grid seed fails the bracket condition (minimum
    within rounding of the refined endpoints) degrades to the seed point."""
    from scipy.optimize import minimize_scalar

    base = t_start
    calls = [0]

    def g(x: float) -> float:
        calls[0] += 1
        return _grid_eval(base + x, 0.0, 1)[0].real

    try:
        res = minimize_scalar(
            g, bracket=(0.0, t_mid - base, t_end - base),
            method="golden", options={"xtol": tol},
        )
        out = base + float(res.x), float(res.fun)
    except ValueError:
        out = t_mid, fallback
    ev.evals += calls[0]
    return out


def _scan_windows(
    t_lo: float,
    t_hi: float,
    coarse_step: float,
    refine_tol: float,
    ev: _FastZeta,
    threads: int = 1,
    checkpoint: Optional[str] = None,
    confirm: bool = True,
) -> list[NegativeWindow]:
    """Grid scan + refinement engine shared by find_negative_windows and scan.

    The grid t_i = t_lo + i*coarse_step is processed in BLOCK-sized chunks
    (parallelizable, order-independent values); the sequential reducer
    tracks sign runs, refines each run's edges by rootfind on the fast
    path, localizes the minimum by golden section, and (confirm=True)
    sign-checks both edges with the 96-bit kernel at +-2*refine_tol.
    """
    if not 0 < coarse_step <= 0.02:
        raise DomainError(f"coarse_step must be in (0, 0.02], got {coarse_step}")
    if refine_tol <= 0:
        raise DomainError("refine_tol must be positive")
    if not 1 <= t_lo < t_hi:
        raise DomainError(f"need 1 <= t_lo < t_hi, got [{t_lo}, {t_hi}]")

    count = int(math.floor((t_hi - t_lo) / coarse_step)) + 1
    n_blocks = (count + BLOCK - 1) // BLOCK
    t_at = lambda i: t_lo + i * coarse_step

    # -- checkpoint restore
    start_block = 0
    windows: list[NegativeWindow] = []
    run_start: Optional[int] = None  # grid index where a negative run began
    wall_base = 0.0
    config = {"t_lo": t_lo, "t_hi": t_hi, "coarse_step": coarse_step,
              "refine_tol": refine_tol}
    if checkpoint and os.path.exists(checkpoint):
        rec = _last_checkpoint(checkpoint)
        if rec is not None:
            if rec["config"] != config:
                raise DomainError(
                    f"checkpoint {checkpoint} belongs to a different scan: {rec['config']}"
                )
            start_block = rec["blocks_done"]
            windows = [NegativeWindow.from_dict(d) for d in rec["windows"]]
            run_start = rec["run_start"]
            ev.evals += rec["evaluations"]
            wall_base = rec["wall"]
    t0_wall = time.monotonic()

    def block_values(bi: int) -> np.ndarray:
        start = bi * BLOCK
        m = min(BLOCK, count - start)
        return _grid_eval(t_at(start), coarse_step, m).real

    def finish_run(i_start: int, i_end: int) -> None:
        """Negative run covered grid indices [i_start, i_end); refine."""
        a = _edge(i_start - 1, i_start)
        b = _edge(i_end, i_end - 1)
        # interior grid argmin seeds the golden bracket
        seed_i = min(range(i_start, i_end), key=_grid_point)
        t_min, v_min = _locate_minimum(ev, a, _clamp(t_at(seed_i), a, b), b,
                                       refine_tol, fallback=_grid_point(seed_i))
        if confirm:
            _confirm_endpoint(a, 2 * refine_tol, rising=False)
            _confirm_endpoint(b, 2 * refine_tol, rising=True)
            ev.evals += 4
        if not (a < t_min < b) or not v_min < 0:
            raise EvaluatorError(
                f"window assembly failed: start={a}, min=({t_min}, {v_min}), end={b}"
            )
        windows.append(NegativeWindow(a, b, t_min, v_min, b - a))

    _point_cache: dict[int, float] = {}

    def _grid_point(i: int) -> float:
        v = _point_cache.get(i)
        if v is None:
            v = float(_grid_eval(t_at(i), 0.0, 1)[0].real)
            ev.evals += 1
            _point_cache[i] = v
        return v

    def _edge(i_pos: int, i_neg: int) -> float:
        """Sign change between a negative grid point and its positive
        neighbor, refined to refine_tol.  When the positive side is
        missing (the run touches the scanned range edge) the walk extends
        outward up to 1000 coarse steps to find the true crossing."""
        d = i_pos - i_neg  # -1 at a start edge, +1 at an end edge
        j = i_pos
        for _ in range(1000):
            if _grid_point(j) > 0:
                break
            j += d
        else:
            raise EvaluatorError(
                f"no sign change within 1000 coarse steps outward of t={t_at(i_neg)}"
            )
        a, b = sorted((t_at(j), t_at(j - d)))
        return _refine_crossing(ev, a, b, refine_tol)

    def write_checkpoint(blocks_done: int) -> None:
        if not checkpoint:
            return
        rec = {
            "schema": 1, "config": config, "blocks_done": blocks_done,
            "t_done": min(t_at(blocks_done * BLOCK - 1), t_hi),
            "windows": [w.as_dict() for w in windows], "run_start": run_start,
            "evaluations": ev.evals,
            "wall": wall_base + (time.monotonic() - t0_wall),
        }
        with open(checkpoint, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec) + "\n")

    # -- main loop: parallel block evaluation, sequential reduction
    blocks = range(start_block, n_blocks)
    if threads > 1:
        pool = ThreadPoolExecutor(max_workers=threads)
        results = pool.map(block_values, blocks)
    else:
        pool = None
        results = map(block_values, blocks)
    try:
        for bi, vals in zip(blocks, results):
            base_i = bi * BLOCK
            ev.evals += len(vals)
            for k, v in enumerate(vals):
                _point_cache[base_i + k] = float(v)
            neg = vals <= 0
            for k in range(len(vals)):
                i = base_i + k
                if neg[k] and run_start is None:
                    run_start = i
                elif not neg[k] and run_start is not None:
                    finish_run(run_start, i)
                    run_start = None
            # cache hygiene: keep only the frontier (edge-walk needs recent)
            for key in [k for k in _point_cache if k < base_i - 2 * BLOCK]:
                del _point_cache[key]
            if (bi + 1 - start_block) % CHECKPOINT_BLOCKS == 0:
                write_checkpoint(bi + 1)
    finally:
        if pool is not None:
            pool.shutdown(wait=False, cancel_futures=True)

    if run_start is not None:  # run still open at the range edge
        finish_run(run_start, count)
        run_start = None
    write_checkpoint(n_blocks)
    return windows


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(max(x, lo + 1e-12), hi - 1e-12)


def _last_checkpoint(path: str) -> Optional[dict]:
    """Last parseable record in a checkpoint file (tolerates a torn tail)."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError:
        return None
    for line in reversed(lines):
        try:
            rec = json.loads(line)
            if rec.get("schema") == 1:
                return rec
        except json.JSONDecodeError:
            continue
    return None


def find_negative_windows(
    t_lo: float, t_hi: float, coarse_step: float = 0.01,
    refine_tol: float = 1e-8,
) -> list[NegativeWindow]:
    """All windows of Re zeta(1+it) <= 0 inside [t_lo, t_hi].

    Coarse grid at coarse_step (must be <= 0.02, safely under the
    shortest known window length 0.0305), sign changes refined to
    refine_tol, minima by golden section, endpoints kernel-confirmed.
    """
    ev = _FastZeta()
    return _scan_windows(t_lo, t_hi, coarse_step, refine_tol, ev)


GAP_BUFFER = 0.1  # standoff from window edges before certification resumes


def scan(
    t_lo: float, t_hi: float, coarse_step: float = 0.01,
    refine_tol: float = 1e-8, margin: float = 0.05,
    threads: int = 1, checkpoint: Optional[str] = None,
) -> ScanReport:
    """Full scan: windows, then certify_positive over the gaps between
    them (with a GAP_BUFFER standoff -- argument headroom is structurally
    zero at a window edge), assembled into a ScanReport.  empirical_d in
    the report is window measure over scanned length; use empirical_d()
    directly for an explicit T normalization."""
    ev = _FastZeta()
    windows = _scan_windows(t_lo, t_hi, coarse_step, refine_tol, ev,
                            threads=threads, checkpoint=checkpoint)
    certified: list[CertifiedRange] = []
    cuts = [max(t_lo, 10.0)]
    for w in windows:
        cuts += [w.t_start - GAP_BUFFER, w.t_end + GAP_BUFFER]
    cuts.append(t_hi)
    for lo, hi in zip(cuts[::2], cuts[1::2]):
        lo = max(lo, 10.0)
        pos = lo
        while pos < hi:
            res = certify_positive(pos, hi, margin)
            if isinstance(res, CertifiedRange):
                ev.evals += len(res.step_log)
                certified.append(res)
                break
            ev.evals += res.steps
            if res.t_fail > pos:
                certified.append(CertifiedRange(pos, res.t_fail, res.step_log))
            pos = res.t_fail + GAP_BUFFER
    dens = sum(w.length for w in windows) / (t_hi - t_lo)
    return ScanReport(t_lo, t_hi, coarse_step, refine_tol,
                      windows, certified, ev.evals, dens)
