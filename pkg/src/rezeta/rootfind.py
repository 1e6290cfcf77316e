"""Bracketed zero finding: bisection, and a safeguarded false-position /
bisection hybrid with Illinois-style downweighting.

The hybrid keeps the invariant that (a, b) always brackets a sign change,
with b the best point (smallest |f|) and a the contrapoint.  Each iteration
proposes the false-position point through (b, a); when successive iterates
keep landing on b's side of the root, the stored contrapoint value is halved
(the Illinois rule) so the interpolant is pushed across, which is what makes
the *bracket width* converge superlinearly rather than just the best point.
A proposal is accepted only if it falls strictly between b and the bracket
midpoint; otherwise, and whenever the width failed to halve over the
previous iteration, the step is a bisection.  That forcing rule gives the
worst-case guarantee

    iterations <= 2 * (ceil(log2((b - a)/tol)) + 2)

(at least every second iteration halves the width), which plain false
position lacks: on a convex function it stalls against a fixed endpoint and
needs O(1/tol) steps, not O(log(1/tol)).

Works identically on floats and mpmath mpf values; with mpf endpoints, call
inside the precision context you want the iterates carried at.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import mpmath as mp

from .errors import BracketError, EvaluatorError


@dataclass(frozen=True)
class Bracket:
    """An interval [lo, hi] with a recorded sign change of the target."""

    lo: object
    hi: object
    f_lo: object
    f_hi: object
    exact: bool = False  # True when lo == hi is an exact root

    def __post_init__(self):
        if self.exact:
            return
        if not self.lo < self.hi:
            raise BracketError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if _sign(self.f_lo) * _sign(self.f_hi) >= 0:
            raise BracketError("endpoint values do not change sign")

    @property
    def width(self):
        return self.hi - self.lo


@dataclass(frozen=True)
class ZeroResult:
    bracket: Bracket
    best: object
    iterations: int
    evaluations: int
    converged: bool


def _sign(x) -> int:
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def _check_finite(x, fx):
    if not mp.isfinite(fx):
        raise EvaluatorError(f"evaluator returned non-finite value {fx} at {x}")


def _log2_ceil(ratio) -> int:
    if isinstance(ratio, mp.mpf):
        return int(mp.ceil(mp.log(ratio, 2)))
    return math.ceil(math.log2(ratio))


def _mk_bracket(a, fa, b, fb) -> Bracket:
    if a < b:
        return Bracket(a, b, fa, fb)
    return Bracket(b, a, fb, fa)


def _exact_result(x, evals: int, iters: int) -> ZeroResult:
    zero = x - x  # typed zero (mpf or float)
    return ZeroResult(
        bracket=Bracket(x, x, zero, zero, exact=True),
        best=x,
        iterations=iters,
        evaluations=evals,
        converged=True,
    )


def find_zero(
    f: Callable,
    a,
    b,
    tol,
    strategy: str = "hybrid",
    observer: Optional[Callable[[Bracket], None]] = None,
) -> ZeroResult:
    """Find a sign-change enclosure of width <= tol for f inside [a, b].

    f(a) and f(b) must differ in sign (two evaluations verify this).  The
    returned bracket satisfies the sign-change invariant throughout; pass an
    observer to see it after every iteration.  strategy is "bisect" or
    "hybrid" (default).  An iterate hitting f == 0 exactly returns a
    width-0 bracket flagged exact.
    """
    if strategy not in ("bisect", "hybrid"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if not a < b:
        raise BracketError(f"need a < b, got a = {a}, b = {b}")
    if not tol > 0:
        raise ValueError("tol must be positive")

    fa = f(a)
    _check_finite(a, fa)
    if fa == 0:
        return _exact_result(a, 1, 0)
    fb = f(b)
    _check_finite(b, fb)
    if fb == 0:
        return _exact_result(b, 2, 0)
    if _sign(fa) == _sign(fb):
        raise BracketError(f"no sign change: f({a}) = {fa}, f({b}) = {fb}")

    width0 = b - a
    bisect_iters = _log2_ceil(width0 / tol) + 2
    max_iters = bisect_iters if strategy == "bisect" else 2 * bisect_iters

    # b = best point, a = contrapoint; ga is the (possibly downweighted)
    # contrapoint value used for interpolation, fa the true one.
    if abs(fa) < abs(fb):
        a, b, fa, fb = b, a, fb, fa
    ga = fa
    delta = tol / 4  # minimum accepted step, prevents stagnation at b
    widths = [abs(width0)]
    evals = 2
    iters = 0

    while True:
        w = abs(b - a)
        if w <= tol:
            return ZeroResult(_mk_bracket(a, fa, b, fb), b, iters, evals, True)
        if iters >= max_iters:
            return ZeroResult(_mk_bracket(a, fa, b, fb), b, iters, evals, False)

        m = b + (a - b) / 2  # midpoint, written to stay inside [min, max]
        s = None
        if strategy == "hybrid":
            # force bisection unless the width halved over the previous
            # iteration -- this is what turns "typically superlinear" into
            # a worst-case guarantee
            stalled = len(widths) >= 2 and w > widths[-2] / 2
            if not stalled and ga != fb:
                cand = b - fb * (b - a) / (fb - ga)
                if (cand - b) * (cand - m) < 0:  # strictly between b and m
                    # A proposal much closer to b than the width is the
                    # interpolant saying "b is within raw of the root".
                    # Taking it literally leaves the width untouched, so
                    # overshoot to 3x raw: if the estimate is honest the
                    # step crosses the root and the width collapses to
                    # ~3 raw; if not, the Illinois halving recovers.
                    raw = abs(cand - b)
                    if raw < delta or 1024 * raw < w:
                        half = w / 2
                        step = max(3 * raw, delta)
                        if 2 * step > half:
                            step = half / 2
                        cand = b + step if m > b else b - step
                    s = cand
        if s is None:
            s = m

        fs = f(s)
        evals += 1
        _check_finite(s, fs)
        iters += 1
        if fs == 0:
            return _exact_result(s, evals, iters)

        if _sign(fs) == _sign(fb):
            b, fb = s, fs  # same-side march: downweight the stuck endpoint
            ga = ga / 2
        else:
            a, fa = b, fb
            b, fb = s, fs
            ga = fa
        if abs(fa) < abs(fb):
            a, b, fa, fb = b, a, fb, fa
            ga = fa

        widths.append(abs(b - a))
        if observer is not None:
            observer(_mk_bracket(a, fa, b, fb))
