"""The threshold sigma0: unique root in (1, 2) of

    f(sigma) = sum over primes p of arcsin(p^-sigma) - pi/2.

f is strictly decreasing and convex there, f(1+) = +inf, f(2) < 0.  Direct
prime sums converge uselessly slowly near sigma = 1.19, so both evaluators
reduce to log zeta at multiples of sigma:

  * f_arcsin_series: arcsin(x) = sum_k c_k x^(2k+1) termwise over primes
    gives f = sum_k c_k P((2k+1) sigma) - pi/2, each prime zeta value by
    Moebius inversion.

  * f_logzeta_series: push the inversion through the k-sum and collect by
    multiplier m = (2k+1) r,

        f(sigma) = sum_{m>=1} g_m log zeta(m sigma) - pi/2,
        g_m = sum_{(2k+1) r = m} c_k mu(r)/r.

    Note m runs over *all* integers: g_m != 0 for plenty of even m
    (g_2 = -1/2, g_6 = 1/12, ...), because odd d = 2k+1 times squarefree r
    lands on even m whenever r is even.  Dropping the even multipliers --
    a tempting "parity" shortcut -- shifts f(1.2) by 0.16 and moves the
    root past 1.29.  The odd-indexed weights d_j = g_(2j+1) are exposed
    separately because the first few have clean closed forms.

Both evaluators share one power ladder (log_zeta_batch), making an f call
O(one zeta evaluation).  solve_sigma0 brackets the root at doubling
precision levels, so the handful of full-precision evaluations dominate.

All c_k, g_m bookkeeping is exact rational arithmetic; floating point
enters only through log zeta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
from mpmath import mpf

from .errors import BracketError, CapacityError, DomainError, PrecisionError
from .kernel import PrecisionContext, log_zeta_batch, to_mpf
from .primes import moebius_table
from .rootfind import Bracket, ZeroResult, find_zero

DIGITS_MAX = 1000
SIGMA_LO, SIGMA_HI = "1.05", "2"


# -- exact coefficient families ---------------------------------------------

_ck: list[Fraction] = [Fraction(1)]


def arcsin_coeff(k: int) -> Fraction:
    """c_k in arcsin(x) = sum c_k x^(2k+1): (2k)! / (4^k k!^2 (2k+1))."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    while len(_ck) <= k:
        i = len(_ck)
        _ck.append(_ck[-1] * (2 * i - 1) ** 2 / ((2 * i) * (2 * i + 1)))
    return _ck[k]


def logzeta_coeff(m: int) -> Fraction:
    """g_m: weight of log zeta(m sigma), by direct divisor enumeration."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    mu = moebius_table(m)
    total = Fraction(0)
    for d in range(1, m + 1, 2):
        if m % d == 0:
            r = m // d
            if mu[r]:
                total += arcsin_coeff((d - 1) // 2) * Fraction(int(mu[r]), r)
    return total


def logzeta_coeff_table(m_max: int) -> list[Fraction]:
    """[unused, g_1, ..., g_m_max] accumulated the other way round: for each
    (k, r) pair bump m = (2k+1) r.  Cross-checks logzeta_coeff in tests."""
    if m_max < 1:
        raise DomainError(f"m_max must be >= 1, got {m_max}")
    mu = moebius_table(m_max)
    table = [Fraction(0)] * (m_max + 1)
    k = 0
    while 2 * k + 1 <= m_max:
        ck = arcsin_coeff(k)
        for r in range(1, m_max // (2 * k + 1) + 1):
            if mu[r]:
                table[(2 * k + 1) * r] += ck * Fraction(int(mu[r]), r)
        k += 1
    return table


def d_coeff(j: int) -> Fraction:
    """Odd-multiplier weight d_j = g_(2j+1); d_0 = 1, d_1 = -1/6."""
    if j < 0:
        raise DomainError(f"j must be >= 0, got {j}")
    return logzeta_coeff(2 * j + 1)


# -- series evaluators -------------------------------------------------------

def _tail_order(x: mpf, bound: mpf) -> int:
    """Smallest R >= 1 with (3/2) 2^(-(R+1)x) / (1 - 2^-x) < bound, using
    log zeta(y) <= zeta(y) - 1 <= (3/2) 2^-y for y >= 2."""
    lead = mpf(3) / 2 / (1 - mpf(2) ** -x)
    r = max(1, int(mp.ceil(mp.log(lead / bound, 2) / x - 1)))
    while lead * mpf(2) ** (-(r + 1) * x) >= bound:
        r += 1
    return r


def _check_series_args(sigma, eps, ctx: PrecisionContext) -> tuple[mpf, mpf]:
    sig = to_mpf(sigma, "sigma")
    err = to_mpf(eps, "eps")
    if not mpf(SIGMA_LO) <= sig <= mpf(SIGMA_HI):
        raise DomainError(f"sigma must lie in [{SIGMA_LO}, {SIGMA_HI}], got {sig}")
    if err <= 0:
        raise DomainError("eps must be positive")
    if err <= mpf(2) ** (-ctx.bits + 8):
        raise PrecisionError(f"eps = {mp.nstr(err, 5)} not achievable at {ctx.bits} bits")
    return sig, err


def _as_mpf(q: Fraction) -> mpf:
    return mpf(q.numerator) / q.denominator


def f_logzeta_series(sigma, eps, ctx: PrecisionContext) -> mpf:
    """f(sigma) to absolute error < eps via the collected g_m series."""
    with mp.workprec(ctx.workbits):
        sig, err = _check_series_args(sigma, eps, ctx)
        # |g_m| <= tau_odd(m)/m <= 1, so the tail is the same geometric
        # envelope as a single log zeta tail
        M = _tail_order(sig, err / 2)
        # sum_m |g_m| <= sum_m tau(m)/m <= (1 + ln M)^2 weights each entry
        tau = err / (2 * (1 + math.log(M)) ** 2)
        logs = log_zeta_batch(sig, M, tau, ctx)
        gs = logzeta_coeff_table(M)
        total = mpf(0)
        for m in range(M, 0, -1):  # smallest terms first
            if gs[m]:
                total += _as_mpf(gs[m]) * logs[m]
        return total - mp.pi / 2


def f_arcsin_series(sigma, eps, ctx: PrecisionContext) -> mpf:
    """f(sigma) to absolute error < eps as sum_k c_k P((2k+1) sigma) - pi/2,
    all prime zeta values drawn from one shared power ladder."""
    with mp.workprec(ctx.workbits):
        sig, err = _check_series_args(sigma, eps, ctx)
        # k-tail: c_k <= 1 and P(y) <= (3/2) 2^-y give another geometric
        # envelope in x = (2k+1) sigma; budget eps/4
        K = 0
        lead = mpf(3) / 2 / (1 - mpf(4) ** -sig)
        while lead * mpf(2) ** (-(2 * K + 3) * sig) >= err / 4:
            K += 1
        # each P to eps/4: truncation eps/8 + log-zeta evaluations eps/8
        r_of_k = [_tail_order((2 * k + 1) * sig, err / 8) for k in range(K + 1)]
        m_max = max((2 * k + 1) * r_of_k[k] for k in range(K + 1))
        tau = err / (8 * (1 + math.log(r_of_k[0])))
        logs = log_zeta_batch(sig, m_max, tau, ctx)
        mu = moebius_table(r_of_k[0])
        total = mpf(0)
        for k in range(K, -1, -1):
            p_k = mpf(0)
            for r in range(r_of_k[k], 0, -1):
                if mu[r]:
                    p_k += mpf(int(mu[r])) * logs[(2 * k + 1) * r] / r
            total += _as_mpf(arcsin_coeff(k)) * p_k
        return total - mp.pi / 2


# -- the solver ---------------------------------------------------------------

@dataclass(frozen=True)
class Sigma0Result:
    decimal: str          # correctly rounded to `digits` places
    value: mpf            # bracket midpoint
    bracket: Bracket
    digits: int
    evaluations: int      # f evaluations across all precision levels
    method: str
    strategy: str


def _round_enclosure(lo: mpf, hi: mpf, digits: int):
    """The digits-place decimal both endpoints round to, or None if they
    disagree (enclosure too wide, or a rounding boundary inside it)."""
    scale = mpf(10) ** digits
    n_lo = int(mp.nint(lo * scale))
    n_hi = int(mp.nint(hi * scale))
    if n_lo != n_hi:
        return None
    s = str(n_lo)
    return s[0] + "." + s[1:]  # value in (1, 2): exactly one integer digit


def _convex_refine(f, lo, hi, f_lo, f_hi, tol):
    """Bracket sharpening that exploits convexity: the chord from (lo, f_lo)
    to (hi, f_hi) runs above a convex f, so its zero is a certified new hi;
    the secant through the last two hi-side points runs below f left of
    them, so its zero is a certified new lo.  Every proposal is still sign
    checked, and any that lands outside the bracket, repeats an endpoint,
    or fails its sign expectation degrades to a bisection step, as does any
    iteration after the width failed to halve (same safeguard as the
    generic hybrid).  Returns (lo, hi, f_lo, f_hi, evaluations)."""
    evals = 0
    prev_hi = None  # (point, value) one generation older than (hi, f_hi)
    widths = [hi - lo]
    want_hi_step = True
    while hi - lo > tol:
        w = hi - lo
        stalled = len(widths) >= 2 and w > widths[-2] / 2
        s = None
        if not stalled:
            if want_hi_step:
                s = lo - f_lo * (hi - lo) / (f_hi - f_lo)
            elif prev_hi is not None and prev_hi[1] != f_hi:
                x0, y0 = prev_hi
                s = hi - f_hi * (hi - x0) / (f_hi - y0)
            if s is not None:
                step = max(tol / 4, w / 1024)
                if not lo + step <= s <= hi - step:
                    s = None
        if s is None:
            s = lo + w / 2
        fs = f(s)
        evals += 1
        if fs == 0:
            return s, s, fs, fs, evals
        if fs > 0:
            lo, f_lo = s, fs
        else:
            prev_hi = (hi, f_hi)
            hi, f_hi = s, fs
        want_hi_step = not want_hi_step
        widths.append(hi - lo)
    return lo, hi, f_lo, f_hi, evals


def solve_sigma0(digits: int, method: str = "logzeta", strategy: str = "hybrid") -> Sigma0Result:
    """sigma0 correctly rounded to `digits` decimal places (1..1000).

    Precision laddering: the root is first solved at roughly half the
    digits, and that bracket (slightly widened) seeds the full-precision
    search, so only O(1) evaluations run at the target precision.  method
    picks the series form ("logzeta" or "arcsin"); strategy picks the
    refinement ("hybrid", "bisect", or "convex").
    """
    if digits < 1:
        raise DomainError(f"digits must be >= 1, got {digits}")
    if digits > DIGITS_MAX:
        raise CapacityError(f"digits capped at {DIGITS_MAX}, got {digits}")
    if method not in ("logzeta", "arcsin"):
        raise ValueError(f"unknown method {method!r}")
    if strategy not in ("hybrid", "bisect", "convex"):
        raise ValueError(f"unknown strategy {strategy!r}")
    f_series = f_logzeta_series if method == "logzeta" else f_arcsin_series

    evals = 0

    def level(d: int, tol_exp: int):
        """Bracket of width <= 10^-tol_exp, f evaluated at d digits."""
        nonlocal evals
        ctx = PrecisionContext.from_digits(d)
        with mp.workprec(ctx.workbits):
            eps_f = mpf(10) ** -(d + 10)
            tol = mpf(10) ** -tol_exp

            def f(x):
                return f_series(x, eps_f, ctx)

            if d <= 15:
                lo, hi = mpf("1.1"), mpf("1.2")
                f_lo, f_hi = f(lo), f(hi)
                evals += 2
                if not (f_lo > 0 > f_hi):  # paranoia: fall back to the
                    lo, hi = mpf(SIGMA_LO), mpf("1.3")  # full known range
                    f_lo, f_hi = f(lo), f(hi)
                    evals += 2
                    if not (f_lo > 0 > f_hi):
                        raise BracketError("no sign change on [1.05, 1.3]")
            else:
                lo, hi, f_lo, f_hi = level(d // 2 + 2, d // 2)
                pad = (hi - lo) * 2
                lo2, hi2 = lo - pad, hi + pad
                f_lo, f_hi = f(lo2), f(hi2)
                evals += 2
                if not (f_lo > 0 > f_hi):
                    raise PrecisionError(
                        f"seed bracket from {d // 2 + 2}-digit level not confirmed"
                    )
                lo, hi = lo2, hi2

            if strategy == "convex":
                lo, hi, f_lo, f_hi, n = _convex_refine(f, lo, hi, f_lo, f_hi, tol)
                evals += n
            else:
                r: ZeroResult = find_zero(f, lo, hi, tol, strategy=strategy)
                evals += r.evaluations - 2  # endpoints were already counted
                if not r.converged:
                    raise PrecisionError(f"refinement stalled at {d} digits")
                br = r.bracket
                lo, hi, f_lo, f_hi = br.lo, br.hi, br.f_lo, br.f_hi
        return lo, hi, f_lo, f_hi

    tol_exp = digits + 6
    for _ in range(3):
        lo, hi, f_lo, f_hi = level(digits, tol_exp)
        ctx = PrecisionContext.from_digits(digits)
        with mp.workprec(ctx.workbits):
            decimal = _round_enclosure(lo, hi, digits)
            if decimal is not None:
                if lo == hi:  # exact hit: degenerate bracket
                    bracket = Bracket(lo, hi, f_lo, f_hi, exact=True)
                else:
                    bracket = Bracket(lo, hi, f_lo, f_hi)
                return Sigma0Result(
                    decimal=decimal,
                    value=(lo + hi) / 2,
                    bracket=bracket,
                    digits=digits,
                    evaluations=evals,
                    method=method,
                    strategy=strategy,
                )
        tol_exp += 6  # enclosure straddled a rounding boundary: tighten
    raise PrecisionError(f"could not settle digit {digits}; root adversarially close to a rounding boundary")
