"""Precision-parameterized evaluation of zeta(s), log zeta, Bernoulli numbers
and constants, each with an explicit error contract.

Everything here is Euler-Maclaurin based:

    zeta(s) = sum_{n<N} n^-s  +  N^(1-s)/(s-1)  +  N^-s/2
              + sum_{i>=1} B_2i/(2i)! * s(s+1)...(s+2i-2) * N^(-s-2i+1)  + R_M,

    |R_M| <= |first omitted Bernoulli term| * |s+2M+1| / (re(s)+2M+1),

valid for re(s) >= 1 (in fact for re(s) > -2M+1).  The summation cutoff N and
the Bernoulli term count M are chosen so the remainder bound drops below the
target; N scales like |im(s)|/3 + bits, which keeps the Bernoulli ratio
((|s|+2i)/(2*pi*N))^2 safely below 1 in the regime we use.

Precision discipline: every operation runs at bits + guard_bits working
precision and promises relative error < 2^-bits on its result.  Decimal
string inputs are converted *inside* the working-precision context -- a
string parsed at ambient (53-bit) precision silently perturbs t by ~1e-10
at t ~ 7e5, far above the kernel's error budget.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, factorial, log2

import mpmath as mp
from mpmath import mpc, mpf

from .errors import CapacityError, DomainError, PoleError, PrecisionError

BERNOULLI_MAX_INDEX = 4096
IM_MAX = 1e8


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision in bits, plus guard bits carried internally.

    Contract: a kernel operation returns a value whose relative error is
    below 2^-bits, given exact inputs.  The guard bits absorb rounding
    inside the algorithms and are never part of the promise.
    """

    bits: int
    guard_bits: int = 32

    def __post_init__(self):
        if self.bits < 64:
            raise DomainError(f"bits must be >= 64, got {self.bits}")
        if self.guard_bits < 10:
            raise DomainError(f"guard_bits must be >= 10, got {self.guard_bits}")

    @property
    def workbits(self) -> int:
        return self.bits + self.guard_bits

    @classmethod
    def from_digits(cls, digits: int, guard_bits: int = 32) -> "PrecisionContext":
        # ceil(digits * log2(10)) + 64 -- same rule the CLI uses.
        return cls(bits=ceil(digits * log2(10)) + 64, guard_bits=guard_bits)


def to_mpf(x, name: str = "value") -> mpf:
    """Convert x to mpf at the *current* mpmath precision.

    Call this inside a workprec block.  Strings are parsed at working
    precision; ints and floats convert exactly; an mpf passes through
    unchanged (the caller owns its precision).
    """
    if isinstance(x, mpf):
        return x
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    if isinstance(x, (int, str, float)):
        return mpf(x)
    raise DomainError(f"cannot interpret {name} of type {type(x).__name__}")


# ---------------------------------------------------------------------------
# Bernoulli numbers: exact rationals computed once, rounded per (n, bits).

_bern_lock = threading.Lock()
_bern_fracs: dict[int, Fraction] = {}
_bern_mpfs: dict[tuple[int, int], mpf] = {}


def _bernoulli_fraction(n: int) -> Fraction:
    with _bern_lock:
        got = _bern_fracs.get(n)
        if got is None:
            p, q = mp.bernfrac(n)
            got = Fraction(int(p), int(q))
            _bern_fracs[n] = got
        return got


def bernoulli(n: int, ctx: PrecisionContext) -> mpf:
    """B_n to context precision. n even (B_1 = -1/2 tolerated); cached per (n, bits)."""
    if n < 0:
        raise DomainError(f"Bernoulli index must be >= 0, got {n}")
    if n % 2 == 1 and n > 1:
        raise DomainError(f"odd Bernoulli numbers vanish for n > 1 (got n = {n})")
    if n > BERNOULLI_MAX_INDEX:
        raise CapacityError(f"Bernoulli index {n} above maximum {BERNOULLI_MAX_INDEX}")
    key = (n, ctx.bits)
    with _bern_lock:
        got = _bern_mpfs.get(key)
    if got is not None:
        return got
    frac = _bernoulli_fraction(n)
    with mp.workprec(ctx.workbits):
        val = mpf(frac.numerator) / frac.denominator
    with _bern_lock:
        _bern_mpfs[key] = val
    return val


_bof_fracs: dict[int, Fraction] = {}
_bof_mpfs: dict[tuple[int, int], mpf] = {}


def _bern_over_fact(i: int) -> mpf:
    """B_2i / (2i)! at the current working precision, cached per (i, prec).

    Lock-free cache: dict reads/writes are atomic under the GIL and the
    values are idempotent, so a rare duplicated computation is harmless.
    """
    key = (i, mp.mp.prec)
    got = _bof_mpfs.get(key)
    if got is None:
        frac = _bof_fracs.get(i)
        if frac is None:
            frac = _bernoulli_fraction(2 * i) / factorial(2 * i)
            _bof_fracs[i] = frac
        got = mpf(frac.numerator) / frac.denominator
        _bof_mpfs[key] = got
    return got


# ---------------------------------------------------------------------------
# Real zeta.  Computed as zeta(sigma) - 1 internally so that log_zeta keeps
# full relative precision when zeta - 1 ~ 2^-sigma is tiny.


def _zeta_m1_real(sigma: mpf, tau: mpf) -> mpf:
    """zeta(sigma) - 1 with absolute error < tau, for real sigma > 1.

    Runs at the ambient mpmath precision; the caller sets workprec and
    chooses tau >= value * 2^-(ambient precision) so rounding stays below it.
    """
    prec = mp.mp.prec
    N = max(10, prec)
    cut = tau / (4 * N)
    ssum = mpf(0)
    n_stop = N
    for n in range(2, N):
        term = mpf(n) ** (-sigma)
        if term < cut:
            n_stop = n  # everything from here on is < cut; total dropped < tau/4
            break
        ssum += term
    else:
        n_stop = N
    C = mpf(n_stop)
    Cpow = C ** (-sigma)  # C^-sigma
    ssum += Cpow * C / (sigma - 1) + Cpow / 2
    # Bernoulli corrections at closure point C.
    rising = sigma  # (sigma)_1
    Tpow = Cpow / C  # C^(-sigma-1)
    i = 1
    max_terms = 2 * prec + 64
    while True:
        term = _bern_over_fact(i) * rising * Tpow
        if abs(term) < tau / 4:  # remainder <= |first omitted term| for real s
            break
        ssum += term
        rising *= (sigma + 2 * i - 1) * (sigma + 2 * i)
        Tpow /= C * C
        i += 1
        if i > max_terms:
            raise PrecisionError("Euler-Maclaurin correction series failed to converge")
    return ssum


def zeta_real(sigma, ctx: PrecisionContext) -> mpf:
    """zeta(sigma) for real sigma > 1, relative error < 2^-bits."""
    with mp.workprec(ctx.workbits):
        sig = to_mpf(sigma, "sigma")
        guard = mpf(2) ** (-ctx.bits // 2)
        if sig <= 1:
            raise PoleError(f"zeta_real requires sigma > 1 (pole at 1), got {sig}")
        if sig < 1 + guard:
            raise PoleError(
                f"sigma = {sig} within 2^-{ctx.bits // 2} of the pole at 1"
            )
        # value >= 1, so an absolute target gives the relative contract
        tau = mpf(2) ** (-(ctx.bits + ctx.guard_bits // 2))
        return 1 + _zeta_m1_real(sig, tau)


def log_zeta(sigma, ctx: PrecisionContext) -> mpf:
    """log zeta(sigma) for real sigma > 1, full relative precision.

    Uses log1p on zeta - 1: for sigma >= 2 the value is ~ 2^-sigma and going
    through zeta itself would surrender all relative accuracy.
    """
    with mp.workprec(ctx.workbits):
        sig = to_mpf(sigma, "sigma")
        guard = mpf(2) ** (-ctx.bits // 2)
        if sig <= 1 or sig < 1 + guard:
            raise PoleError(f"log_zeta requires sigma well above 1, got {sig}")
        # zeta - 1 > 2^-sigma, so scale the absolute target to keep the
        # relative contract on the logarithm.
        scale = mpf(2) ** (-sig)
        tau = scale * mpf(2) ** (-(ctx.bits + ctx.guard_bits // 2))
        m1 = _zeta_m1_real(sig, tau)
        return mp.log1p(m1)


# ---------------------------------------------------------------------------
# Complex zeta on re(s) >= 1.


def _parse_complex(s) -> mpc:
    if isinstance(s, mpc):
        return s
    if isinstance(s, complex):
        return mpc(s.real, s.imag)
    if isinstance(s, (tuple, list)) and len(s) == 2:
        return mpc(to_mpf(s[0], "re(s)"), to_mpf(s[1], "im(s)"))
    if isinstance(s, (mpf, int, float, str)):
        return mpc(to_mpf(s, "s"))
    raise DomainError(f"cannot interpret s of type {type(s).__name__}")


def zeta_complex(s, ctx: PrecisionContext) -> mpc:
    """zeta(s) for re(s) >= 1, absolute error < 2^-bits * max(1, |zeta(s)|).

    The summation cutoff is N = max(10, ceil(|im s|/3) + workbits); cost is
    linear in |im s|.  |im s| is capped at 1e8.
    """
    with mp.workprec(ctx.workbits):
        z = _parse_complex(s)
        sig, t = mp.re(z), mp.im(z)
        if sig < 1:
            raise DomainError(f"zeta_complex requires re(s) >= 1, got re = {sig}")
        if abs(t) > IM_MAX:
            raise CapacityError(f"|im(s)| = {abs(t)} above maximum {IM_MAX:g}")
        if t == 0:
            if sig == 1:
                raise PoleError("zeta has a simple pole at s = 1")
            return mpc(1 + _zeta_m1_real(sig, mpf(2) ** (-(ctx.bits + ctx.guard_bits // 2))))

        tau = mpf(2) ** (-(ctx.bits + ctx.guard_bits // 2))
        N = max(10, int(mp.ceil(abs(t) / 3)) + ctx.workbits)
        cut = tau / (4 * N)
        ssum = mpc(1)
        n_stop = N
        for n in range(2, N):
            term = mp.exp(-z * mp.ln(n))
            if abs(term) < cut:
                n_stop = n
                break
            ssum += term
        C = mpf(n_stop)
        Cpow = mp.exp(-z * mp.ln(C))  # C^-s
        ssum += Cpow * C / (z - 1) + Cpow / 2
        rising = z
        Tpow = Cpow / C
        i = 1
        max_terms = 2 * ctx.workbits + 64
        while True:
            term = _bern_over_fact(i) * rising * Tpow
            # remainder bound carries the factor |s+2i+1| / (re(s)+2i+1)
            fac = abs(z + 2 * i + 1) / (sig + 2 * i + 1)
            if abs(term) * fac < tau / 4:
                break
            ssum += term
            rising *= (z + 2 * i - 1) * (z + 2 * i)
            Tpow /= C * C
            i += 1
            if i > max_terms:
                raise PrecisionError("Euler-Maclaurin correction series failed to converge")
        return ssum


def constant_pi(ctx: PrecisionContext) -> mpf:
    with mp.workprec(ctx.workbits):
        return +mp.pi


def constant_gamma(ctx: PrecisionContext) -> mpf:
    with mp.workprec(ctx.workbits):
        return +mp.euler


# ---------------------------------------------------------------------------
# Batched log zeta(m * sigma) for m = 1..m_max -- the workhorse of the sigma0
# series.  One evaluation of the rearranged series needs log zeta at hundreds
# of multiples of sigma; computing each independently would redo the same
# n^-x powers from scratch.  Instead we keep pows[n] = n^(-m*sigma) and
# advance all of them to m+1 with one multiply per n:
#
#     pows[n] <- pows[n] * base[n],   base[n] = n^-sigma.
#
# As m grows the terms fall below the cut and the maintained range shrinks,
# so the total work is a small multiple of the m = 1 evaluation.


def log_zeta_batch(sigma, m_max: int, tau, ctx: PrecisionContext) -> list[mpf]:
    """[None, log zeta(sigma), log zeta(2 sigma), ..., log zeta(m_max sigma)].

    Each entry has absolute error < tau.  sigma > 1 required (the m = 1 entry
    sits closest to the pole and dominates the cost).
    """
    with mp.workprec(ctx.workbits):
        sig = to_mpf(sigma, "sigma")
        if sig <= 1:
            raise PoleError(f"log_zeta_batch requires sigma > 1, got {sig}")
        if m_max < 1:
            raise DomainError(f"m_max must be >= 1, got {m_max}")
        tau = to_mpf(tau, "tau")
        if tau <= 0:
            raise DomainError("tau must be positive")
        if tau < mpf(2) ** (-ctx.workbits + 8):
            raise PrecisionError(
                f"tau = {mp.nstr(tau, 5)} unachievable at {ctx.workbits} working bits"
            )
        N = max(32, (3 * ctx.workbits) // 4)
        cut = tau / (4 * N)

        # base[n] = n^-sigma and pows[n] = n^(-m sigma), lists indexed by n.
        base = [None, None] + [mp.exp(-sig * mp.ln(n)) for n in range(2, N + 1)]
        pows = list(base)
        L = N  # highest maintained index

        out: list = [None] * (m_max + 1)
        m = 1
        while True:
            x = m * sig
            # Keep the closure point C = L at or above ~x/4: the Bernoulli
            # ratio ((x+2i)/(2 pi C))^2 must stay below 1 long enough for the
            # remainder bound to bite.  Below that the shrink-to-cut rule
            # would park C where the correction series diverges before
            # reaching tau.
            floor_L = min(N, int(x) // 4 + 8)
            while L > floor_L and pows[L] < cut:
                L -= 1

            if pows[2] < cut:
                # zeta(x) - 1 = 2^-x + O(3^-x) is entirely below the error
                # budget; 2^-x is the best cheap representative of log zeta.
                # This regime is permanent (powers only shrink with m), so
                # nothing beyond n = 2 needs maintaining from here on.
                out[m] = pows[2]
                L = 2
            else:
                ssum = mpf(0)
                for n in range(2, L):
                    if pows[n] >= cut:
                        ssum += pows[n]
                    # terms below cut are dropped: < N of them, each < cut
                C = mpf(L)
                Cpow = pows[L]
                ssum += Cpow * C / (x - 1) + Cpow / 2
                rising = x
                Tpow = Cpow / C
                i = 1
                max_terms = 2 * ctx.workbits + 64
                while True:
                    term = _bern_over_fact(i) * rising * Tpow
                    if abs(term) < tau / 4:
                        break
                    ssum += term
                    rising *= (x + 2 * i - 1) * (x + 2 * i)
                    Tpow /= C * C
                    i += 1
                    if i > max_terms:
                        raise PrecisionError(
                            f"correction series stalled at multiplier {m}"
                        )
                out[m] = mp.log1p(ssum)

            if m == m_max:
                return out
            m += 1
            for n in range(2, L + 1):
                pows[n] *= base[n]
