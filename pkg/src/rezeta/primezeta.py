"""The prime zeta function P(sigma) = sum over primes p of p^-sigma.

Computed through Moebius inversion of log zeta,

    P(sigma) = sum_{r>=1} mu(r)/r * log zeta(r*sigma),

truncated at R chosen from the tail bound

    |log zeta(x)| <= zeta(x) - 1 <= 3 * 2^-x   (x >= 2)
    => sum_{r>R} |mu(r)/r * log zeta(r*sigma)| <= sum_{r>R} 3/2^(r*sigma + 1)
       = (3/2) * 2^(-(R+1)*sigma) / (1 - 2^-sigma).

A brute-force partial sum over sieved primes is provided as an independent
cross-check; it returns a rigorous two-sided enclosure instead of a point
value.
"""
from __future__ import annotations

import math

import mpmath as mp
from mpmath import mpf

from .errors import DomainError, PrecisionError
from .kernel import PrecisionContext, log_zeta_batch, to_mpf
from .primes import moebius, sieve_primes

SIGMA_MIN = "1.05"  # parsed at working precision; a float literal here would
                    # sit a hair above the decimal and reject sigma="1.05"


def _truncation_order(sigma: mpf, eps: mpf) -> int:
    """Smallest R with the geometric tail bound below eps/2."""
    lead = mpf(3) / 2 / (1 - mpf(2) ** -sigma)
    # solve lead * 2^(-(R+1) sigma) < eps/2 for R, then nudge to be safe
    r = int(mp.ceil(mp.log(2 * lead / eps, 2) / sigma - 1))
    r = max(r, 1)
    while lead * mpf(2) ** (-(r + 1) * sigma) >= eps / 2:
        r += 1
    return r


def prime_zeta(sigma, eps, ctx: PrecisionContext) -> mpf:
    """P(sigma) with absolute error below eps, for sigma >= 1.05."""
    with mp.workprec(ctx.workbits):
        sig = to_mpf(sigma, "sigma")
        err = to_mpf(eps, "eps")
        if sig < mpf(SIGMA_MIN):
            raise DomainError(f"sigma must be >= {SIGMA_MIN}, got {sig}")
        if err <= 0:
            raise DomainError("eps must be positive")
        if err <= mpf(2) ** (-ctx.bits + 4):
            raise PrecisionError(
                f"eps = {mp.nstr(err, 5)} not achievable at {ctx.bits} bits"
            )
        R = _truncation_order(sig, err)
        # each batch entry to tau: weighted sum error <= tau * sum 1/r
        tau = err / (2 * (1 + math.log(R)))
        logs = log_zeta_batch(sig, R, tau, ctx)
        total = mpf(0)
        for r in range(R, 0, -1):  # small terms first
            mu = moebius(r)
            if mu:
                total += mpf(mu) * logs[r] / r
        return total


def prime_zeta_bruteforce(sigma: float, prime_limit: int) -> tuple[float, float]:
    """(lower, tail_bound): sum of p^-sigma over p <= prime_limit, plus a
    bound on what the primes beyond contribute, so that

        lower <= P(sigma) <= lower + tail_bound.

    The tail bound is the integral comparison sum_{p>x} p^-sigma <=
    int_x^inf t^-sigma dt = x^(1-sigma)/(sigma-1), generous because it
    counts every integer beyond x as prime.  Needs sigma > 1 to converge.
    The partial sum is exact float summation (fsum); per-term rounding is
    ~2^-52 * P, orders of magnitude below any sensible tail_bound.
    """
    if not sigma > 1:
        raise DomainError(f"tail bound needs sigma > 1, got {sigma}")
    if prime_limit < 100:
        raise DomainError(f"prime_limit must be >= 100, got {prime_limit}")
    primes = sieve_primes(prime_limit)
    lower = math.fsum(primes.astype(float) ** (-float(sigma)))
    tail_bound = prime_limit ** (1.0 - sigma) / (sigma - 1.0)
    return lower, tail_bound
