"""sigma0 solver tests: exact coefficient identities, series cross-checks
against brute-force prime sums, and the root itself."""
import math
from fractions import Fraction

import numpy as np
import pytest
from mpmath import mp, mpf

from rezeta.errors import CapacityError, DomainError, PrecisionError
from rezeta.kernel import PrecisionContext
from rezeta.primes import moebius_table, sieve_primes
from rezeta.sigma0 import (arcsin_coeff, d_coeff, f_arcsin_series,
                           f_logzeta_series, logzeta_coeff,
                           logzeta_coeff_table, solve_sigma0)

CTX30 = PrecisionContext.from_digits(30)

# first 50 decimal places of the root, truncation (not rounding) of the
# frozen 100-digit value (see test_acceptance)
SIGMA0_50 = "1.19234733718619320289750442742559788340111923083799"


def test_arcsin_coeff_values_and_bounds():
    assert arcsin_coeff(0) == 1
    assert arcsin_coeff(1) == Fraction(1, 6)
    assert arcsin_coeff(2) == Fraction(3, 40)
    # against the closed form (2k)! / (4^k k!^2 (2k+1))
    for k in range(40):
        ck = arcsin_coeff(k)
        assert ck == Fraction(math.factorial(2 * k),
                              4 ** k * math.factorial(k) ** 2 * (2 * k + 1))
        assert 0 < ck <= Fraction(1, 2 * k + 1)
        if k >= 1:
            assert ck <= Fraction(1, 2 * (2 * k + 1))
    with pytest.raises(DomainError):
        arcsin_coeff(-1)


def test_d_coeff_values_and_bound():
    assert d_coeff(0) == 1
    assert d_coeff(1) == Fraction(-1, 6)
    for j in range(201):
        assert abs(d_coeff(j)) <= 1, j
    with pytest.raises(DomainError):
        d_coeff(-1)


def test_even_multiplier_weights_do_not_vanish():
    # the full series runs over *all* m; dropping even m is wrong by 0.16
    assert logzeta_coeff(2) == Fraction(-1, 2)
    assert logzeta_coeff(6) == Fraction(1, 12)
    assert logzeta_coeff(1) == 1
    assert any(logzeta_coeff(m) != 0 for m in range(2, 20, 2))


def test_coeff_table_matches_pointwise():
    table = logzeta_coeff_table(80)
    for m in range(1, 81):
        assert table[m] == logzeta_coeff(m), m


def test_d_series_matches_double_series_exactly():
    # sum_{j<=J} d_j x^(2j+1) regroups sum_{k,r odd} c_k mu(r)/r x^((2k+1)r);
    # in exact rationals at x = 1/2 the two truncations agree term for term
    J = 200
    x = Fraction(1, 2)
    lhs = sum(d_coeff(j) * x ** (2 * j + 1) for j in range(J + 1))
    top = 2 * J + 1
    mu = moebius_table(top)
    rhs = Fraction(0)
    k = 0
    while 2 * k + 1 <= top:
        ck = arcsin_coeff(k)
        for r in range(1, top // (2 * k + 1) + 1, 2):
            if mu[r] and (2 * k + 1) * r <= top:
                rhs += ck * Fraction(int(mu[r]), r) * x ** ((2 * k + 1) * r)
        k += 1
    assert lhs == rhs


def test_series_signs_on_unit_bracket():
    eps = mpf(10) ** -20
    assert f_logzeta_series("1.1", eps, CTX30) > 0
    assert f_logzeta_series("1.2", eps, CTX30) < 0
    assert f_arcsin_series("1.1", eps, CTX30) > 0
    assert f_arcsin_series("1.2", eps, CTX30) < 0
    v2 = f_logzeta_series(2, eps, CTX30)
    with mp.workprec(CTX30.workbits):
        assert -mp.pi / 2 < v2 < 0


def test_cross_method_agreement():
    eps = mpf(10) ** -30
    for sigma in ["1.05", "1.1", "1.15", "1.1923", "1.3", "1.6", 2]:
        a = f_arcsin_series(sigma, eps, CTX30)
        b = f_logzeta_series(sigma, eps, CTX30)
        assert abs(a - b) <= 2 * eps, sigma


def test_residual_at_50_digit_root():
    ctx = PrecisionContext.from_digits(70)
    eps = mpf(10) ** -60
    with mp.workprec(ctx.workbits):
        r = f_logzeta_series(SIGMA0_50, eps, ctx)
        # |f'| ~ 5 near the root; 50-digit truncation error < 1e-50
        assert abs(r) < mpf(10) ** -45


def test_frozen_value_f_at_1_2():
    v = f_logzeta_series("1.2", mpf(10) ** -25, CTX30)
    with mp.workprec(CTX30.workbits):
        assert abs(v - mpf("-0.0319327319785974")) < 1e-15


def test_monotone_and_convex_on_grid():
    eps = mpf(10) ** -25
    grid = ["1.05", "1.12", "1.19", "1.26", "1.4", "1.6", "1.8", "2"]
    with mp.workprec(CTX30.workbits):
        xs = [mpf(s) for s in grid]
        ys = [f_logzeta_series(x, eps, CTX30) for x in xs]
        for i in range(len(xs) - 1):
            assert ys[i] > ys[i + 1]
        for i in range(1, len(xs) - 1):
            x1, x2, x3 = xs[i - 1], xs[i], xs[i + 1]
            chord = ((x3 - x2) * ys[i - 1] + (x2 - x1) * ys[i + 1]) / (x3 - x1)
            assert ys[i] < chord


@pytest.mark.parametrize("sigma", ["1.3", "1.5", "2.0"])
def test_bruteforce_prime_sum_brackets_f(sigma):
    # independent oracle: arcsin over actual sieved primes to 1e6, with the
    # tail over p > 1e6 bounded by 2 * integral comparison (arcsin x <= 2x)
    p = sieve_primes(10 ** 6).astype(float)
    s = float(mpf(sigma))
    brute = math.fsum(np.arcsin(p ** (-s))) - math.pi / 2
    tail = 2 * (10 ** 6) ** (1.0 - s) / (s - 1.0)
    v = float(f_logzeta_series(sigma, mpf(10) ** -25, CTX30))
    assert brute - 1e-11 <= v <= brute + tail + 1e-11


def test_solve_low_digits():
    assert solve_sigma0(1).decimal == "1.2"
    r = solve_sigma0(10)
    assert r.decimal == "1.1923473372"
    assert r.evaluations >= 2
    br = r.bracket
    assert br.exact or (br.f_lo > 0 > br.f_hi and br.width < mpf(10) ** -10)


def test_solve_strategies_agree():
    decs = {s: solve_sigma0(25, strategy=s).decimal
            for s in ("hybrid", "bisect", "convex")}
    assert len(set(decs.values())) == 1, decs
    assert decs["hybrid"] == "1.1923473371861932028975044"
    # and the arcsin method lands on the same string
    assert solve_sigma0(25, method="arcsin").decimal == decs["hybrid"]


def test_solve_validation():
    with pytest.raises(DomainError):
        solve_sigma0(0)
    with pytest.raises(CapacityError):
        solve_sigma0(1001)
    with pytest.raises(ValueError):
        solve_sigma0(10, method="primesum")
    with pytest.raises(ValueError):
        solve_sigma0(10, strategy="newton")


def test_series_validation():
    eps = mpf(10) ** -20
    with pytest.raises(DomainError):
        f_logzeta_series("1.04", eps, CTX30)
    with pytest.raises(DomainError):
        f_logzeta_series("2.01", eps, CTX30)
    with pytest.raises(DomainError):
        f_arcsin_series("1.2", 0, CTX30)
    with pytest.raises(PrecisionError):
        f_arcsin_series("1.2", mpf(2) ** -CTX30.bits, CTX30)
