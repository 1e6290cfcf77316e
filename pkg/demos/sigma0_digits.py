"""Walk sigma0 from 10 to 100 digits and watch the work grow.

Run:  python3 demos/sigma0_digits.py
"""
import time

from mpmath import mp, mpf

from rezeta.kernel import PrecisionContext
from rezeta.sigma0 import f_arcsin_series, f_logzeta_series, solve_sigma0

print("digits   evaluations   width        seconds")
for digits in (10, 20, 40, 100):
    t0 = time.time()
    r = solve_sigma0(digits)
    dt = time.time() - t0
    with mp.workprec(PrecisionContext.from_digits(digits).workbits):
        width = mp.nstr(r.bracket.width, 3)
    print(f"{digits:6d}   {r.evaluations:11d}   {width:<10s}   {dt:7.2f}")
    print(f"         {r.decimal}")

# the two series rearrangements are independent code paths; their
# agreement at the root is the cheapest full-stack cross-check we have
ctx = PrecisionContext.from_digits(40)
eps = mpf(10) ** -35
sig = r.decimal[:42]  # reuse the 100-digit result, truncated
a = f_arcsin_series(sig, eps, ctx)
b = f_logzeta_series(sig, eps, ctx)
with mp.workprec(ctx.workbits):
    print(f"\nresidual at the root: arcsin series {mp.nstr(a, 3)}, "
          f"logzeta series {mp.nstr(b, 3)}, difference {mp.nstr(abs(a - b), 3)}")
