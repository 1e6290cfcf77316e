"""The first dip of Re zeta(1+it) below zero, up close.

Scans [682112.5, 682113.5], prints the window and the certified gaps,
then draws the profile of the dip in ASCII.

Run:  python3 demos/first_window.py        (~1 min; kernel confirmations)
"""
import numpy as np

from rezeta.linescan import sample_line, scan

rep = scan(682112.5, 682113.5, coarse_step=0.01, refine_tol=1e-8)

w = rep.windows[0]
print(f"window:   [{w.t_start:.8f}, {w.t_end:.8f}]  length {w.length:.8f}")
print(f"minimum:  {w.min_value:.7f} at t = {w.t_min:.6f}")
print(f"density within this 1.0-wide strip: {rep.empirical_d:.4f}")
print("certified positive:")
for c in rep.certified:
    print(f"  [{c.t_lo:.4f}, {c.t_hi:.4f}]  ({len(c.step_log)} steps)")
print(f"(the gaps next to the window edges are honest: the argument is "
      f"pinned near pi/2 there and the walk cannot re-enter)")

# profile of the dip, 60 columns wide
t, v = sample_line(w.t_start - 0.02, w.t_end + 0.02, 0.002)
lo, hi = v.min(), v.max()
print(f"\nRe zeta(1+it) over [{t[0]:.3f}, {t[-1]:.3f}]  "
      f"(range {lo:.4f} .. {hi:.4f})")
for ti, vi in zip(t[::2], v[::2]):
    col = int(round(58 * (vi - lo) / (hi - lo)))
    mark = "#" if vi <= 0 else "|"
    print(f"{ti:13.4f} {' ' * col}{mark}")
zero_col = int(round(58 * (0 - lo) / (hi - lo)))
print(f"{'zero':>13s} {' ' * zero_col}^")
