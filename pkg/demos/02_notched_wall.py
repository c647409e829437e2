"""Walls pinned in a notch, checked against shooting and the first integral.

The decay estimate ``pi/2 - |theta| <= pi exp(-|y|)`` holds for the gentle
plateau but fails on the deep step and cosine notches.
"""
import numpy as np

from notchwall import make_grid, make_profile, minimize, shoot
from notchwall.energy import pointwise_defect
from notchwall.solver import decay_check

grid = make_grid(16.0, 0.01)
profiles = {
    "plateau(0.5, 1, 0.25)": make_profile("plateau", s0=0.5, a=1.0, ramp=0.25),
    "step(0.5, 1)": make_profile("plateau", s0=0.5, a=1.0, ramp=0.0),
    "cosine(0.3, 2)": make_profile("cosine_dip", s0=0.3, a=2.0),
}
print(f"{'profile':24s}{'energy':>12s}{'shoot gap':>12s}{'odd':>10s}{'defect':>11s}{'decay margin':>14s}")
for name, p in profiles.items():
    res = minimize(p, grid)
    shot = shoot(p, grid)
    gap = np.max(np.abs(res.theta - shot.theta))
    dfc = pointwise_defect(res.theta, p, grid)
    margin = decay_check(res.theta, p, grid).min()
    print(f"{name:24s}{res.report.total:12.6f}{gap:12.1e}{res.odd_defect:10.1e}{dfc.min():11.1e}{margin:+14.2e}")
print("a negative decay margin means the estimate is violated at that depth")
