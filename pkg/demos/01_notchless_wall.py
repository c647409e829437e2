"""The uniform wire: the wall is the explicit profile arctan(sinh x) with energy 2.

Run with ``python demos/01_notchless_wall.py``.
"""
import numpy as np

from notchwall import make_grid, make_profile, minimize, theta_star
from notchwall.transforms import first_zero

grid = make_grid(20.0, 0.01)
wire = make_profile("plateau", s0=1.0, a=1.0)
res = minimize(wire, grid)
c = first_zero(res.theta, grid.x)

print("uniform wire, L = 20, h = 0.01")
print(f"  converged in {res.iterations} iterations")
print(f"  energy            {res.report.total:.8f}   (exact 2)")
print(f"  center            {c:+.2e}")
print(f"  sup |theta - theta*| {np.max(np.abs(res.theta - theta_star(grid.x - c))):.2e}")

# any translate is equally good: the energy does not see the center
for shift in (-2.0, 1.5):
    t = minimize(wire, grid, theta_star(grid.x - shift))
    print(f"  started at {shift:+.1f}: center {first_zero(t.theta, grid.x):+.3f}, energy {t.report.total:.8f}")
