"""Energy-lowering rearrangements applied to a rough competitor."""
import numpy as np

from notchwall import apply_chain, make_grid, make_profile
from notchwall.energy import discretize, energy_value
from notchwall.field import theta_star

grid = make_grid(8.0, 0.05)
p = make_profile("plateau", s0=0.5, a=1.0, ramp=0.25)
d = discretize(p, grid)
rng = np.random.default_rng(1)
theta = theta_star(grid.x - 0.8) + 0.4 * np.exp(-((grid.x + 2.0) ** 2)) * rng.normal()
theta = np.clip(theta, -np.pi / 2, np.pi / 2)

print(f"start                energy {energy_value(theta, d):.6f}")
out, reports = apply_chain(["threshold", "reflect", "envelope", "localize", "symmetrize"], theta, p, grid)
for r in reports:
    print(f"{r.name:20s} energy {r.energy_after:.6f}  (change {r.energy_after - r.energy_before:+.2e})")
print(f"symmetric result: max |theta(x) + theta(-x)| = {np.max(np.abs(out + out[::-1])):.1e}")
