"""Mountain-pass margin of the composite path, shrinking as the notch disappears."""
from notchwall import composite_path, make_grid, make_profile, minimize

grid = make_grid(16.0, 0.01)
print(f"{'s0':>7s}{'E(wall)':>11s}{'path max':>11s}{'margin':>11s}{'margin/(1-s0)':>15s}")
for s0 in (0.5, 0.8, 0.95, 0.99, 0.999):
    p = make_profile("plateau", s0=s0, a=1.0, ramp=0.25)
    wall = minimize(p, grid)
    ps = composite_path(wall.theta, wall.theta, p, grid)
    print(f"{s0:7.3f}{wall.report.total:11.6f}{ps.max_energy:11.6f}{ps.margin:11.2e}{ps.margin / (1 - s0):15.3f}")
