"""Coercivity of the linearization at the wall as the notch deepens."""
from notchwall import make_grid, make_profile, minimize, spectral_audit

grid = make_grid(16.0, 0.02)
print(f"{'s0':>6s}{'alpha':>10s}{'kernel':>10s}{'factor gap':>12s}")
for s0 in (1.0, 0.95, 0.8, 0.5, 0.3):
    p = make_profile("plateau", s0=s0, a=1.0, ramp=0.25)
    wall = minimize(p, grid).theta
    rep = spectral_audit(wall, p, grid)
    print(f"{s0:6.2f}{rep.alpha:10.4f}{rep.kernel_residual:10.1e}{rep.factorization_gap:12.1e}")
print("alpha = 0 on the uniform wire is the translation mode; any notch makes it positive")
