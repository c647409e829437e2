"""Linearized operators at the wall and their spectral audit.

Both operators have the form ``A u = -(1/s)(s u')' + V u`` with homogeneous
Dirichlet conditions at ``x = +-L``. In the flux discretization
``M A = K + diag(M V)`` with ``K`` the exchange stiffness and ``M`` the
weighted mass, so ``A`` is symmetric for ``<u, v>_s``.

- ``L1`` has ``V = sin^2 - cos^2``; ``M L1`` is exactly the discrete
  Hessian of the energy.
- ``L2`` uses the discrete potential ``V = -(K c)/(M c)`` with
  ``c = cos(theta)``. It is the consistent discretization of
  ``sin^2 - theta'^2`` for which ``L2 c = 0`` and ``L2 = l* l`` hold exactly,
  with ``(l u)_{i+1/2} = (c_i u_{i+1} - c_{i+1} u_i) / (h sqrt(c_i c_{i+1}))``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.linalg import (
    LinAlgError,
    cho_solve_banded,
    cholesky_banded,
    eigh_tridiagonal,
    solve_banded,
)

from .energy import Discretization, centered_derivative, discretize, energy_value
from .field import values_of
from .grid import Grid
from .profile import NotchProfile

__all__ = [
    "TanSingularityError",
    "LinearizedOperator",
    "SpectralReport",
    "assemble",
    "factorization_check",
    "ell",
    "coercivity_alpha",
    "eigenvalues_oracle",
    "hessian_check",
    "random_probes",
    "spectral_audit",
]

TAN_GUARD = 1e-8


class TanSingularityError(ValueError):
    """``|theta|`` reaches ``pi/2`` at an interior node, so ``tan`` is unbounded."""


@dataclass(frozen=True, eq=False)
class LinearizedOperator:
    """Tridiagonal operator on the interior nodes ``1 .. n-2``.

    ``diag`` and ``off`` hold the symmetric matrix ``M A`` (stiffness plus
    weighted potential); ``mass`` the interior weights ``h s_i``.
    """

    kind: str
    theta: np.ndarray
    potential: np.ndarray
    diag: np.ndarray
    off: np.ndarray
    mass: np.ndarray
    disc: Discretization

    def apply(self, u) -> np.ndarray:
        """``A u`` for a full nodal field; boundary values of ``u`` are ignored."""
        u = np.asarray(u, dtype=float)
        ui = u[1:-1]
        r = self.diag * ui
        r[:-1] += self.off * ui[1:]
        r[1:] += self.off * ui[:-1]
        out = np.zeros_like(u)
        out[1:-1] = r / self.mass
        return out

    def apply_full(self, u) -> np.ndarray:
        """``A u`` with the boundary values of ``u`` entering the stencil."""
        u = np.asarray(u, dtype=float)
        d = self.disc
        flux = d.s_mid * np.diff(u) / d.h
        out = np.zeros_like(u)
        out[1:-1] = -(flux[1:] - flux[:-1]) / self.mass + self.potential * u[1:-1]
        return out

    def quadratic(self, u, v) -> float:
        """``<A u, v>_s`` for fields vanishing at both ends."""
        ui, vi = np.asarray(u, dtype=float)[1:-1], np.asarray(v, dtype=float)[1:-1]
        r = self.diag * ui
        r[:-1] += self.off * ui[1:]
        r[1:] += self.off * ui[:-1]
        return float(np.dot(r, vi))

    def banded_upper(self, shift: float = 0.0) -> np.ndarray:
        ab = np.zeros((2, self.diag.size))
        ab[0, 1:] = self.off
        ab[1] = self.diag - shift * self.mass
        return ab


@dataclass(frozen=True)
class SpectralReport:
    alpha: float
    kernel_residual: float
    factorization_gap: float
    iterations: int
    potential_gap: float
    below_essential: bool
    wall_grad_norm: float

    def to_dict(self) -> dict:
        return asdict(self)


def _stiffness(d: Discretization) -> tuple[np.ndarray, np.ndarray]:
    k = d.s_mid / d.h
    return (k[:-1] + k[1:]), -k[1:-1]


def assemble(kind: str, theta_s, profile: NotchProfile, grid: Grid) -> LinearizedOperator:
    """Assemble ``L1`` or ``L2`` at ``theta_s``."""
    d = discretize(profile, grid)
    t = values_of(theta_s)
    kd, ko = _stiffness(d)
    mass = d.mass[1:-1].copy()
    ti = t[1:-1]
    if kind == "L1":
        V = -np.cos(2.0 * ti)
    elif kind == "L2":
        c = np.cos(t)
        if np.any(c[1:-1] <= math.sin(TAN_GUARD)):
            raise TanSingularityError("|theta| within 1e-8 of pi/2 at an interior node")
        flux = d.s_mid * np.diff(c) / d.h
        V = (flux[1:] - flux[:-1]) / (mass * c[1:-1])
    else:
        raise ValueError(f"unknown operator kind {kind!r}")
    return LinearizedOperator(kind, t, V, kd + mass * V, ko, mass, d)


def ell(u, theta, grid: Grid) -> np.ndarray:
    """Discrete ``l u = c (u/c)'`` at cell midpoints."""
    u = np.asarray(u, dtype=float)
    c = np.cos(values_of(theta))
    return (c[:-1] * u[1:] - c[1:] * u[:-1]) / (grid.h * np.sqrt(c[:-1] * c[1:]))


def random_probes(grid: Grid, count: int, rng: np.random.Generator, margin: float = 1.0) -> np.ndarray:
    """Smooth random fields that vanish within ``margin`` of both ends."""
    x = grid.x
    lim = grid.L - margin
    out = np.zeros((count, grid.n))
    for k in range(count):
        for _ in range(3):
            mu = rng.uniform(-min(lim, 6.0), min(lim, 6.0))
            w = rng.uniform(0.3, 2.0)
            out[k] += rng.normal() * np.exp(-0.5 * ((x - mu) / w) ** 2)
        out[k] *= np.clip(lim - np.abs(x), 0.0, None) > 0
    return out


def factorization_check(theta_s, op: LinearizedOperator, probes: np.ndarray) -> float:
    """Max over probe pairs of ``|<L2 u, v>_s - <l u, l v>_s| / (|u|_s |v|_s)``."""
    if op.kind != "L2":
        raise ValueError("factorization_check needs the L2 operator")
    d = op.disc
    grid = d.grid
    c = np.cos(values_of(theta_s))
    if np.any(c[1:-1] <= math.sin(TAN_GUARD)):
        raise TanSingularityError("|theta| within 1e-8 of pi/2 at an interior node")
    w_mid = grid.h * d.s_mid
    gap = 0.0
    for u, v in zip(probes[0::2], probes[1::2]):
        lhs = op.quadratic(u, v)
        rhs = float(np.sum(w_mid * ell(u, theta_s, grid) * ell(v, theta_s, grid)))
        nu = math.sqrt(float(np.sum(d.mass * u * u)))
        nv = math.sqrt(float(np.sum(d.mass * v * v)))
        gap = max(gap, abs(lhs - rhs) / (nu * nv))
    return gap


def coercivity_alpha(op: LinearizedOperator, tol: float = 1e-12, max_iter: int = 500) -> tuple[float, np.ndarray, int]:
    """Smallest eigenvalue of ``(M A) u = lambda M u`` by inverse iteration.

    Returns ``(alpha, eigenvector on the full grid, iterations)``; the
    eigenvector is normalized in ``<., .>_s``.
    """
    ab = op.banded_upper()
    n = op.diag.size
    try:
        cb = cholesky_banded(ab, check_finite=False)

        def solve(b):
            return cho_solve_banded((cb, False), b, check_finite=False)

    except LinAlgError:
        full = np.zeros((3, n))
        full[0, 1:] = op.off
        full[1] = op.diag
        full[2, :-1] = op.off

        def solve(b):
            return solve_banded((1, 1), full, b, check_finite=False)

    u = np.cos(op.theta[1:-1]) + 1e-3
    u /= math.sqrt(float(np.sum(op.mass * u * u)))
    lam_old = math.inf
    lam = math.nan
    for k in range(1, max_iter + 1):
        z = solve(op.mass * u)
        z /= math.sqrt(float(np.sum(op.mass * z * z)))
        r = op.diag * z
        r[:-1] += op.off * z[1:]
        r[1:] += op.off * z[:-1]
        lam = float(np.dot(r, z))
        u = z
        if abs(lam - lam_old) <= tol * max(1.0, abs(lam)):
            break
        lam_old = lam
    vec = np.zeros(op.theta.size)
    vec[1:-1] = u
    return lam, vec, k


def eigenvalues_oracle(op: LinearizedOperator, count: int = 1) -> np.ndarray:
    """Lowest eigenvalues from a dense-free symmetric tridiagonal solver."""
    r = 1.0 / np.sqrt(op.mass)
    d = op.diag * r * r
    e = op.off * r[:-1] * r[1:]
    return eigh_tridiagonal(d, e, select="i", select_range=(0, count - 1), eigvals_only=True)


def hessian_check(
    theta_s,
    profile: NotchProfile,
    grid: Grid,
    directions: np.ndarray,
    eps: float = 1e-3,
) -> np.ndarray:
    """Relative errors between ``<L1 h, h>_s`` and central second differences of ``E``."""
    d = discretize(profile, grid)
    t = values_of(theta_s)
    op = assemble("L1", t, profile, grid)
    E0 = energy_value(t, d)
    errs = []
    for h in directions:
        fd = (energy_value(t + eps * h, d) - 2.0 * E0 + energy_value(t - eps * h, d)) / eps**2
        q = op.quadratic(h, h)
        errs.append(abs(fd - q) / abs(q))
    return np.asarray(errs)


def spectral_audit(
    theta_s,
    profile: NotchProfile,
    grid: Grid,
    n_probes: int = 50,
    seed: int = 0,
) -> SpectralReport:
    """Kernel, factorization and coercivity checks at a wall."""
    from .energy import energy

    t = values_of(theta_s)
    L1 = assemble("L1", t, profile, grid)
    L2 = assemble("L2", t, profile, grid)
    d = L2.disc
    c = np.cos(t)
    res = L2.apply_full(c)
    kernel = math.sqrt(float(np.sum(d.mass * res * res)))
    probes = random_probes(grid, 2 * n_probes, np.random.default_rng(seed))
    gap = factorization_check(t, L2, probes)
    alpha, _, iters = coercivity_alpha(L1)
    # consistency of the discrete L2 potential away from profile breakpoints
    x = grid.x[1:-1]
    far = np.ones(x.size, dtype=bool)
    for b in profile.breakpoints:
        far &= np.abs(x - b) > 2.5 * grid.h
    dt = centered_derivative(t, grid.h)[1:-1]
    cont = np.sin(t[1:-1]) ** 2 - dt**2
    pgap = float(np.max(np.abs(L2.potential - cont)[far]))
    return SpectralReport(
        alpha=alpha,
        kernel_residual=kernel,
        factorization_gap=gap,
        iterations=iters,
        potential_gap=pgap,
        below_essential=bool(alpha <= 0.5 + 1e-8),
        wall_grad_norm=energy(t, profile, grid).grad_norm,
    )
