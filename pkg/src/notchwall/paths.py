"""Paths of walls built by convex combination of ``cos(theta)``.

Writing ``psi = cos(theta)`` turns the energy on each side of the zero
``x0`` into ``(1/2) int (L(psi', psi) + psi^2) s`` with the jointly convex
integrand ``L(y, z) = y^2 / (1 - z^2)``. Hence

    P_lambda(theta0)(x) = sgn(x - x0) arccos((1 - lambda) cos theta0 + lambda cos theta_*(x - x0))

has energy below the chord between its endpoints. The composite path
joins a critical point ``theta0``, the notchless wall centered at its zero,
the notchless wall centered at the zero of ``theta_s`` and ``theta_s``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .energy import discretize, energy, energy_value
from .field import HALF_PI, theta_star, values_of
from .grid import Grid
from .profile import NotchProfile, cell_integrals
from .transforms import DomainError, first_zero

__all__ = [
    "PathSample",
    "L_function",
    "L_hessian",
    "partial_energies",
    "cos_convex_path",
    "translated_wall_energy",
    "composite_path",
    "h1_distance",
    "PartialEnergies",
]


def L_function(y, z):
    """``L(y, z) = y^2 / (1 - z^2)`` for ``|z| < 1``."""
    y, z = np.asarray(y, dtype=float), np.asarray(z, dtype=float)
    if np.any(np.abs(z) >= 1.0):
        raise DomainError("L(y, z) needs |z| < 1")
    out = y * y / (1.0 - z * z)
    return float(out) if out.ndim == 0 else out


def L_hessian(y: float, z: float) -> np.ndarray:
    """Hessian of :func:`L_function`; its determinant is ``4 y^2 / (1 - z^2)^3``."""
    if abs(z) >= 1.0:
        raise DomainError("L(y, z) needs |z| < 1")
    q = 1.0 - z * z
    hyy = 2.0 / q
    hyz = 4.0 * y * z / q**2
    hzz = 2.0 * y * y / q**2 + 8.0 * y * y * z * z / q**3
    return np.array([[hyy, hyz], [hyz, hzz]])


@dataclass(frozen=True)
class PartialEnergies:
    """Energy left and right of ``x0`` in angle form and in ``cos`` form."""

    E_minus: float
    E_plus: float
    cal_minus: float
    cal_plus: float


def _check_sign_pattern(t, x, x0):
    left, right = x < x0, x > x0
    inner = np.ones_like(t, dtype=bool)
    inner[[0, -1]] = False
    if np.any(t[left & inner] >= 0.0) or np.any(t[right & inner] <= 0.0):
        raise DomainError("theta must be negative left of x0 and positive right of it")
    if np.any(np.abs(t[inner]) >= HALF_PI):
        raise DomainError("theta must stay strictly inside (-pi/2, pi/2)")


def partial_energies(theta, x0: float, profile: NotchProfile, grid: Grid) -> PartialEnergies:
    """Half-line energies ``E^-``, ``E^+`` and ``cal E^-(cos theta)``, ``cal E^+(cos theta)``.

    Both forms are integrated from the same monotone cubic interpolant of
    the nodal angles with Gauss quadrature split at ``x0`` and at the profile
    breakpoints; the exact tail energies beyond ``+-L`` are added to each.
    """
    t = values_of(theta)
    x = grid.x
    _check_sign_pattern(t, x, x0)
    f = PchipInterpolator(x, t)
    df = f.derivative()

    def angle_density(u):
        tu = f(u)
        return 0.5 * (df(u) ** 2 + np.cos(tu) ** 2) * profile(u)

    def cos_density(u):
        tu = f(u)
        psi = np.cos(tu)
        dpsi = -np.sin(tu) * df(u)
        q = 1.0 - psi * psi
        # 1 - psi^2 cancels near the zero; the exact value sin^2 takes over
        q = np.where(q < 1e-6, np.sin(tu) ** 2, q)
        safe = np.where(q > 0.0, q, 1.0)
        lag = np.where(q > 0.0, dpsi * dpsi / safe, df(u) ** 2)
        return 0.5 * (lag + psi * psi) * profile(u)

    bps = np.concatenate([profile.breakpoints, [x0]])
    edges = np.union1d(x, [x0])
    k = int(np.searchsorted(edges, x0))
    tails = (1.0 + math.sin(t[0]), 1.0 - math.sin(t[-1]))
    out = []
    for dens in (angle_density, cos_density):
        cells = cell_integrals(dens, edges, bps)
        out.append((float(cells[:k].sum()) + tails[0], float(cells[k:].sum()) + tails[1]))
    return PartialEnergies(out[0][0], out[0][1], out[1][0], out[1][1])


def cos_convex_path(theta0, x0: float | None, lam: float, x: np.ndarray) -> np.ndarray:
    """``P_lambda(theta0)`` on the nodes ``x``.

    Evaluated as ``sgn(x - x0) 2 arcsin(sqrt((1-lambda) sin^2(theta0/2) + lambda sin^2(theta_*/2)))``,
    which equals the ``arccos`` form but keeps full precision near the zero.
    """
    t = values_of(theta0)
    if np.any(np.diff(t) < -1e-12):
        raise DomainError("cos_convex_path needs a non-decreasing wall")
    if x0 is None:
        x0 = first_zero(t, x)
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    ts = theta_star(x - x0)
    if lam == 0.0:
        return t.copy()
    if lam == 1.0:
        return ts
    q = (1.0 - lam) * np.sin(0.5 * t) ** 2 + lam * np.sin(0.5 * ts) ** 2
    over = q > 0.5
    if np.any(q - 0.5 > 1e-12):
        warnings.warn(f"clamped arccos argument by {float(np.max(q) - 0.5):.3e}", RuntimeWarning)
    q = np.where(over, 0.5, q)
    return np.sign(x - x0) * 2.0 * np.arcsin(np.sqrt(q))


def translated_wall_energy(gamma: float, profile: NotchProfile, grid: Grid) -> float:
    """``E_s(theta_*(. - gamma))`` on the grid, tails included."""
    return energy_value(theta_star(grid.x - gamma), discretize(profile, grid))


def h1_distance(u, v, grid: Grid) -> float:
    """Discrete ``H^1`` distance (unweighted)."""
    w = values_of(u) - values_of(v)
    dw = np.diff(w) / grid.h
    return math.sqrt(grid.h * float(np.sum(dw * dw)) + grid.h * float(np.sum(grid.weights * w * w)))


@dataclass
class PathSample:
    lambdas: np.ndarray
    fields: np.ndarray = field(repr=False)
    energies: np.ndarray = field(repr=False)
    x0: float = math.nan
    x_s: float = math.nan
    max_energy: float = math.nan
    reference_energy: float = math.nan
    margin: float = math.nan

    def to_dict(self) -> dict:
        return {
            "x0": self.x0,
            "x_s": self.x_s,
            "max_energy": self.max_energy,
            "reference_energy": self.reference_energy,
            "margin": self.margin,
            "lambdas": self.lambdas.tolist(),
            "energies": self.energies.tolist(),
        }


def _segment_field(lam, theta0, theta_s, x0, xs, x):
    if lam <= 1.0 / 3.0:
        return cos_convex_path(theta0, x0, min(3.0 * lam, 1.0), x)
    if lam < 2.0 / 3.0:
        mu = 3.0 * lam - 1.0
        return theta_star(x - ((1.0 - mu) * x0 + mu * xs))
    return cos_convex_path(theta_s, xs, min(3.0 - 3.0 * lam, 1.0), x)


def composite_path(
    theta0,
    theta_s,
    profile: NotchProfile,
    grid: Grid,
    samples: int = 101,
    grad_tol: float = 1e-6,
) -> PathSample:
    """Sample the three-segment path from ``theta0`` to ``theta_s``.

    The middle segment translates the notchless wall from the zero ``x0`` of
    ``theta0`` to the zero ``x_s`` of ``theta_s``. ``margin`` is
    ``2 - max energy``, the gap below the notchless wall energy. The
    segment junctions ``1/3`` and ``2/3`` are always sampled.
    """
    x = grid.x
    for name, th in (("theta0", theta0), ("theta_s", theta_s)):
        gn = energy(th, profile, grid).grad_norm
        if gn > grad_tol:
            warnings.warn(f"{name} is not a critical point (gradient norm {gn:.2e})", RuntimeWarning)
    x0 = first_zero(theta0, x)
    xs = first_zero(theta_s, x)
    d = discretize(profile, grid)
    lams = np.union1d(np.linspace(0.0, 1.0, samples), [1.0 / 3.0, 2.0 / 3.0])
    fields = np.array([_segment_field(l, theta0, theta_s, x0, xs, x) for l in lams])
    energies = np.array([energy_value(f, d) for f in fields])
    emax = float(energies.max())
    return PathSample(
        lambdas=lams,
        fields=fields,
        energies=energies,
        x0=x0,
        x_s=xs,
        max_energy=emax,
        reference_energy=translated_wall_energy(x0, profile, grid),
        margin=2.0 - emax,
    )
