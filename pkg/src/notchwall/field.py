"""Angle and magnetization fields and the conversions between them.

A wall is represented on the grid by nodal values; beyond ``[-L, L]`` it is
continued by exact translates of the notchless wall
``theta_*(x) = arctan(sinh x)``, which solve ``theta' = cos(theta)``.
The magnetization attached to an angle ``theta`` and a rotation ``phi``
about ``e1`` is ``m = R_phi (sin theta, cos theta, 0)``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import Grid, GridError

__all__ = [
    "FieldError",
    "PlanarityError",
    "AngleField",
    "theta_star",
    "theta_star_prime",
    "rotate",
    "unlift",
    "lift",
    "planarize",
    "separatrix_tail",
    "tail_energy",
    "values_of",
    "save_angle_csv",
    "load_angle_csv",
    "save_magnetization_csv",
    "load_magnetization_csv",
]

HALF_PI = 0.5 * math.pi


class FieldError(ValueError):
    """Field violates a precondition (boundary values, shape, branch)."""


class PlanarityError(FieldError):
    """Transverse components are not proportional across nodes."""


def theta_star(x) -> np.ndarray:
    """Notchless wall ``arctan(sinh x)``, evaluated as ``2 arctan(tanh(x/2))`` to avoid overflow."""
    return 2.0 * np.arctan(np.tanh(0.5 * np.asarray(x, dtype=float)))


def theta_star_prime(x) -> np.ndarray:
    """``theta_*' = cos(theta_*) = sech x``."""
    e = np.exp(-np.abs(np.asarray(x, dtype=float)))
    return 2.0 * e / (1.0 + e * e)


def values_of(theta) -> np.ndarray:
    """Nodal values of an :class:`AngleField` or array-like."""
    return np.asarray(getattr(theta, "values", theta), dtype=float)


def separatrix_tail(theta_boundary: float, side: int, L: float) -> float:
    """Center ``c`` of the separatrix tail ``theta_*(x - c)`` through the end value.

    ``side`` is ``+1`` for the right end ``x = L`` and ``-1`` for the left end.
    Returns ``inf`` (with the sign of ``theta_boundary``) when
    ``|theta_boundary| >= pi/2`` and no tail is needed.
    """
    if side not in (1, -1):
        raise FieldError("side must be +1 or -1")
    if abs(theta_boundary) >= HALF_PI:
        return math.copysign(math.inf, -theta_boundary)
    return side * L - math.asinh(math.tan(theta_boundary))


def tail_energy(theta_boundary: float, side: int) -> float:
    """Energy ``int (theta'^2 + cos^2 theta)/2`` of the tail beyond ``side * L``."""
    return 1.0 - side * math.sin(theta_boundary)


@dataclass(frozen=True)
class AngleField:
    """Nodal lifting angle on a grid, with attached separatrix tails."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise GridError(f"field has shape {v.shape}, grid has {self.grid.n} nodes")
        if not np.all(np.isfinite(v)):
            raise FieldError("angle field has non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def tail_centers(self) -> tuple[float, float]:
        L = self.grid.L
        return (separatrix_tail(self.values[0], -1, L), separatrix_tail(self.values[-1], 1, L))

    @property
    def in_band(self) -> bool:
        return bool(np.all(np.abs(self.values) <= HALF_PI))


def rotate(m: np.ndarray, phi: float) -> np.ndarray:
    """Apply ``R_phi`` (rotation about ``e1``) to every node."""
    m = np.asarray(m, dtype=float)
    c, s = math.cos(phi), math.sin(phi)
    out = m.copy()
    out[..., 1] = c * m[..., 1] - s * m[..., 2]
    out[..., 2] = s * m[..., 1] + c * m[..., 2]
    return out


def unlift(theta, phi: float = 0.0) -> np.ndarray:
    """``m_i = R_phi (sin theta_i, cos theta_i, 0)``, shape ``(n, 3)``."""
    t = values_of(theta)
    c = np.cos(t)
    return np.stack([np.sin(t), c * math.cos(phi), c * math.sin(phi)], axis=-1)


def lift(m: np.ndarray, tol: float = 1e-8) -> tuple[np.ndarray, float]:
    """Recover ``(theta, phi)`` from a planar magnetization.

    Planarity is tested by the best rank-one fit of the transverse rows
    ``(m2_i, m3_i)``: the ratio of the second to first singular value must
    not exceed ``tol``. The angle is unwrapped along the wire and shifted by
    a multiple of ``2 pi`` so that its left end is the representative closest
    to ``-pi/2`` (hence in ``[-pi, 0]`` for any wall starting near ``-e1``).
    """
    m = np.asarray(m, dtype=float)
    perp = m[:, 1:3]
    _, sv, vt = np.linalg.svd(perp, full_matrices=False)
    if sv[0] == 0.0:
        phi = 0.0
    else:
        if sv[1] > tol * sv[0]:
            raise PlanarityError(f"transverse rank-one residual {sv[1] / sv[0]:.3e} exceeds {tol:g}")
        u = vt[0]
        if np.sum(perp @ u) < 0.0:
            u = -u
        phi = math.atan2(u[1], u[0]) % (2.0 * math.pi)
    proj = perp[:, 0] * math.cos(phi) + perp[:, 1] * math.sin(phi)
    theta = np.unwrap(np.arctan2(m[:, 0], proj))
    theta -= 2.0 * math.pi * round((theta[0] + HALF_PI) / (2.0 * math.pi))
    return theta, phi


def planarize(m: np.ndarray, boundary_tol: float = 1e-3) -> np.ndarray:
    """Replace the transverse part by its modulus, removing any twist.

    Writing ``m = (sin t, cos t cos p, cos t sin p)`` with ``cos t >= 0``, the
    output is ``(sin t, cos t, 0)``. Discrete exchange can only drop, because
    ``m_i . m_j`` grows when the transverse angles are aligned.
    """
    m = np.asarray(m, dtype=float)
    if m[0, 0] > -1.0 + boundary_tol or m[-1, 0] < 1.0 - boundary_tol:
        raise FieldError("magnetization must run from -e1 on the left to +e1 on the right")
    t = np.arctan2(m[:, 0], np.hypot(m[:, 1], m[:, 2]))
    return unlift(t, 0.0)


def save_angle_csv(path: str | Path, x: np.ndarray, theta) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "theta"])
        for xi, ti in zip(x, values_of(theta)):
            w.writerow([f"{xi:.15g}", f"{ti:.17g}"])


def load_angle_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read the ``x`` and ``theta`` columns; further columns are ignored."""
    with open(path) as fh:
        header = [h.strip() for h in fh.readline().split(",")]
    if "x" not in header or "theta" not in header:
        raise FieldError(f"{path}: expected columns x,theta")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, header.index("x")], data[:, header.index("theta")]


def save_magnetization_csv(path: str | Path, x: np.ndarray, m: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "m1", "m2", "m3"])
        for xi, mi in zip(x, m):
            w.writerow([f"{xi:.15g}"] + [f"{v:.17g}" for v in mi])


def load_magnetization_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 4:
        raise FieldError(f"{path}: expected columns x,m1,m2,m3")
    return data[:, 0], data[:, 1:]
