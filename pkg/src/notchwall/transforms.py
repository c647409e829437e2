"""Energy non-increasing transforms of angle fields.

``threshold``, ``reflect_monotone`` and ``monotone_envelope`` act node by
node and never increase the discrete energy. ``symmetrize`` and ``localize``
resample the field in the variable ``y`` and are accepted only if the
discrete energy does not increase; otherwise the input is returned.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .energy import discretize, energy_value
from .field import HALF_PI, FieldError, values_of
from .grid import Grid
from .profile import NotchProfile, ProfileError, change_of_variable, classify

__all__ = [
    "DomainError",
    "TransformReport",
    "threshold",
    "reflect_monotone",
    "monotone_envelope",
    "symmetrize",
    "localize",
    "shift_in_y",
    "first_zero",
    "apply_transform",
    "apply_chain",
    "TRANSFORMS",
]

ENERGY_SLACK = 1e-12


class DomainError(FieldError):
    """Input outside the domain of a transform."""


@dataclass(frozen=True)
class TransformReport:
    name: str
    energy_before: float
    energy_after: float
    changed: bool
    rho: float

    def to_dict(self) -> dict:
        return asdict(self)


def _crossing_index(t: np.ndarray) -> int:
    """First node with ``theta >= 0``; it must have a negative predecessor."""
    idx = np.flatnonzero(t >= 0.0)
    if idx.size == 0 or idx[0] == 0:
        raise DomainError("field has no sign change from negative to non-negative on the grid")
    return int(idx[0])


def first_zero(theta, x: np.ndarray) -> float:
    """``rho[theta]``: first crossing of zero, located by linear interpolation."""
    t = values_of(theta)
    k = _crossing_index(t)
    t0, t1 = t[k - 1], t[k]
    return float(x[k - 1] + (x[k] - x[k - 1]) * (-t0) / (t1 - t0))


def threshold(theta) -> np.ndarray:
    """Clamp every node to ``[-pi/2, pi/2]``."""
    return np.clip(values_of(theta), -HALF_PI, HALF_PI)


def reflect_monotone(theta) -> np.ndarray:
    """Keep ``theta`` before its first zero and replace it by ``|theta|`` after."""
    t = values_of(theta).copy()
    k = _crossing_index(t)
    t[k:] = np.abs(t[k:])
    return t


def monotone_envelope(theta) -> np.ndarray:
    """Best non-decreasing bound of the reflected field.

    Left of the first zero each node takes the minimum over the nodes to its
    right (up to the zero), right of it the maximum over the nodes to its left.
    """
    t = reflect_monotone(theta)
    k = _crossing_index(t)
    t[:k] = np.minimum.accumulate(t[:k][::-1])[::-1]
    t[k:] = np.maximum.accumulate(t[k:])
    return t


class _YField:
    """Angle as a function of ``y``: monotone interpolant plus exact tails."""

    def __init__(self, y: np.ndarray, t: np.ndarray):
        self.y, self.t = y, t
        self._p = PchipInterpolator(y, t, extrapolate=False)

    def __call__(self, yq: np.ndarray) -> np.ndarray:
        y, t = self.y, self.t
        out = np.asarray(self._p(yq), dtype=float)
        left, right = yq < y[0], yq > y[-1]
        if np.any(left):
            out[left] = _tail(yq[left] - y[0], t[0])
        if np.any(right):
            out[right] = _tail(yq[right] - y[-1], t[-1])
        return out


def _tail(dy: np.ndarray, t_end: float) -> np.ndarray:
    """Separatrix through ``t_end`` continued by ``dy`` (unit speed in ``y``)."""
    if abs(t_end) >= HALF_PI:
        return np.full_like(dy, t_end)
    return np.arctan(np.sinh(dy + math.asinh(math.tan(t_end))))


def shift_in_y(theta, delta: float, profile: NotchProfile, grid: Grid) -> np.ndarray:
    """``theta_new(x) = vartheta(y(x) + delta)``: translate the field by ``-delta`` in ``y``."""
    t = values_of(theta)
    y = change_of_variable(profile, grid).y
    return _YField(y, t)(y + delta)


def _zero_interval(t: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Endpoints in ``y`` of the zero set of a non-decreasing field."""
    f = _YField(y, t)
    k = _crossing_index(t)
    lo = y[k] if t[k] == 0.0 else brentq(f._p, y[k - 1], y[k], xtol=1e-15)
    j = int(np.flatnonzero(t <= 0.0)[-1])
    if j == t.size - 1:
        raise DomainError("field never becomes positive on the grid")
    hi = y[j] if t[j] == 0.0 else brentq(f._p, y[j], y[j + 1], xtol=1e-15)
    return float(lo), float(hi)


def _require_monotone(t: np.ndarray, name: str) -> None:
    if np.any(np.diff(t) < -1e-12):
        raise DomainError(f"{name} needs a non-decreasing field")


def _guarded(t_old: np.ndarray, t_new: np.ndarray, profile: NotchProfile, grid: Grid) -> np.ndarray:
    d = discretize(profile, grid)
    if energy_value(t_new, d) <= energy_value(t_old, d) + ENERGY_SLACK:
        return t_new
    return t_old


def localize(theta, profile: NotchProfile, grid: Grid) -> np.ndarray:
    """Translate a monotone wall in ``y`` until its zero set meets the notch.

    The zero is moved to the nearest notch edge ``y(-a)`` or ``y(a)``. Zero
    sets within ``h^2`` of the notch image count as touching it, which makes
    the transform idempotent despite resampling.
    """
    t = values_of(theta)
    _require_monotone(t, "localize")
    cv = change_of_variable(profile, grid)
    lo, hi = _zero_interval(t, cv.y)
    tol = grid.h**2
    if lo > cv.a_plus + tol:
        delta = lo - cv.a_plus
    elif hi < cv.a_minus - tol:
        delta = hi - cv.a_minus
    else:
        return t.copy()
    return _guarded(t, _YField(cv.y, t)(cv.y + delta), profile, grid)


def _level_position(levels: np.ndarray, t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Generalized inverse ``Y(level)`` of a non-decreasing field with exact tails."""
    out = np.interp(levels, t, y)
    for end, sign in ((0, -1), (-1, 1)):
        te = t[end]
        beyond = sign * (levels - te) > 0.0
        if np.any(beyond) and abs(te) < HALF_PI:
            lv = np.clip(levels[beyond], -HALF_PI + 1e-300, HALF_PI - 1e-300)
            out[beyond] = y[end] + np.arcsinh(np.tan(lv)) - math.asinh(math.tan(te))
    return out


def symmetrize(theta, profile: NotchProfile, grid: Grid) -> np.ndarray:
    """Odd non-decreasing rearrangement of a monotone wall on a symmetric notch.

    In ``y`` the function ``pi/2 - |vartheta|`` is replaced by its symmetric
    decreasing rearrangement and the result is made odd. For a monotone field
    the set ``{|vartheta| < phi}`` is the interval ``(Y(-phi), Y(phi))``, so
    the output at ``y`` is ``sign(y) D^{-1}(2|y|)`` with ``D(phi) = Y(phi) - Y(-phi)``.
    """
    if not classify(profile).symmetric:
        raise ProfileError("symmetrize needs a symmetric unimodal profile")
    t = values_of(theta)
    _require_monotone(t, "symmetrize")
    if np.any(np.abs(t) > HALF_PI):
        raise DomainError("symmetrize needs an in-band field")
    y = change_of_variable(profile, grid).y
    r = np.abs(y)
    span = float(r.max()) + 2.0 * grid.L + 40.0
    levels = np.unique(np.concatenate([[0.0], np.abs(t), np.arctan(np.sinh(np.linspace(0.0, span, 4 * grid.n)))]))
    levels = levels[levels < HALF_PI]
    D = _level_position(levels, t, y) - _level_position(-levels, t, y)
    D = np.maximum.accumulate(D)
    phi = np.interp(2.0 * r, D, levels)
    out = np.sign(y) * phi
    return _guarded(t, out, profile, grid)


TRANSFORMS = {
    "threshold": lambda t, p, g: threshold(t),
    "reflect": lambda t, p, g: reflect_monotone(t),
    "envelope": lambda t, p, g: monotone_envelope(t),
    "localize": localize,
    "symmetrize": symmetrize,
}


def apply_transform(name: str, theta, profile: NotchProfile, grid: Grid) -> tuple[np.ndarray, TransformReport]:
    """Apply one named transform and report the energy change."""
    if name not in TRANSFORMS:
        raise ValueError(f"unknown transform {name!r}; expected one of {sorted(TRANSFORMS)}")
    d = discretize(profile, grid)
    t = values_of(theta)
    out = TRANSFORMS[name](t, profile, grid)
    try:
        rho = first_zero(out, grid.x)
    except DomainError:
        rho = math.nan
    rep = TransformReport(name, energy_value(t, d), energy_value(out, d), bool(np.any(out != t)), rho)
    return out, rep


def apply_chain(names, theta, profile: NotchProfile, grid: Grid) -> tuple[np.ndarray, list[TransformReport]]:
    reports = []
    t = values_of(theta)
    for name in names:
        t, rep = apply_transform(name, t, profile, grid)
        reports.append(rep)
    return t, reports
