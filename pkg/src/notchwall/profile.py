"""Notch cross-section profiles and the Sturm-Liouville change of variable.

A profile ``s`` is a Lipschitz (or, for ``ramp=0`` plateaus, piecewise
constant) function with ``s0 <= s <= 1`` that equals 1 outside ``[-a, a]``.
Three families are provided:

- ``plateau``: flat bottom ``s0`` on ``|x| <= a - ramp``, linear ramps to 1.
- ``cosine_dip``: ``1 - (1 - s0) (1 + cos(pi x / a)) / 2`` inside ``[-a, a]``.
- ``piecewise_linear``: arbitrary node list; the interchange format.

The change of variable ``y(x) = int_0^x du / s(u)`` is tabulated on a grid by
Gauss-Legendre quadrature split at the profile breakpoints, so that
jumps and kinks of ``s`` never fall inside a quadrature panel.
"""
from __future__ import annotations

import json
import math
from functools import lru_cache
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .grid import Grid

__all__ = [
    "ProfileError",
    "NotchProfile",
    "ProfileClass",
    "ChangeOfVariable",
    "make_profile",
    "profile_from_dict",
    "load_profile",
    "save_profile",
    "classify",
    "change_of_variable",
    "cell_integrals",
    "cell_average",
]

KINDS = ("plateau", "cosine_dip", "piecewise_linear")

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(6)


class ProfileError(ValueError):
    """Invalid profile parameters or a profile outside the requested class."""


@dataclass(frozen=True)
class NotchProfile:
    """Cross-section ``s(x)`` of a notched wire.

    Instances are immutable; build them with :func:`make_profile`.
    """

    kind: str
    s0: float
    a: float
    ramp: float = 0.0
    nodes: tuple[tuple[float, float], ...] = ()

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "piecewise_linear":
            xs = np.array([p[0] for p in self.nodes])
            ss = np.array([p[1] for p in self.nodes])
            return np.interp(x, xs, ss, left=1.0, right=1.0)
        ax = np.abs(x)
        if self.kind == "plateau":
            inner = self.a - self.ramp
            if self.ramp > 0.0:
                # tiny ramps overflow only where the plateau or s = 1 branch is taken
                with np.errstate(over="ignore"):
                    ramp = self.s0 + (1.0 - self.s0) * (ax - inner) / self.ramp
            else:
                ramp = np.full_like(ax, self.s0)
            out = np.where(ax <= inner, self.s0, ramp)
            return np.where(ax > self.a, 1.0, out)
        if self.kind == "cosine_dip":
            dip = 1.0 - 0.5 * (1.0 - self.s0) * (1.0 + np.cos(np.pi * x / self.a))
            return np.where(ax > self.a, 1.0, dip)
        raise ProfileError(f"unknown profile kind {self.kind!r}")

    @property
    def breakpoints(self) -> np.ndarray:
        """Abscissae where ``s`` or ``s'`` may be discontinuous."""
        if self.kind == "piecewise_linear":
            pts = [p[0] for p in self.nodes]
        elif self.kind == "plateau":
            pts = [-self.a, self.a, -(self.a - self.ramp), self.a - self.ramp]
        else:
            pts = [-self.a, self.a]
        return np.unique(np.asarray(pts, dtype=float))

    @property
    def lipschitz(self) -> float:
        """Lipschitz constant of the family (metadata only)."""
        if self.kind == "plateau":
            if self.s0 == 1.0:
                return 0.0
            return math.inf if self.ramp == 0.0 else (1.0 - self.s0) / self.ramp
        if self.kind == "cosine_dip":
            return 0.5 * math.pi * (1.0 - self.s0) / self.a
        slopes = [
            abs(s1 - s0) / (x1 - x0)
            for (x0, s0), (x1, s1) in zip(self.nodes[:-1], self.nodes[1:])
        ]
        return max(slopes, default=0.0)

    @property
    def is_notchless(self) -> bool:
        return self.s0 >= 1.0

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "s0": self.s0, "a": self.a}
        if self.kind == "plateau":
            d["ramp"] = self.ramp
        if self.kind == "piecewise_linear":
            d["nodes"] = [list(p) for p in self.nodes]
        return d


def make_profile(
    kind: str,
    *,
    s0: float | None = None,
    a: float | None = None,
    ramp: float = 0.0,
    nodes: Sequence[Sequence[float]] | None = None,
) -> NotchProfile:
    """Validate parameters and build a :class:`NotchProfile`.

    For ``piecewise_linear`` the depth ``s0`` and support radius ``a`` are
    derived from the nodes; if ``s0`` is also given the node values must lie
    in ``[s0, 1]``. Values above 1 are rejected rather than renormalised.
    """
    if kind not in KINDS:
        raise ProfileError(f"unknown profile kind {kind!r}; expected one of {KINDS}")
    if kind == "piecewise_linear":
        if nodes is None or len(nodes) < 2:
            raise ProfileError("piecewise_linear needs at least two nodes")
        pts = tuple((float(p[0]), float(p[1])) for p in nodes)
        xs = np.array([p[0] for p in pts])
        ss = np.array([p[1] for p in pts])
        if np.any(np.diff(xs) <= 0.0):
            raise ProfileError("piecewise_linear nodes must be strictly increasing in x")
        if np.any(ss > 1.0):
            raise ProfileError("profile values must not exceed 1 (renormalise by sup s first)")
        if np.any(ss <= 0.0):
            raise ProfileError("profile values must be positive")
        if ss[0] != 1.0 or ss[-1] != 1.0:
            raise ProfileError("piecewise_linear profile must equal 1 at its end nodes")
        smin = float(ss.min())
        if s0 is not None and smin < s0:
            raise ProfileError(f"node value {smin} below declared s0={s0}")
        radius = float(max(abs(xs[0]), abs(xs[-1])))
        return NotchProfile("piecewise_linear", smin, radius, 0.0, pts)

    if s0 is None or a is None:
        raise ProfileError(f"{kind} profile needs s0 and a")
    s0, a, ramp = float(s0), float(a), float(ramp)
    if not 0.0 < s0 <= 1.0:
        raise ProfileError(f"s0 must lie in (0, 1], got {s0}")
    if not a > 0.0:
        raise ProfileError(f"a must be positive, got {a}")
    if kind == "plateau" and not 0.0 <= ramp <= a:
        raise ProfileError(f"ramp must lie in [0, a], got {ramp}")
    return NotchProfile(kind, s0, a, ramp if kind == "plateau" else 0.0)


def profile_from_dict(d: dict) -> NotchProfile:
    d = dict(d)
    kind = d.pop("kind", None)
    if kind is None:
        raise ProfileError("profile description lacks 'kind'")
    unknown = set(d) - {"s0", "a", "ramp", "nodes"}
    if unknown:
        raise ProfileError(f"unknown profile fields: {sorted(unknown)}")
    return make_profile(kind, **d)


def load_profile(path: str | Path) -> NotchProfile:
    """Read a profile from a ``.json`` or ``.toml`` file."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".toml":
        from ._toml import loads

        data = loads(text)
        data = data.get("profile", data)
    else:
        data = json.loads(text)
    return profile_from_dict(data)


def save_profile(profile: NotchProfile, path: str | Path) -> None:
    Path(path).write_text(json.dumps(profile.to_dict(), indent=2) + "\n")


@dataclass(frozen=True)
class ProfileClass:
    general: bool
    unimodal: bool
    symmetric: bool
    tol: float


def classify(profile: NotchProfile, tol: float = 1e-10, samples: int = 4001) -> ProfileClass:
    """Detect unimodality (one valley) and evenness on a sample set.

    Unimodal means non-increasing up to the valley and non-decreasing after
    it, with the valley located anywhere in ``[-a, a]``.
    """
    x = np.union1d(np.linspace(-profile.a, profile.a, samples), profile.breakpoints)
    x = np.union1d(x, -x)
    s = profile(x)
    k = int(np.argmin(s))
    d = np.diff(s)
    unimodal = bool(np.all(d[:k] <= tol) and np.all(d[k:] >= -tol))
    even = bool(np.max(np.abs(s - profile(-x))) <= tol)
    return ProfileClass(True, unimodal, unimodal and even, tol)


def cell_integrals(
    func: Callable[[np.ndarray], np.ndarray], x: np.ndarray, breakpoints: Iterable[float] = ()
) -> np.ndarray:
    """Integrals of ``func`` over each cell ``[x_i, x_{i+1}]``.

    Cells are split at ``breakpoints`` and each piece is integrated with a
    6-point Gauss-Legendre rule.
    """
    x = np.asarray(x, dtype=float)
    bp = np.asarray([b for b in breakpoints if x[0] < b < x[-1]], dtype=float)
    edges = np.union1d(x, bp)
    lo, hi = edges[:-1], edges[1:]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    pieces = (func(pts) * _GL_WEIGHTS[None, :]).sum(axis=1) * half
    owner = np.searchsorted(x, lo, side="right") - 1
    return np.bincount(owner, weights=pieces, minlength=x.size - 1)[: x.size - 1]


def cell_average(profile: NotchProfile, grid: Grid) -> np.ndarray:
    """Cell averages of ``s``; these are the flux coefficients ``s_{i+1/2}``."""
    x = grid.x
    return cell_integrals(profile, x, profile.breakpoints) / np.diff(x)


@dataclass(frozen=True)
class ChangeOfVariable:
    """Tabulated ``x -> y(x)`` together with ``sigma(y) = s(x(y))``."""

    x: np.ndarray
    y: np.ndarray
    sigma: np.ndarray
    a_minus: float
    a_plus: float
    _profile: NotchProfile = field(repr=False, compare=False, default=None)

    def forward(self, x) -> np.ndarray:
        """``y(x)``; linear with unit slope beyond the table (where ``s = 1``)."""
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self.x, self.y)
        out = np.where(x < self.x[0], self.y[0] + (x - self.x[0]), out)
        return np.where(x > self.x[-1], self.y[-1] + (x - self.x[-1]), out)

    def inverse(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        out = np.interp(y, self.y, self.x)
        out = np.where(y < self.y[0], self.x[0] + (y - self.y[0]), out)
        return np.where(y > self.y[-1], self.x[-1] + (y - self.y[-1]), out)

    def sigma_of(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self._profile is not None:
            return self._profile(self.inverse(y))
        return np.interp(y, self.y, self.sigma, left=1.0, right=1.0)


@lru_cache(maxsize=64)
def change_of_variable(profile: NotchProfile, grid: Grid) -> ChangeOfVariable:
    """Tabulate ``y(x) = int_0^x du/s(u)`` on the grid nodes.

    Tables are cached per ``(profile, grid)`` and read-only.
    """
    if grid.L < profile.a:
        raise ProfileError(f"grid half-length {grid.L} does not cover the notch (a={profile.a})")
    x = grid.x
    inv = cell_integrals(lambda u: 1.0 / profile(u), x, profile.breakpoints)
    y = np.concatenate([[0.0], np.cumsum(inv)])
    y -= y[grid.center]
    # s = 1 beyond a, so y(±a) follows from the end values
    a_minus = float(y[0] + (-profile.a - x[0]))
    a_plus = float(y[-1] - (x[-1] - profile.a))
    sigma = profile(x)
    y.setflags(write=False)
    sigma.setflags(write=False)
    return ChangeOfVariable(x, y, sigma, a_minus, a_plus, profile)
