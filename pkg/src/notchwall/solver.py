"""Computation of the pinned domain wall and checks on it.

``minimize`` descends the discrete energy. Far from a minimizer it takes
Sobolev-preconditioned gradient steps (the metric ``K + M`` of exchange
stiffness plus weighted mass) interleaved with the transform chain; once
the gradient is small it switches to damped Newton steps on the exact
tridiagonal Hessian. All steps pass an Armijo backtracking test.

``shoot`` solves the Euler-Lagrange equation as an initial value problem
from the zero of the wall and matches separatrix tails outside the notch.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, solveh_banded
from scipy.optimize import brentq

from .energy import (
    EnergyReport,
    discretize,
    energy,
    energy_derivative,
    energy_value,
    hessian_bands,
)
from .field import HALF_PI, theta_star, values_of
from .grid import Grid
from .profile import NotchProfile, change_of_variable, classify
from .transforms import DomainError, TRANSFORMS

__all__ = [
    "SolveOptions",
    "SolveResult",
    "BracketError",
    "ShotResult",
    "UniquenessReport",
    "default_init",
    "notch_center",
    "minimize",
    "shoot",
    "multi_start_uniqueness",
    "decay_check",
]


class BracketError(RuntimeError):
    """Shooting could not bracket the separatrix slope."""


@dataclass(frozen=True)
class SolveOptions:
    """Parameters of :func:`minimize`.

    ``method`` is ``"newton"`` (Sobolev descent, then damped Newton),
    ``"sobolev"`` (preconditioned descent only) or ``"gd"`` (plain weighted
    gradient descent; slow, kept as a reference).
    """

    max_iters: int = 5000
    grad_tol: float = 1e-8
    step0: float = 1.0
    shrink: float = 0.5
    armijo: float = 1e-4
    transform_every: int = 10
    newton_switch: float = 1e-2
    method: str = "newton"
    seed: int = 0

    def __post_init__(self):
        if self.grad_tol <= 0.0 or self.step0 <= 0.0 or self.armijo <= 0.0:
            raise ValueError("tolerances and step sizes must be positive")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink factor must lie in (0, 1)")
        if self.method not in ("newton", "sobolev", "gd"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.transform_every < 0:
            raise ValueError("transform_every must be >= 0")


@dataclass
class SolveResult:
    theta: np.ndarray
    report: EnergyReport
    iterations: int
    converged: bool
    monotone: bool
    odd_defect: float
    energies: np.ndarray = field(repr=False, default=None)

    def summary(self) -> dict:
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "monotone": self.monotone,
            "odd_defect": self.odd_defect,
            **self.report.to_dict(),
        }


def notch_center(profile: NotchProfile, grid: Grid) -> float:
    """Middle of the set where ``s`` attains its minimum on the grid."""
    if profile.is_notchless:
        return 0.0
    s = profile(grid.x)
    xm = grid.x[s <= s.min() + 1e-14]
    return 0.5 * float(xm[0] + xm[-1])


def default_init(profile: NotchProfile, grid: Grid) -> np.ndarray:
    return theta_star(grid.x - notch_center(profile, grid))


def _chain(profile: NotchProfile) -> list[str]:
    names = ["threshold", "reflect", "envelope"]
    if not profile.is_notchless:
        names.append("localize")
        if classify(profile).symmetric:
            names.append("symmetrize")
    return names


def _apply_chain(t, names, profile, grid):
    for name in names:
        t = TRANSFORMS[name](t, profile, grid)
    return t


def _sobolev_bands(d) -> np.ndarray:
    k = d.s_mid / d.h
    diag = d.mass.copy()
    diag[:-1] += k
    diag[1:] += k
    ab = np.zeros((2, diag.size))
    ab[0, 1:] = -k
    ab[1] = diag
    return ab


def _newton_direction(t, d, dE, mu):
    diag, off = hessian_bands(t, d)
    ab = np.zeros((2, diag.size))
    ab[0, 1:] = off
    ab[1] = diag + mu * d.mass
    return -solveh_banded(ab, dE, check_finite=False)


def _prepare_init(init, profile, grid):
    if init is None:
        return default_init(profile, grid)
    t = np.clip(values_of(init).astype(float), -HALF_PI, HALF_PI)
    try:
        TRANSFORMS["reflect"](t, profile, grid)
    except DomainError:
        return default_init(profile, grid)
    return t


def minimize(
    profile: NotchProfile,
    grid: Grid,
    init=None,
    opts: SolveOptions | None = None,
) -> SolveResult:
    """Minimize the discrete energy over in-band walls.

    Parameters
    ----------
    profile, grid
        Notch and truncation grid.
    init
        Starting field. Out-of-band values are clamped; a start without a
        sign change is replaced by the notchless wall at the notch center.
    opts
        :class:`SolveOptions`.

    Returns
    -------
    SolveResult
        ``converged`` is true iff the weighted gradient norm reached
        ``opts.grad_tol``.
    """
    opts = opts or SolveOptions()
    d = discretize(profile, grid)
    names = _chain(profile)
    sob = _sobolev_bands(d)
    t = _apply_chain(_prepare_init(init, profile, grid), names, profile, grid)
    E = energy_value(t, d)
    energies = [E]
    converged = False
    it = 0
    for it in range(1, opts.max_iters + 1):
        dE = energy_derivative(t, d)
        gnorm = math.sqrt(float(np.sum(dE * dE / d.mass)))
        if gnorm <= opts.grad_tol:
            converged = True
            it -= 1
            break
        newton = opts.method == "newton" and gnorm < opts.newton_switch
        p = None
        if newton:
            try:
                p = _newton_direction(t, d, dE, min(gnorm, 1e-3))
            except LinAlgError:
                p = None
            if p is not None and not np.dot(dE, p) < 0.0:
                p = None
        if p is None:
            newton = False
            if opts.method == "gd":
                p = -dE / d.mass
            else:
                p = -solveh_banded(sob, dE, check_finite=False)
        slope = float(np.dot(dE, p))
        step = opts.step0
        accepted = False
        while step > 1e-14:
            trial = t + step * p
            Et = energy_value(trial, d)
            if Et <= E + opts.armijo * step * slope:
                accepted = True
                break
            if newton and step == opts.step0:
                # at rounding level the energy is flat; accept a full Newton
                # step if it shrinks the gradient without raising the energy
                g2 = energy_derivative(trial, d)
                if Et <= E + 1e-12 and np.sum(g2 * g2 / d.mass) < gnorm**2:
                    accepted = True
                    break
            step *= opts.shrink
        if not accepted:
            break
        t, E = trial, Et
        if not newton and opts.transform_every and it % opts.transform_every == 0:
            t = _apply_chain(t, names, profile, grid)
            E = energy_value(t, d)
        energies.append(E)
    rep = energy(t, profile, grid)
    converged = converged or rep.grad_norm <= opts.grad_tol
    return SolveResult(
        theta=t,
        report=rep,
        iterations=it,
        converged=converged,
        monotone=bool(np.all(np.diff(t) >= -1e-10)),
        odd_defect=float(np.max(np.abs(t + t[::-1]))),
        energies=np.asarray(energies),
    )


# ----------------------------------------------------------------------------
# shooting


@dataclass
class ShotResult:
    theta: np.ndarray
    x0: float
    slope_right: float
    slope_left: float

    @property
    def slope_mismatch(self) -> float:
        return abs(self.slope_right - self.slope_left)


def _rk4_half(s_stages: np.ndarray, taus: np.ndarray, slope: float):
    """Integrate ``theta' = p/s``, ``p' = -s cos sin`` from ``theta(0) = 0`` over ``taus``.

    ``s_stages[k]`` holds the profile at the start, middle and end of step
    ``k``, sampled just inside the step so jumps at step ends are respected.
    Returns the angles and a signed classification value: ``+1`` for
    overshoot, ``-1`` for fall-back, otherwise the first integral
    ``p^2 - cos^2 theta`` just outside the notch (where ``s = 1``).
    """
    th, p = 0.0, s_stages[0, 0] * slope
    out = np.empty(taus.size)
    out[0] = 0.0
    cos, sin = math.cos, math.sin
    for k in range(1, taus.size):
        dt = taus[k] - taus[k - 1]
        s0, sm, s1 = s_stages[k - 1]
        a1, b1 = p / s0, -s0 * cos(th) * sin(th)
        u = th + 0.5 * dt * a1
        a2, b2 = (p + 0.5 * dt * b1) / sm, -sm * cos(u) * sin(u)
        u = th + 0.5 * dt * a2
        a3, b3 = (p + 0.5 * dt * b2) / sm, -sm * cos(u) * sin(u)
        u = th + dt * a3
        a4, b4 = (p + dt * b3) / s1, -s1 * cos(u) * sin(u)
        th += dt * (a1 + 2.0 * a2 + 2.0 * a3 + a4) / 6.0
        p += dt * (b1 + 2.0 * b2 + 2.0 * b3 + b4) / 6.0
        out[k] = th
        if th > HALF_PI + 1e-3:
            return out[: k + 1], 1.0
        if p <= 0.0 and th < HALF_PI - 1e-3:
            return out[: k + 1], -1.0
    return out, p * p - cos(th) ** 2


def _half_shot(profile, x0, side, nodes, bracket=(1e-6, 10.0)):
    """Shoot from ``x0`` towards ``side`` until leaving the notch.

    Returns the separatrix slope, the integration abscissae (as offsets from
    ``x0``) and the angle there.
    """
    edge = side * profile.a
    span = (edge - x0) * side
    if span <= 0.0 or profile.is_notchless:
        return 1.0, np.zeros(1), np.zeros(1)
    bp = np.concatenate([nodes, profile.breakpoints])
    offs = (bp - x0) * side
    taus = np.unique(np.concatenate([[0.0, span], offs[(offs > 0.0) & (offs < span)]]))
    lo_t, hi_t = taus[:-1], taus[1:]
    eps = 1e-12 * (hi_t - lo_t)
    stages = np.stack([lo_t + eps, 0.5 * (lo_t + hi_t), hi_t - eps], axis=1)
    s_stages = profile(x0 + side * stages)

    def klass(slope):
        return _rk4_half(s_stages, taus, slope)[1]

    lo, hi = bracket
    if not (klass(lo) < 0.0 < klass(hi)):
        raise BracketError(f"no separatrix slope in [{lo:g}, {hi:g}] from x0={x0:g}")
    slope = brentq(klass, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    return slope, taus, _rk4_half(s_stages, taus, slope)[0]


def _assemble_side(x, x0, side, taus, vals, out):
    """Fill nodes on one side of ``x0`` from integration samples and the tail."""
    xs = x0 + side * taus
    last_x, last_t = xs[-1], vals[-1]
    if side > 0:
        mask = x > x0
        inner = mask & (x <= last_x)
        outer = mask & (x > last_x)
    else:
        mask = x < x0
        inner = mask & (x >= last_x)
        outer = mask & (x < last_x)
    if np.any(inner):
        out[inner] = side * np.interp(side * (x[inner] - x0), taus, vals)
    if np.any(outer):
        c = last_x - side * math.asinh(math.tan(min(last_t, HALF_PI - 1e-16)))
        out[outer] = theta_star(x[outer] - c)


def shoot(
    profile: NotchProfile,
    grid: Grid,
    x0: float | None = None,
    slope0: float | None = None,
    bracket: tuple[float, float] = (1e-6, 10.0),
) -> ShotResult:
    """Solve ``(s theta')' + s cos(theta) sin(theta) = 0`` by shooting from the zero.

    Each half-line is integrated with RK4 on the first-order system
    ``(theta, s theta')`` with steps aligned to grid nodes and profile
    breakpoints; the initial slope is found by root finding on the first
    integral ``theta'^2 - cos^2 theta`` at the notch edge, which vanishes
    exactly on the separatrix. Outside the notch the exact tail is used.

    If ``x0`` is None the zero location is chosen so that both half-lines
    need the same slope. ``slope0`` only narrows the bracket when given.
    """
    x = grid.x
    if slope0 is not None:
        if slope0 <= 0.0:
            raise ValueError("slope0 must be positive")
        bracket = (min(bracket[0], slope0 / 2), max(bracket[1], 2 * slope0))
    if x0 is None:
        x0 = _match_zero(profile, x, bracket)
    sr, tr, vr = _half_shot(profile, x0, +1, x, bracket)
    sl, tl, vl = _half_shot(profile, x0, -1, x, bracket)
    out = np.zeros_like(x)
    _assemble_side(x, x0, +1, tr, vr, out)
    _assemble_side(x, x0, -1, tl, vl, out)
    return ShotResult(out, float(x0), sr, sl)


def _match_zero(profile, x, bracket):
    if profile.is_notchless:
        return 0.0

    def gap(x0):
        return _half_shot(profile, x0, +1, x, bracket)[0] - _half_shot(profile, x0, -1, x, bracket)[0]

    # the slope jumps where s does, so scan strictly inside the notch
    a = profile.a
    cands = np.linspace(-a, a, 41)[1:-1]
    vals = [gap(c) for c in cands]
    for (c0, v0), (c1, v1) in zip(zip(cands[:-1], vals[:-1]), zip(cands[1:], vals[1:])):
        if v0 == 0.0:
            return float(c0)
        if v0 * v1 < 0.0:
            return float(brentq(gap, c0, c1, xtol=1e-14))
    raise BracketError("slopes from the two sides never match inside the notch")


# ----------------------------------------------------------------------------
# multi-start and decay


@dataclass
class UniquenessReport:
    n_starts: int
    converged: list[bool]
    max_pairwise_distance: float
    n_distinct: int
    translation_family: bool
    multiplicity: bool
    unique: bool
    centers: list[float]
    walls: list[np.ndarray] = field(repr=False, default_factory=list)
    tol: float = 1e-4

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("walls")
        return d


def _random_start(rng, grid: Grid) -> tuple[np.ndarray, float]:
    x = grid.x
    c = rng.uniform(-grid.L + 2.0, grid.L - 2.0)
    t = theta_star((x - c) / rng.uniform(0.5, 2.0))
    for _ in range(rng.integers(1, 4)):
        amp = rng.uniform(-0.4, 0.4)
        mu = rng.uniform(-grid.L + 2.0, grid.L - 2.0)
        w = rng.uniform(0.3, 3.0)
        t = t + amp * np.exp(-0.5 * ((x - mu) / w) ** 2)
    return np.clip(t, -HALF_PI, HALF_PI), c


def _zero_of(t, x) -> float:
    k = int(np.flatnonzero(t >= 0.0)[0])
    return float(x[k - 1] + (x[k] - x[k - 1]) * (-t[k - 1]) / (t[k] - t[k - 1]))


def multi_start_uniqueness(
    profile: NotchProfile,
    grid: Grid,
    n_starts: int = 20,
    seed: int = 0,
    opts: SolveOptions | None = None,
    tol: float = 1e-4,
) -> UniquenessReport:
    """Run :func:`minimize` from randomized starts and compare the limits.

    Walls closer than ``tol`` in sup norm are clustered together. A family of
    distinct limits that are all translates of the notchless wall is flagged
    as a translation family; any other set of two or more clusters is flagged
    as multiplicity.
    """
    rng = np.random.default_rng(seed)
    walls, conv, centers = [], [], []
    for _ in range(n_starts):
        init, _ = _random_start(rng, grid)
        res = minimize(profile, grid, init, opts)
        walls.append(res.theta)
        conv.append(bool(res.converged))
        centers.append(_zero_of(res.theta, grid.x))
    dmax = 0.0
    reps: list[np.ndarray] = []
    for w in walls:
        if not any(np.max(np.abs(w - r)) <= tol for r in reps):
            reps.append(w)
    for a, b in itertools.combinations(walls, 2):
        dmax = max(dmax, float(np.max(np.abs(a - b))))
    translates = all(
        np.max(np.abs(w - theta_star(grid.x - c))) <= 1e-3 for w, c in zip(walls, centers)
    )
    family = len(reps) > 1 and translates
    multiple = len(reps) > 1 and not family
    return UniquenessReport(
        n_starts=n_starts,
        converged=conv,
        max_pairwise_distance=dmax,
        n_distinct=len(reps),
        translation_family=family,
        multiplicity=multiple,
        unique=all(conv) and len(reps) == 1,
        centers=centers,
        walls=walls,
        tol=tol,
    )


def decay_check(theta_s, profile: NotchProfile, grid: Grid) -> np.ndarray:
    """Margins ``pi exp(-y(|x_i|)) - ||theta_i| - pi/2|``."""
    t = values_of(theta_s)
    y = change_of_variable(profile, grid).y
    y_abs = np.where(grid.x >= 0.0, y, y[::-1])
    return math.pi * np.exp(-y_abs) - np.abs(np.abs(t) - HALF_PI)
