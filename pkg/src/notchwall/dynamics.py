"""Landau-Lifshitz-Gilbert dynamics of the notched wire.

The evolution ``m_t = -m x H - alpha m x (m x H)`` is integrated with an
explicit midpoint (RK2) step followed by projection of every node onto the
sphere. The ends are pinned to ``-e1`` and ``+e1``. A step that raises the
discrete energy by more than ``1e-10`` is retried with half the time step,
up to ten times. The inner loop is compiled with numba.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.linalg import solveh_banded

from .energy import discretize, magnetization_energy
from .field import rotate, unlift
from .grid import Grid
from .profile import NotchProfile

__all__ = [
    "LLGOptions",
    "Trajectory",
    "StepFailure",
    "effective_field",
    "llg_step",
    "relax",
    "discrete_steady_state",
    "distance_mod_rotation",
    "fit_rotation",
    "mobile_frame",
    "stable_dt",
    "perturbed_wall",
]

ENERGY_SLACK = 1e-10


class StepFailure(RuntimeError):
    """Energy kept increasing after ten halvings of the time step."""


@dataclass(frozen=True)
class LLGOptions:
    """Parameters of the LLG integrator.

    ``dt=None`` selects ``0.2 h^2 s0``. Damped runs use a guarded RK2
    step. ``precession_only`` drops the damping term and the energy guard and
    switches to RK4, since RK2 amplifies purely oscillatory modes.
    """

    alpha_gilbert: float = 0.5
    dt: float | None = None
    t_end: float = 100.0
    record_every: int = 200
    tol: float = 0.0
    precession_only: bool = False

    def __post_init__(self):
        if not self.alpha_gilbert > 0.0:
            raise ValueError("alpha_gilbert must be positive")
        if self.dt is not None and not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@dataclass
class Trajectory:
    times: np.ndarray
    energies: np.ndarray
    distances: np.ndarray
    torques: np.ndarray
    final: np.ndarray = field(repr=False)
    converged: bool = False
    halvings: int = 0


def stable_dt(profile: NotchProfile, grid: Grid) -> float:
    """Documented stability bound ``0.2 h^2 s0`` of the explicit scheme."""
    return 0.2 * grid.h**2 * profile.s0


@numba.njit(cache=True)
def _field(m, s_mid, mass, h, out):
    n = m.shape[0]
    for i in range(n):
        for c in range(3):
            out[i, c] = 0.0
    for i in range(1, n - 1):
        for c in range(3):
            lap = s_mid[i] * (m[i + 1, c] - m[i, c]) - s_mid[i - 1] * (m[i, c] - m[i - 1, c])
            out[i, c] = lap / (h * mass[i])
        out[i, 1] -= m[i, 1]
        out[i, 2] -= m[i, 2]


@numba.njit(cache=True)
def _rhs(m, s_mid, mass, h, alpha, damp, H, out):
    _field(m, s_mid, mass, h, H)
    n = m.shape[0]
    for i in range(n):
        a0, a1, a2 = m[i, 0], m[i, 1], m[i, 2]
        b0, b1, b2 = H[i, 0], H[i, 1], H[i, 2]
        c0 = a1 * b2 - a2 * b1
        c1 = a2 * b0 - a0 * b2
        c2 = a0 * b1 - a1 * b0
        d0 = a1 * c2 - a2 * c1
        d1 = a2 * c0 - a0 * c2
        d2 = a0 * c1 - a1 * c0
        out[i, 0] = -c0 - damp * alpha * d0
        out[i, 1] = -c1 - damp * alpha * d1
        out[i, 2] = -c2 - damp * alpha * d2


@numba.njit(cache=True)
def _energy(m, s_mid, mass, h):
    n = m.shape[0]
    e = 0.0
    for i in range(n - 1):
        q = 0.0
        for c in range(3):
            d = m[i + 1, c] - m[i, c]
            q += d * d
        e += s_mid[i] * q / (2.0 * h)
    for i in range(n):
        e += 0.5 * mass[i] * (m[i, 1] * m[i, 1] + m[i, 2] * m[i, 2])
    return e + (1.0 + m[0, 0]) + (1.0 - m[n - 1, 0])


@numba.njit(cache=True)
def _rk2(m, s_mid, mass, h, alpha, damp, dt, k, H, mid, out):
    n = m.shape[0]
    _rhs(m, s_mid, mass, h, alpha, damp, H, k)
    for i in range(n):
        for c in range(3):
            mid[i, c] = m[i, c] + 0.5 * dt * k[i, c]
    _rhs(mid, s_mid, mass, h, alpha, damp, H, k)
    for i in range(n):
        nrm = 0.0
        for c in range(3):
            out[i, c] = m[i, c] + dt * k[i, c]
            nrm += out[i, c] * out[i, c]
        nrm = math.sqrt(nrm)
        for c in range(3):
            out[i, c] /= nrm
    for c in range(3):
        out[0, c] = m[0, c]
        out[n - 1, c] = m[n - 1, c]


@numba.njit(cache=True)
def _rk4(m, s_mid, mass, h, alpha, damp, dt, k, H, mid, acc, out):
    # classical RK4: stable on the imaginary axis, used for pure precession
    n = m.shape[0]
    for i in range(n):
        for c in range(3):
            acc[i, c] = 0.0
            mid[i, c] = m[i, c]
    for frac, wt in ((0.5, 1.0), (0.5, 2.0), (1.0, 2.0), (0.0, 1.0)):
        _rhs(mid, s_mid, mass, h, alpha, damp, H, k)
        for i in range(n):
            for c in range(3):
                acc[i, c] += wt * k[i, c]
                mid[i, c] = m[i, c] + frac * dt * k[i, c]
    for i in range(n):
        nrm = 0.0
        for c in range(3):
            out[i, c] = m[i, c] + dt * acc[i, c] / 6.0
            nrm += out[i, c] * out[i, c]
        nrm = math.sqrt(nrm)
        for c in range(3):
            out[i, c] /= nrm
    for c in range(3):
        out[0, c] = m[0, c]
        out[n - 1, c] = m[n - 1, c]


@numba.njit(cache=True)
def _step(m, s_mid, mass, h, alpha, damp, dt, k, H, mid, acc, out):
    if damp == 0.0:
        _rk4(m, s_mid, mass, h, alpha, damp, dt, k, H, mid, acc, out)
    else:
        _rk2(m, s_mid, mass, h, alpha, damp, dt, k, H, mid, out)


@numba.njit(cache=True)
def _advance(m, s_mid, mass, h, alpha, damp, dt, nsteps, guard):
    """Run ``nsteps`` guarded steps in place; returns (halvings, failed)."""
    n = m.shape[0]
    k = np.empty((n, 3))
    H = np.empty((n, 3))
    mid = np.empty((n, 3))
    out = np.empty((n, 3))
    acc = np.empty((n, 3))
    halvings = 0
    e0 = _energy(m, s_mid, mass, h)
    for _ in range(nsteps):
        step = dt
        ok = False
        for _try in range(11):
            _step(m, s_mid, mass, h, alpha, damp, step, k, H, mid, acc, out)
            e1 = _energy(out, s_mid, mass, h)
            if not guard or e1 <= e0 + 1e-10:
                ok = True
                break
            step *= 0.5
            halvings += 1
        if not ok:
            return halvings, True
        if step < dt:
            # finish the interval with the reduced step so time stays on the grid
            remaining = dt - step
            m[:, :] = out
            e0 = e1
            while remaining > 1e-15 * dt:
                sub = min(step, remaining)
                _step(m, s_mid, mass, h, alpha, damp, sub, k, H, mid, acc, out)
                e1 = _energy(out, s_mid, mass, h)
                if guard and e1 > e0 + 1e-10:
                    return halvings, True
                m[:, :] = out
                e0 = e1
                remaining -= sub
        else:
            m[:, :] = out
            e0 = e1
    return halvings, False


def _tables(profile, grid):
    d = discretize(profile, grid)
    return np.ascontiguousarray(d.s_mid), np.ascontiguousarray(d.mass), d.h


def effective_field(m: np.ndarray, profile: NotchProfile, grid: Grid) -> np.ndarray:
    """``H(m) = (1/s)(s m')' - (0, m2, m3)`` at interior nodes, zero at the pinned ends.

    Equals ``-(dE/dm_i) / (w_i h s_i)`` for the discrete energy.
    """
    s_mid, mass, h = _tables(profile, grid)
    m = np.ascontiguousarray(m, dtype=float)
    out = np.empty_like(m)
    _field(m, s_mid, mass, h, out)
    return out


def _pinned(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=float, copy=True)
    m[0] = (-1.0, 0.0, 0.0)
    m[-1] = (1.0, 0.0, 0.0)
    return m


def llg_step(m: np.ndarray, options: LLGOptions, profile: NotchProfile, grid: Grid) -> np.ndarray:
    """One guarded RK2 step; the ends are pinned to ``-e1`` and ``+e1``."""
    s_mid, mass, h = _tables(profile, grid)
    dt = options.dt or stable_dt(profile, grid)
    out = np.ascontiguousarray(_pinned(m))
    _, failed = _advance(
        out, s_mid, mass, h, options.alpha_gilbert, 0.0 if options.precession_only else 1.0,
        dt, 1, not options.precession_only,
    )
    if failed:
        raise StepFailure("energy increased after ten halvings of dt")
    return out


def fit_rotation(m: np.ndarray, theta_ref: np.ndarray, weights: np.ndarray) -> float:
    """Rotation angle aligning the transverse part of ``m`` with ``cos(theta_ref) e2``."""
    c = np.cos(theta_ref)
    return math.atan2(float(np.sum(weights * m[:, 2] * c)), float(np.sum(weights * m[:, 1] * c)))


def distance_mod_rotation(m: np.ndarray, theta_ref: np.ndarray, weights: np.ndarray) -> float:
    """``max_i |m_i - R_phi w_i|`` with ``phi`` from :func:`fit_rotation`."""
    phi = fit_rotation(m, theta_ref, weights)
    return float(np.max(np.linalg.norm(m - unlift(theta_ref, phi), axis=1)))


def mobile_frame(m: np.ndarray, theta_ref: np.ndarray, weights: np.ndarray) -> tuple[float, float]:
    """Weighted norms of the frame coordinates ``r1 = m . n``, ``r2 = m . R e3``.

    Here ``n = R (cos t, -sin t, 0)`` is the in-plane normal to the wall and
    ``R`` the fitted rotation.
    """
    phi = fit_rotation(m, theta_ref, weights)
    mr = rotate(m, -phi)
    r1 = mr[:, 0] * np.cos(theta_ref) - mr[:, 1] * np.sin(theta_ref)
    r2 = mr[:, 2]
    return math.sqrt(float(np.sum(weights * r1 * r1))), math.sqrt(float(np.sum(weights * r2 * r2)))


def discrete_steady_state(
    profile: NotchProfile, grid: Grid, theta0: np.ndarray | None = None, tol: float = 1e-12
) -> np.ndarray:
    """Angle of the planar minimizer of the discrete magnetization energy.

    Exchange is the chord form ``sum s_{i+1/2} (1 - cos(t_{i+1} - t_i)) / h``
    and the ends are pinned at ``-pi/2`` and ``pi/2``. Newton iteration with
    backtracking from ``theta0`` (by default the minimizer of the angle
    energy).
    """
    if theta0 is None:
        from .solver import minimize

        theta0 = minimize(profile, grid).theta
    d = discretize(profile, grid)
    t = np.array(theta0, dtype=float)
    t[0], t[-1] = -0.5 * math.pi, 0.5 * math.pi
    k = d.s_mid / d.h
    M = d.mass

    def E(t):
        return float(np.sum(k * (1.0 - np.cos(np.diff(t))))) + 0.5 * float(np.sum(M * np.cos(t) ** 2))

    def grad(t):
        sd = k * np.sin(np.diff(t))
        g = -M * np.cos(t) * np.sin(t)
        g[1:] += sd
        g[:-1] -= sd
        return g[1:-1]

    e = E(t)
    for _ in range(100):
        g = grad(t)
        if math.sqrt(float(np.sum(g * g / M[1:-1]))) <= tol:
            break
        cd = k * np.cos(np.diff(t))
        ab = np.zeros((2, t.size - 2))
        ab[1] = cd[:-1] + cd[1:] - M[1:-1] * np.cos(2.0 * t[1:-1])
        ab[0, 1:] = -cd[1:-1]
        p = -solveh_banded(ab, g, check_finite=False)
        step = 1.0
        while step > 1e-12:
            trial = t.copy()
            trial[1:-1] += step * p
            et = E(trial)
            if et <= e + 1e-4 * step * float(np.dot(g, p)) or (step == 1.0 and et <= e + 1e-13):
                break
            step *= 0.5
        t, e = trial, et
    return t


def perturbed_wall(
    theta_ref: np.ndarray, grid: Grid, amplitude: float = 0.1, width: float = 2.0, seed: int = 0, phi: float = 0.0
) -> np.ndarray:
    """Wall ``R_phi w`` with a localized transverse and in-plane kick, renormalized."""
    rng = np.random.default_rng(seed)
    x = grid.x
    m = unlift(theta_ref, phi)
    bump = np.exp(-0.5 * ((x - rng.uniform(-1.0, 1.0)) / width) ** 2)
    dirs = rng.normal(size=3)
    kick = np.outer(bump, dirs / np.linalg.norm(dirs)) * amplitude
    kick[:, 0] *= 0.5
    m = m + kick
    m /= np.linalg.norm(m, axis=1, keepdims=True)
    return _pinned(m)


def relax(
    m0: np.ndarray,
    options: LLGOptions,
    profile: NotchProfile,
    grid: Grid,
    theta_ref: np.ndarray | None = None,
) -> Trajectory:
    """Integrate LLG from ``m0`` up to ``t_end`` or until ``|m x H|_s <= tol``.

    Every ``record_every`` steps the energy, the distance to the steady wall
    modulo rotations and the torque norm are recorded.
    """
    if theta_ref is None:
        theta_ref = discrete_steady_state(profile, grid)
    s_mid, mass, h = _tables(profile, grid)
    dt = options.dt or stable_dt(profile, grid)
    damp = 0.0 if options.precession_only else 1.0
    m = np.ascontiguousarray(_pinned(m0))
    if abs(m0[0][0] + 1.0) > 1e-3 or abs(m0[-1][0] - 1.0) > 1e-3:
        raise ValueError("initial field must connect -e1 to +e1")
    times, energies, dists, torques = [], [], [], []
    halvings = 0
    t = 0.0
    nsteps_total = int(round(options.t_end / dt))
    done = 0

    def record():
        H = effective_field(m, profile, grid)
        tq = np.cross(m, H)
        times.append(t)
        energies.append(magnetization_energy(m, profile, grid))
        dists.append(distance_mod_rotation(m, theta_ref, mass))
        torques.append(math.sqrt(float(np.sum(mass * np.sum(tq * tq, axis=1)))))

    record()
    converged = torques[-1] <= options.tol
    while done < nsteps_total and not converged:
        chunk = min(options.record_every, nsteps_total - done)
        hv, failed = _advance(m, s_mid, mass, h, options.alpha_gilbert, damp, dt, chunk, not options.precession_only)
        halvings += hv
        if failed:
            raise StepFailure(f"energy increased after ten halvings of dt near t={t:.6g}")
        done += chunk
        t = done * dt
        record()
        converged = torques[-1] <= options.tol
    return Trajectory(
        times=np.asarray(times),
        energies=np.asarray(energies),
        distances=np.asarray(dists),
        torques=np.asarray(torques),
        final=m.copy(),
        converged=bool(converged),
        halvings=halvings,
    )
