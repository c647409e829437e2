"""Energy non-increasing transforms."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from notchwall.energy import discretize, energy_value
from notchwall.field import theta_star
from notchwall.grid import make_grid
from notchwall.profile import ProfileError, change_of_variable
from notchwall.transforms import (
    TRANSFORMS,
    DomainError,
    apply_chain,
    apply_transform,
    first_zero,
    localize,
    monotone_envelope,
    reflect_monotone,
    shift_in_y,
    symmetrize,
    threshold,
)

from conftest import PROFILES, SYMMETRIC

GRID = make_grid(8.0, 0.05)
HALF_PI = math.pi / 2


def random_wall(seed: int, grid=GRID, noise: float = 0.4) -> np.ndarray:
    """In-band field starting negative, built from a scaled wall and bumps."""
    rng = np.random.default_rng(seed)
    x = grid.x
    t = theta_star((x - rng.uniform(-4.0, 4.0)) / rng.uniform(0.3, 2.5))
    for _ in range(rng.integers(1, 5)):
        t = t + rng.uniform(-noise, noise) * np.exp(-0.5 * ((x - rng.uniform(-6, 6)) / rng.uniform(0.2, 2.0)) ** 2)
    t = np.clip(t, -HALF_PI, HALF_PI)
    t[0] = min(t[0], -0.1)
    return t


seeds = st.integers(0, 2**32 - 1)


def test_threshold_trivial():
    np.testing.assert_array_equal(threshold([-3.0, 0.2, 2.0]), [-HALF_PI, 0.2, HALF_PI])


def test_reflect_trivial():
    np.testing.assert_array_equal(reflect_monotone([-1.0, 0.5, -0.2, 0.3]), [-1.0, 0.5, 0.2, 0.3])


def test_envelope_trivial():
    np.testing.assert_array_equal(
        monotone_envelope([-1.0, -1.2, -0.3, 0.5, -0.2, 0.3, 0.9]),
        [-1.2, -1.2, -0.3, 0.5, 0.5, 0.5, 0.9],
    )


def test_first_zero_trivial():
    assert first_zero([-1.0, 1.0, 2.0], np.array([0.0, 1.0, 2.0])) == 0.5
    with pytest.raises(DomainError):
        first_zero([0.1, 0.2], np.array([0.0, 1.0]))


@pytest.mark.parametrize("name", ["plateau", "step", "cosine", "asymmetric"])
@given(seed=seeds)
def test_pointwise_transforms_never_raise_energy(name, seed):
    d = discretize(PROFILES[name], GRID)
    t = random_wall(seed)
    t[5] = 2.0  # out of band, threshold must fix it
    prev = energy_value(t, d)
    for fn in (threshold, reflect_monotone, monotone_envelope):
        t = fn(t)
        e = energy_value(t, d)
        assert e <= prev + 1e-12
        prev = e
    assert np.all(np.diff(t) >= 0.0)


@given(seed=seeds)
def test_pointwise_transforms_idempotent(seed):
    t = random_wall(seed)
    for fn in (threshold, reflect_monotone, monotone_envelope):
        once = fn(t)
        np.testing.assert_array_equal(fn(once), once)


@given(seed=seeds, c=st.floats(-5.0, 5.0))
def test_signum_multiplication_preserves_norms(seed, c):
    # discrete L2 and H1 seminorm of u and sgn(x - x0) u agree when u(x0) = 0
    rng = np.random.default_rng(seed)
    x = GRID.x
    k = int(np.argmin(np.abs(x - c)))
    u = np.cumsum(rng.normal(size=GRID.n))
    u -= u[k]
    v = np.sign(x - x[k]) * u
    assert np.sum(v * v) == pytest.approx(np.sum(u * u), rel=1e-14)
    assert np.sum(np.diff(np.abs(u)) ** 2) <= np.sum(np.diff(u) ** 2) * (1 + 1e-14)
    assert np.sum(np.diff(v) ** 2) <= np.sum(np.diff(u) ** 2) * (1 + 1e-14) + np.sum(np.diff(np.abs(u)) ** 2)


@pytest.mark.parametrize("name", ["plateau", "step", "cosine", "asymmetric"])
@given(seed=seeds)
def test_localize_moves_zero_into_notch(name, seed):
    p = PROFILES[name]
    d = discretize(p, GRID)
    t = monotone_envelope(random_wall(seed))
    out = localize(t, p, GRID)
    assert energy_value(out, d) <= energy_value(t, d) + 1e-12
    np.testing.assert_allclose(localize(out, p, GRID), out, atol=1e-12, rtol=0)
    if np.any(out != t):
        assert -p.a - GRID.h <= first_zero(out, GRID.x) <= p.a + GRID.h


@pytest.mark.parametrize("name", SYMMETRIC)
@given(seed=seeds)
def test_symmetrize_odd_monotone_lower_energy(name, seed):
    p = PROFILES[name]
    d = discretize(p, GRID)
    t = monotone_envelope(random_wall(seed))
    out = symmetrize(t, p, GRID)
    assert energy_value(out, d) <= energy_value(t, d) + 1e-12
    np.testing.assert_allclose(symmetrize(out, p, GRID), out, atol=1e-12, rtol=0)
    if np.any(out != t):
        assert np.max(np.abs(out + out[::-1])) <= 1e-12
        assert np.all(np.diff(out) >= -1e-14)


def test_symmetrize_keeps_odd_wall():
    p = PROFILES["cosine"]
    t = theta_star(GRID.x * 1.3)
    np.testing.assert_allclose(symmetrize(t, p, GRID), t, atol=1e-12)


def test_symmetrize_centers_translated_wall():
    # a notchless-profile translate becomes the centered wall with lower energy
    p = PROFILES["plateau"]
    t = theta_star(GRID.x - 2.0)
    out = symmetrize(t, p, GRID)
    assert energy_value(out, discretize(p, GRID)) < energy_value(t, discretize(p, GRID))
    assert first_zero(out, GRID.x) == pytest.approx(0.0, abs=1e-12)


def test_symmetrize_rejects_bad_input():
    with pytest.raises(ProfileError):
        symmetrize(theta_star(GRID.x), PROFILES["asymmetric"], GRID)
    with pytest.raises(DomainError):
        symmetrize(np.sin(GRID.x), PROFILES["plateau"], GRID)
    with pytest.raises(DomainError):
        localize(np.sin(GRID.x), PROFILES["plateau"], GRID)


def test_shift_in_y_translates_zero():
    p = PROFILES["notchless"]
    t = theta_star(GRID.x)
    out = shift_in_y(t, 1.0, p, GRID)
    np.testing.assert_allclose(out, theta_star(GRID.x + 1.0), atol=1e-4)
    y = change_of_variable(p, GRID).y
    assert first_zero(out, y) == pytest.approx(-1.0, abs=1e-3)


def test_apply_chain_reports():
    p = PROFILES["plateau"]
    t = theta_star(GRID.x - 3.0) + 0.2 * np.exp(-GRID.x**2)
    out, reps = apply_chain(list(TRANSFORMS), t, p, GRID)
    assert [r.name for r in reps] == list(TRANSFORMS)
    for r in reps:
        assert r.energy_after <= r.energy_before + 1e-12
    assert reps[-1].rho == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        apply_transform("sort", t, p, GRID)
