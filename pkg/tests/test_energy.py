"""Discrete energy, gradient, Hessian and first-integral defect."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from notchwall.energy import (
    discretize,
    energy,
    energy_derivative,
    energy_value,
    gradient,
    hessian_bands,
    magnetization_energy,
    pointwise_defect,
    weighted_inner,
    weighted_norm,
)
from notchwall.field import theta_star, unlift
from notchwall.grid import GridError, make_grid

from conftest import PROFILES


def _quad_wall_energy(p, c):
    # E_s(theta_*(. - c)) = int sech^2(x - c) s(x) dx
    f = lambda x: float(p(x)) / math.cosh(x - c) ** 2
    pts = sorted(set(p.breakpoints.tolist()))
    inner = quad(f, -40.0, 40.0, points=pts or None, limit=400, epsabs=1e-14)[0]
    return inner + 2.0 * (1.0 - math.tanh(40.0 - abs(c)))


@pytest.mark.parametrize("name", sorted(PROFILES))
@pytest.mark.parametrize("c", [0.0, 0.37, -1.2])
def test_translated_wall_energy_matches_quad(name, c):
    # [DERIVED] independent quadrature oracle; the scheme is second order
    p = PROFILES[name]
    g = make_grid(16.0, 0.01)
    E = energy_value(theta_star(g.x - c), discretize(p, g))
    assert E == pytest.approx(_quad_wall_energy(p, c), abs=2e-5)


def test_notchless_wall_energy_second_order():
    # [PAPER] E_1(theta_*) = 2; error quarters when h halves
    p = PROFILES["notchless"]
    errs = []
    for h in (0.04, 0.02, 0.01):
        g = make_grid(16.0, h)
        errs.append(abs(energy_value(theta_star(g.x), discretize(p, g)) - 2.0))
    assert errs[-1] <= 3e-5
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 1.9)


def test_energy_report_parts_sum():
    p = PROFILES["plateau"]
    g = make_grid(8.0, 0.05)
    r = energy(theta_star(g.x), p, g)
    assert r.total == pytest.approx(r.exchange + r.anisotropy + r.tail_energy, abs=1e-15)
    assert set(r.to_dict()) == {
        "exchange",
        "anisotropy",
        "tail_energy",
        "total",
        "grad_norm",
        "defect_min",
        "defect_max",
    }


def test_tails_make_energy_independent_of_L():
    p = PROFILES["plateau"]
    E = [energy_value(theta_star(g.x), discretize(p, g)) for g in (make_grid(6.0, 0.01), make_grid(16.0, 0.01))]
    assert E[0] == pytest.approx(E[1], abs=1e-6)


def test_energy_rejects_wrong_shape():
    g = make_grid(2.0, 0.5)
    with pytest.raises(GridError):
        energy(np.zeros(3), PROFILES["plateau"], g)


@st.composite
def fields(draw, n=81):
    seed = draw(st.integers(0, 2**31))
    rng = np.random.default_rng(seed)
    g = make_grid(4.0, 0.1)
    t = theta_star(g.x * rng.uniform(0.5, 2.0)) + 0.3 * rng.normal(size=g.n)
    return np.clip(t, -math.pi / 2, math.pi / 2), g


@given(fields(), st.sampled_from(sorted(PROFILES)))
def test_gradient_matches_finite_differences(fg, name):
    # [DERIVED] central differences of the energy along random directions
    t, g = fg
    p = PROFILES[name]
    d = discretize(p, g)
    rng = np.random.default_rng(0)
    v = rng.normal(size=g.n)
    eps = 1e-6
    fd = (energy_value(t + eps * v, d) - energy_value(t - eps * v, d)) / (2 * eps)
    gv = weighted_inner(gradient(t, p, g), v, p, g)
    assert gv == pytest.approx(fd, rel=1e-6, abs=1e-8)


@given(fields(), st.sampled_from(sorted(PROFILES)))
def test_hessian_matches_derivative_differences(fg, name):
    t, g = fg
    d = discretize(PROFILES[name], g)
    diag, off = hessian_bands(t, d)
    v = np.random.default_rng(1).normal(size=g.n)
    Hv = diag * v
    Hv[:-1] += off * v[1:]
    Hv[1:] += off * v[:-1]
    eps = 1e-6
    fd = (energy_derivative(t + eps * v, d) - energy_derivative(t - eps * v, d)) / (2 * eps)
    np.testing.assert_allclose(Hv, fd, rtol=1e-5, atol=1e-7)


def test_gradient_sign_on_uniform_field():
    # at constant theta only the anisotropy and tails act; interior g = -cos sin
    p = PROFILES["notchless"]
    g = make_grid(2.0, 0.5)
    t = np.full(g.n, 0.4)
    np.testing.assert_allclose(gradient(t, p, g)[1:-1], -math.cos(0.4) * math.sin(0.4), atol=1e-14)


@given(fields())
def test_symmetric_profile_reflection_invariance(fg):
    # E(-theta(-x)) = E(theta) when s is even
    t, g = fg
    d = discretize(PROFILES["cosine"], g)
    assert energy_value(-t[::-1], d) == pytest.approx(energy_value(t, d), abs=1e-12)


@given(fields(), st.floats(-3.0, 3.0))
def test_magnetization_energy_of_planar_field(fg, phi):
    # chord exchange 2(1 - cos dt) never exceeds the angle exchange dt^2
    t, g = fg
    p = PROFILES["plateau"]
    Em = magnetization_energy(unlift(t, phi), p, g)
    assert Em <= energy_value(t, discretize(p, g)) + 1e-12


def test_weighted_norm_of_constant_is_mass():
    p = PROFILES["step"]
    g = make_grid(4.0, 0.05)
    # int_{-4}^{4} s = 8 - 2 * 0.5
    assert weighted_norm(np.ones(g.n), p, g) ** 2 == pytest.approx(7.0, abs=1e-12)


def test_defect_vanishes_on_separatrix():
    p = PROFILES["notchless"]
    g = make_grid(16.0, 0.005)
    dfc = pointwise_defect(theta_star(g.x), p, g)
    assert np.max(np.abs(dfc)) <= 1e-5
