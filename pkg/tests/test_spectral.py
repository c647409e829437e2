"""Linearized operators L1, L2 at the wall."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from notchwall.energy import discretize, hessian_bands
from notchwall.field import theta_star
from notchwall.grid import make_grid
from notchwall.spectral import (
    TanSingularityError,
    assemble,
    coercivity_alpha,
    eigenvalues_oracle,
    factorization_check,
    hessian_check,
    random_probes,
    spectral_audit,
)

from conftest import PROFILES, wall

NOTCHED = ["plateau", "step", "cosine", "shallow", "asymmetric"]


@pytest.mark.parametrize("name", sorted(PROFILES))
def test_audit_kernel_and_factorization(name):
    res, g = wall(name)
    rep = spectral_audit(res.theta, PROFILES[name], g)
    assert rep.kernel_residual <= 1e-10
    assert rep.factorization_gap <= 1e-10
    assert set(rep.to_dict()) >= {"alpha", "kernel_residual", "factorization_gap", "iterations"}


@pytest.mark.parametrize("name", NOTCHED)
def test_alpha_positive_on_notches(name):
    # [PAPER] coercivity of L1 on a nontrivial notch
    res, g = wall(name)
    alpha, vec, _ = coercivity_alpha(assemble("L1", res.theta, PROFILES[name], g))
    assert alpha > 1e-3
    assert vec[0] == 0.0 and vec[-1] == 0.0


def test_alpha_zero_mode_notchless():
    # [PAPER] translation zero mode cos(theta_*) = sech x on s = 1
    res, g = wall("notchless")
    op = assemble("L1", res.theta, PROFILES["notchless"], g)
    alpha, vec, _ = coercivity_alpha(op)
    assert abs(alpha) <= 1e-4
    sech = np.cos(res.theta)
    sech /= math.sqrt(float(np.sum(op.disc.mass * sech * sech)))
    assert abs(float(np.sum(op.disc.mass * vec * sech))) == pytest.approx(1.0, abs=1e-6)


def test_poschl_teller_gap():
    # [DERIVED] -u'' + (1 - 2 sech^2) u has the single bound state 0 and
    # continuous spectrum from 1; the truncated second eigenvalue sits just above 1
    g = make_grid(16.0, 0.02)
    op = assemble("L1", theta_star(g.x), PROFILES["notchless"], g)
    ev = eigenvalues_oracle(op, 2)
    assert abs(ev[0]) <= 1e-3
    assert 1.0 < ev[1] < 1.05


@pytest.mark.parametrize("name", NOTCHED)
def test_inverse_iteration_matches_tridiagonal_oracle(name):
    res, g = wall(name, 16.0, 0.02)
    op = assemble("L1", res.theta, PROFILES[name], g)
    alpha, _, _ = coercivity_alpha(op)
    assert alpha == pytest.approx(eigenvalues_oracle(op)[0], abs=1e-9)


@pytest.mark.parametrize("name", ["plateau", "cosine"])
def test_L1_equals_discrete_hessian(name):
    res, g = wall(name)
    d = discretize(PROFILES[name], g)
    op = assemble("L1", res.theta, PROFILES[name], g)
    diag, off = hessian_bands(res.theta, d)
    np.testing.assert_allclose(op.diag, diag[1:-1], rtol=1e-13, atol=1e-9)
    np.testing.assert_allclose(op.off, off[1:-1], rtol=1e-13)


@pytest.mark.parametrize("name", ["plateau", "cosine", "asymmetric"])
def test_hessian_check_relative_error(name):
    res, g = wall(name)
    probes = random_probes(g, 20, np.random.default_rng(3))
    errs = hessian_check(res.theta, PROFILES[name], g, probes)
    assert errs.max() <= 1e-4


@given(seed=st.integers(0, 2**32 - 1), c=st.floats(-2.0, 2.0), k=st.floats(0.5, 1.2))
def test_factorization_on_arbitrary_walls(seed, c, k):
    # the discrete identity <L2 u, v>_s = <l u, l v>_s holds for any in-band wall
    g = make_grid(8.0, 0.05)
    p = PROFILES["cosine"]
    t = theta_star(k * (g.x - c))
    op = assemble("L2", t, p, g)
    probes = random_probes(g, 4, np.random.default_rng(seed))
    assert factorization_check(t, op, probes) <= 1e-9
    # hence L2 is non-negative
    assert op.quadratic(probes[0], probes[0]) >= -1e-10


def test_L2_potential_second_order():
    gaps = []
    for h in (0.04, 0.02):
        res, g = wall("notchless", 16.0, h, 1e-11)
        gaps.append(spectral_audit(res.theta, PROFILES["notchless"], g, n_probes=2).potential_gap)
    assert gaps[1] <= 1e-3
    assert math.log2(gaps[0] / gaps[1]) > 1.8


def test_tan_singularity_rejected():
    g = make_grid(4.0, 0.5)
    t = theta_star(g.x)
    t[3] = math.pi / 2
    with pytest.raises(TanSingularityError):
        assemble("L2", t, PROFILES["plateau"], g)


def test_assemble_rejects_unknown_kind():
    g = make_grid(4.0, 0.5)
    with pytest.raises(ValueError):
        assemble("L3", theta_star(g.x), PROFILES["plateau"], g)
    with pytest.raises(ValueError):
        op = assemble("L1", theta_star(g.x), PROFILES["plateau"], g)
        factorization_check(theta_star(g.x), op, np.zeros((2, g.n)))


def test_apply_and_quadratic_consistent():
    res, g = wall("plateau")
    op = assemble("L1", res.theta, PROFILES["plateau"], g)
    u, v = random_probes(g, 2, np.random.default_rng(0))
    Au = op.apply(u)
    assert float(np.sum(op.disc.mass * Au * v)) == pytest.approx(op.quadratic(u, v), rel=1e-12)
    np.testing.assert_allclose(op.apply_full(u), Au, atol=1e-12)
    assert op.quadratic(u, v) == pytest.approx(op.quadratic(v, u), rel=1e-12)
