"""Shared profiles, grids and cached walls."""
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings

from notchwall import make_grid, make_profile, minimize
from notchwall.solver import SolveOptions

settings.register_profile(
    "default",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

PROFILES = {
    "notchless": make_profile("plateau", s0=1.0, a=1.0),
    "plateau": make_profile("plateau", s0=0.5, a=1.0, ramp=0.25),
    "step": make_profile("plateau", s0=0.5, a=1.0, ramp=0.0),
    "cosine": make_profile("cosine_dip", s0=0.3, a=2.0),
    "shallow": make_profile("plateau", s0=0.8, a=0.5, ramp=0.1),
    "asymmetric": make_profile("piecewise_linear", nodes=[(-1.5, 1.0), (-0.5, 0.4), (0.0, 0.4), (1.0, 1.0)]),
}

SYMMETRIC = ("plateau", "step", "cosine")


@lru_cache(maxsize=None)
def wall(name: str, L: float = 16.0, h: float = 0.01, grad_tol: float = 1e-8):
    grid = make_grid(L, h)
    return minimize(PROFILES[name], grid, opts=SolveOptions(grad_tol=grad_tol)), grid


@pytest.fixture(params=sorted(PROFILES))
def profile_name(request):
    return request.param


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, passed: bool, detail: str) -> None:
    """Store one acceptance verdict for the terminal summary."""
    ACCEPTANCE[criterion] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
