"""Uniform truncation grid on ``[-L, L]``."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = ["Grid", "GridError", "make_grid"]


class GridError(ValueError):
    """Invalid grid parameters or mismatched grids."""


@dataclass(frozen=True)
class Grid:
    """Nodes ``x_i = -L + i h`` with ``h = 2L/(n-1)`` and ``n`` odd.

    The middle node is exactly ``x = 0``.
    """

    L: float
    n: int

    def __post_init__(self):
        if not self.L > 0.0:
            raise GridError(f"L must be positive, got {self.L}")
        if self.n < 3 or self.n % 2 == 0:
            raise GridError(f"n must be odd and at least 3, got {self.n}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / (self.n - 1)

    @property
    def center(self) -> int:
        return (self.n - 1) // 2

    @cached_property
    def x(self) -> np.ndarray:
        i = np.arange(self.n) - self.center
        x = i * self.h
        x[0], x[-1] = -self.L, self.L
        x.setflags(write=False)
        return x

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoid weights in units of ``h`` (1 inside, 1/2 at the ends)."""
        w = np.ones(self.n)
        w[0] = w[-1] = 0.5
        w.setflags(write=False)
        return w

    def refine(self) -> "Grid":
        """Grid with half the spacing; old nodes are the even-indexed new ones."""
        return Grid(self.L, 2 * self.n - 1)


def make_grid(L: float, h: float) -> Grid:
    """Grid on ``[-L, L]`` whose spacing is ``h`` (``2L/h`` must be an even integer)."""
    m = 2.0 * L / h
    k = int(round(m))
    if abs(m - k) > 1e-9 * max(1.0, m) or k % 2:
        raise GridError(f"2L/h = {m} must be an even integer so that x = 0 is a node")
    return Grid(float(L), k + 1)
