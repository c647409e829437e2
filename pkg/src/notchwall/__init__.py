"""Domain walls in notched ferromagnetic nanowires.

The wall is the minimizer of ``(1/2) int (theta'^2 + cos^2 theta) s dx``
over angles running from ``-pi/2`` to ``pi/2``, where ``0 < s <= 1`` is the
cross-section profile of the wire.
"""
from .dynamics import LLGOptions, Trajectory, relax
from .energy import EnergyReport, energy, gradient
from .field import AngleField, lift, theta_star, unlift
from .grid import Grid, make_grid
from .paths import PathSample, composite_path, cos_convex_path
from .profile import NotchProfile, change_of_variable, classify, load_profile, make_profile
from .solver import SolveOptions, SolveResult, minimize, multi_start_uniqueness, shoot
from .spectral import SpectralReport, assemble, spectral_audit
from .transforms import apply_chain, apply_transform

__version__ = "0.1.0"

__all__ = [
    "AngleField",
    "EnergyReport",
    "Grid",
    "LLGOptions",
    "NotchProfile",
    "PathSample",
    "SolveOptions",
    "SolveResult",
    "SpectralReport",
    "Trajectory",
    "apply_chain",
    "apply_transform",
    "assemble",
    "change_of_variable",
    "classify",
    "composite_path",
    "cos_convex_path",
    "energy",
    "gradient",
    "lift",
    "load_profile",
    "make_grid",
    "make_profile",
    "minimize",
    "multi_start_uniqueness",
    "relax",
    "shoot",
    "spectral_audit",
    "theta_star",
    "unlift",
]
