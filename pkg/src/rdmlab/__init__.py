"""rdmlab: numerical laboratory for single-particle interference,
random discontinuous position sampling, topological phases, and
simultaneity kinematics."""

__version__ = "0.1.0"

from . import aharonov_casher, dynamics, grid, optics, rdm, relativity  # noqa: F401
from .grid import Grid1D, UnitSystem, WaveFunction  # noqa: F401
