"""Uniform 1D periodic grid, normalized wave functions, spectral observables.

The grid is the substrate every other module consumes.  Conventions:

* grid points x_j = x_min + j*dx, j = 0..n-1 (periodic, x_max excluded);
* spectral amplitudes via the unitary-normalized discrete Fourier
  transform, wavenumbers k_j = 2*pi*fftfreq(n, dx).

Natural units hbar = m = e = c = eps0 = 1 by default; a ``UnitSystem``
can be threaded through wherever constants matter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ZeroNormError

NORM_TOL = 1e-9


@dataclass(frozen=True)
class UnitSystem:
    """Physical constants; all default to 1 (natural units)."""

    hbar: float = 1.0
    mass: float = 1.0
    charge: float = 1.0
    c: float = 1.0
    eps0: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass", "charge", "c", "eps0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


NATURAL_UNITS = UnitSystem()


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        n = self.n_points
        if n < 16 or (n & (n - 1)) != 0:
            raise ValueError("n_points must be >= 16 and a power of two")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def dk(self) -> float:
        return 2.0 * np.pi / (self.x_max - self.x_min)

    @cached_property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @cached_property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, self.dx)

    @property
    def center(self) -> float:
        return 0.5 * (self.x_min + self.x_max)


@dataclass(frozen=True)
class WaveFunction:
    """Complex amplitudes on a Grid1D.  Immutable; operations return new states."""

    grid: Grid1D
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid.n_points,):
            raise ValueError("amplitude array does not match grid size")
        if not np.all(np.isfinite(amps.view(float))):
            raise ValueError("amplitudes must be finite")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        """sqrt(sum |psi_i|^2 dx)."""
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.dx))

    def conjugate(self) -> "WaveFunction":
        return WaveFunction(self.grid, np.conj(self.amplitudes))


def normalize(psi: WaveFunction) -> WaveFunction:
    n = psi.norm
    if n <= 1e-300 or n**2 * psi.grid.dx < 1e-300:
        raise ZeroNormError("cannot normalize a zero-norm wave function")
    if abs(n - 1.0) < 1e-15:
        return psi
    return WaveFunction(psi.grid, psi.amplitudes / n)


def gaussian_packet(
    grid: Grid1D,
    center: float = 0.0,
    width: float = 1.0,
    momentum: float = 0.0,
    units: UnitSystem = NATURAL_UNITS,
) -> WaveFunction:
    """Normalized Gaussian whose *density* has standard deviation ``width``."""
    if width <= 0:
        raise ValueError("width must be positive")
    x = grid.x
    amps = np.exp(-((x - center) ** 2) / (4.0 * width**2)
                  + 1j * momentum * x / units.hbar)
    return normalize(WaveFunction(grid, amps))


def probability_density(psi: WaveFunction) -> np.ndarray:
    return np.abs(psi.amplitudes) ** 2


def expectation_position(psi: WaveFunction) -> float:
    return float(np.sum(psi.grid.x * probability_density(psi)) * psi.grid.dx)


def position_variance(psi: WaveFunction) -> float:
    rho = probability_density(psi)
    mean = np.sum(psi.grid.x * rho) * psi.grid.dx
    return float(np.sum((psi.grid.x - mean) ** 2 * rho) * psi.grid.dx)


def spectral_amplitudes(psi: WaveFunction) -> np.ndarray:
    """DFT amplitudes normalized so that sum |psit_j|^2 dk = sum |psi_i|^2 dx."""
    n = psi.grid.n_points
    return np.fft.fft(psi.amplitudes) * psi.grid.dx / np.sqrt(2.0 * np.pi)


def expectation_momentum(psi: WaveFunction, units: UnitSystem = NATURAL_UNITS) -> float:
    """Spectral-space mean momentum.

    The Nyquist mode is excluded from the first moment: its wavenumber is
    sign-ambiguous (+-k_max alias), and dropping it keeps conjugation
    antisymmetry exact.  Resolved states carry no weight there.
    """
    psit = spectral_amplitudes(psi)
    weights = np.abs(psit) ** 2
    k = psi.grid.k.copy()
    k[psi.grid.n_points // 2] = 0.0
    total = np.sum(weights)
    return float(units.hbar * np.sum(k * weights) / total)
