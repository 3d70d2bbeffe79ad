"""Beam-splitter superposition, screen states, interference patterns.

The state after the splitter is alpha*psi1 + i*beta*psi2 (the reflected
arm carries the phase i).  At the screen the two arms become
counter-propagating flat Gaussians and the intensity is

    I(x) = N^2 [a^2 G(x)^2 + b^2 G(-x)^2
                + 2ab G(x) G(-x) sin(2 P_x x / hbar)],

which in the flat-envelope regime reduces to a sinusoidal fringe of
period pi*hbar/P_x and visibility 2ab.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import gaussian_filter1d
from scipy.optimize import minimize_scalar

from . import grid as g
from .errors import DomainError, EmptyInputError, FlatnessWarning

__all__ = [
    "GaussianEnvelope", "SplitState", "ScreenPattern", "beam_split",
    "mirror", "screen_state", "intensity_analytic", "accumulate_screen",
    "fringe_metrics", "export_pattern_csv",
]


@dataclass(frozen=True)
class GaussianEnvelope:
    """Amplitude envelope exp(-(x - center)^2 / (4 width^2)); |G|^2 has std width."""

    center: float = 0.0
    width: float = 10.0

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("envelope width must be positive")

    def __call__(self, x):
        return np.exp(-((x - self.center) ** 2) / (4.0 * self.width**2))


@dataclass(frozen=True)
class SplitState:
    alpha: float
    beta: float
    transmitted: g.WaveFunction
    reflected: g.WaveFunction

    def physical_state(self) -> g.WaveFunction:
        """alpha*psi1 + i*beta*psi2; unit norm when the arms are disjoint."""
        amps = (self.alpha * self.transmitted.amplitudes
                + 1j * self.beta * self.reflected.amplitudes)
        return g.WaveFunction(self.transmitted.grid, amps)


@dataclass(frozen=True)
class ScreenPattern:
    grid: g.Grid1D
    intensity: np.ndarray = field(repr=False)
    visibility: float = 0.0
    period: float = math.nan
    sample_count: int = 0

    def __post_init__(self):
        if np.any(np.asarray(self.intensity) < -1e-15):
            raise ValueError("intensity must be nonnegative")

    @property
    def period_defined(self) -> bool:
        return math.isfinite(self.period)


def mirror(psi: g.WaveFunction) -> g.WaveFunction:
    """Reflect a state about the grid midpoint (exact on the periodic grid)."""
    amps = psi.amplitudes[::-1]
    return g.WaveFunction(psi.grid, np.roll(amps, 1))


def beam_split(psi: g.WaveFunction, alpha: float) -> SplitState:
    """Imbalanced splitter: transmitted arm keeps the input, reflected arm is
    its mirror image, with real amplitudes (alpha, beta), alpha^2+beta^2 = 1."""
    if not 0.0 <= alpha <= 1.0:
        raise DomainError("alpha must lie in [0, 1]")
    beta = math.sqrt(max(0.0, 1.0 - alpha * alpha))
    return SplitState(alpha, beta, psi, mirror(psi))


def _check_flatness(envelope: GaussianEnvelope, p_x: float, units: g.UnitSystem):
    if p_x > 0 and envelope.width < 10.0 * math.pi * units.hbar / p_x:
        warnings.warn(
            "envelope width below 10 fringe periods; flat-envelope "
            "approximation degraded", FlatnessWarning, stacklevel=3)


def screen_state(
    gr: g.Grid1D,
    alpha: float,
    p_x: float,
    envelope: GaussianEnvelope,
    units: g.UnitSystem = g.NATURAL_UNITS,
) -> g.WaveFunction:
    """Normalized two-arm state at the screen,
    N [alpha G(x) e^{i p x/hbar} + i beta G(-x) e^{-i p x/hbar}]."""
    if not 0.0 <= alpha <= 1.0:
        raise DomainError("alpha must lie in [0, 1]")
    _check_flatness(envelope, p_x, units)
    beta = math.sqrt(max(0.0, 1.0 - alpha * alpha))
    x = gr.x
    amps = (alpha * envelope(x) * np.exp(1j * p_x * x / units.hbar)
            + 1j * beta * envelope(-x) * np.exp(-1j * p_x * x / units.hbar))
    return g.normalize(g.WaveFunction(gr, amps))


def intensity_analytic(
    x: np.ndarray,
    alpha: float,
    p_x: float,
    envelope: GaussianEnvelope,
    units: g.UnitSystem = g.NATURAL_UNITS,
) -> np.ndarray:
    """Closed-form screen intensity, normalized to unit area over ``x``."""
    if not 0.0 <= alpha <= 1.0:
        raise DomainError("alpha must lie in [0, 1]")
    x = np.asarray(x, dtype=float)
    beta = math.sqrt(max(0.0, 1.0 - alpha * alpha))
    g1 = envelope(x)
    g2 = envelope(-x)
    intensity = (alpha**2 * g1**2 + beta**2 * g2**2
                 + 2.0 * alpha * beta * g1 * g2 * np.sin(2.0 * p_x * x / units.hbar))
    area = np.trapezoid(intensity, x)
    return intensity / area


def _refined_peak_frequency(x: np.ndarray, signal: np.ndarray, f_min: float) -> float:
    """Dominant spatial frequency of ``signal`` above ``f_min`` (cycles/length)."""
    n = len(x)
    dx = x[1] - x[0]
    padded = np.fft.rfft(signal - signal.mean(), n=8 * n)
    freqs = np.fft.rfftfreq(8 * n, dx)
    valid = freqs >= f_min
    if not np.any(valid):
        return math.nan
    power = np.abs(padded) ** 2
    power[~valid] = 0.0
    f0 = freqs[int(np.argmax(power))]
    if f0 <= 0:
        return math.nan

    def neg_power(f):
        ph = np.exp(-2j * np.pi * f * x)
        return -abs(np.sum((signal - signal.mean()) * ph)) ** 2

    df = freqs[1] - freqs[0]
    res = minimize_scalar(neg_power, bounds=(max(f_min, f0 - 4 * df), f0 + 4 * df),
                          method="bounded", options={"xatol": df * 1e-4})
    return float(res.x)


def _estimate_fringes(x: np.ndarray, intensity: np.ndarray) -> tuple[float, float]:
    """(visibility, period) of the oscillatory contrast on top of the envelope.

    Steps: take the contiguous region where the smoothed intensity is
    significant; locate the fringe frequency spectrally (at least 8
    oscillations per window, which excludes envelope-scale structure);
    divide out the envelope; fit a sinusoid over the central +-2 periods.
    """
    n = len(x)
    dx = x[1] - x[0]
    rough = gaussian_filter1d(np.asarray(intensity, dtype=float), max(3, n // 32),
                              mode="nearest")
    above = np.flatnonzero(rough > 0.1 * rough.max())
    if len(above) < 16:
        return 0.0, math.nan
    sl = slice(above[0], above[-1] + 1)
    xs = x[sl]
    ys = intensity[sl]
    window = xs[-1] - xs[0]

    f0 = _refined_peak_frequency(xs, ys, f_min=8.0 / window)
    if not math.isfinite(f0) or f0 <= 0:
        return 0.0, math.nan
    period = 1.0 / f0

    # envelope smoothing at twice the period fully suppresses the fringe
    env = gaussian_filter1d(ys, max(3.0, 2.0 * period / dx), mode="nearest")
    contrast = ys / np.maximum(env, 1e-300 * ys.max()) - 1.0

    center = float(np.sum(xs * ys) / np.sum(ys))
    sel = np.abs(xs - center) <= 2.0 * period
    if sel.sum() < 8:
        sel = np.ones_like(xs, dtype=bool)
    xc, yc = xs[sel], contrast[sel]
    omega = 2.0 * np.pi * f0
    basis = np.column_stack([np.ones_like(xc), np.sin(omega * xc), np.cos(omega * xc)])
    coef, *_ = np.linalg.lstsq(basis, yc, rcond=None)
    c0, a, b = coef
    visibility = min(1.0, math.hypot(a, b) / max(1.0 + c0, 1e-12))
    if visibility < 0.02:
        return visibility, math.nan
    return visibility, period


def accumulate_screen(samples, gr: g.Grid1D) -> ScreenPattern:
    """Histogram landing positions into a normalized density with fringe metrics."""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise EmptyInputError("no screen samples provided")
    counts, _ = np.histogram(samples, bins=gr.n_points, range=(gr.x_min, gr.x_max))
    density = counts / (samples.size * gr.dx)
    vis, period = _estimate_fringes(gr.x, density)
    return ScreenPattern(gr, density, vis, period, sample_count=int(samples.size))


def fringe_metrics(pattern: ScreenPattern) -> tuple[float, float]:
    """(visibility, period); period is NaN when no oscillation is detectable."""
    return _estimate_fringes(pattern.grid.x, np.asarray(pattern.intensity))


def export_pattern_csv(pattern: ScreenPattern, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("x,intensity\n")
        for xi, ii in zip(pattern.grid.x, pattern.intensity):
            fh.write(f"{xi:.17g},{ii:.17g}\n")
