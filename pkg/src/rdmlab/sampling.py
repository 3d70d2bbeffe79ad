"""Inverse-CDF sampling from a piecewise-constant density on a uniform grid."""

from __future__ import annotations

import numpy as np

from .errors import ZeroNormError


def inverse_cdf_sample(
    x: np.ndarray, density: np.ndarray, dx: float, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw ``n`` i.i.d. positions from a density given per-cell on a uniform grid.

    The density is treated as constant on each cell [x_i, x_i + dx); within
    the selected cell the position is uniform.  Exact for the discrete
    density and deterministic given ``rng``.
    """
    density = np.asarray(density, dtype=float)
    if np.any(density < 0):
        raise ValueError("density must be nonnegative")
    mass = density.sum() * dx
    if mass <= 0:
        raise ZeroNormError("density carries no probability mass")
    cdf = np.cumsum(density) * dx / mass
    u = rng.random(n)
    idx = np.searchsorted(cdf, u, side="left")
    idx = np.clip(idx, 0, len(x) - 1)
    # uniform placement inside the chosen cell
    lo = np.concatenate(([0.0], cdf[:-1]))
    cell_mass = cdf[idx] - lo[idx]
    frac = np.where(cell_mass > 0, (u - lo[idx]) / np.where(cell_mass > 0, cell_mass, 1.0), 0.5)
    return x[idx] + frac * dx
