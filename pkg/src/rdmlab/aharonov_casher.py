"""Aharonov-Casher phase: loop integral of the moment-field coupling.

A neutral particle with out-of-plane magnetic moment mu picks up

    dphi = (1/(hbar c^2)) * closed-integral of (mu x E) . dr
         = (mu/(hbar c^2)) * closed-integral of (E_x dy - E_y dx),

over a closed planar loop.  The m*v term of the canonical momentum drops
out on a closed path.  For a line charge lambda enclosed by the loop the
Gauss-law reduction gives dphi = mu*lambda/(eps0*hbar*c^2), independent
of loop shape -- the topological signature the tests pin down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import NATURAL_UNITS, UnitSystem
from .errors import BoundaryAmbiguous, SingularPathError

__all__ = [
    "NeutronSpec", "LoopPath", "UniformChannels", "LineCharge", "Superposition",
    "canonical_momentum", "ac_phase", "two_channel_phase", "encloses",
    "rectangle_loop", "circle_loop", "two_channel_loop", "load_loop_csv",
]


@dataclass(frozen=True)
class NeutronSpec:
    """Out-of-plane magnetic moment (signed) and mass."""

    mu: float = 1.0
    m: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.m)):
            raise ValueError("mu and m must be finite")
        if self.mu == 0.0:
            raise ValueError("mu must be nonzero for phase computations")


@dataclass(frozen=True)
class LoopPath:
    """Closed polyline given by its vertices (last connects back to first)."""

    vertices: np.ndarray = field(repr=False)

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        if len(verts) >= 2 and np.allclose(verts[0], verts[-1]):
            verts = verts[:-1]
        if len(verts) < 3:
            raise ValueError("loop needs at least 3 distinct vertices")
        edges = np.roll(verts, -1, axis=0) - verts
        if np.any(np.hypot(edges[:, 0], edges[:, 1]) == 0.0):
            raise ValueError("loop has a zero-length edge")
        object.__setattr__(self, "vertices", verts)

    @property
    def signed_area(self) -> float:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        return 0.5 * float(np.sum(v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]))

    @property
    def counterclockwise(self) -> bool:
        return self.signed_area > 0

    def reversed(self) -> "LoopPath":
        return LoopPath(self.vertices[::-1])

    @property
    def scale(self) -> float:
        v = self.vertices
        return float(max(np.ptp(v[:, 0]), np.ptp(v[:, 1])))

    def is_simple(self) -> bool:
        """O(n^2) proper-crossing check; loops here are small."""
        v = self.vertices
        n = len(v)
        segs = [(v[i], v[(i + 1) % n]) for i in range(n)]

        def cross2(a, b):
            return a[0] * b[1] - a[1] * b[0]

        def crosses(p, q, r, s):
            d1 = cross2(q - p, r - p)
            d2 = cross2(q - p, s - p)
            d3 = cross2(s - r, p - r)
            d4 = cross2(s - r, q - r)
            return (d1 * d2 < 0) and (d3 * d4 < 0)

        for i in range(n):
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue  # adjacent around the wrap
                if crosses(*segs[i], *segs[j]):
                    return False
        return True


class UniformChannels:
    """Piecewise-uniform field: constant E inside horizontal bands, zero outside.

    ``channels`` is a list of (y_lo, y_hi, direction) with direction a
    2-vector; the field in a band is e_mag * normalized(direction).
    """

    def __init__(self, e_mag: float, channels):
        if e_mag < 0:
            raise ValueError("e_mag must be nonnegative")
        self.e_mag = float(e_mag)
        self.channels = []
        for y_lo, y_hi, direction in channels:
            d = np.asarray(direction, dtype=float)
            norm = np.hypot(d[0], d[1])
            if norm == 0:
                raise ValueError("channel direction must be nonzero")
            self.channels.append((float(y_lo), float(y_hi), d / norm))

    def field_at(self, points: np.ndarray, units: UnitSystem = NATURAL_UNITS
                 ) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros_like(pts)
        for y_lo, y_hi, d in self.channels:
            mask = (pts[:, 1] >= y_lo) & (pts[:, 1] <= y_hi)
            out[mask] += self.e_mag * d
        return out


class LineCharge:
    """Infinite straight charge line perpendicular to the plane.

    E(r) = lambda / (2 pi eps0 |r - r0|) * unit(r - r0).
    """

    def __init__(self, lam: float, position=(0.0, 0.0)):
        if not math.isfinite(lam):
            raise ValueError("lambda must be finite")
        self.lam = float(lam)
        self.position = np.asarray(position, dtype=float)

    def field_at(self, points: np.ndarray, units: UnitSystem = NATURAL_UNITS
                 ) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        rel = pts - self.position
        r2 = np.sum(rel**2, axis=1)
        scale = max(1.0, float(np.max(np.abs(pts))))
        if np.any(r2 < (1e-12 * scale) ** 2):
            raise SingularPathError("evaluation point coincides with the line charge")
        pref = self.lam / (2.0 * np.pi * units.eps0)
        return pref * rel / r2[:, None]

    def singular_points(self):
        return [self.position]


class Superposition:
    def __init__(self, fields):
        self.fields = list(fields)

    def field_at(self, points, units: UnitSystem = NATURAL_UNITS) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros_like(pts)
        for f in self.fields:
            out += f.field_at(pts, units)
        return out

    def singular_points(self):
        pts = []
        for f in self.fields:
            pts.extend(getattr(f, "singular_points", lambda: [])())
        return pts


def canonical_momentum(v, e_field, spec: NeutronSpec,
                       units: UnitSystem = NATURAL_UNITS) -> np.ndarray:
    """p = m v + (mu x E)/c^2 with mu = mu * z-hat; in-plane result."""
    v = np.asarray(v, dtype=float)
    e = np.asarray(e_field, dtype=float)
    coupling = spec.mu * np.array([-e[1], e[0]]) / units.c**2
    return spec.m * v + coupling


def ac_phase(loop: LoopPath, fld, spec: NeutronSpec,
             units: UnitSystem = NATURAL_UNITS, quadrature: int = 16) -> float:
    """Loop integral (mu/(hbar c^2)) * closed-integral (E_x dy - E_y dx),
    by Gauss-Legendre quadrature along each edge."""
    nodes, weights = np.polynomial.legendre.leggauss(quadrature)
    s = 0.5 * (nodes + 1.0)   # map to [0, 1]
    w = 0.5 * weights
    verts = loop.vertices
    nxt = np.roll(verts, -1, axis=0)
    for src in getattr(fld, "singular_points", lambda: [])():
        p = np.asarray(src, dtype=float)
        d = nxt - verts
        rel = p[None, :] - verts
        t = np.clip(np.einsum("ij,ij->i", rel, d)
                    / np.einsum("ij,ij->i", d, d), 0.0, 1.0)
        closest = verts + t[:, None] * d
        dist = np.hypot(*(p[None, :] - closest).T)
        if np.any(dist < 1e-9 * max(loop.scale, 1.0)):
            raise SingularPathError("field source lies on the integration path")
    total = 0.0
    for v0, v1 in zip(verts, nxt):
        delta = v1 - v0
        pts = v0[None, :] + s[:, None] * delta[None, :]
        e = fld.field_at(pts, units)
        integrand = e[:, 0] * delta[1] - e[:, 1] * delta[0]
        total += float(np.sum(w * integrand))
    return spec.mu * total / (units.hbar * units.c**2)


def two_channel_phase(e_mag: float, channel_length: float, spec: NeutronSpec,
                      units: UnitSystem = NATURAL_UNITS) -> float:
    """Closed form for two opposite uniform channels of length L:
    dphi = 2 mu E L / (hbar c^2)."""
    if e_mag < 0 or channel_length <= 0:
        raise ValueError("e_mag must be >= 0 and channel_length > 0")
    return 2.0 * spec.mu * e_mag * channel_length / (units.hbar * units.c**2)


def two_channel_geometry(e_mag: float, channel_length: float, half_gap: float = 1.0,
                         band_width: float = 0.5):
    """Explicit loop + field realizing the two-channel closed form.

    Lower channel field points -y, upper channel field points +y, so the
    moment-field coupling is parallel to the direction of travel in both
    channels.  Traversal is counterclockwise.
    """
    h, w, length = half_gap, band_width, channel_length
    fld = UniformChannels(e_mag, [(-h - w, -h + w, (0.0, -1.0)),
                                  (h - w, h + w, (0.0, 1.0))])
    loop = LoopPath(np.array([(0.0, -h), (length, -h), (length, h), (0.0, h)]))
    return loop, fld


def two_channel_loop(e_mag: float, channel_length: float, spec: NeutronSpec,
                     units: UnitSystem = NATURAL_UNITS, quadrature: int = 16) -> float:
    """Generic integrator applied to the explicit two-channel geometry."""
    loop, fld = two_channel_geometry(e_mag, channel_length)
    return ac_phase(loop, fld, spec, units, quadrature)


def rectangle_loop(x0: float, y0: float, x1: float, y1: float) -> LoopPath:
    return LoopPath(np.array([(x0, y0), (x1, y0), (x1, y1), (x0, y1)]))


def circle_loop(center=(0.0, 0.0), radius: float = 1.0, n_vertices: int = 256
                ) -> LoopPath:
    theta = 2.0 * np.pi * np.arange(n_vertices) / n_vertices
    cx, cy = center
    return LoopPath(np.column_stack([cx + radius * np.cos(theta),
                                     cy + radius * np.sin(theta)]))


def encloses(loop: LoopPath, point, tol: float = 1e-9) -> bool:
    """Winding-number containment; points on the boundary raise."""
    p = np.asarray(point, dtype=float)
    verts = loop.vertices
    nxt = np.roll(verts, -1, axis=0)
    scale = max(loop.scale, 1.0)

    # boundary proximity check against every edge
    d = nxt - verts
    rel = p[None, :] - verts
    t = np.clip(np.einsum("ij,ij->i", rel, d) / np.einsum("ij,ij->i", d, d), 0.0, 1.0)
    closest = verts + t[:, None] * d
    dist = np.hypot(*(p[None, :] - closest).T)
    if np.any(dist < tol * scale):
        raise BoundaryAmbiguous("point lies on the loop boundary within tolerance")

    a = verts - p
    b = nxt - p
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    angles = np.arctan2(cross, np.einsum("ij,ij->i", a, b))
    winding = np.sum(angles) / (2.0 * np.pi)
    return bool(abs(winding) > 0.5)


def load_loop_csv(path) -> LoopPath:
    """Loop vertices from a CSV with header x,y."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    return LoopPath(np.column_stack([np.atleast_1d(data["x"]),
                                     np.atleast_1d(data["y"])]))
