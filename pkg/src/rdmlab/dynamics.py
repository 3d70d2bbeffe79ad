"""Split-step spectral time evolution and mean-momentum bookkeeping.

The Hamiltonian is H = P^2/2m + V(x, t) with V either zero (free flight)
or linear, V(x) = -F*x with a spatially uniform force F active inside a
time window (an idealized capacitor traversal reduced to the transverse
coordinate).  Strang splitting (half kinetic, full potential, half
kinetic) keeps the map unitary up to rounding and O(dt^2) accurate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import grid as g
from .errors import BoundaryLeakError

EDGE_GUARD_POINTS = 5
EDGE_GUARD_MASS = 1e-8


@dataclass(frozen=True)
class Segment:
    """Time window [t_on, t_off) with a uniform force (0 means free flight)."""

    t_on: float
    t_off: float
    force: float = 0.0

    def __post_init__(self):
        if not self.t_on < self.t_off:
            raise ValueError("segment requires t_on < t_off")
        if not np.isfinite(self.force):
            raise ValueError("segment force must be finite")

    @property
    def duration(self) -> float:
        return self.t_off - self.t_on


@dataclass(frozen=True)
class PotentialSpec:
    segments: tuple[Segment, ...] = ()

    def __post_init__(self):
        segs = tuple(sorted(self.segments, key=lambda s: s.t_on))
        for a, b in zip(segs, segs[1:]):
            if b.t_on < a.t_off:
                raise ValueError("segments overlap in time")
        object.__setattr__(self, "segments", segs)

    def force_at(self, t: float) -> float:
        for s in self.segments:
            if s.t_on <= t < s.t_off:
                return s.force
        return 0.0

    @property
    def max_force(self) -> float:
        return max((abs(s.force) for s in self.segments), default=0.0)


FREE = PotentialSpec()


@dataclass(frozen=True)
class EvolutionResult:
    final: g.WaveFunction
    trace: np.ndarray = field(repr=False)  # columns: t, <x>, <p_x>, norm

    @property
    def times(self) -> np.ndarray:
        return self.trace[:, 0]

    @property
    def x_mean(self) -> np.ndarray:
        return self.trace[:, 1]

    @property
    def p_mean(self) -> np.ndarray:
        return self.trace[:, 2]

    @property
    def norms(self) -> np.ndarray:
        return self.trace[:, 3]


def default_dt(
    gr: g.Grid1D, pot: PotentialSpec, units: g.UnitSystem, max_phase: float = 0.1
) -> float:
    """Largest step keeping the per-step phase advance below ``max_phase`` rad."""
    k_max = np.max(np.abs(gr.k))
    e_kin = units.hbar**2 * k_max**2 / (2.0 * units.mass)
    x_extent = max(abs(gr.x_min), abs(gr.x_max))
    e_pot = pot.max_force * x_extent
    e_scale = max(e_kin, e_pot, 1e-300)
    return max_phase * units.hbar / e_scale


def _check_edges(amps: np.ndarray, dx: float, t: float) -> None:
    edge = np.concatenate((amps[:EDGE_GUARD_POINTS], amps[-EDGE_GUARD_POINTS:]))
    mass = np.sum(np.abs(edge) ** 2) * dx
    if mass >= EDGE_GUARD_MASS:
        raise BoundaryLeakError(
            f"probability mass {mass:.3e} within {EDGE_GUARD_POINTS} grid points "
            f"of the domain edge at t = {t:.6g}"
        )


def evolve(
    psi0: g.WaveFunction,
    pot: PotentialSpec,
    t_final: float,
    dt: float | None = None,
    units: g.UnitSystem = g.NATURAL_UNITS,
    trace_stride: int = 10,
) -> EvolutionResult:
    """Propagate ``psi0`` from t = 0 to ``t_final``.

    The trace records (t, <x>, <p_x>, norm) every ``trace_stride`` steps
    plus the endpoints.  Raises BoundaryLeakError if probability mass
    reaches the edge of the periodic domain.
    """
    if t_final <= 0:
        raise ValueError("t_final must be positive")
    if dt is None:
        dt = default_dt(psi0.grid, pot, units)
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_steps = max(1, int(np.ceil(t_final / dt - 1e-12)))
    dt = t_final / n_steps

    gr = psi0.grid
    x, k, dx = gr.x, gr.k, gr.dx
    half_kinetic = np.exp(-0.5j * units.hbar * k**2 * dt / (2.0 * units.mass))

    amps = np.array(psi0.amplitudes, dtype=complex)
    trace = []

    def record(t, a):
        psi = g.WaveFunction(gr, a)
        trace.append((t, g.expectation_position(psi),
                      g.expectation_momentum(psi, units), psi.norm))

    record(0.0, amps)
    for step in range(n_steps):
        t_mid = (step + 0.5) * dt
        force = pot.force_at(t_mid)
        amps = np.fft.ifft(half_kinetic * np.fft.fft(amps))
        if force != 0.0:
            # V(x) = -F x  ->  phase factor exp(+i F x dt / hbar)
            amps = amps * np.exp(1j * force * x * dt / units.hbar)
        amps = np.fft.ifft(half_kinetic * np.fft.fft(amps))
        t = (step + 1) * dt
        if (step + 1) % trace_stride == 0 or step == n_steps - 1:
            _check_edges(amps, dx, t)
            record(t, amps)

    return EvolutionResult(g.WaveFunction(gr, amps), np.array(trace))


def ehrenfest_check(result: EvolutionResult, pot: PotentialSpec) -> float:
    """Max |measured momentum change - F*dt| over the force segments.

    With no force segments, returns the total |Delta <p_x>| (which should
    vanish for free flight).
    """
    t = result.times
    if len(t) < 2:
        raise ValueError("trace needs at least two points")
    p = result.p_mean
    forced = [s for s in pot.segments if s.force != 0.0]
    if not forced:
        return float(abs(p[-1] - p[0]))
    residual = 0.0
    for s in forced:
        t0 = max(s.t_on, t[0])
        t1 = min(s.t_off, t[-1])
        measured = np.interp(t1, t, p) - np.interp(t0, t, p)
        residual = max(residual, abs(measured - s.force * (t1 - t0)))
    return float(residual)


def charge_inference_scan(
    e_values,
    dt_values,
    psi0: g.WaveFunction | None = None,
    units: g.UnitSystem = g.NATURAL_UNITS,
    grid_spec: g.Grid1D | None = None,
    dt: float | None = None,
) -> list[tuple[float, float, float, float]]:
    """Momentum kick per (field, duration) pair; the ratio column recovers e.

    For each (E, dt) the packet is pushed by the force e*E for a time dt
    and the ratio Delta<p_x> / (E dt) is reported.  For an ideal run every
    ratio equals the elementary charge, independent of the packet's
    original amplitude.
    """
    if psi0 is None:
        gr = grid_spec or g.Grid1D(-40.0, 40.0, 1024)
        psi0 = g.gaussian_packet(gr, width=2.0, units=units)
    rows = []
    for e_field in e_values:
        for window in dt_values:
            if e_field < 0 or window <= 0:
                raise ValueError("field and duration values must be positive")
            pot = PotentialSpec((Segment(0.0, window, units.charge * e_field),))
            res = evolve(psi0, pot, window, dt=dt, units=units)
            dp = res.p_mean[-1] - res.p_mean[0]
            ratio = dp / (e_field * window) if e_field > 0 else 0.0
            rows.append((float(e_field), float(window), float(dp), float(ratio)))
    return rows
