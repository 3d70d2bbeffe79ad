"""1+1 dimensional Minkowski kinematics for the moving-detector argument.

Events live in the lab frame as (t, x).  The squared interval convention
is s2 = c^2 dt^2 - dx^2: positive timelike, negative spacelike.  A pair
of spacelike events admits a boost v = c^2 dt / dx in which they are
simultaneous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CausalOrderError, GeometryError

LIGHTLIKE_RTOL = 1e-12


@dataclass(frozen=True)
class SpacetimeEvent:
    t: float
    x: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.x)):
            raise ValueError("event coordinates must be finite")


@dataclass(frozen=True)
class FrameBoost:
    v: float
    c: float = 1.0

    def __post_init__(self):
        if abs(self.v) >= self.c:
            raise ValueError("boost speed must satisfy |v| < c")

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(1.0 - (self.v / self.c) ** 2)

    def inverse(self) -> "FrameBoost":
        return FrameBoost(-self.v, self.c)


def interval(e1: SpacetimeEvent, e2: SpacetimeEvent, c: float = 1.0
             ) -> tuple[float, str]:
    """Squared interval and its class ('spacelike'|'timelike'|'lightlike')."""
    dt = e2.t - e1.t
    dx = e2.x - e1.x
    s2 = (c * dt) ** 2 - dx**2
    scale = max((c * dt) ** 2, dx**2)
    if abs(s2) < LIGHTLIKE_RTOL * scale or scale == 0.0:
        return s2, "lightlike"
    return s2, "timelike" if s2 > 0 else "spacelike"


def lorentz_transform(e: SpacetimeEvent, boost: FrameBoost) -> SpacetimeEvent:
    gamma, v, c = boost.gamma, boost.v, boost.c
    return SpacetimeEvent(gamma * (e.t - v * e.x / c**2), gamma * (e.x - v * e.t))


def simultaneity_boost(e1: SpacetimeEvent, e2: SpacetimeEvent, c: float = 1.0
                       ) -> FrameBoost:
    """Boost in which two spacelike-separated events are simultaneous."""
    s2, cls = interval(e1, e2, c)
    if cls != "spacelike":
        raise CausalOrderError(
            f"no simultaneity frame for a {cls} pair (s2 = {s2:.6g})")
    dt = e2.t - e1.t
    dx = e2.x - e1.x
    return FrameBoost(c**2 * dt / dx, c)


def compose_boosts(b1: FrameBoost, b2: FrameBoost) -> FrameBoost:
    """Relativistic velocity addition; both boosts must share c."""
    if b1.c != b2.c:
        raise ValueError("boosts must share the same c")
    c = b1.c
    return FrameBoost((b1.v + b2.v) / (1.0 + b1.v * b2.v / c**2), c)


@dataclass(frozen=True)
class ScanRecord:
    n: int
    v_event: SpacetimeEvent      # virtual meeting of packet 2 with the moved detector
    e_event: SpacetimeEvent      # lab-simultaneous point on packet 1's world line
    s2_with_original: float      # interval between the original V and this E_n
    interval_class: str
    boost: FrameBoost | None     # frame making the original V simultaneous with E_n
    e_before_v: bool             # E_n does not follow the original V in lab time


def fig3_scan(packet_speed: float, detector_positions, c: float = 1.0
              ) -> list[ScanRecord]:
    """Move the packet-2 detector closer to the source and pair each virtual
    meeting event with the lab-simultaneous event on packet 1's world line.

    Both packets leave the origin at t = 0 with speed ``packet_speed``,
    packet 2 toward +x, packet 1 toward -x.  For each detector position
    d_n the virtual event is V_n = (d_n/u, d_n) and E_n = (d_n/u, -d_n).
    The boost column refers to the pair (original V, E_n) and is None when
    that pair is not spacelike.
    """
    u = float(packet_speed)
    if not 0.0 < u < c:
        raise GeometryError("packet world lines must be subluminal (0 < u < c)")
    d = np.asarray(list(detector_positions), dtype=float)
    if len(d) == 0:
        raise ValueError("need at least one detector position")
    if np.any(d <= 0):
        raise GeometryError("detector positions must be positive")
    if len(d) > 1 and not np.all(np.diff(d) < 0):
        raise ValueError("detector positions must strictly decrease toward the source")

    v_original = SpacetimeEvent(d[0] / u, d[0])
    records = []
    for n, dn in enumerate(d):
        v_n = SpacetimeEvent(dn / u, dn)
        e_n = SpacetimeEvent(dn / u, -dn)
        s2, cls = interval(v_original, e_n, c)
        boost = None
        if cls == "spacelike":
            boost = simultaneity_boost(v_original, e_n, c)
        # non-strict: the base placement E_0 is lab-simultaneous with V
        records.append(ScanRecord(n, v_n, e_n, s2, cls, boost,
                                  e_before_v=e_n.t <= v_original.t))
    return records


def export_scan_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("n,t_V,x_V,t_E,x_E,s2,class,v_boost,lab_order_E_before_V\n")
        for r in records:
            v_boost = f"{r.boost.v:.17g}" if r.boost is not None else "none"
            fh.write(f"{r.n},{r.v_event.t:.17g},{r.v_event.x:.17g},"
                     f"{r.e_event.t:.17g},{r.e_event.x:.17g},"
                     f"{r.s2_with_original:.17g},{r.interval_class},"
                     f"{v_boost},{str(r.e_before_v).lower()}\n")
