"""Random discontinuous position sampling and the detector locking scenario.

The jumping-particle ontology is operationalized minimally: at
Poisson-spaced instants the particle's position is freshly drawn from the
instantaneous |psi|^2, with no memory between jumps.  Detectors are ideal
(click iff the particle is in their packet at the meeting time).  The
``locking`` switch freezes the packet assignment after the first detector
contact; with it off, membership is re-sampled independently at every
meeting, which is what produces spurious downstream clicks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import grid as g
from .errors import ScenarioError
from .sampling import inverse_cdf_sample

__all__ = [
    "RdmTrajectory", "DetectorSpec", "ScenarioOutcome",
    "sample_positions", "simulate_trajectory", "run_detector_scenario",
    "sample_hydrogen_ground_state", "export_trajectory_csv", "trial_rng",
]


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based substream for one trial; independent of trial order
    and of how trials are distributed over workers."""
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, trial, 0]))


@dataclass(frozen=True)
class RdmTrajectory:
    jumps: np.ndarray = field(repr=False)  # columns: t, x
    jump_rate: float = 1.0

    def __post_init__(self):
        jumps = np.asarray(self.jumps, dtype=float).reshape(-1, 2)
        if len(jumps) > 1 and not np.all(np.diff(jumps[:, 0]) > 0):
            raise ValueError("jump times must be strictly increasing")
        object.__setattr__(self, "jumps", jumps)

    @property
    def times(self) -> np.ndarray:
        return self.jumps[:, 0]

    @property
    def positions(self) -> np.ndarray:
        return self.jumps[:, 1]


@dataclass(frozen=True)
class DetectorSpec:
    id: str
    packet: int          # 1 or 2: which arm the detector sits on
    meet_time: float
    ideal: bool = True

    def __post_init__(self):
        if self.packet not in (1, 2):
            raise ValueError("packet must be 1 or 2")
        if self.meet_time < 0:
            raise ValueError("meet_time must be nonnegative")


@dataclass(frozen=True)
class ScenarioOutcome:
    trial_count: int
    clicks: dict
    d3_after_silent_d2: int
    mode: str
    alpha_sq: float
    seed: int


def sample_positions(psi: g.WaveFunction, n: int, seed: int) -> np.ndarray:
    """n i.i.d. positions with density |psi|^2; deterministic given seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    return inverse_cdf_sample(psi.grid.x, g.probability_density(psi),
                              psi.grid.dx, n, rng)


def simulate_trajectory(states, jump_rate: float, seed: int, t_final: float | None = None
                        ) -> RdmTrajectory:
    """Poisson-spaced jump record over time-indexed states.

    ``states`` is a sequence of (t, WaveFunction) covering [0, T]; at each
    jump instant the position is drawn from the |psi|^2 of the nearest
    state in time (memoryless jumps).
    """
    states = sorted(states, key=lambda st: st[0])
    if not states:
        raise ValueError("need at least one state")
    if jump_rate <= 0:
        raise ValueError("jump_rate must be positive")
    t_end = t_final if t_final is not None else states[-1][0]
    rng = np.random.default_rng(seed)

    # draw waiting times in blocks until the horizon is covered
    waits = []
    total = 0.0
    expected = max(16, int(jump_rate * t_end * 1.1) + 64)
    while total < t_end:
        block = rng.exponential(1.0 / jump_rate, expected)
        waits.append(block)
        total += block.sum()
    t_jumps = np.cumsum(np.concatenate(waits))
    t_jumps = t_jumps[t_jumps <= t_end]

    state_times = np.array([st[0] for st in states])
    idx = np.clip(np.searchsorted(state_times, t_jumps), 0, len(states) - 1)
    left = np.clip(idx - 1, 0, len(states) - 1)
    nearer_left = np.abs(t_jumps - state_times[left]) < np.abs(state_times[idx] - t_jumps)
    idx = np.where(nearer_left, left, idx)

    xs = np.empty_like(t_jumps)
    for i in np.unique(idx):
        sel = idx == i
        psi = states[i][1]
        xs[sel] = inverse_cdf_sample(psi.grid.x, g.probability_density(psi),
                                     psi.grid.dx, int(sel.sum()), rng)
    return RdmTrajectory(np.column_stack([t_jumps, xs]), jump_rate)


def run_detector_scenario(
    alpha: float,
    detectors,
    locking: bool,
    trials: int,
    seed: int,
    trial_offset: int = 0,
) -> ScenarioOutcome:
    """Click statistics for the D1/D2/D3 arrangement.

    Per trial, detectors are met in time order; at each meeting the
    particle's packet membership decides the click.  ``locking`` freezes
    the membership at the first contact; otherwise it is re-sampled
    independently each time.  A click ends the trial (ideal absorbing
    detectors), so at most one detector fires per trial.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    dets = sorted(detectors, key=lambda d: d.meet_time)
    ids = [d.id for d in dets]
    if len(set(ids)) != len(ids):
        raise ScenarioError("detector ids must be unique")
    by_id = {d.id: d for d in dets}
    if "D2" in by_id and "D3" in by_id:
        if by_id["D2"].packet != 2 or by_id["D3"].packet != 2:
            raise ScenarioError("D2 and D3 must sit on packet 2")
        if not by_id["D2"].meet_time < by_id["D3"].meet_time:
            raise ScenarioError("D2 must be met before D3")

    p1 = alpha * alpha
    clicks = {d.id: 0 for d in dets}
    d3_after_silent_d2 = 0

    for trial in range(trial_offset, trial_offset + trials):
        rng = trial_rng(seed, trial)
        membership = None
        d2_silent = False
        for det in dets:
            if membership is None or not locking:
                membership = 1 if rng.random() < p1 else 2
            if det.packet == membership:
                clicks[det.id] += 1
                if det.id == "D3" and d2_silent:
                    d3_after_silent_d2 += 1
                break
            if det.id == "D2":
                d2_silent = True
    return ScenarioOutcome(trials, clicks, d3_after_silent_d2,
                           "locking-on" if locking else "locking-off",
                           p1, seed)


def sample_hydrogen_ground_state(n: int, a0: float, seed: int) -> np.ndarray:
    """Radii from the ground-state radial density r^2 exp(-2r/a0), i.e.
    a Gamma(3, a0/2) distribution."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if a0 <= 0:
        raise ValueError("a0 must be positive")
    rng = np.random.default_rng(seed)
    return rng.gamma(3.0, a0 / 2.0, n)


def export_trajectory_csv(trajectory: RdmTrajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("t,x\n")
        for t, x in trajectory.jumps:
            fh.write(f"{t:.17g},{x:.17g}\n")
