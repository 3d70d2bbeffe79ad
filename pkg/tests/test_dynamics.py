import math

import numpy as np
import pytest

from rdmlab import dynamics as dyn
from rdmlab import grid as g
from rdmlab.errors import BoundaryLeakError

GRID = g.Grid1D(-40.0, 40.0, 1024)


def free_spread_sigma(sigma0, t, hbar=1.0, m=1.0):
    """Analytic width of a freely spreading Gaussian density."""
    return sigma0 * math.sqrt(1.0 + (hbar * t / (2.0 * m * sigma0**2)) ** 2)


class TestSegments:
    def test_segment_ordering_required(self):
        with pytest.raises(ValueError):
            dyn.Segment(2.0, 1.0)

    def test_overlapping_segments_rejected(self):
        with pytest.raises(ValueError):
            dyn.PotentialSpec((dyn.Segment(0.0, 2.0, 1.0), dyn.Segment(1.0, 3.0, 1.0)))

    def test_force_lookup(self):
        pot = dyn.PotentialSpec((dyn.Segment(1.0, 2.0, 0.5),))
        assert pot.force_at(0.5) == 0.0
        assert pot.force_at(1.5) == 0.5
        assert pot.force_at(2.5) == 0.0


class TestEvolve:
    def test_free_evolution_unitary(self):
        psi = g.gaussian_packet(GRID, width=1.0)
        res = dyn.evolve(psi, dyn.FREE, 2.0, dt=0.005)
        assert np.all(np.abs(res.norms - 1.0) < 1e-10)

    def test_free_gaussian_spread(self):
        sigma0 = 1.0
        psi = g.gaussian_packet(GRID, width=sigma0)
        res = dyn.evolve(psi, dyn.FREE, 2.0, dt=0.005)
        measured = math.sqrt(g.position_variance(res.final))
        expected = free_spread_sigma(sigma0, 2.0)
        assert measured == pytest.approx(expected, rel=0.005)
        assert expected == pytest.approx(math.sqrt(2.0), rel=1e-12)

    def test_momentum_kick_matches_impulse(self):
        # force e*E = 0.5 for a window of 2 -> Delta<p> = +1.0
        psi = g.gaussian_packet(GRID, width=2.0)
        pot = dyn.PotentialSpec((dyn.Segment(0.0, 2.0, 0.5),))
        res = dyn.evolve(psi, pot, 2.0, dt=0.005)
        dp = res.p_mean[-1] - res.p_mean[0]
        assert dp == pytest.approx(1.0, rel=0.01)

    def test_trace_times_increasing(self):
        psi = g.gaussian_packet(GRID)
        res = dyn.evolve(psi, dyn.FREE, 1.0, dt=0.01, trace_stride=7)
        assert np.all(np.diff(res.times) > 0)

    def test_boundary_leak_detected(self):
        # a hard push walks the packet into the domain edge
        psi = g.gaussian_packet(GRID, center=30.0, width=1.0, momentum=20.0)
        with pytest.raises(BoundaryLeakError):
            dyn.evolve(psi, dyn.FREE, 2.0, dt=0.005)

    def test_linearity_of_evolution(self):
        # no self-interaction: superposition evolves as the superposed parts
        alpha, beta = math.sqrt(0.7), math.sqrt(0.3)
        psi1 = g.gaussian_packet(GRID, center=-5.0, width=1.5, momentum=2.0)
        psi2 = g.gaussian_packet(GRID, center=5.0, width=1.5, momentum=-2.0)
        combined = g.WaveFunction(
            GRID, alpha * psi1.amplitudes + 1j * beta * psi2.amplitudes)
        pot = dyn.PotentialSpec((dyn.Segment(0.0, 1.0, 0.3),))
        r1 = dyn.evolve(psi1, pot, 1.0, dt=0.01)
        r2 = dyn.evolve(psi2, pot, 1.0, dt=0.01)
        rc = dyn.evolve(combined, pot, 1.0, dt=0.01)
        superposed = alpha * r1.final.amplitudes + 1j * beta * r2.final.amplitudes
        assert np.max(np.abs(rc.final.amplitudes - superposed)) < 1e-8


class TestEhrenfest:
    def test_free_momentum_conserved(self):
        psi = g.gaussian_packet(GRID, momentum=1.0)
        res = dyn.evolve(psi, dyn.FREE, 1.0, dt=0.01)
        assert dyn.ehrenfest_check(res, dyn.FREE) < 1e-6

    def test_linear_segment_residual(self):
        psi = g.gaussian_packet(GRID, width=2.0)
        pot = dyn.PotentialSpec((dyn.Segment(0.0, 2.0, 0.5),))
        res = dyn.evolve(psi, pot, 2.0, dt=0.005)
        assert dyn.ehrenfest_check(res, pot) < 0.01 * 1.0

    def test_mirrored_capacitors_give_opposite_kicks(self):
        psi = g.gaussian_packet(GRID, width=2.0)
        dps = []
        for force in (0.5, -0.5):
            pot = dyn.PotentialSpec((dyn.Segment(0.0, 2.0, force),))
            res = dyn.evolve(psi, pot, 2.0, dt=0.005)
            dps.append(res.p_mean[-1] - res.p_mean[0])
        assert dps[0] == pytest.approx(-dps[1], rel=0.01)
        assert dps[0] == pytest.approx(1.0, rel=0.01)

    def test_needs_two_trace_points(self):
        psi = g.gaussian_packet(GRID)
        res = dyn.evolve(psi, dyn.FREE, 0.01, dt=0.01)
        short = dyn.EvolutionResult(res.final, res.trace[:1])
        with pytest.raises(ValueError):
            dyn.ehrenfest_check(short, dyn.FREE)


class TestChargeInferenceScan:
    def test_ratio_recovers_unit_charge(self):
        rows = dyn.charge_inference_scan([0.25, 0.5], [1.0, 2.0], dt=0.01)
        for _, _, _, ratio in rows:
            assert ratio == pytest.approx(1.0, rel=0.01)

    def test_amplitude_irrelevance(self):
        # a renormalized component packet deflects identically whatever its
        # original weight
        ratios = []
        for alpha_sq in (0.1, 0.9):
            psi = g.gaussian_packet(GRID, width=2.0)
            scaled = g.normalize(
                g.WaveFunction(GRID, math.sqrt(alpha_sq) * psi.amplitudes))
            rows = dyn.charge_inference_scan([0.5], [2.0], psi0=scaled, dt=0.01)
            ratios.append(rows[0][3])
        assert ratios[0] == pytest.approx(ratios[1], rel=0.01)

    def test_zero_field_no_kick(self):
        rows = dyn.charge_inference_scan([0.0], [1.0], dt=0.01)
        assert abs(rows[0][2]) < 1e-6
