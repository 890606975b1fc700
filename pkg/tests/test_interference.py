import numpy as np
import pytest

from gsmspdc.analysis import fit_visibility
from gsmspdc.errors import ConvergenceError
from gsmspdc.interference import (SlitGeometry, fringe_profile,
                                  slit_plane_coherence, slit_transmission,
                                  visibility_curve)
from gsmspdc.pump import PumpParams
from gsmspdc.spdc import CrystalParams

LAMBDA_P = 405e-9
LAMBDA_S = 2 * LAMBDA_P
W0 = 0.5e-3
CRYSTAL = CrystalParams(L=2e-3, kind="II")
SLITS = SlitGeometry(a=0.15e-3, d=0.25e-3, z=0.10, z1=0.20)


def pump_for(A):
    return PumpParams.from_coherence(LAMBDA_P, W0, A)


def coherent_oracle_pattern(slits, xs):
    """Closed-form coherent double-slit pattern: sinc^2 envelope x cos^2 fringes."""
    u = xs / (LAMBDA_S * slits.z1)
    return (np.sinc(slits.a * u) ** 2) * np.cos(np.pi * slits.d * xs
                                                / (LAMBDA_S * slits.z1)) ** 2


def fitted_visibility(scan, slits):
    period = slits.fringe_period(LAMBDA_S)
    return fit_visibility(scan, period_hint=period, window=2 * period).visibility


class TestSlitTransmission:
    def test_slit_centers(self):
        assert slit_transmission(SLITS.d / 2, SLITS) == 1
        assert slit_transmission(-SLITS.d / 2, SLITS) == 1

    def test_between_slits(self):
        assert slit_transmission(0.0, SLITS) == 0

    def test_boundaries_inclusive(self):
        for edge in ((SLITS.d - SLITS.a) / 2, (SLITS.d + SLITS.a) / 2):
            assert slit_transmission(edge, SLITS) == 1
            assert slit_transmission(-edge, SLITS) == 1

    def test_outside(self):
        assert slit_transmission(SLITS.d, SLITS) == 0
        vec = slit_transmission(np.array([0.0, SLITS.d / 2, 1.0]), SLITS)
        assert list(vec) == [0, 1, 0]

    def test_geometry_validation(self):
        with pytest.raises(ValueError):
            SlitGeometry(a=0.2e-3, d=0.15e-3)  # slits would overlap


class TestFringeProfile:
    def test_mirror_symmetry(self):
        scan = fringe_profile(pump_for(0.6), CRYSTAL, SLITS)
        assert np.max(np.abs(scan.values - scan.values[::-1])) < 1e-6

    def test_unit_maximum_and_bounds(self):
        scan = fringe_profile(pump_for(0.4), CRYSTAL, SLITS)
        assert scan.values.max() == pytest.approx(1.0)
        assert np.all(scan.values >= 0.0)

    def test_coherent_limit_matches_closed_form_oracle(self):
        scan = fringe_profile(pump_for(0.9995), CRYSTAL, SLITS)
        v_sim = fitted_visibility(scan, SLITS)
        oracle = coherent_oracle_pattern(SLITS, scan.xs)
        v_oracle = fitted_visibility(
            type(scan)(xs=scan.xs, values=oracle / oracle.max()), SLITS)
        assert v_oracle > 0.97
        assert abs(v_sim - v_oracle) < 0.02

    def test_visibility_decreases_with_coherence_loss(self):
        vis = [fitted_visibility(fringe_profile(pump_for(A), CRYSTAL, SLITS),
                                 SLITS)
               for A in (0.9, 0.6, 0.3)]
        assert vis[0] > vis[1] > vis[2]

    def test_span_precondition(self):
        period = SLITS.fringe_period(LAMBDA_S)
        with pytest.raises(ValueError):
            fringe_profile(pump_for(0.6), CRYSTAL, SLITS, span=4 * period)

    def test_quadrature_convergence_under_order_doubling(self):
        base = fringe_profile(pump_for(0.6), CRYSTAL, SLITS, order=24,
                              check_convergence=False)
        doubled = fringe_profile(pump_for(0.6), CRYSTAL, SLITS, order=48,
                                 check_convergence=False)
        assert np.max(np.abs(base.values - doubled.values)) < 1e-4

    def test_non_convergence_reported(self):
        with pytest.raises(ConvergenceError):
            fringe_profile(pump_for(0.6), CRYSTAL, SLITS, order=2)

    def test_meta_records_parameters(self):
        scan = fringe_profile(pump_for(0.5), CRYSTAL, SLITS)
        assert scan.meta["slit_d_m"] == SLITS.d
        assert scan.meta["A"] == pytest.approx(0.5, rel=1e-12)


class TestSlitPlaneCoherence:
    def test_coherent_pump_near_unity(self):
        mu = slit_plane_coherence(pump_for(0.9999), CRYSTAL, SLITS.z, SLITS.d)
        assert mu > 0.99

    def test_monotone_in_separation(self):
        pump = pump_for(0.5)
        mus = [slit_plane_coherence(pump, CRYSTAL, SLITS.z, dx)
               for dx in np.linspace(0.05e-3, 1e-3, 12)]
        assert np.all(np.diff(mus) < 0)

    def test_fitted_visibility_tracks_coherence(self):
        # the fitted fringe visibility should sit close to |mu| at the slits
        pump = pump_for(0.6)
        scan = fringe_profile(pump, CRYSTAL, SLITS)
        v = fitted_visibility(scan, SLITS)
        mu = slit_plane_coherence(pump, CRYSTAL, SLITS.z, SLITS.d)
        assert v == pytest.approx(mu, abs=0.02)


class TestVisibilityCurve:
    def test_monotone_in_both_directions(self):
        pumps = [pump_for(A) for A in (0.9, 0.6, 0.3)]
        rows = visibility_curve(pumps, [0.25e-3, 0.5e-3, 0.75e-3],
                                a=0.15e-3, z=0.10, z1=0.20, crystal=CRYSTAL)
        table = {(round(r["A"], 3), r["d_m"]): r["visibility"] for r in rows}
        for A in (0.9, 0.6, 0.3):
            run = [table[(A, d)] for d in (0.25e-3, 0.5e-3, 0.75e-3)]
            assert run[0] > run[1] > run[2]
        for d in (0.25e-3, 0.5e-3, 0.75e-3):
            run = [table[(A, d)] for A in (0.9, 0.6, 0.3)]
            assert run[0] > run[1] > run[2]

    def test_overlapping_slit_limit(self):
        # d barely above a approximates a single aperture: near-unit
        # visibility for a near-coherent pump
        slim = [pump_for(0.999)]
        rows = visibility_curve(slim, [0.16e-3], a=0.15e-3, z=0.10, z1=0.20,
                                crystal=CRYSTAL)
        assert rows[0]["visibility"] > 0.95
