import io
import math

import numpy as np
import pytest

import fermipulse as fp
from fermipulse.spectra import THETA_WEIGHT_TOTAL, resolve_mode


class TestDifferential:
    def test_resonance_point_is_temperature_free(self, trap, state_cache):
        for f in (0.01, 0.7):
            st = state_cache(1000, f * fp.fermi_energy(1000))
            c_coh, c_in = fp.differential(st, trap, 0.3, 0.0)
            assert c_coh == 0.0
            assert c_in == 1000 * (4.0 / math.pi)

    def test_forward_coherent_peak(self, trap, state_cache):
        st = state_cache(1000, 0.05 * fp.fermi_energy(1000))
        varpi = 1e-3
        c_coh, _ = fp.differential(st, trap, 0.0, varpi)
        s_coh, _ = fp.single_atom_spectra(varpi)
        assert c_coh / s_coh == pytest.approx(1000.0**2, rel=1e-6)

    def test_backscatter_insensitive_to_temperature(self, trap, state_cache):
        vals = []
        for f in (0.0016, 1.36):
            st = state_cache(10**4, f * fp.fermi_energy(10**4))
            vals.append(fp.differential(st, trap, math.radians(150.0), 0.7)[1])
        assert vals[0] == pytest.approx(vals[1], rel=1e-2)

    def test_incoherent_floor(self, trap, state_cache):
        st = state_cache(100, 1.0)
        for varpi in (-2.0, 0.4, 5.0):
            _, c_in = fp.differential(st, trap, 1.0, varpi)
            _, s_in = fp.single_atom_spectra(varpi)
            assert c_in >= 100 * s_in * (1 - 1e-12)

    def test_nonnegative(self, trap, state_cache, rng):
        st = state_cache(100, 2.0)
        for _ in range(10):
            theta = float(rng.uniform(0.0, math.pi))
            varpi = float(rng.uniform(-6.0, 6.0))
            c_coh, c_in = fp.differential(st, trap, theta, varpi)
            assert c_coh >= 0.0 and c_in >= 0.0


class TestAngularDistribution:
    def test_vanishes_at_poles(self, trap, state_cache):
        st = state_cache(100, 1.0)
        dc, di = fp.angular_distribution(st, trap, 0.0)
        assert dc == 0.0 and di == 0.0
        # float sin(pi) is ~1e-16, so the weight at the pole is round-off
        mid = fp.angular_distribution(st, trap, math.pi / 2)[1]
        dc, di = fp.angular_distribution(st, trap, math.pi)
        assert abs(di) < 1e-14 * mid
        assert abs(dc) < 1e-14 * mid

    def test_mirror_symmetry(self, trap, state_cache):
        st = state_cache(100, 1.0)
        a = fp.angular_distribution(st, trap, 0.7)
        b = fp.angular_distribution(st, trap, -0.7)
        assert a == b

    def test_single_atom_is_dipole_weight(self, trap):
        # one atom: the form-function deficit cancels against the coherent
        # channel, leaving the pure azimuth-integrated dipole pattern
        st = fp.solve_fugacity(1, 0.05)
        norm = fp.photon_norm(trap)
        for theta in (0.4, 1.2, 2.8):
            dc, di = fp.angular_distribution(st, trap, theta)
            want_total = norm * fp.angular_weight(theta) * (
                fp.S_COH_LINE_INTEGRAL + fp.S_IN_LINE_INTEGRAL
            )
            assert dc + di == pytest.approx(want_total, rel=1e-9)

    def test_frozen_matches_full(self, trap, state_cache):
        st = state_cache(1000, 1.36 * fp.fermi_energy(1000))
        for theta in (0.05, 0.6, 2.0):
            frozen = fp.angular_distribution(st, trap, theta, fp.AngularMode.FROZEN)
            full = fp.angular_distribution(st, trap, theta, fp.AngularMode.FULL)
            assert frozen[0] == pytest.approx(full[0], rel=1e-3, abs=1e-300)
            assert frozen[1] == pytest.approx(full[1], rel=1e-3)

    def test_incoherent_floor(self, trap, state_cache):
        st = state_cache(1000, 0.1 * fp.fermi_energy(1000))
        norm = fp.photon_norm(trap)
        for theta in np.linspace(0.05, math.pi - 0.05, 9):
            _, di = fp.angular_distribution(st, trap, float(theta))
            floor = norm * fp.angular_weight(float(theta)) * 1000 * fp.S_IN_LINE_INTEGRAL
            assert di >= floor * (1 - 1e-9)

    def test_first_incoherent_peak_drops_on_cooling(self, trap, state_cache):
        # the form-function deficit grows as the gas degenerates, lowering
        # the first dipole peak near theta ~ 0.96; the effect needs large
        # atom numbers to be visible over the N * s_in floor
        n_atoms = 10**6
        peaks = []
        for f in (1.0, 0.001):
            st = state_cache(n_atoms, f * fp.fermi_energy(n_atoms))
            vals = [
                fp.angular_distribution(st, trap, t)[1] for t in (0.90, 0.96, 1.02)
            ]
            peaks.append(max(vals))
        assert peaks[0] > peaks[1] * 1.02


class TestCoherentCone:
    @staticmethod
    def half_width(state, trap):
        pt0 = fp.ScatterPoint(0.0, 0.0, 0.0, 0.0, 0.0)
        peak = fp.coherent_form(fp.FormFunctionRequest(state, pt0))

        def drop(theta):
            pt = fp.kinematics(trap, theta, 0.0)
            return fp.coherent_form(fp.FormFunctionRequest(state, pt)) - 0.5 * peak

        lo, hi = 1e-5, 0.8
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if drop(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def test_half_width_ordering_across_temperatures(self, trap, state_cache):
        widths = [
            self.half_width(state_cache(10**4, f * fp.fermi_energy(10**4)), trap)
            for f in (1.0, 0.5, 0.001)
        ]
        assert widths[0] < widths[1] < widths[2]
        assert widths[2] < 0.8  # finite cone even at deep degeneracy


class TestFrequencyDistribution:
    def test_coherent_dip_at_resonance(self, trap, state_cache):
        st = state_cache(100, 1.0)
        dc, _ = fp.frequency_distribution(st, trap, 0.0)
        assert dc == 0.0

    def test_resonance_value_closed_form(self, trap, state_cache):
        st = state_cache(100, 1.0)
        _, di = fp.frequency_distribution(st, trap, 0.0)
        want = fp.photon_norm(trap) * 100 * (4.0 / math.pi) * THETA_WEIGHT_TOTAL
        assert di == pytest.approx(want, rel=1e-14)

    def test_even_when_bandwidth_vanishes(self, state_cache):
        trap = fp.TrapModel(gamma_ratio=1e-12)
        st = state_cache(100, 1.0)
        for varpi in (0.5, 2.0):
            a = fp.frequency_distribution(st, trap, varpi)
            b = fp.frequency_distribution(st, trap, -varpi)
            assert a[0] == pytest.approx(b[0], rel=1e-9)
            assert a[1] == pytest.approx(b[1], rel=1e-9)

    def test_frozen_integrals_reproduce_full(self, trap, state_cache):
        st = state_cache(1000, 1.36 * fp.fermi_energy(1000))
        ti = fp.theta_integrals(st, trap)
        for varpi in (0.3, 1.5):
            fast = fp.frequency_distribution(st, trap, varpi, frozen_integrals=ti)
            full = fp.frequency_distribution(st, trap, varpi)
            assert fast[0] == pytest.approx(full[0], rel=1e-3)
            assert fast[1] == pytest.approx(full[1], rel=1e-3)


class TestTotalPhotons:
    def test_single_atom_closed_chain(self, trap, pulse):
        st = fp.solve_fugacity(1, 1.0)
        nc, ni = fp.total_photons(st, trap, pulse)
        want = (4.0 / math.pi) * trap.natural_width_ratio
        assert nc + ni == pytest.approx(want, rel=1e-3)

    def test_single_atom_full_mode(self, trap, pulse):
        st = fp.solve_fugacity(1, 1.0)
        nc, ni = fp.total_photons(st, trap, pulse, mode=fp.AngularMode.FULL)
        want = (4.0 / math.pi) * trap.natural_width_ratio
        assert nc + ni == pytest.approx(want, rel=1e-3)

    def test_requires_two_pi_sech(self, trap, state_cache):
        st = state_cache(100, 1.0)
        with pytest.raises(ValueError):
            fp.total_photons(st, trap, fp.PulseModel(fp.PulseShape.SECH, peak_rabi=2.0))
        with pytest.raises(ValueError):
            fp.total_photons(st, trap, fp.PulseModel.two_pi(shape=fp.PulseShape.GAUSSIAN))

    def test_coherent_scales_as_n_squared_dilute(self, trap, pulse):
        # forward-cone coherent photons quadruple when N doubles at fixed tau
        out = {}
        for n in (500, 1000):
            st = fp.solve_fugacity(n, 30.0)
            out[n] = fp.total_photons(st, trap, pulse)
        assert out[1000][0] / out[500][0] == pytest.approx(4.0, rel=0.05)
        assert out[1000][1] / out[500][1] == pytest.approx(2.0, rel=0.05)


class TestResolveMode:
    def test_default_trap_freezes(self, trap):
        assert resolve_mode(fp.AngularMode.AUTO, trap) is fp.AngularMode.FROZEN

    def test_wide_band_goes_full(self):
        trap = fp.TrapModel(gamma_ratio=5e-3)
        assert resolve_mode(fp.AngularMode.AUTO, trap) is fp.AngularMode.FULL

    def test_explicit_wins(self, trap):
        assert resolve_mode(fp.AngularMode.FULL, trap) is fp.AngularMode.FULL
        assert resolve_mode("frozen", trap) is fp.AngularMode.FROZEN


class TestSpectrumGrid:
    def test_evaluate_and_serialize(self, trap, state_cache):
        st = state_cache(100, 1.0)
        grid = fp.SpectrumGrid.evaluate(
            st, trap, np.linspace(0.0, math.pi, 4), np.linspace(-2.0, 2.0, 5)
        )
        assert grid.coherent.shape == (4, 5)
        assert np.all(grid.coherent >= 0.0)
        assert np.all(grid.incoherent >= 0.0)
        # varpi = 0 column is exactly zero in the coherent channel
        j0 = 2
        assert grid.varpis[j0] == 0.0
        assert np.all(grid.coherent[:, j0] == 0.0)
        buf = io.StringIO()
        grid.write_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "theta_deg,varpi,c_coh,c_in"
        assert len(lines) == 1 + 4 * 5

    def test_threaded_evaluation_matches_sequential(self, trap, state_cache):
        st = state_cache(100, 1.0)
        thetas = np.linspace(0.0, math.pi, 5)
        varpis = np.linspace(-3.0, 3.0, 7)
        a = fp.SpectrumGrid.evaluate(st, trap, thetas, varpis, threads=1)
        b = fp.SpectrumGrid.evaluate(st, trap, thetas, varpis, threads=4)
        np.testing.assert_array_equal(a.coherent, b.coherent)
        np.testing.assert_array_equal(a.incoherent, b.incoherent)
