import math

import numpy as np
import pytest

import fermipulse as fp
from fermipulse import from_fugacity, oracle
from fermipulse.formfunc import Method


class TestDisplacementOracle:
    def test_diagonal_matches_specfun(self, rng):
        for _ in range(10):
            n = int(rng.integers(0, 8))
            x = float(rng.uniform(0.0, 6.0))
            want = fp.laguerre_scaled(n, 0, x)
            assert oracle.diagonal_element(n, x) == pytest.approx(want, rel=1e-12)

    def test_prob_matches_specfun(self, rng):
        for _ in range(20):
            n = int(rng.integers(0, 9))
            m = int(rng.integers(0, 9))
            x = float(rng.uniform(0.0, 9.0))
            assert oracle.displacement_prob(n, m, x) == pytest.approx(
                fp.franck_condon_sq(n, m, x), rel=1e-11, abs=1e-300
            )

    def test_sum_rule_closure(self, rng):
        for _ in range(6):
            level = tuple(int(v) for v in rng.integers(0, 6, 3))
            dk = rng.uniform(-1.7, 1.7, 3)
            assert oracle.sum_rule_residual(level, dk, 40) < 1e-6


class TestBruteCoherent:
    def test_zero_transfer_counts_atoms(self):
        st = from_fugacity(0.3, 1.1, 5)
        basis = oracle.SmallTrapBasis.from_thermal(st, 5)
        got = oracle.brute_coherent(basis, (0.0, 0.0, 0.0))
        assert got == pytest.approx(st.total_atoms**2, rel=1e-12)

    def test_single_ground_atom_is_gaussian(self):
        basis = oracle.SmallTrapBasis.single_atom((0, 0, 0), 3)
        dk = (0.7, 0.3, 1.1)
        x = sum(v * v for v in dk)
        assert oracle.brute_coherent(basis, dk) == pytest.approx(math.exp(-x), rel=1e-12)

    def test_equivalence_with_fast_paths(self, rng):
        st = from_fugacity(math.log(0.7), 0.25, 8)
        basis = oracle.SmallTrapBasis.from_thermal(st, 8)
        for _ in range(10):
            dk = rng.uniform(-1.5, 1.5, 3)
            x = float(dk @ dk)
            pt = fp.ScatterPoint(0.0, 0.0, x, x, 0.0)
            want = oracle.brute_coherent(basis, dk)
            lag = fp.coherent_form(fp.FormFunctionRequest(st, pt, Method.LAGUERRE_SUM))
            assert lag == pytest.approx(want, rel=1e-10)


class TestBruteIncoherent:
    def test_zero_transfer_is_pair_sum(self):
        st = from_fugacity(0.9, 0.8, 4)
        basis = oracle.SmallTrapBasis.from_thermal(st, 4)
        got = oracle.brute_incoherent(basis, (0.0, 0.0, 0.0))
        occ = st.occupations
        want = sum(fp.degeneracy(n) * occ[n] ** 2 for n in range(5))
        assert got == pytest.approx(want, rel=1e-12)

    def test_single_atom_identity(self):
        # one atom in the ground level: sum_m |eta_0m|^2 = 1, so the
        # blocked (1-N) form converges to 1 - e^{-x}
        basis = oracle.SmallTrapBasis.single_atom((0, 0, 0), 2)
        dk = (0.6, 0.2, 0.9)
        x = sum(v * v for v in dk)
        nn = oracle.brute_incoherent(basis, dk)
        assert nn == pytest.approx(math.exp(-x), rel=1e-12)
        blocked = oracle.brute_incoherent_blocked(basis, dk, 16)
        assert blocked == pytest.approx(1.0 - math.exp(-x), rel=1e-6)

    def test_blocked_equals_rowsum_minus_pair_form(self, rng):
        # the (1-N) and N N' representations differ exactly by the
        # occupation-weighted sum-rule term
        st = from_fugacity(math.log(2.0), 0.9, 3)
        basis = oracle.SmallTrapBasis.from_thermal(st, 3)
        dk = rng.uniform(-1.0, 1.0, 3)
        m_top = 14
        blocked = oracle.brute_incoherent_blocked(basis, dk, m_top)
        xs = [v * v for v in dk]
        rowsum = 0.0
        for i in range(4):
            for j in range(4):
                for k in range(4):
                    w = basis.occupations[i, j, k]
                    if w == 0.0:
                        continue
                    s = 1.0
                    for n_axis, x in zip((i, j, k), xs):
                        s *= sum(oracle.displacement_prob(n_axis, m, x) for m in range(m_top + 1))
                    rowsum += w * s
        want = rowsum - oracle.brute_incoherent(basis, dk)
        assert blocked == pytest.approx(want, rel=1e-11)

    def test_equivalence_with_fast_paths(self, rng):
        for z, tau in ((0.3, 0.5), (0.3, 5.0), (3.0, 0.5), (3.0, 5.0)):
            st = from_fugacity(math.log(z), tau, 6)
            basis = oracle.SmallTrapBasis.from_thermal(st, 6)
            for _ in range(3):
                dkx, dkz = rng.uniform(0.0, 2.5, 2)
                want = oracle.brute_incoherent(basis, (dkx, 0.0, dkz))
                pt = fp.ScatterPoint(0.0, 0.0, dkx**2 + dkz**2, dkx**2, dkz**2)
                q = fp.incoherent_form(fp.FormFunctionRequest(st, pt, Method.QUAD_SUM))
                c = fp.incoherent_form(fp.FormFunctionRequest(st, pt, Method.CONVOLUTION_SUM))
                assert q == pytest.approx(want, rel=1e-10)
                assert c == pytest.approx(want, rel=1e-10)

    def test_dk_y_symmetry_reduction(self, rng):
        # the fast paths assume dk_y = 0; rotating the transverse component
        # into the x axis must leave the brute answer unchanged
        st = from_fugacity(0.4, 1.2, 5)
        basis = oracle.SmallTrapBasis.from_thermal(st, 5)
        for _ in range(4):
            dkx, dky, dkz = rng.uniform(0.0, 1.2, 3)
            rotated = (math.hypot(dkx, dky), 0.0, dkz)
            a = oracle.brute_incoherent(basis, (dkx, dky, dkz))
            b = oracle.brute_incoherent(basis, rotated)
            assert a == pytest.approx(b, rel=1e-11)
            ac = oracle.brute_coherent(basis, (dkx, dky, dkz))
            bc = oracle.brute_coherent(basis, rotated)
            assert ac == pytest.approx(bc, rel=1e-11)

    def test_basis_validation(self):
        with pytest.raises(ValueError):
            oracle.SmallTrapBasis(9, np.zeros((10, 10, 10)))
        with pytest.raises(ValueError):
            oracle.SmallTrapBasis(3, np.zeros((2, 2, 2)))
