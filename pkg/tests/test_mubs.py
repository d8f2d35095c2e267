import numpy as np
import pytest

from qclone import errors
from qclone.cloning import clone_channel
from qclone.mubs import (
    MubSet,
    fourier_angle_basis,
    gaussian_state,
    is_prime,
    mub_set,
    mub_vector,
    oam_index,
    oam_label,
    verify_mub,
)
from qclone.qcore import basis_ket, fidelity_ket


class TestMubVector:
    def test_d2_alpha2_n1_uniform(self):
        k = mub_vector(2, 2, 1)
        assert np.allclose(k.amps, np.full(2, 1 / np.sqrt(2)))

    def test_d7_alpha2_n2_phases(self):
        # alpha = 2 kills the quadratic term; phases are (n-1)(d-j+1) = 8-j
        k = mub_vector(7, 2, 2)
        expected = np.exp(2j * np.pi * (8 - np.arange(1, 8)) / 7) / np.sqrt(7)
        assert np.abs(k.amps - expected).max() < 1e-12

    def test_unit_norm_everywhere(self):
        for d in (2, 3, 5, 7):
            for alpha in range(2, d + 2):
                for n in range(1, d + 1):
                    k = mub_vector(d, alpha, n)
                    assert abs(np.linalg.norm(k.amps) - 1.0) < 1e-12
                    assert np.abs(np.abs(k.amps) - 1 / np.sqrt(d)).max() < 1e-12

    def test_rejects_nonprime(self):
        with pytest.raises(errors.NotPrime):
            mub_vector(4, 2, 1)

    def test_rejects_bad_indices(self):
        with pytest.raises(errors.IndexOutOfRange):
            mub_vector(3, 1, 1)
        with pytest.raises(errors.IndexOutOfRange):
            mub_vector(3, 5, 1)
        with pytest.raises(errors.IndexOutOfRange):
            mub_vector(3, 2, 0)


class TestMubSet:
    def test_d2_three_bases_unbiased(self):
        ms = mub_set(2)
        assert ms.n_bases == 3
        for a in range(3):
            for b in range(a + 1, 3):
                ov = np.abs(ms.bases[a].conj() @ ms.bases[b].T) ** 2
                assert np.abs(ov - 0.5).max() < 1e-12

    def test_d7_eight_bases_unbiased(self):
        ms = mub_set(7)
        assert ms.n_bases == 8
        rep = verify_mub(ms, tol=1e-10)
        assert rep.passed
        assert rep.max_unbiasedness_deviation < 1e-10

    def test_first_basis_computational(self):
        for d in (2, 3, 5, 7):
            assert np.allclose(mub_set(d).bases[0], np.eye(d))

    def test_rejects_composite(self):
        for d in (4, 6, 9):
            with pytest.raises(errors.NotPrime):
                mub_set(d)

    def test_ket_accessor(self):
        ms = mub_set(3)
        assert np.allclose(ms.ket(1, 2).amps, [0, 1, 0])
        with pytest.raises(errors.IndexOutOfRange):
            ms.ket(5, 1)
        with pytest.raises(errors.IndexOutOfRange):
            ms.ket(1, 4)


class TestVerifyMub:
    @pytest.mark.parametrize("d", [2, 3, 5, 7])
    def test_constructed_sets_pass(self, d):
        rep = verify_mub(mub_set(d), tol=1e-10)
        assert rep.passed, (
            f"d={d}: orth={rep.max_orthonormality_deviation:.2e} "
            f"unb={rep.max_unbiasedness_deviation:.2e}"
        )

    def test_corrupted_set_fails(self):
        ms = mub_set(3)
        bases = ms.bases.copy()
        bases[1, 0] = np.array([1, 0, 0], dtype=complex)
        rep = verify_mub(MubSet(dim=3, bases=bases), tol=1e-10)
        assert not rep.passed
        assert rep.max_unbiasedness_deviation >= 1 / 3


class TestFourierAngleBasis:
    def test_d2_hadamard_pair(self):
        b = fourier_angle_basis(2)
        s = 1 / np.sqrt(2)
        assert np.allclose(b[0].amps, [s, s])
        assert np.allclose(b[1].amps, [s, -s])

    def test_first_element_uniform(self):
        for d in (3, 5, 8):
            assert np.allclose(fourier_angle_basis(d)[0].amps, np.full(d, 1 / np.sqrt(d)))

    def test_unitary_and_unbiased_for_all_d(self):
        # valid second basis even in non-prime dimensions
        for d in range(2, 10):
            b = np.array([k.amps for k in fourier_angle_basis(d)])
            assert np.abs(b.conj() @ b.T - np.eye(d)).max() < 1e-12
            assert np.abs(np.abs(b) ** 2 - 1 / d).max() < 1e-12

    def test_d7_unbiased_with_computational(self):
        b = fourier_angle_basis(7)
        for k in b:
            for i in range(7):
                assert abs(k.overlap(basis_ket(7, i))) ** 2 == pytest.approx(1 / 7)

    def test_dimension_too_small(self):
        with pytest.raises(errors.DimensionTooSmall):
            fourier_angle_basis(1)


class TestGaussianState:
    def test_amplitude_ratio(self):
        g = gaussian_state()
        assert abs(g.amps[3 + 1]) / abs(g.amps[3]) == pytest.approx(np.exp(-0.25))

    def test_symmetric_under_reflection(self):
        g = gaussian_state()
        assert np.abs(g.amps - g.amps[::-1]).max() < 1e-15

    def test_normalized_real_nonnegative(self):
        g = gaussian_state()
        assert abs(np.linalg.norm(g.amps) - 1.0) < 1e-12
        assert np.abs(g.amps.imag).max() == 0.0
        assert (g.amps.real >= 0).all()


class TestOamLabels:
    def test_seven_level_labels(self):
        assert oam_label(1, 7) == -3
        assert oam_label(4, 7) == 0
        assert oam_index(3, 7) == 7

    def test_bijection(self):
        for d in (3, 5, 7):
            for i in range(1, d + 1):
                assert oam_index(oam_label(i, d), d) == i

    def test_errors(self):
        with pytest.raises(errors.EvenDimension):
            oam_label(1, 4)
        with pytest.raises(errors.IndexOutOfRange):
            oam_label(0, 7)
        with pytest.raises(errors.IndexOutOfRange):
            oam_index(4, 7)


class TestCloningBridge:
    def test_every_mub_element_clones_optimally_d7(self):
        # universality holds exactly on all 8 bases x 7 elements
        ms = mub_set(7)
        for alpha in range(1, 9):
            for n in range(1, 8):
                psi = ms.ket(alpha, n)
                f = fidelity_ket(clone_channel(psi).reduced, psi)
                assert abs(f - 0.625) < 1e-10


def test_is_prime():
    assert [n for n in range(2, 14) if is_prime(n)] == [2, 3, 5, 7, 11, 13]
