import numpy as np
import pytest

from qclone import errors
from qclone.cloning import (
    CoincidenceRecord,
    HomModel,
    clone_channel,
    clone_reduced_analytic,
    clone_reduced_density,
    coalescence_enhancement,
    estimated_clone_distribution,
    estimation_fidelity,
    fidelity_from_counts,
    hom_dip_curve,
    hom_effective_joint,
    joint_detection_prob,
    optimal_clone_fidelity,
    ordered_joint_probabilities,
    shrinking_factor,
    simulate_coincidences,
)
from qclone.qcore import Ket, basis_ket, fidelity_ket, partial_trace, symmetric_projector

from conftest import joint_prob_oracle, random_ket, random_unitary


class TestAnalyticFormulas:
    def test_clone_fidelity_values(self):
        assert optimal_clone_fidelity(2) == pytest.approx(5 / 6)
        assert optimal_clone_fidelity(7) == pytest.approx(0.625)

    def test_estimation_fidelity_values(self):
        assert estimation_fidelity(2) == pytest.approx(2 / 3)
        assert estimation_fidelity(7) == pytest.approx(0.25)

    def test_cloning_beats_estimation(self):
        for d in range(2, 32):
            assert optimal_clone_fidelity(d) > estimation_fidelity(d)
            assert optimal_clone_fidelity(d) > 0.5

    def test_shrinking_factor_values(self):
        assert shrinking_factor(2) == pytest.approx(2 / 3)
        assert shrinking_factor(7) == pytest.approx(9 / 16)

    def test_dimension_too_small(self):
        for fn in (optimal_clone_fidelity, estimation_fidelity, shrinking_factor):
            with pytest.raises(errors.DimensionTooSmall):
                fn(1)


class TestCloneChannel:
    def test_success_probability(self, rng):
        for d, expected in ((2, 3 / 4), (7, 4 / 7)):
            out = clone_channel(random_ket(d, rng))
            assert out.success_prob == pytest.approx(expected, abs=1e-12)

    def test_reduced_fidelity_d7(self, rng):
        psi = random_ket(7, rng)
        assert fidelity_ket(clone_channel(psi).reduced, psi) == pytest.approx(
            0.625, abs=1e-12
        )

    def test_joint_supported_on_symmetric_subspace(self, rng):
        for d in (2, 5):
            joint = clone_channel(random_ket(d, rng)).joint
            proj = symmetric_projector(d)
            assert np.abs(proj @ joint @ proj - joint).max() < 1e-10
            assert abs(np.trace(joint) - 1.0) < 1e-10
            assert np.abs(joint - joint.conj().T).max() < 1e-10

    def test_both_clones_identical(self, rng):
        for d in (2, 3, 7):
            joint = clone_channel(random_ket(d, rng)).joint
            assert np.abs(
                partial_trace(joint, 1) - partial_trace(joint, 2)
            ).max() < 1e-10

    def test_universality(self, rng):
        # input-independence: fidelity has zero spread over Haar-random inputs
        for d in range(2, 8):
            fids = np.array(
                [
                    fidelity_ket(clone_channel(psi).reduced, psi)
                    for psi in (random_ket(d, rng) for _ in range(200))
                ]
            )
            assert abs(fids.mean() - optimal_clone_fidelity(d)) < 1e-10
            assert fids.std() < 1e-10


class TestClosedForm:
    def test_matches_channel(self, rng):
        for d in range(2, 8):
            for _ in range(100):
                psi = random_ket(d, rng)
                dev = np.abs(
                    clone_channel(psi).reduced - clone_reduced_analytic(psi)
                ).max()
                assert dev < 1e-10

    def test_density_version_linear(self, rng):
        d = 5
        a = random_ket(d, rng)
        b = random_ket(d, rng)
        mix = 0.3 * a.density() + 0.7 * b.density()
        expected = 0.3 * clone_reduced_analytic(a) + 0.7 * clone_reduced_analytic(b)
        assert np.abs(clone_reduced_density(mix) - expected).max() < 1e-12


class TestJointDetectionProb:
    def test_known_values_d7(self):
        basis = [basis_ket(7, i) for i in range(7)]
        psi = basis[0]
        assert joint_detection_prob(psi, psi, psi) == pytest.approx(0.25, abs=1e-12)
        assert joint_detection_prob(psi, psi, basis[3]) == pytest.approx(
            0.0625, abs=1e-12
        )

    def test_against_brute_force_oracle(self, rng):
        for d in (2, 3):
            basis = [basis_ket(d, i) for i in range(d)]
            psi = random_ket(d, rng)
            oracle = joint_prob_oracle(psi, basis)
            for i in range(d):
                for j in range(d):
                    assert joint_detection_prob(psi, basis[i], basis[j]) == pytest.approx(
                        oracle[i, j], abs=1e-12
                    )

    def test_normalization_with_double_counting(self, rng):
        for d in (2, 7):
            basis = [basis_ket(d, i) for i in range(d)]
            q = ordered_joint_probabilities(basis[0], basis)
            assert q.sum() == pytest.approx(1.0, abs=1e-10)
            cross = sum(q[0, i] for i in range(1, d))
            assert q[0, 0] + 2 * cross == pytest.approx(1.0, abs=1e-10)

    def test_basis_covariance(self, rng):
        d = 5
        basis = [basis_ket(d, i) for i in range(d)]
        psi = random_ket(d, rng)
        q = ordered_joint_probabilities(psi, basis)
        u = random_unitary(d, rng)
        psi_rot = Ket(u @ psi.amps)
        basis_rot = [Ket(u @ k.amps) for k in basis]
        q_rot = ordered_joint_probabilities(psi_rot, basis_rot)
        assert np.abs(q - q_rot).max() < 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(errors.DimensionMismatch):
            joint_detection_prob(basis_ket(2, 0), basis_ket(3, 0), basis_ket(3, 1))


class TestHomModel:
    def test_validation(self):
        with pytest.raises(errors.InvalidArgument):
            HomModel(visibility=1.2)
        with pytest.raises(errors.InvalidArgument):
            HomModel(coherence_width=0.0)

    def test_ideal_limit_recovers_clone_joint(self, rng):
        psi = random_ket(3, rng)
        joint = hom_effective_joint(psi, HomModel(visibility=1.0, delay=0.0))
        assert np.abs(joint - clone_channel(psi).joint).max() < 1e-12

    def test_distinguishable_limit_fidelity(self, rng):
        psi = random_ket(7, rng)
        joint = hom_effective_joint(psi, HomModel(visibility=0.0))
        red = partial_trace(joint, 1)
        assert fidelity_ket(red, psi) == pytest.approx(4 / 7, abs=1e-12)

    def test_linear_interpolation(self, rng):
        psi = random_ket(2, rng)
        lam = 0.89
        f1 = fidelity_ket(
            partial_trace(hom_effective_joint(psi, HomModel(visibility=1.0)), 1), psi
        )
        f0 = fidelity_ket(
            partial_trace(hom_effective_joint(psi, HomModel(visibility=0.0)), 1), psi
        )
        fmid = fidelity_ket(
            partial_trace(hom_effective_joint(psi, HomModel(visibility=lam)), 1), psi
        )
        assert fmid == pytest.approx(lam * f1 + (1 - lam) * f0, abs=1e-12)

    def test_dip_curve(self):
        hom = HomModel(visibility=0.89, coherence_width=1.0)
        curve = hom_dip_curve(hom, [0.0, 10.0], base_rate=1000.0)
        assert curve[0, 1] == pytest.approx(0.11 * 1000.0)
        assert curve[1, 1] == pytest.approx(1000.0, rel=1e-10)

    def test_dip_perfect_visibility(self):
        hom = HomModel(visibility=1.0)
        assert hom_dip_curve(hom, [0.0], 500.0)[0, 1] == pytest.approx(0.0, abs=1e-12)

    def test_dip_monotone_in_delay(self):
        hom = HomModel(visibility=0.89, coherence_width=1.3)
        taus = np.linspace(0, 5, 40)
        rates = hom_dip_curve(hom, taus, 1.0)[:, 1]
        assert (np.diff(rates) >= 0).all()

    def test_enhancement(self):
        assert coalescence_enhancement(HomModel(visibility=1.0)) == pytest.approx(2.0)
        assert coalescence_enhancement(HomModel(visibility=0.0)) == pytest.approx(1.0)
        assert coalescence_enhancement(HomModel(visibility=0.89)) == pytest.approx(1.89)


class TestSimulateCoincidences:
    def test_deterministic(self):
        basis = [basis_ket(2, i) for i in range(2)]
        a = simulate_coincidences(basis[0], basis, 10_000, seed=7)
        b = simulate_coincidences(basis[0], basis, 10_000, seed=7)
        assert a.counts == b.counts

    def test_zero_events_rejected(self):
        basis = [basis_ket(2, i) for i in range(2)]
        with pytest.raises(errors.InvalidArgument):
            simulate_coincidences(basis[0], basis, 0, seed=1)

    def test_non_orthonormal_basis_rejected(self):
        bad = [Ket([1, 0]), Ket([1, 1])]
        with pytest.raises(errors.BasisNotOrthonormal):
            simulate_coincidences(bad[0], bad, 100, seed=1)

    def test_diagonal_fraction_d2(self):
        basis = [basis_ket(2, i) for i in range(2)]
        rec = simulate_coincidences(basis[0], basis, 1_000_000, seed=42)
        assert rec.count(0, 0) / rec.n_tot == pytest.approx(2 / 3, abs=0.005)

    def test_all_mass_involves_input(self):
        basis = [basis_ket(5, i) for i in range(5)]
        rec = simulate_coincidences(basis[2], basis, 100_000, seed=3)
        for (i, j), c in rec.counts.items():
            assert 2 in (i, j) and c > 0

    def test_record_invariants(self):
        basis = [basis_ket(3, i) for i in range(3)]
        rec = simulate_coincidences(basis[1], basis, 50_000, seed=9)
        assert rec.psi_index == 1
        cross = sum(rec.count(1, i) for i in range(3) if i != 1)
        assert rec.n_tot == rec.count(1, 1) + 2 * cross
        assert sum(rec.counts.values()) == rec.n_events


class TestFidelityFromCounts:
    def test_worked_example(self):
        rec = CoincidenceRecord(dim=2, counts={(0, 0): 50, (0, 1): 25}, n_events=75,
                                psi_index=0)
        assert rec.n_tot == 100
        assert fidelity_from_counts(rec, 0) == pytest.approx(0.75)

    def test_all_diagonal(self):
        rec = CoincidenceRecord(dim=3, counts={(1, 1): 40}, n_events=40, psi_index=1)
        assert fidelity_from_counts(rec, 1) == pytest.approx(1.0)

    def test_empty_record(self):
        rec = CoincidenceRecord(dim=2, counts={}, n_events=0, psi_index=0)
        with pytest.raises(errors.EmptyRecord):
            fidelity_from_counts(rec, 0)

    def test_bad_keys_rejected(self):
        with pytest.raises(errors.InvalidArgument):
            CoincidenceRecord(dim=2, counts={(1, 0): 5}, n_events=5, psi_index=0)
        with pytest.raises(errors.InvalidArgument):
            CoincidenceRecord(dim=2, counts={(0, 1): -1}, n_events=0, psi_index=0)

    def test_ideal_simulation_d7(self):
        basis = [basis_ket(7, i) for i in range(7)]
        rec = simulate_coincidences(basis[0], basis, 100_000, seed=11)
        assert fidelity_from_counts(rec, 0) == pytest.approx(0.625, abs=0.01)

    def test_estimated_distribution_columns(self):
        basis = [basis_ket(7, i) for i in range(7)]
        rec = simulate_coincidences(basis[0], basis, 200_000, seed=13)
        dist = estimated_clone_distribution(rec, 0)
        assert dist[0] == pytest.approx(fidelity_from_counts(rec, 0))
        assert dist[1:] == pytest.approx(np.full(6, 1 / 16), abs=0.01)
        assert dist.sum() == pytest.approx(1.0, abs=1e-12)


def _bucket_probabilities(q, d):
    """Sampling distribution over canonical (i <= j) buckets from ordered q."""
    pairs = [(i, j) for i in range(d) for j in range(i, d)]
    w = np.array([q[i, j] for i, j in pairs])
    return pairs, w / w.sum()


class TestSamplerVsOracle:
    """Sampled bucket counts against the brute-force joint-probability oracle."""

    @pytest.mark.parametrize("n_events", [10_000, 100_000, 1_000_000])
    def test_counts_within_3_sigma(self, n_events):
        d = 7
        basis = [basis_ket(d, i) for i in range(d)]
        psi = basis[0]
        pairs, probs = _bucket_probabilities(joint_prob_oracle(psi, basis), d)
        rec = simulate_coincidences(psi, basis, n_events, seed=20240817)
        for (i, j), p in zip(pairs, probs):
            sigma = np.sqrt(n_events * p * (1 - p))
            assert abs(rec.count(i, j) - n_events * p) <= 3 * sigma + 1

    @pytest.mark.parametrize("n_events", [10_000, 100_000, 1_000_000])
    def test_estimator_within_3_sigma(self, n_events):
        # delta-method standard deviation of the count-ratio estimator
        d = 7
        basis = [basis_ket(d, i) for i in range(d)]
        psi = basis[0]
        pairs, probs = _bucket_probabilities(joint_prob_oracle(psi, basis), d)
        num = np.array([1.0 if 0 in pair else 0.0 for pair in pairs])
        den = np.array(
            [1.0 if pair == (0, 0) else 2.0 if 0 in pair else 0.0 for pair in pairs]
        )
        a = num @ probs
        t = den @ probs
        grad = (num * t - a * den) / t**2
        sigma = np.sqrt((probs @ grad**2 - (probs @ grad) ** 2) / n_events)
        rec = simulate_coincidences(psi, basis, n_events, seed=20240817)
        fhat = fidelity_from_counts(rec, 0)
        assert abs(fhat - optimal_clone_fidelity(d)) <= 3 * sigma
