import numpy as np
import pytest

from magfim import (
    DenseCapExceededError,
    ProductStateSuperposition,
    admissible_probe_deltas,
    dense_statevector,
    ghz_state,
    pauli_eigenvectors,
    probe_normalization,
    probe_two_site_marginal,
    reduced_density_matrix,
    single_site_marginal,
    triple_ghz_probe,
    two_site_marginal,
)
from magfim.config import DENSE_CAP_ENV
from magfim.probes import dense_amplitudes

from conftest import SIGMA, random_state


def dense_overlap(a, b):
    return dense_statevector(a).amplitudes.conj() @ dense_statevector(b).amplitudes


class TestProductStateSuperposition:
    def test_rejects_unnormalised_locals(self):
        with pytest.raises(ValueError):
            ProductStateSuperposition(2, [1.0], [[1.0, 1.0]])

    def test_rejects_false_normalized_flag(self):
        with pytest.raises(ValueError):
            ProductStateSuperposition(2, [2.0], [[1.0, 0.0]], normalized=True)

    def test_norm_via_gram(self):
        state = ghz_state(3, 4)
        assert state.norm() == pytest.approx(1.0, abs=1e-14)


class TestPauliEigenvectors:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_eigen_equations(self, k):
        plus, minus = pauli_eigenvectors(k)
        np.testing.assert_allclose(SIGMA[k] @ plus, plus, atol=1e-15)
        np.testing.assert_allclose(SIGMA[k] @ minus, -minus, atol=1e-15)
        assert plus.conj() @ minus == pytest.approx(0.0, abs=1e-15)
        # Fixed global-phase convention.
        assert plus[0].real > 0 and abs(plus[0].imag) < 1e-15


class TestGhzState:
    def test_dense_amplitudes_z_direction(self):
        amps = dense_statevector(ghz_state(3, 2)).amplitudes
        np.testing.assert_allclose(amps, np.array([1, 0, 0, 1]) / np.sqrt(2), atol=1e-15)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_x_direction_normalised(self, n):
        amps = dense_statevector(ghz_state(1, n)).amplitudes
        assert np.linalg.norm(amps) == pytest.approx(1.0, abs=1e-13)

    def test_phase_pi_pair_is_orthogonal(self):
        a = ghz_state(2, 4, 0.0)
        b = ghz_state(2, 4, np.pi)
        assert abs(dense_overlap(a, b)) < 1e-14

    def test_marginals(self):
        # One-site marginal maximally mixed for N >= 2; two-site marginal
        # (1x1 + sigma_k x sigma_k)/4 once at least one site is traced out
        # (N >= 3). At N = 2 nothing is traced and the state stays pure.
        for k in (1, 2, 3):
            want2 = (np.eye(4) + np.kron(SIGMA[k], SIGMA[k])) / 4.0
            for n in range(2, 9):
                psi = dense_statevector(ghz_state(k, n))
                rho1 = reduced_density_matrix(psi, 0).entries
                np.testing.assert_allclose(rho1, np.eye(2) / 2, atol=1e-12)
                rho2 = reduced_density_matrix(psi, (0, 1)).entries
                if n == 2:
                    pure = np.outer(psi.amplitudes, psi.amplitudes.conj())
                    np.testing.assert_allclose(rho2, pure, atol=1e-12)
                else:
                    np.testing.assert_allclose(rho2, want2, atol=1e-12)


class TestProbeNormalization:
    def test_exact_value_at_n8(self):
        assert probe_normalization(8) == pytest.approx(1 / np.sqrt(7.5), abs=1e-14)

    def test_matches_dense_norm(self):
        _, locs = ghz_state(1, 8), None
        raw = sum(
            dense_amplitudes(ghz_state(k, 8)) * np.sqrt(2.0) for k in (1, 2, 3)
        )
        assert probe_normalization(8) == pytest.approx(1 / np.linalg.norm(raw), abs=1e-13)

    def test_monotone_approach_to_limit(self):
        values = [probe_normalization(8 * n) for n in range(1, 12)]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert all(v < 1 / np.sqrt(6) for v in values)

    def test_limit_reached_beyond_n88(self):
        for n in (88, 96, 104):
            assert abs(probe_normalization(n) - 1 / np.sqrt(6)) <= 1e-6


class TestTripleGhzProbe:
    def test_dense_norm_one(self):
        amps = dense_statevector(triple_ghz_probe(8)).amplitudes
        assert abs(np.linalg.norm(amps) - 1.0) < 1e-12

    def test_single_site_marginal_maximally_mixed_at_n8(self):
        psi = dense_statevector(triple_ghz_probe(8))
        rho1 = reduced_density_matrix(psi, 0).entries
        np.testing.assert_allclose(rho1, np.eye(2) / 2, atol=1e-12)

    def test_permutation_invariance(self):
        n = 4
        amps = dense_statevector(triple_ghz_probe(n)).amplitudes
        tensor = amps.reshape((2,) * n)
        for a, b in [(0, 1), (1, 3), (0, 3)]:
            np.testing.assert_allclose(tensor, np.swapaxes(tensor, a, b), atol=1e-14)

    def test_needs_two_sites(self):
        with pytest.raises(ValueError):
            triple_ghz_probe(1)


class TestProbeTwoSiteMarginal:
    def test_eigenvalues(self):
        rho, exact = probe_two_site_marginal(8)
        assert exact
        np.testing.assert_allclose(
            np.linalg.eigvalsh(rho.entries), [0.0, 1 / 3, 1 / 3, 1 / 3], atol=1e-14
        )

    def test_exact_at_n8_against_dense(self):
        rho, exact = probe_two_site_marginal(8)
        psi = dense_statevector(triple_ghz_probe(8))
        dense = reduced_density_matrix(psi, (0, 1)).entries
        assert exact
        np.testing.assert_allclose(rho.entries, dense, atol=1e-12)

    def test_deviation_bounded_at_n12(self):
        rho, exact = probe_two_site_marginal(12)
        assert not exact
        psi = dense_statevector(triple_ghz_probe(12))
        dense = reduced_density_matrix(psi, (0, 1)).entries
        dev = np.linalg.norm(rho.entries - dense)
        assert 1e-6 < dev <= 2.0 ** (-12 / 2 + 3)

    @pytest.mark.parametrize("n, want", [(8, True), (12, False), (16, True), (20, False)])
    def test_exactness_flag(self, n, want):
        assert probe_two_site_marginal(n)[1] is want


class TestDenseStatevector:
    def test_ghz(self):
        amps = dense_statevector(ghz_state(3, 2)).amplitudes
        np.testing.assert_allclose(amps, np.array([1, 0, 0, 1]) / np.sqrt(2), atol=1e-15)

    def test_single_term_basis_vector(self):
        state = ProductStateSuperposition(3, [1.0], [[1.0, 0.0]], normalized=True)
        amps = dense_statevector(state).amplitudes
        assert amps[0] == pytest.approx(1.0)
        assert np.abs(amps[1:]).max() == 0.0

    def test_probe_norm(self):
        amps = dense_statevector(triple_ghz_probe(8)).amplitudes
        assert abs(np.linalg.norm(amps) - 1.0) < 1e-12

    def test_requires_normalized_flag(self):
        state = ProductStateSuperposition(2, [0.5], [[1.0, 0.0]])
        with pytest.raises(ValueError):
            dense_statevector(state)

    def test_cap(self, monkeypatch):
        monkeypatch.setenv(DENSE_CAP_ENV, "4")
        with pytest.raises(DenseCapExceededError):
            dense_statevector(ghz_state(3, 6))


class TestAnalyticMarginals:
    def test_match_dense_for_random_superpositions(self, rng):
        n = 5
        for _ in range(10):
            locs = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
            locs /= np.linalg.norm(locs, axis=1)[:, None]
            weights = rng.normal(size=3) + 1j * rng.normal(size=3)
            raw = ProductStateSuperposition(n, weights, locs)
            scale = raw.norm()
            state = ProductStateSuperposition(n, weights / scale, locs, normalized=True)
            psi = dense_statevector(state)
            np.testing.assert_allclose(
                single_site_marginal(state).entries,
                reduced_density_matrix(psi, 0).entries,
                atol=1e-12,
            )
            np.testing.assert_allclose(
                two_site_marginal(state).entries,
                reduced_density_matrix(psi, (0, 1)).entries,
                atol=1e-12,
            )

    def test_probe_marginal_exact_at_multiple_of_four(self):
        # The phase-free probe has an exactly maximally mixed one-site
        # marginal at N = 4, 8, 12, ... (and also at N = 6, but not N = 10).
        for n in (4, 8, 12):
            rho = single_site_marginal(triple_ghz_probe(n)).entries
            np.testing.assert_allclose(rho, np.eye(2) / 2, atol=1e-12)

    @pytest.mark.parametrize("n", [4, 6, 8, 10, 12])
    def test_admissible_deltas_exist_for_even_n(self, n):
        deltas = admissible_probe_deltas(n)
        probe = triple_ghz_probe(n, deltas)
        rho = single_site_marginal(probe).entries
        np.testing.assert_allclose(rho, np.eye(2) / 2, atol=1e-10)
        # Dense cross-check of the analytic marginal.
        dense = reduced_density_matrix(dense_statevector(probe), 0).entries
        np.testing.assert_allclose(dense, np.eye(2) / 2, atol=1e-10)

    def test_admissible_deltas_requires_even_n(self):
        with pytest.raises(ValueError):
            admissible_probe_deltas(5)
