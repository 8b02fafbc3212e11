import math

import numpy as np
import pytest

from magfim import (
    LogComplex,
    ProductStateSuperposition,
    apply_local_unitary,
    dense_statevector,
    ghz_state,
    inserted_sum_overlap,
    local_generator,
    overlap,
    pauli_string_expectation,
    site_unitary,
    triple_ghz_probe,
)
from magfim.operators import apply_on_all_sites, apply_on_site
from magfim.probes import dense_amplitudes

from conftest import SIGMA


def product_state(n, local, weight=1.0):
    local = np.asarray(local, dtype=complex)
    local = local / np.linalg.norm(local)
    normalized = abs(abs(weight) - 1.0) < 1e-12
    return ProductStateSuperposition(n, [weight], [local], normalized=normalized)


class TestLogComplex:
    def test_round_trip(self):
        for z in (1.0 + 2.0j, -3.5j, 0.25, -1e-280 + 1e-290j):
            back = LogComplex.from_complex(z).to_complex()
            assert abs(back - z) <= 1e-12 * abs(z)

    def test_zero(self):
        zero = LogComplex.from_complex(0.0)
        assert zero.log_magnitude == -math.inf
        assert zero.to_complex() == 0.0
        assert (zero * LogComplex.from_complex(5.0)).to_complex() == 0.0

    def test_long_product_of_inverse_sqrt_two(self):
        factor = LogComplex.from_complex(1 / np.sqrt(2))
        acc = LogComplex(0.0, 0.0)
        for _ in range(10_000):
            acc = acc * factor
        want = -5000.0 * math.log(2.0)
        assert abs(acc.log_magnitude - want) <= 1e-9 * abs(want)

    def test_power_tracks_phase_linearly(self):
        base = LogComplex.from_complex(0.5 * np.exp(0.3j))
        powered = base.power(1000)
        assert powered.phase == pytest.approx(300.0)
        assert powered.log_magnitude == pytest.approx(1000 * math.log(0.5))

    def test_sum_mixes_scales(self):
        parts = [LogComplex.from_complex(z) for z in (1.0, 1e-200, -0.25j)]
        assert LogComplex.sum(parts) == pytest.approx(1.0 - 0.25j)


class TestOverlap:
    def test_ghz_self_overlap(self):
        g = ghz_state(3, 7)
        assert overlap(g, g) == pytest.approx(1.0, abs=1e-13)

    def test_zero_vs_plus_product(self):
        n = 100
        a = product_state(n, [1.0, 0.0])
        b = product_state(n, [1.0, 1.0])
        got = overlap(a, b)
        assert got.real == pytest.approx(2.0 ** (-n / 2), rel=1e-12)
        assert abs(got.imag) <= 1e-25

    def test_cross_direction_ghz_matches_dense(self):
        a = ghz_state(1, 8)
        b = ghz_state(3, 8)
        dense = dense_amplitudes(a).conj() @ dense_amplitudes(b)
        assert overlap(a, b) == pytest.approx(dense, abs=1e-12)

    def test_site_count_mismatch(self):
        with pytest.raises(ValueError):
            overlap(ghz_state(1, 3), ghz_state(1, 4))


class TestApplyLocalUnitary:
    def test_identity(self):
        g = ghz_state(2, 5)
        h = apply_local_unitary(g, np.eye(2))
        np.testing.assert_allclose(h.local_states, g.local_states, atol=1e-15)

    def test_z_rotation_on_ghz_matches_dense(self):
        n = 6
        phi3 = 0.37
        u = site_unitary((0.0, 0.0, phi3))
        g = ghz_state(3, n)
        engine = dense_amplitudes(apply_local_unitary(g, u))
        dense = apply_on_all_sites(u, dense_amplitudes(g), n)
        np.testing.assert_allclose(engine, dense, atol=1e-13)

    def test_norm_preserved(self):
        probe = triple_ghz_probe(10)
        u = site_unitary((0.2, -0.1, 0.4))
        assert apply_local_unitary(probe, u).norm() == pytest.approx(1.0, abs=1e-12)

    def test_overlap_invariance(self):
        a = triple_ghz_probe(12)
        b = ghz_state(2, 12)
        u = site_unitary((0.3, 0.2, -0.5))
        before = overlap(a, b)
        after = overlap(apply_local_unitary(a, u), apply_local_unitary(b, u))
        assert abs(after - before) <= 1e-11


class TestPauliStringExpectation:
    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    def test_ghz_z_even_n(self, n):
        assert pauli_string_expectation(ghz_state(3, n), 3) == pytest.approx(1.0, abs=1e-13)

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 9])
    def test_ghz_z_under_x_string(self, n):
        # The x string swaps the two GHZ branches, so the expectation is one
        # at every N.
        assert pauli_string_expectation(ghz_state(3, n), 1) == pytest.approx(1.0, abs=1e-13)

    def test_probe_matches_dense(self):
        n = 8
        probe = triple_ghz_probe(n)
        dense_vec = dense_amplitudes(probe)
        flipped = apply_on_all_sites(SIGMA[2], dense_vec, n)
        want = float(np.real(dense_vec.conj() @ flipped))
        assert pauli_string_expectation(probe, 2) == pytest.approx(want, abs=1e-10)


class TestInsertedSumOverlap:
    def test_x_insertion_on_zero_product(self):
        state = product_state(6, [1.0, 0.0])
        assert inserted_sum_overlap(state, state, SIGMA[1]) == pytest.approx(0.0, abs=1e-14)

    def test_z_insertion_counts_sites(self):
        n = 9
        state = product_state(n, [1.0, 0.0])
        assert inserted_sum_overlap(state, state, SIGMA[3]) == pytest.approx(n, abs=1e-12)

    def test_probe_generator_matches_dense(self):
        n = 8
        phi = (1e-4, 2e-4, 3e-4)
        probe = triple_ghz_probe(n)
        a2 = local_generator(phi, 2).entries
        dense_vec = dense_amplitudes(probe)
        summed = np.zeros_like(dense_vec)
        for site in range(n):
            summed += apply_on_site(a2, dense_vec, n, site)
        want = complex(dense_vec.conj() @ summed)
        got = inserted_sum_overlap(probe, probe, a2)
        assert got == pytest.approx(want, abs=1e-10)

    def test_orthogonal_terms_vanish_for_two_or_more_sites(self):
        a = product_state(3, [1.0, 0.0])
        b = product_state(3, [0.0, 1.0])
        assert inserted_sum_overlap(a, b, SIGMA[1]) == 0.0

    def test_single_site_reduces_to_matrix_element(self):
        a = product_state(1, [1.0, 0.0])
        b = product_state(1, [0.0, 1.0])
        assert inserted_sum_overlap(a, b, SIGMA[1]) == pytest.approx(1.0, abs=1e-14)


class TestEngineDenseEquivalence:
    @pytest.mark.parametrize("n", [4, 6, 8, 10, 12])
    def test_overlap_expectation_and_insertion(self, n):
        phi = (0.12, -0.07, 0.21)
        probe = triple_ghz_probe(n)
        target = ghz_state(2, n, np.pi)
        u = site_unitary(phi)
        evolved = apply_local_unitary(probe, u)

        dense_probe = apply_on_all_sites(u, dense_amplitudes(probe), n)
        dense_target = dense_amplitudes(target)

        got = overlap(target, evolved)
        want = complex(dense_target.conj() @ dense_probe)
        assert got == pytest.approx(want, abs=1e-9)

        got = pauli_string_expectation(evolved, 1)
        flipped = apply_on_all_sites(SIGMA[1], dense_probe, n)
        assert got == pytest.approx(float(np.real(dense_probe.conj() @ flipped)), abs=1e-9)

        a1 = local_generator(phi, 1).entries
        summed = np.zeros_like(dense_probe)
        for site in range(n):
            summed += apply_on_site(a1, dense_probe, n, site)
        got = inserted_sum_overlap(target, evolved, a1)
        assert got == pytest.approx(complex(dense_target.conj() @ summed), abs=1e-9)
