"""Schmidt decomposition, entropies, POVM checks, and state sampling."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from entqldp import (
    entanglement_entropy,
    sample_state_with_entropy,
    schmidt_decompose,
    shannon_entropy,
    von_neumann_entropy,
)
from entqldp.states import (
    born_probabilities,
    check_density_operator,
    check_povm,
    partial_trace_a,
    partial_trace_b,
    projector,
    random_unitary,
)

LOG2 = np.log(2.0)


def random_state(rng, dim):
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return psi / np.linalg.norm(psi)


class TestSchmidt:
    def test_bell_state(self):
        psi = np.zeros(4, dtype=complex)
        psi[0] = psi[3] = 1.0 / np.sqrt(2.0)
        dec = schmidt_decompose(psi, 2, 2)
        assert_allclose(sorted(dec.coefficients), [0.5, 0.5], atol=1e-14)
        assert entanglement_entropy(psi, 2, 2) == pytest.approx(LOG2)

    def test_product_state_single_coefficient(self, rng):
        psi = np.kron(random_state(rng, 3), random_state(rng, 4))
        dec = schmidt_decompose(psi, 3, 4)
        assert dec.coefficients[0] == pytest.approx(1.0)
        assert entanglement_entropy(psi, 3, 4) == pytest.approx(0.0, abs=1e-12)

    def test_reconstruction(self, rng):
        """Sum_j sqrt(lam_j) |a_j> x |b_j> rebuilds the state up to
        global phase."""
        psi = random_state(rng, 12)
        dec = schmidt_decompose(psi, 3, 4)
        rebuilt = np.zeros(12, dtype=complex)
        for lam, a, b in zip(dec.coefficients, dec.basis_a.T, dec.basis_b.T):
            rebuilt += np.sqrt(lam) * np.kron(a, b)
        phase = np.vdot(rebuilt, psi)
        assert abs(abs(phase) - 1.0) < 1e-10
        assert_allclose(rebuilt * phase, psi, atol=1e-10)

    def test_coefficients_descending_and_normalized(self, rng):
        for _ in range(5):
            dec = schmidt_decompose(random_state(rng, 16), 4, 4)
            lam = dec.coefficients
            assert np.all(np.diff(lam) <= 1e-15)
            assert np.sum(lam) == pytest.approx(1.0)

    def test_coefficients_are_reduced_spectrum(self, rng):
        psi = random_state(rng, 8)
        dec = schmidt_decompose(psi, 2, 4)
        rho_a = partial_trace_b(projector(psi), 2, 4)
        eigs = np.sort(np.linalg.eigvalsh(rho_a))[::-1]
        assert_allclose(dec.coefficients, eigs[:2], atol=1e-12)


class TestEntropies:
    def test_shannon_uniform(self):
        assert shannon_entropy(np.full(4, 0.25)) == pytest.approx(np.log(4.0))

    def test_shannon_ignores_zeros(self):
        assert shannon_entropy([0.5, 0.5, 0.0]) == pytest.approx(LOG2)

    def test_von_neumann_matches_shannon_of_spectrum(self, rng):
        p = rng.dirichlet(np.ones(5))
        u = random_unitary(5, rng)
        rho = u @ np.diag(p) @ u.conj().T
        assert von_neumann_entropy(rho) == pytest.approx(shannon_entropy(p))

    def test_pure_state_zero_entropy(self, rng):
        rho = projector(random_state(rng, 6))
        assert von_neumann_entropy(rho) == pytest.approx(0.0, abs=1e-10)


class TestPartialTrace:
    def test_traces_agree_on_trace(self, rng):
        rho = projector(random_state(rng, 12))
        ra = partial_trace_b(rho, 3, 4)
        rb = partial_trace_a(rho, 3, 4)
        assert np.trace(ra) == pytest.approx(1.0)
        assert np.trace(rb) == pytest.approx(1.0)
        check_density_operator(ra)
        check_density_operator(rb)

    def test_product_input_factorizes(self, rng):
        pa = projector(random_state(rng, 3))
        pb = projector(random_state(rng, 4))
        rho = np.kron(pa, pb)
        assert_allclose(partial_trace_b(rho, 3, 4), pa, atol=1e-12)
        assert_allclose(partial_trace_a(rho, 3, 4), pb, atol=1e-12)


class TestPovm:
    def test_projective_povm_passes(self):
        eye = np.eye(3, dtype=complex)
        check_povm([np.outer(eye[i], eye[i]) for i in range(3)])

    def test_incomplete_povm_rejected(self):
        eye = np.eye(3, dtype=complex)
        with pytest.raises(ValueError):
            check_povm([np.outer(eye[0], eye[0])])

    def test_born_probabilities_sum_to_one(self, rng):
        rho = projector(random_state(rng, 4))
        u = random_unitary(4, rng)
        povm = [np.outer(u[:, k], u[:, k].conj()) for k in range(4)]
        p = born_probabilities(rho, povm)
        assert np.all(p >= -1e-12)
        assert np.sum(p) == pytest.approx(1.0)


class TestSampling:
    @pytest.mark.parametrize("s", [0.0, 0.3, 0.9, 1.2])
    def test_entropy_floor_met(self, s):
        for seed in range(8):
            psi = sample_state_with_entropy(4, 4, s, seed=seed)
            assert np.linalg.norm(psi) == pytest.approx(1.0)
            assert entanglement_entropy(psi, 4, 4) >= s - 1e-9

    def test_max_entanglement_uniform_schmidt(self):
        psi = sample_state_with_entropy(4, 4, np.log(4.0), seed=3)
        dec = schmidt_decompose(psi, 4, 4)
        assert_allclose(dec.coefficients, np.full(4, 0.25), atol=1e-9)

    def test_generator_and_int_seed_agree(self):
        a = sample_state_with_entropy(4, 4, 0.5, seed=11)
        b = sample_state_with_entropy(4, 4, 0.5,
                                      seed=np.random.default_rng(11))
        assert_allclose(a, b)

    def test_unequal_dims(self):
        psi = sample_state_with_entropy(2, 4, 0.5, seed=0)
        assert psi.shape == (8,)
        assert entanglement_entropy(psi, 2, 4) >= 0.5 - 1e-9
