"""Operator inequalities the closed forms rest on.

Three facts, probed directly on random instances:
  * Cauchy interlacing - compressing a Hermitian X to a subframe P
    (P^dag P = I) never raises the j-th largest eigenvalue.
  * von Neumann trace inequality - for PSD X, Y the alignment of
    eigenbases extremizes Tr(XY): anti-aligned <= Tr(XY) <= aligned.
  * Schur-Horn majorization - the diagonal of a Hermitian matrix is
    majorized by its spectrum.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from entqldp.states import random_unitary

SLACK = 1e-10


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2.0


def random_psd(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return a @ a.conj().T


def random_isometry(rng, n, k):
    u = random_unitary(n, rng)
    return u[:, :k]


class TestCauchyInterlacing:
    def test_random_compressions(self):
        rng = np.random.default_rng(41)
        for _ in range(60):
            n = int(rng.integers(3, 7))
            k = int(rng.integers(1, n))
            x = random_hermitian(rng, n)
            p = random_isometry(rng, n, k)
            outer = np.sort(np.linalg.eigvalsh(x))[::-1]
            inner = np.sort(np.linalg.eigvalsh(p.conj().T @ x @ p))[::-1]
            for j in range(k):
                assert inner[j] <= outer[j] + SLACK
                assert inner[j] >= outer[j + n - k] - SLACK

    def test_principal_submatrix(self):
        """Deleting the last row and column is compression to the first
        coordinates."""
        x = np.diag([3.0, 2.0, 1.0]).astype(complex)
        x[0, 2] = x[2, 0] = 0.5
        sub = np.linalg.eigvalsh(x[:2, :2])[::-1]
        full = np.linalg.eigvalsh(x)[::-1]
        assert sub[0] <= full[0] + 1e-15
        assert sub[1] >= full[2] - 1e-15


class TestVonNeumann:
    def test_two_sided_bounds(self):
        rng = np.random.default_rng(42)
        for _ in range(60):
            n = int(rng.integers(3, 7))
            x = random_psd(rng, n)
            y = random_psd(rng, n)
            sx = np.sort(np.linalg.eigvalsh(x))[::-1]
            sy = np.sort(np.linalg.eigvalsh(y))[::-1]
            inner = np.trace(x @ y).real
            assert inner <= np.dot(sx, sy) + SLACK
            assert inner >= np.dot(sx, sy[::-1]) - SLACK

    def test_aligned_bases_saturate_upper(self):
        rng = np.random.default_rng(43)
        u = random_unitary(4, rng)
        sx = np.array([4.0, 3.0, 2.0, 1.0])
        sy = np.array([0.4, 0.3, 0.2, 0.1])
        x = u @ np.diag(sx) @ u.conj().T
        y = u @ np.diag(sy) @ u.conj().T
        assert np.trace(x @ y).real == pytest.approx(np.dot(sx, sy))

    def test_anti_aligned_bases_saturate_lower(self):
        rng = np.random.default_rng(44)
        u = random_unitary(4, rng)
        sx = np.array([4.0, 3.0, 2.0, 1.0])
        sy = np.array([0.4, 0.3, 0.2, 0.1])
        x = u @ np.diag(sx) @ u.conj().T
        y = u @ np.diag(sy[::-1]) @ u.conj().T
        assert np.trace(x @ y).real == pytest.approx(np.dot(sx, sy[::-1]))


class TestSchurHorn:
    def test_diagonal_majorized_by_spectrum(self):
        rng = np.random.default_rng(45)
        for _ in range(60):
            n = int(rng.integers(3, 7))
            x = random_hermitian(rng, n)
            diag = np.sort(np.diag(x).real)[::-1]
            spec = np.sort(np.linalg.eigvalsh(x))[::-1]
            for k in range(1, n):
                assert np.sum(diag[:k]) <= np.sum(spec[:k]) + SLACK
            assert np.sum(diag) == pytest.approx(np.sum(spec))

    def test_fourier_basis_flattens_any_diagonal(self):
        """The uniform vector sits at the bottom of the majorization
        order: conjugating by the Fourier matrix reaches it from any
        spectrum."""
        spec = np.array([0.7, 0.2, 0.08, 0.02])
        f = np.exp(2j * np.pi * np.outer(np.arange(4), np.arange(4)) / 4) / 2
        flat = np.diag(f.conj().T @ np.diag(spec) @ f).real
        assert_allclose(flat, np.full(4, 0.25), atol=1e-12)
