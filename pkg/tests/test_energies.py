"""Closed-form privacy energies: Gibbs roots, phase regimes, bounds.

The frozen expected values in TestFrozenOracle were produced by an
independent SLSQP oracle (scipy.optimize.minimize on the simplex with the
entropy inequality constraint, 40 random restarts, ftol 1e-14); the same
oracle runs live in TestLiveOracle on seeded random spectra.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.optimize import minimize
from scipy.special import xlogy

from entqldp import (
    InfeasibleEntropyError,
    RegimeError,
    SpectrumPair,
    gibbs_weights,
    j_max,
    j_min_exact_max_entanglement,
    j_min_lower_bound,
    solve_gibbs_max,
    solve_gibbs_min,
)
from entqldp.energies import degeneracy_count
from entqldp.states import shannon_entropy

LOG4 = np.log(4.0)

PAIR_DISTINCT = SpectrumPair(np.array([0.4, 0.3, 0.2, 0.1]),
                             np.array([0.35, 0.30, 0.20, 0.15]))
PAIR_DEGENERATE = SpectrumPair(np.array([0.3, 0.3, 0.2, 0.2]),
                               np.array([0.4, 0.4, 0.1, 0.1]))


def slsqp_extremum(mu, s, sign, restarts=40, seed=0):
    """Constrained simplex extremum of sum(lam * mu) with H(lam) >= s."""
    mu = np.asarray(mu, dtype=float)
    n = len(mu)
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        res = minimize(
            lambda lam: -sign * float(np.dot(lam, mu)),
            rng.dirichlet(np.ones(n)),
            method="SLSQP",
            jac=lambda lam: -sign * mu,
            bounds=[(0.0, 1.0)] * n,
            constraints=[
                {"type": "eq", "fun": lambda lam: np.sum(lam) - 1.0},
                {"type": "ineq",
                 "fun": lambda lam: -np.sum(xlogy(lam, lam)) - s},
            ],
            options={"maxiter": 800, "ftol": 1e-14})
        if not res.success:
            continue
        value = float(np.dot(res.x, mu))
        if best is None or sign * value > sign * best:
            best = value
    assert best is not None, "SLSQP oracle never converged"
    return best


class TestSpectrumPair:
    def test_mu_is_aligned_product(self):
        assert_allclose(PAIR_DISTINCT.mu(), [0.14, 0.09, 0.04, 0.015])

    def test_mu_tilde_uses_smallest_beta(self):
        """The relaxed energies pin the B factor at beta_N; they are not
        the symmetrized products."""
        assert_allclose(PAIR_DISTINCT.mu_tilde(), [0.06, 0.045, 0.03, 0.015])
        assert not np.allclose(PAIR_DISTINCT.mu_tilde(),
                               PAIR_DISTINCT.alpha * PAIR_DISTINCT.beta)

    def test_rejects_ascending(self):
        with pytest.raises(ValueError):
            SpectrumPair(np.array([0.1, 0.9]), np.array([0.5, 0.5]))

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            SpectrumPair(np.array([1.0, 0.5]), np.array([1.0, 0.5, 0.2]))


class TestFrozenOracle:
    @pytest.mark.parametrize("s,expected", [
        (0.5, 0.131207827770676),
        (1.0, 0.113036672027196),
        (1.2, 0.100682766799686),
    ])
    def test_j_max_distinct(self, s, expected):
        value, regime, _ = j_max(PAIR_DISTINCT, s)
        assert value == pytest.approx(expected, abs=1e-12)
        assert regime.tag == "HighEntanglement"

    @pytest.mark.parametrize("s,expected", [
        (1.0, 0.023432498493778),
        (1.2, 0.027483697711099),
    ])
    def test_j_min_bound_distinct(self, s, expected):
        value, regime = j_min_lower_bound(PAIR_DISTINCT, s)
        assert value == pytest.approx(expected, abs=1e-12)
        assert regime.tag == "HighEntanglement"

    @pytest.mark.parametrize("s,expected", [
        (1.0, 0.110812575913574),
        (1.2, 0.099529746295755),
    ])
    def test_j_max_degenerate(self, s, expected):
        value, _, _ = j_max(PAIR_DEGENERATE, s)
        assert value == pytest.approx(expected, abs=1e-12)


class TestLiveOracle:
    def test_j_max_random_spectra(self):
        rng = np.random.default_rng(7)
        for _ in range(4):
            alpha = np.sort(rng.uniform(0.0, 1.0, 4))[::-1]
            beta = np.sort(rng.uniform(0.0, 1.0, 4))[::-1]
            pair = SpectrumPair(alpha / alpha.sum(), beta / beta.sum())
            for s in (0.9, 1.25):
                value, _, _ = j_max(pair, s)
                ref = slsqp_extremum(pair.mu(), s, sign=+1, restarts=15)
                assert value == pytest.approx(ref, abs=1e-9)

    def test_j_min_bound_random_spectra(self):
        rng = np.random.default_rng(8)
        for _ in range(4):
            alpha = np.sort(rng.uniform(0.1, 1.0, 4))[::-1]
            beta = np.sort(rng.uniform(0.1, 1.0, 4))[::-1]
            pair = SpectrumPair(alpha / alpha.sum(), beta / beta.sum())
            value, _ = j_min_lower_bound(pair, 1.1)
            ref = slsqp_extremum(pair.mu_tilde(), 1.1, sign=-1, restarts=15)
            assert value == pytest.approx(ref, abs=1e-9)


class TestRegimes:
    def test_vertex_below_threshold(self):
        """d_max = 2 for the degenerate pair, so every s <= log 2 returns
        the top product eigenvalue with a vertex witness."""
        for s in (0.0, 0.3, np.log(2.0)):
            value, regime, witness = j_max(PAIR_DEGENERATE, s)
            assert value == pytest.approx(0.12)
            assert regime.tag == "LowEntanglement"
            assert regime.threshold == pytest.approx(np.log(2.0))
            assert_allclose(witness.weights, [0.5, 0.5, 0.0, 0.0])

    def test_distinct_spectrum_has_zero_threshold(self):
        _, regime, witness = j_max(PAIR_DISTINCT, 0.0)
        assert regime.threshold == pytest.approx(0.0)
        assert_allclose(witness.weights, [1.0, 0.0, 0.0, 0.0])

    def test_monotone_decreasing_in_s(self):
        grid = np.linspace(0.0, LOG4, 30)
        values = [j_max(PAIR_DISTINCT, s)[0] for s in grid]
        assert np.all(np.diff(values) <= 1e-12)

    def test_max_entanglement_value(self):
        value, regime, witness = j_max(PAIR_DISTINCT, LOG4)
        assert regime.tag == "MaxEntanglement"
        assert value == pytest.approx(np.mean(PAIR_DISTINCT.mu()))
        assert_allclose(witness.weights, np.full(4, 0.25), atol=1e-12)

    def test_min_bound_monotone_increasing_in_s(self):
        grid = np.linspace(0.0, LOG4, 30)
        values = [j_min_lower_bound(PAIR_DISTINCT, s)[0] for s in grid]
        assert np.all(np.diff(values) >= -1e-12)


class TestGibbsSolver:
    def test_entropy_root_is_tight(self):
        mu = PAIR_DISTINCT.mu()
        for s in (0.8, 1.0, 1.3):
            sol = solve_gibbs_max(mu, s)
            assert abs(sol.entropy - s) <= 1e-11
            assert sol.gamma > 0.0
            assert_allclose(sol.weights, gibbs_weights(mu, sol.gamma),
                            atol=1e-15)
            assert sol.energy == pytest.approx(np.dot(sol.weights, mu))

    def test_weights_ordered_like_energies(self):
        sol = solve_gibbs_max(PAIR_DISTINCT.mu(), 1.0)
        assert np.all(np.diff(sol.weights) <= 0.0)

    def test_gamma_shrinks_with_entropy(self):
        mu = PAIR_DISTINCT.mu()
        gammas = [solve_gibbs_max(mu, s).gamma for s in (0.7, 1.0, 1.3)]
        assert gammas[0] > gammas[1] > gammas[2]

    def test_below_threshold_raises_regime_error(self):
        with pytest.raises(RegimeError):
            solve_gibbs_max(PAIR_DEGENERATE.mu(), 0.3)

    def test_entropy_above_log_n_raises(self):
        with pytest.raises(InfeasibleEntropyError):
            solve_gibbs_max(PAIR_DISTINCT.mu(), LOG4 + 1e-6)

    def test_max_entanglement_uniform(self):
        sol = solve_gibbs_max(PAIR_DISTINCT.mu(), LOG4)
        assert sol.gamma == 0.0
        assert_allclose(sol.weights, np.full(4, 0.25))

    def test_min_solver_is_reflected_max(self):
        """Minimizing sum(lam * e) is maximizing against -e; the energy is
        reported for the original sign."""
        mt = PAIR_DISTINCT.mu_tilde()
        lo = solve_gibbs_min(mt, 1.0)
        hi = solve_gibbs_max(-mt, 1.0)
        assert lo.gamma == pytest.approx(hi.gamma)
        assert_allclose(lo.weights, hi.weights)
        assert lo.energy == pytest.approx(np.dot(lo.weights, mt))
        assert np.all(np.diff(lo.weights) >= 0.0)

    def test_gibbs_weights_shift_invariant(self):
        mu = np.array([5.0, 3.0, 1.0])
        assert_allclose(gibbs_weights(mu, 2.0),
                        gibbs_weights(mu - 4.0, 2.0), atol=1e-15)

    def test_entropy_of_weights_matches_shannon(self):
        sol = solve_gibbs_max(PAIR_DISTINCT.mu(), 1.1)
        assert sol.entropy == pytest.approx(shannon_entropy(sol.weights))


class TestDegeneracy:
    def test_exact_ties(self):
        assert degeneracy_count(np.array([0.12, 0.12, 0.02, 0.02]),
                                extremal="max") == 2
        assert degeneracy_count(np.array([0.12, 0.12, 0.02, 0.02]),
                                extremal="min") == 2

    def test_near_ties_within_relative_tolerance(self):
        values = np.array([0.5, 0.5 * (1.0 - 1e-10), 0.1])
        assert degeneracy_count(values, extremal="max") == 2

    def test_distinct(self):
        assert degeneracy_count(PAIR_DISTINCT.mu(), extremal="max") == 1


class TestMinExact:
    def test_anti_aligned_mean(self):
        assert j_min_exact_max_entanglement(PAIR_DISTINCT) == pytest.approx(
            0.05375)

    def test_exceeds_relaxed_bound_for_nonconstant_spectra(self):
        exact = j_min_exact_max_entanglement(PAIR_DISTINCT)
        relaxed, _ = j_min_lower_bound(PAIR_DISTINCT, LOG4)
        assert exact > relaxed + 1e-4

    def test_flat_spectrum_closes_the_gap(self):
        flat = SpectrumPair(np.full(4, 0.25), np.full(4, 0.25))
        exact = j_min_exact_max_entanglement(flat)
        relaxed, _ = j_min_lower_bound(flat, LOG4)
        assert exact == pytest.approx(relaxed)


def test_out_of_range_entropy_rejected():
    with pytest.raises(ValueError):
        j_max(PAIR_DISTINCT, -0.1)
    with pytest.raises(ValueError):
        j_max(PAIR_DISTINCT, LOG4 + 0.1)
