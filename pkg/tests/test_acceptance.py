"""Acceptance gate: every correctness criterion at full scale.

Each test runs one criterion exactly as the `selftest --level full`
battery does (same instance counts, same stated tolerances) and fails
with the criterion's own diagnostic line. Run with -v for one PASS/FAIL
line per criterion.
"""

import time

import pytest

from entqldp import selftest


def check(result):
    print(f"{'PASS' if result.passed else 'FAIL'} "
          f"{result.name}: {result.detail}")
    assert result.passed, f"{result.name}: {result.detail}"


def test_criterion_01_plateau_value():
    """epsilon_upper = 2 log 3 on s in {0, 0.2, 0.4, 0.69}, tol 1e-4."""
    check(selftest.criterion_plateau_value())


def test_criterion_02_high_regime_curve():
    """epsilon_upper(log 4) = log(5/2) +- 1e-4 and strict decrease on 20
    grid points in (log 2, log 4]."""
    check(selftest.criterion_high_regime_curve(grid=20))


def test_criterion_03_threshold_continuity():
    """|eps(log 2 - 1e-6) - eps(log 2 + 1e-6)| <= 1e-3."""
    check(selftest.criterion_threshold_continuity())


def test_criterion_04_privatization():
    """(0, 1/2) mechanism: +inf for s <= log 2; log 3 +- 1e-4 at log 4."""
    check(selftest.criterion_privatization())


def test_criterion_05_oracle_agreement():
    """Optimizer max matches closed-form j_max within 1e-6 relative on 30
    random spectra pairs x 4 entropy levels, within 10 minutes."""
    start = time.time()
    result = selftest.criterion_oracle_agreement(instances=30)
    elapsed = time.time() - start
    check(result)
    assert elapsed <= 600.0, f"oracle agreement took {elapsed:.0f} s"


def test_criterion_06_min_exactness():
    """At s = log N the min optimizer reproduces the anti-aligned mean
    within 1e-6 and strictly exceeds the relaxed bound when it is loose."""
    check(selftest.criterion_min_exactness(instances=30))


def test_criterion_07_monte_carlo_sandwich():
    """500 sampled states per (mechanism, s) cell stay inside
    [j_min_bound - 1e-8, j_max + 1e-8] on a 3 x 4 grid."""
    check(selftest.criterion_monte_carlo_sandwich(samples=500))


def test_criterion_08_kkt_certificate():
    """Gibbs-witness KKT residuals <= 1e-8 and xi = 1/gamma within 1e-6
    relative."""
    check(selftest.criterion_kkt_certificate())


def test_criterion_09_gradient_correctness():
    """Euclidean gradients match central finite differences within 1e-6
    relative at 20 random interior points."""
    check(selftest.criterion_gradient_check(points=20))


def test_criterion_10_lemma_property_suite():
    """Interlacing, two-sided von Neumann, and majorization hold on 200
    random instances each with 1e-10 slack."""
    check(selftest.criterion_lemma_suite(instances=200))


def test_criterion_11_empirical_dp_soundness():
    """Exact Born log-ratios never exceed the reported epsilon by more
    than 1e-8 across 500 state pairs per configuration."""
    check(selftest.criterion_empirical_soundness(trials=500))


@pytest.mark.parametrize("level,budget", [("quick", 60.0)])
def test_selftest_quick_within_budget(level, budget):
    """The bundled quick battery stays inside its one-minute budget and
    passes end to end."""
    start = time.time()
    results = selftest.run(level)
    elapsed = time.time() - start
    for result in results:
        assert result.passed, f"{result.name}: {result.detail}"
    assert elapsed <= budget, f"quick selftest took {elapsed:.0f} s"
