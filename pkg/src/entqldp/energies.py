"""Closed-form extremal privacy energies with entropy-constrained Gibbs weights.

Given the descending eigenvalue vectors alpha, beta of the two local induced
observables, the extremal values of the bilinear energy <psi|K_a (x) K_b|psi>
over bipartite pure states with entanglement entropy >= s are governed by the
product spectra

    mu_j       = alpha_j * beta_j          (aligned, for the maximum)
    mu_tilde_j = alpha_j * beta_N          (B-side relaxed, for the lower bound)

and exhibit a phase transition at s = log d, where d is the degeneracy of the
relevant extremal product:

* below the threshold the extreme value is the extremal product itself,
  attained on weight vectors spread uniformly over the degenerate block;
* above it the optimal weights take a Gibbs form lambda_j ~ exp(+/- gamma mu_j)
  with gamma the root of the entropy equation H(lambda(gamma)) = s.

The entropy equation is solved by bisection: H(lambda(gamma)) is strictly
decreasing in gamma (dH/dgamma = -gamma Var(mu) <= 0) from log N at gamma = 0
down to log d as gamma grows.
"""

from dataclasses import dataclass

import numpy as np

from .states import shannon_entropy

DEGENERACY_REL_TOL = 1e-9
ENTROPY_EQ_TOL = 1e-12
GAMMA_CAP = 1e8

LOW_ENTANGLEMENT = "LowEntanglement"
HIGH_ENTANGLEMENT = "HighEntanglement"
MAX_ENTANGLEMENT = "MaxEntanglement"


class RegimeError(ValueError):
    """Raised when the Gibbs solver is called below the phase threshold,
    where the closed constant applies instead."""


class InfeasibleEntropyError(ValueError):
    """Raised when the requested entropy exceeds log N."""


@dataclass(frozen=True)
class SpectrumPair:
    """Descending, nonnegative eigenvalue vectors of the two local observables."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        a = _check_spectrum(self.alpha, "alpha")
        b = _check_spectrum(self.beta, "beta")
        if len(a) != len(b):
            raise ValueError(
                f"spectra must have equal length, got {len(a)} and {len(b)}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def dim(self):
        return len(self.alpha)

    def mu(self):
        """Aligned products mu_j = alpha_j beta_j (descending)."""
        return self.alpha * self.beta

    def mu_tilde(self):
        """Relaxed products mu_tilde_j = alpha_j beta_N (descending)."""
        return self.alpha * self.beta[-1]


def _check_spectrum(values, name):
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or len(v) == 0:
        raise ValueError(f"{name} must be a nonempty 1-D vector")
    if np.any(v < -1e-12):
        raise ValueError(f"{name} has a negative eigenvalue: {v.min()}")
    if np.any(np.diff(v) > 1e-12):
        raise ValueError(f"{name} must be sorted descending")
    return np.clip(v, 0.0, None)


@dataclass(frozen=True)
class PhaseRegime:
    """Which side of the phase transition a query fell on.

    `threshold` is log(d) for the degeneracy d of the relevant extremal
    product eigenvalue.
    """

    tag: str
    threshold: float


@dataclass(frozen=True)
class GibbsSolution:
    """Root of the entropy equation and the Gibbs weights it induces.

    Attributes
    ----------
    gamma : float
        Nonnegative inverse-temperature-like multiplier root.
    log_partition : float
        log Z(gamma) = log sum_j exp(gamma e_j), kept in log form because
        the partition value itself overflows for extreme gamma.
    weights : ndarray
        lambda_j = exp(gamma e_j) / Z(gamma).
    entropy : float
        H(weights) in nats; equals the requested s at the root.
    energy : float
        sum_j e_j lambda_j, for the energy vector e the solve ran on.
    """

    gamma: float
    log_partition: float
    weights: np.ndarray
    entropy: float
    energy: float

    @property
    def partition(self):
        return float(np.exp(self.log_partition))


@dataclass(frozen=True)
class VertexSolution:
    """Below-threshold witness: uniform weights on the degenerate extremal block."""

    weights: np.ndarray
    energy: float


def degeneracy_count(values, extremal, rel_tol=DEGENERACY_REL_TOL):
    """Multiplicity of the largest (or smallest) entry of a descending vector.

    Entries count as degenerate when they lie within rel_tol * spread of the
    extremal entry, where spread = values[0] - values[-1]; when the spread
    collapses below 1e-14 the tolerance falls back to the absolute rel_tol,
    which makes an all-equal vector fully degenerate.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or len(v) == 0:
        raise ValueError("degeneracy_count needs a nonempty vector")
    if np.any(np.diff(v) > 1e-12):
        raise ValueError("degeneracy_count expects a descending vector")
    if extremal not in ("max", "min"):
        raise ValueError(f"extremal must be 'max' or 'min', got {extremal!r}")
    spread = v[0] - v[-1]
    tol = rel_tol * spread if spread >= 1e-14 else rel_tol
    if extremal == "max":
        return int(np.sum(v >= v[0] - tol))
    return int(np.sum(v <= v[-1] + tol))


def gibbs_weights(energies, gamma):
    """Gibbs distribution exp(gamma e_j) / Z, evaluated in shifted form.

    The shift by max(gamma * e) keeps every exponent <= 0, so the weights
    are overflow-safe for any gamma.
    """
    e = np.asarray(energies, dtype=float)
    logits = gamma * e
    shift = logits.max()
    w = np.exp(logits - shift)
    return w / w.sum()


def _log_partition(energies, gamma):
    logits = gamma * np.asarray(energies, dtype=float)
    shift = logits.max()
    return float(shift + np.log(np.sum(np.exp(logits - shift))))


def solve_gibbs_max(mu, s, rel_tol=DEGENERACY_REL_TOL):
    """Solve the entropy equation for the maximizing Gibbs weights.

    Finds gamma >= 0 with H(lambda(gamma)) = s for lambda_j proportional to
    exp(gamma mu_j). Valid strictly above the phase threshold:
    log d_max < s <= log N. At s = log N the root is gamma = 0 (uniform
    weights). H is strictly decreasing in gamma, so plain bisection applies
    after doubling an upper bracket from 1 (capped at 1e8).

    Raises
    ------
    RegimeError
        If s <= log d_max (use the closed vertex constant instead).
    InfeasibleEntropyError
        If s > log N.
    """
    mu = np.asarray(mu, dtype=float)
    n = len(mu)
    log_n = np.log(n)
    if s > log_n + 1e-12:
        raise InfeasibleEntropyError(f"entropy target {s} exceeds log N = {log_n}")
    if s >= log_n - 1e-12:
        # gamma = 0 is always a root at s = log N, including for constant mu
        # where any gamma solves the equation and 0 is the canonical choice.
        w = np.full(n, 1.0 / n)
        return GibbsSolution(gamma=0.0, log_partition=float(np.log(n)),
                             weights=w, entropy=log_n,
                             energy=float(mu.mean()))
    d_max = degeneracy_count(np.sort(mu)[::-1], "max", rel_tol)
    if s <= np.log(d_max) + 1e-12:
        raise RegimeError(
            f"entropy target {s} is at or below the threshold log {d_max}; "
            "the maximum is the closed vertex constant")

    def entropy_at(gamma):
        return shannon_entropy(gibbs_weights(mu, gamma))

    hi = 1.0
    while entropy_at(hi) > s and hi < GAMMA_CAP:
        hi *= 2.0
    hi = min(hi, GAMMA_CAP)
    lo = 0.0
    gamma = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if abs(entropy_at(mid) - s) <= ENTROPY_EQ_TOL:
            gamma = mid
            break
        if entropy_at(mid) > s:
            lo = mid
        else:
            hi = mid
    else:
        gamma = 0.5 * (lo + hi)
    w = gibbs_weights(mu, gamma)
    return GibbsSolution(gamma=gamma, log_partition=_log_partition(mu, gamma),
                         weights=w, entropy=shannon_entropy(w),
                         energy=float(np.dot(mu, w)))


def solve_gibbs_min(mu, s, rel_tol=DEGENERACY_REL_TOL):
    """Entropy-equation solve for the minimizing Gibbs weights.

    Minimizing sum mu_j lambda_j under H(lambda) >= s is the same program as
    maximizing with energies -mu, so the weights are lambda_j proportional
    to exp(-gamma mu_j): the minus-sign convention. Valid for
    log d_min < s <= log N, with d_min the degeneracy of the smallest mu.
    """
    mu = np.asarray(mu, dtype=float)
    flipped = solve_gibbs_max(-mu, s, rel_tol=rel_tol)
    return GibbsSolution(gamma=flipped.gamma,
                         log_partition=flipped.log_partition,
                         weights=flipped.weights,
                         entropy=flipped.entropy,
                         energy=float(np.dot(mu, flipped.weights)))


def _validate_entropy_range(s, n):
    log_n = np.log(n)
    if s < -1e-12 or s > log_n + 1e-12:
        raise ValueError(f"entropy level {s} outside [0, log {n}]")
    return min(max(s, 0.0), log_n)


def j_max(spec, s, rel_tol=DEGENERACY_REL_TOL):
    """Closed-form maximal privacy energy over states with entropy >= s.

    Returns (value, regime, witness). Below the threshold s <= log d_max the
    value is mu_1 = sigma_max(K_a (x) K_b), witnessed by uniform weights on
    the top-degenerate block; above it the value is the Gibbs energy of the
    entropy-equation root, strictly decreasing in s down to mean(mu) at
    s = log N.
    """
    n = spec.dim
    s = _validate_entropy_range(s, n)
    mu = spec.mu()
    d_max = degeneracy_count(mu, "max", rel_tol)
    threshold = float(np.log(d_max))
    log_n = np.log(n)
    if s >= log_n - 1e-12:
        sol = solve_gibbs_max(mu, s, rel_tol)
        tag = MAX_ENTANGLEMENT
        return sol.energy, PhaseRegime(tag, threshold), sol
    if s <= threshold + 1e-12:
        weights = np.zeros(n)
        weights[:d_max] = 1.0 / d_max
        witness = VertexSolution(weights=weights,
                                 energy=float(np.dot(mu, weights)))
        return float(mu[0]), PhaseRegime(LOW_ENTANGLEMENT, threshold), witness
    sol = solve_gibbs_max(mu, s, rel_tol)
    return sol.energy, PhaseRegime(HIGH_ENTANGLEMENT, threshold), sol


def j_min_lower_bound(spec, s, rel_tol=DEGENERACY_REL_TOL):
    """Relaxed lower bound on the minimal privacy energy at entropy >= s.

    Uses the B-side relaxation mu_tilde_j = alpha_j beta_N. Returns
    (value, regime):

    * s <= log d_min: the bound is mu_tilde_N = sigma_min(K_a (x) K_b)
      (exact there);
    * log d_min < s < log N: the Gibbs-minimization value with weights
      proportional to exp(-gamma mu_tilde_j), strictly above mu_tilde_N;
    * s = log N: the relaxed value at the forced uniform weights,
      mean(mu_tilde). The exact minimum at maximal entanglement is the
      anti-aligned average from j_min_exact_max_entanglement, reported
      separately because the relaxation is not tight there.
    """
    n = spec.dim
    s = _validate_entropy_range(s, n)
    mu_t = spec.mu_tilde()
    d_min = degeneracy_count(mu_t, "min", rel_tol)
    threshold = float(np.log(d_min))
    log_n = np.log(n)
    if s >= log_n - 1e-12:
        return float(mu_t.mean()), PhaseRegime(MAX_ENTANGLEMENT, threshold)
    if s <= threshold + 1e-12:
        return float(mu_t[-1]), PhaseRegime(LOW_ENTANGLEMENT, threshold)
    sol = solve_gibbs_min(mu_t, s, rel_tol)
    return sol.energy, PhaseRegime(HIGH_ENTANGLEMENT, threshold)


def j_min_exact_max_entanglement(spec):
    """Exact minimal energy at s = log N: the anti-aligned average
    (1/N) sum_j alpha_j beta_{N-j+1}."""
    return float(np.mean(spec.alpha * spec.beta[::-1]))
