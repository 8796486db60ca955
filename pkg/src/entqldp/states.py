"""Pure states, density operators, Schmidt decomposition, entropies, POVMs.

Conventions used throughout the package:

* All entropies are in nats (natural logarithm).
* Bipartite state vectors are indexed so that amplitude (i, k) of the
  A-system basis state i and B-system basis state k sits at flat index
  i * dimB + k, i.e. the reshape of psi to (dimA, dimB) is the amplitude
  matrix.
* Schmidt coefficients are the *squared* singular values of that amplitude
  matrix, zero-padded to length min(dimA, dimB) and sorted descending.
* State equality is global-phase insensitive: compare projectors, never
  amplitude vectors.
"""

from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-12
NORM_TOL = 1e-12


def as_state_vector(psi):
    """Validate and return a normalized complex state vector.

    Raises ValueError if psi is not 1-D or not normalized to 1e-12.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValueError(f"state vector must be 1-D, got shape {psi.shape}")
    if not np.all(np.isfinite(psi.view(float))):
        raise ValueError("state vector has non-finite entries")
    norm_sq = float(np.vdot(psi, psi).real)
    if abs(norm_sq - 1.0) > 1e-10:
        raise ValueError(f"state vector not normalized: ||psi||^2 = {norm_sq}")
    return psi


def check_density_operator(rho):
    """Validate a density operator: Hermitian, PSD, unit trace.

    Returns rho as a complex ndarray. Tolerances: Hermiticity 1e-12
    (max elementwise), min eigenvalue >= -1e-10, |Tr - 1| <= 1e-12.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density operator must be square, got shape {rho.shape}")
    herm_err = np.max(np.abs(rho - rho.conj().T))
    if herm_err > 1e-10:
        raise ValueError(f"density operator not Hermitian: max |rho - rho^dag| = {herm_err}")
    trace_err = abs(np.trace(rho).real - 1.0) + abs(np.trace(rho).imag)
    if trace_err > 1e-10:
        raise ValueError(f"density operator trace differs from 1 by {trace_err}")
    min_eig = float(np.linalg.eigvalsh(rho)[0])
    if min_eig < -PSD_TOL:
        raise ValueError(f"density operator not PSD: min eigenvalue {min_eig}")
    return rho


def projector(psi):
    """Rank-one density operator |psi><psi| of a normalized state vector."""
    psi = as_state_vector(psi)
    return np.outer(psi, psi.conj())


def shannon_entropy(p):
    """Shannon entropy of a probability vector in nats, with 0 log 0 := 0.

    Entries in [-1e-10, 0) are clamped to 0; more negative entries are a
    validation failure.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p < -PSD_TOL):
        raise ValueError(f"probability vector has negative entry {p.min()}")
    p = np.clip(p, 0.0, None)
    nz = p[p > 0.0]
    return float(-np.sum(nz * np.log(nz)))


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Schmidt form of a bipartite pure state.

    Attributes
    ----------
    rank : int
        Number of Schmidt coefficients above 1e-12.
    coefficients : ndarray
        lambda_j, length min(dimA, dimB), descending, summing to 1.
    basis_a, basis_b : ndarray
        Square unitaries whose first `len(coefficients)` columns are the
        local Schmidt vectors |j_A>, |j_B>: the source state equals
        sum_j sqrt(lambda_j) |j_A> (x) |j_B> up to global phase.
    """

    rank: int
    coefficients: np.ndarray
    basis_a: np.ndarray
    basis_b: np.ndarray

    def reconstruct(self):
        """Rebuild the state vector sum_j sqrt(lambda_j) |j_A> (x) |j_B>."""
        n = len(self.coefficients)
        psi = np.zeros(self.basis_a.shape[0] * self.basis_b.shape[0], dtype=complex)
        for j in range(n):
            if self.coefficients[j] <= 0.0:
                continue
            psi += np.sqrt(self.coefficients[j]) * np.kron(
                self.basis_a[:, j], self.basis_b[:, j])
        return psi


def schmidt_decompose(psi, dim_a, dim_b):
    """Schmidt-decompose a bipartite pure state.

    Parameters
    ----------
    psi : array-like
        Normalized state vector of length dim_a * dim_b.
    dim_a, dim_b : int
        Local dimensions.

    Returns
    -------
    SchmidtDecomposition
        Coefficients are squared singular values of the (dim_a, dim_b)
        amplitude matrix, descending, zero-padded to min(dim_a, dim_b).
    """
    psi = as_state_vector(psi)
    if psi.shape[0] != dim_a * dim_b:
        raise ValueError(
            f"state dimension {psi.shape[0]} does not equal {dim_a} * {dim_b}")
    amp = psi.reshape(dim_a, dim_b)
    u, sing, vh = np.linalg.svd(amp, full_matrices=True)
    n = min(dim_a, dim_b)
    lam = np.zeros(n)
    lam[: len(sing)] = sing ** 2
    # SVD returns singular values descending already; renormalize the tiny
    # float drift so the coefficients sum to 1 exactly within 1e-15.
    lam /= lam.sum()
    rank = int(np.sum(lam > 1e-12))
    # Column j of basis_b is row j of vh (no conjugate), so that
    # amp[i, k] = sum_j u[i, j] * s_j * basis_b[k, j].
    return SchmidtDecomposition(rank=rank, coefficients=lam,
                                basis_a=u, basis_b=vh.T)


def partial_trace_b(rho, dim_a, dim_b):
    """Reduced operator on A: rho_A[i, j] = sum_k rho[(i,k), (j,k)]."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dim_a * dim_b, dim_a * dim_b):
        raise ValueError(
            f"operator shape {rho.shape} does not match dims ({dim_a}, {dim_b})")
    return np.trace(rho.reshape(dim_a, dim_b, dim_a, dim_b), axis1=1, axis2=3)


def partial_trace_a(rho, dim_a, dim_b):
    """Reduced operator on B: rho_B[k, l] = sum_i rho[(i,k), (i,l)]."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dim_a * dim_b, dim_a * dim_b):
        raise ValueError(
            f"operator shape {rho.shape} does not match dims ({dim_a}, {dim_b})")
    return np.trace(rho.reshape(dim_a, dim_b, dim_a, dim_b), axis1=0, axis2=2)


def von_neumann_entropy(rho):
    """Von Neumann entropy -Tr(rho log rho) in nats.

    Eigenvalues in [-1e-10, 0) are clamped to 0; more negative eigenvalues
    raise (the operator fails the PSD invariant).
    """
    rho = np.asarray(rho, dtype=complex)
    eigs = np.linalg.eigvalsh(rho)
    if eigs[0] < -PSD_TOL:
        raise ValueError(f"operator not PSD: min eigenvalue {eigs[0]}")
    return shannon_entropy(np.clip(eigs, 0.0, None))


def entanglement_entropy(psi, dim_a, dim_b):
    """Entanglement entropy in nats: Shannon entropy of the Schmidt weights.

    Equals the von Neumann entropy of either reduced state.
    """
    dec = schmidt_decompose(psi, dim_a, dim_b)
    return shannon_entropy(dec.coefficients)


def check_povm(elements, dim=None):
    """Validate a POVM: each element Hermitian PSD, elements summing to I.

    Returns the elements as a list of complex ndarrays.
    """
    if len(elements) == 0:
        raise ValueError("POVM needs at least one element")
    out = []
    for k, m in enumerate(elements):
        m = np.asarray(m, dtype=complex)
        if dim is None:
            dim = m.shape[0]
        if m.shape != (dim, dim):
            raise ValueError(f"POVM element {k} has shape {m.shape}, expected ({dim}, {dim})")
        if np.max(np.abs(m - m.conj().T)) > PSD_TOL:
            raise ValueError(f"POVM element {k} is not Hermitian")
        if np.linalg.eigvalsh(m)[0] < -PSD_TOL:
            raise ValueError(f"POVM element {k} is not PSD")
        out.append(m)
    total = sum(out)
    if np.max(np.abs(total - np.eye(dim))) > PSD_TOL:
        raise ValueError("POVM elements do not sum to the identity")
    return out


def born_probabilities(rho, povm):
    """Outcome probabilities Tr(M_k rho) for a POVM.

    Entries in [-1e-10, 0) are clamped to 0; the vector must sum to 1
    within 1e-10.
    """
    rho = check_density_operator(rho)
    elements = check_povm(povm, dim=rho.shape[0])
    probs = np.array([np.trace(m @ rho).real for m in elements])
    if np.any(probs < -PSD_TOL):
        raise ValueError(f"negative Born probability {probs.min()}")
    probs = np.clip(probs, 0.0, None)
    total = probs.sum()
    if abs(total - 1.0) > PSD_TOL:
        raise ValueError(f"Born probabilities sum to {total}")
    return probs


def random_unitary(dim, rng):
    """Haar-random unitary matrix."""
    return unitary_group.rvs(dim, random_state=rng)


def _mix_to_entropy(lam, s):
    """Convex-mix a simplex vector toward uniform until its entropy is >= s.

    Mixing with the uniform vector only raises Shannon entropy (the mix is
    majorized by the original), so the mixing weight bisects cleanly.
    """
    n = len(lam)
    if shannon_entropy(lam) >= s:
        return lam
    uniform = np.full(n, 1.0 / n)
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if shannon_entropy((1.0 - mid) * lam + mid * uniform) >= s:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-16:
            break
    return (1.0 - hi) * lam + hi * uniform


def sample_state_with_entropy(dim_a, dim_b, s, seed):
    """Draw a random bipartite pure state with entanglement entropy >= s.

    Construction: sample a Schmidt-weight vector uniformly on the simplex,
    convex-mix it toward uniform until its entropy reaches s, then rotate
    by independent Haar-random local unitaries.

    Parameters
    ----------
    dim_a, dim_b : int
        Local dimensions.
    s : float
        Entropy floor in nats; must lie in [0, log(min(dim_a, dim_b))].
    seed : int or numpy.random.Generator
        Seed or generator; identical seeds give identical states.
    """
    n = min(dim_a, dim_b)
    s_max = np.log(n)
    if s < -1e-12 or s > s_max + 1e-9:
        raise ValueError(f"entropy floor {s} outside [0, {s_max}]")
    s = min(max(s, 0.0), s_max)
    rng = np.random.default_rng(seed)
    lam = rng.dirichlet(np.ones(n))
    lam = _mix_to_entropy(lam, s)
    lam = np.sort(lam)[::-1]
    ua = random_unitary(dim_a, rng)
    ub = random_unitary(dim_b, rng)
    psi = np.zeros(dim_a * dim_b, dtype=complex)
    for j in range(n):
        psi += np.sqrt(lam[j]) * np.kron(ua[:, j], ub[:, j])
    return psi / np.linalg.norm(psi)
