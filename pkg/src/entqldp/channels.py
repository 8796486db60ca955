"""CPTP channels in Kraus form, adjoints, induced observables.

Includes the four-dimensional block-depolarizing channel family

    N_beta(rho) = (1-beta) [Tr(P0 rho) P0/2 + Tr(P1 rho) P1/2] + beta I/4

where P0 projects onto span{|00>, |11>} (flat indices 0 and 3) and
P1 onto span{|01>, |10>} (flat indices 1 and 2). Both a Kraus realization
and the direct superoperator formula are kept; tests cross-check them,
since the Kraus set is an engineering choice the superoperator leaves open.

Eigenvalues of induced observables are always reported sorted descending.
"""

from dataclasses import dataclass, field

import numpy as np

from .states import check_density_operator, as_state_vector, projector

COMPLETENESS_TOL = 1e-10

# Flat basis indices of the even-parity block {|00>, |11>} and the
# odd-parity block {|01>, |10>} of two qubits.
EVEN_BLOCK = (0, 3)
ODD_BLOCK = (1, 2)


@dataclass(frozen=True)
class KrausChannel:
    """A CPTP map given by Kraus operators {E_k} with sum_k E_k^dag E_k = I.

    `meta` records how the channel was built (e.g. the block-depolarizing
    family and its beta) so that analysis code can use family-specific
    closed forms; it never affects the channel action.
    """

    dim: int
    kraus: tuple
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        ops = tuple(np.asarray(e, dtype=complex) for e in self.kraus)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        for e in ops:
            if e.shape != (self.dim, self.dim):
                raise ValueError(
                    f"Kraus operator shape {e.shape} does not match dim {self.dim}")
        total = sum(e.conj().T @ e for e in ops)
        err = np.max(np.abs(total - np.eye(self.dim)))
        if err > COMPLETENESS_TOL:
            raise ValueError(f"Kraus completeness violated: max error {err}")
        object.__setattr__(self, "kraus", ops)


@dataclass(frozen=True)
class ProductMechanism:
    """Tensor product E_A (x) E_B of two local channels."""

    channel_a: KrausChannel
    channel_b: KrausChannel

    @property
    def dims(self):
        return (self.channel_a.dim, self.channel_b.dim)


def apply_channel(channel, rho):
    """Channel action sum_k E_k rho E_k^dag."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (channel.dim, channel.dim):
        raise ValueError(
            f"operator shape {rho.shape} does not match channel dim {channel.dim}")
    out = np.zeros_like(rho)
    for e in channel.kraus:
        out += e @ rho @ e.conj().T
    return out


def adjoint_apply(channel, observable):
    """Adjoint (Heisenberg) action sum_k E_k^dag X E_k on a Hermitian X.

    The adjoint of a CPTP map is completely positive and unital, so PSD
    inputs give PSD outputs and I maps to I.
    """
    x = np.asarray(observable, dtype=complex)
    if x.shape != (channel.dim, channel.dim):
        raise ValueError(
            f"observable shape {x.shape} does not match channel dim {channel.dim}")
    if np.max(np.abs(x - x.conj().T)) > 1e-10:
        raise ValueError("observable must be Hermitian")
    out = np.zeros_like(x)
    for e in channel.kraus:
        out += e.conj().T @ x @ e
    return out


def induced_observable(channel, phi):
    """K = E^dag(|phi><phi|) for a normalized direction |phi>."""
    phi = as_state_vector(phi)
    return adjoint_apply(channel, projector(phi))


def hermitian_spectrum_descending(observable):
    """Eigenvalues of a Hermitian matrix, sorted descending."""
    x = np.asarray(observable, dtype=complex)
    if np.max(np.abs(x - x.conj().T)) > 1e-10:
        raise ValueError("spectrum requested for a non-Hermitian matrix")
    return np.linalg.eigvalsh(x)[::-1]


def block_projectors():
    """The even/odd parity projectors (P0, P1) on the two-qubit space."""
    p0 = np.zeros((4, 4), dtype=complex)
    p1 = np.zeros((4, 4), dtype=complex)
    for i in EVEN_BLOCK:
        p0[i, i] = 1.0
    for i in ODD_BLOCK:
        p1[i, i] = 1.0
    return p0, p1


def block_depolarizing(beta):
    """Kraus realization of the block-depolarizing channel N_beta.

    Kraus set: sqrt((1-beta)/2) |u><v| for u, v within the same parity
    block, plus sqrt(beta/4) |u><v| for all u, v. Completeness is checked
    on construction.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    ops = []

    def ketbra(u, v, coeff):
        e = np.zeros((4, 4), dtype=complex)
        e[u, v] = coeff
        return e

    if beta < 1.0:
        c = np.sqrt((1.0 - beta) / 2.0)
        for block in (EVEN_BLOCK, ODD_BLOCK):
            for u in block:
                for v in block:
                    ops.append(ketbra(u, v, c))
    if beta > 0.0:
        c = np.sqrt(beta / 4.0)
        for u in range(4):
            for v in range(4):
                ops.append(ketbra(u, v, c))
    return KrausChannel(dim=4, kraus=tuple(ops),
                        meta={"kind": "block_depolarizing", "beta": float(beta)})


def block_depolarizing_superop(beta, rho):
    """Direct superoperator evaluation of N_beta (no Kraus operators)."""
    rho = np.asarray(rho, dtype=complex)
    p0, p1 = block_projectors()
    t0 = np.trace(p0 @ rho)
    t1 = np.trace(p1 @ rho)
    return ((1.0 - beta) * (t0 * p0 / 2.0 + t1 * p1 / 2.0)
            + beta * np.trace(rho) * np.eye(4) / 4.0)


def block_depolarizing_adjoint(beta, observable):
    """Direct adjoint formula for N_beta on a Hermitian observable M:

    N_beta^dag(M) = (1-beta) [Tr(M P0)/2 P0 + Tr(M P1)/2 P1] + beta Tr(M)/4 I.
    """
    m = np.asarray(observable, dtype=complex)
    p0, p1 = block_projectors()
    t0 = np.trace(m @ p0)
    t1 = np.trace(m @ p1)
    return ((1.0 - beta) * (t0 * p0 / 2.0 + t1 * p1 / 2.0)
            + beta * np.trace(m) * np.eye(4) / 4.0)


def block_weight_spectrum(beta, t):
    """Descending spectrum {v, v, w, w} of N_beta^dag(|phi><phi|).

    Depends on |phi> only through the even-block weight t = <phi|P0|phi>:
    v(t) = (1-beta) t/2 + beta/4 and w(t) = 1/2 - v(t). The two are
    returned in descending order, so t and 1-t give the same spectrum.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    if not -1e-12 <= t <= 1.0 + 1e-12:
        raise ValueError(f"block weight must lie in [0, 1], got {t}")
    v = (1.0 - beta) * t / 2.0 + beta / 4.0
    w = 0.5 - v
    hi, lo = max(v, w), min(v, w)
    return np.array([hi, hi, lo, lo])


def direction_with_block_weight(t):
    """A unit vector |phi> with even-block weight <phi|P0|phi> = t."""
    if not -1e-12 <= t <= 1.0 + 1e-12:
        raise ValueError(f"block weight must lie in [0, 1], got {t}")
    t = min(max(t, 0.0), 1.0)
    phi = np.zeros(4, dtype=complex)
    phi[0] = np.sqrt(t)
    phi[1] = np.sqrt(1.0 - t)
    return phi


def channel_to_json(channel):
    """JSON-serializable description of a channel.

    Block-depolarizing channels round-trip through their family form;
    anything else is emitted as explicit Kraus operators with [re, im]
    entry pairs.
    """
    if channel.meta.get("kind") == "block_depolarizing":
        return {"kind": "block_depolarizing", "beta": channel.meta["beta"]}
    ops = [[[[float(x.real), float(x.imag)] for x in row] for row in e]
           for e in channel.kraus]
    return {"kind": "kraus", "dim": channel.dim, "operators": ops}


def channel_from_json(obj):
    """Load a channel from its JSON description.

    Accepted forms:
      {"kind": "block_depolarizing", "beta": 0.5}
      {"kind": "kraus", "dim": 4, "operators": [[[ [re, im], ... ], ...], ...]}
    """
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError("channel JSON must be an object with a 'kind' field")
    kind = obj["kind"]
    if kind == "block_depolarizing":
        if "beta" not in obj:
            raise ValueError("block_depolarizing channel JSON needs 'beta'")
        return block_depolarizing(float(obj["beta"]))
    if kind == "kraus":
        if "dim" not in obj or "operators" not in obj:
            raise ValueError("kraus channel JSON needs 'dim' and 'operators'")
        dim = int(obj["dim"])
        ops = []
        for e in obj["operators"]:
            mat = np.array([[complex(entry[0], entry[1]) for entry in row]
                            for row in e])
            ops.append(mat)
        return KrausChannel(dim=dim, kraus=tuple(ops))
    raise ValueError(f"unknown channel kind {kind!r}")
