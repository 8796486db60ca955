"""How the optimal Schmidt weights morph as the entropy floor rises.

Above the phase transition the maximizing weights form a Gibbs
distribution lambda_j proportional to exp(gamma mu_j) over the product
eigenvalues mu_j = alpha_j beta_j. The multiplier gamma is the root of
H(lambda(gamma)) = s: small s keeps gamma large and the weights sharp;
at s = log N gamma hits zero and the weights flatten to uniform. The
KKT certificate below confirms each root is a genuine constrained
stationary point, with entropy multiplier xi = 1/gamma.
"""

import numpy as np

from entqldp import (
    ManifoldPoint,
    SpectrumPair,
    kkt_residuals,
    solve_gibbs_max,
)

ALPHA = np.array([0.40, 0.30, 0.20, 0.10])
BETA = np.array([0.35, 0.30, 0.20, 0.15])


def main():
    spec = SpectrumPair(ALPHA, BETA)
    mu = spec.mu()
    k_a = np.diag(ALPHA).astype(complex)
    k_b = np.diag(BETA).astype(complex)
    print(f"product eigenvalues mu = {mu}")
    print()
    header = " ".join(f"lam_{j}" for j in range(1, 5))
    print(f"{'s':>6} {'gamma':>10} {'energy':>10}  {header}   xi*gamma")
    for s in (0.4, 0.7, 1.0, 1.2, 1.3, np.log(4.0)):
        sol = solve_gibbs_max(mu, float(s))
        point = ManifoldPoint(lam=sol.weights,
                              unitary_a=np.eye(4, dtype=complex),
                              unitary_b=np.eye(4, dtype=complex))
        res = kkt_residuals(k_a, k_b, point, float(s), direction="max")
        weights = " ".join(f"{w:5.3f}" for w in sol.weights)
        if sol.gamma > 0:
            product = f"{res.xi * sol.gamma:8.6f}"
        else:
            product = "  pinned"
        print(f"{s:6.3f} {sol.gamma:10.4f} {sol.energy:10.6f}  "
              f"{weights}   {product}")
    print()
    print("xi * gamma = 1 on every interior row: the recovered entropy")
    print("multiplier inverts the Gibbs temperature. At s = log 4 the")
    print("weights are pinned uniform (gamma = 0) and the multiplier")
    print("interpretation lapses.")


if __name__ == "__main__":
    main()
