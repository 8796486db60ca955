"""Phase transition of the leakage curve for the (1/2, 1/2) mechanism.

Below s = log 2 the optimal leakage sits on a plateau at 2 log 3: the
adversary's best binary product measurement tolerates that much
entanglement for free because the top product eigenvalue is doubly
degenerate. Past the threshold the entropy constraint binds, the optimal
Schmidt weights become a two-level Gibbs distribution with occupation
tau(s), and the leakage falls to log(5/2) at maximal entanglement.

Run:  python3 demos/phase_transition.py [out.svg]
"""

import sys

import numpy as np

from entqldp import (
    PovmSearchConfig,
    ProductMechanism,
    block_depolarizing,
    epsilon_star,
)
from entqldp.analyzer import tau_for_entropy

LOG2, LOG4 = np.log(2.0), np.log(4.0)


def main():
    mech = ProductMechanism(block_depolarizing(0.5), block_depolarizing(0.5))
    config = PovmSearchConfig(grid_points=61, refinement_iters=30,
                              restarts=4, seed=1)
    grid = np.concatenate([np.linspace(0.0, LOG2, 8),
                           np.linspace(LOG2 + 0.01, LOG4, 12)])
    print(f"{'s':>8} {'tau':>8} {'eps_upper':>12} {'eps_numeric':>12} regime")
    rows = []
    for s in grid:
        rep = epsilon_star(mech, float(s), config)
        tau = tau_for_entropy(float(s))
        rows.append((s, rep.epsilon_upper, rep.epsilon_numeric))
        print(f"{s:8.4f} {tau:8.4f} {rep.epsilon_upper:12.6f} "
              f"{rep.epsilon_numeric:12.6f} {rep.regime_max.tag}")
    print()
    print(f"plateau value 2 log 3  = {2 * np.log(3.0):.6f}")
    print(f"endpoint   log(5/2)    = {np.log(2.5):.6f}")
    print(f"threshold  s = log 2   = {LOG2:.6f}")

    if len(sys.argv) > 1:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        s, upper, numeric = map(np.array, zip(*rows))
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(s, upper, "o-", label="closed-form bound", markersize=4)
        ax.plot(s, numeric, "s--", label="optimizer estimate", markersize=4)
        ax.axvline(LOG2, color="gray", linestyle=":", label="s = log 2")
        ax.set_xlabel("entanglement entropy s (nats)")
        ax.set_ylabel("leakage (nats)")
        ax.legend()
        fig.tight_layout()
        fig.savefig(sys.argv[1])
        print(f"wrote {sys.argv[1]}")


if __name__ == "__main__":
    main()
