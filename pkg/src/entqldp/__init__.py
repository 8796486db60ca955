"""Entanglement-constrained local differential privacy of quantum
product mechanisms: closed-form extremal energies, a Riemannian
cross-validation optimizer, and leakage reports."""

__version__ = "0.1.0"

from .states import (
    SchmidtDecomposition,
    schmidt_decompose,
    entanglement_entropy,
    von_neumann_entropy,
    shannon_entropy,
    sample_state_with_entropy,
)
from .channels import (
    KrausChannel,
    ProductMechanism,
    apply_channel,
    adjoint_apply,
    induced_observable,
    block_depolarizing,
    block_weight_spectrum,
    direction_with_block_weight,
    channel_to_json,
    channel_from_json,
)
from .energies import (
    SpectrumPair,
    PhaseRegime,
    GibbsSolution,
    VertexSolution,
    RegimeError,
    InfeasibleEntropyError,
    solve_gibbs_max,
    solve_gibbs_min,
    gibbs_weights,
    j_max,
    j_min_lower_bound,
    j_min_exact_max_entanglement,
)
from .manifold import (
    ManifoldPoint,
    OptimizerConfig,
    OptimizeResult,
    KktResidual,
    objective,
    euclidean_gradients,
    riemannian_gradient,
    qr_retract,
    kkt_residuals,
    optimize,
)
from .analyzer import (
    PovmSearchConfig,
    PrivacyReport,
    epsilon_star,
    block_depolarizing_epsilon_bound,
    empirical_ratio_check,
)

__all__ = [
    "SchmidtDecomposition",
    "schmidt_decompose",
    "entanglement_entropy",
    "von_neumann_entropy",
    "shannon_entropy",
    "sample_state_with_entropy",
    "KrausChannel",
    "ProductMechanism",
    "apply_channel",
    "adjoint_apply",
    "induced_observable",
    "block_depolarizing",
    "block_weight_spectrum",
    "direction_with_block_weight",
    "channel_to_json",
    "channel_from_json",
    "SpectrumPair",
    "PhaseRegime",
    "GibbsSolution",
    "VertexSolution",
    "RegimeError",
    "InfeasibleEntropyError",
    "solve_gibbs_max",
    "solve_gibbs_min",
    "gibbs_weights",
    "j_max",
    "j_min_lower_bound",
    "j_min_exact_max_entanglement",
    "ManifoldPoint",
    "OptimizerConfig",
    "OptimizeResult",
    "KktResidual",
    "objective",
    "euclidean_gradients",
    "riemannian_gradient",
    "qr_retract",
    "kkt_residuals",
    "optimize",
    "PovmSearchConfig",
    "PrivacyReport",
    "epsilon_star",
    "block_depolarizing_epsilon_bound",
    "empirical_ratio_check",
]
