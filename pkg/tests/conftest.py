import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def half_mechanism():
    """The (1/2, 1/2) block-depolarizing product mechanism."""
    from entqldp import block_depolarizing, ProductMechanism
    return ProductMechanism(block_depolarizing(0.5), block_depolarizing(0.5))
