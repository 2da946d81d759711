import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from adaptive_pi.discretization import (Grid1D, RelaxationProfile, SplitOperator, ViscosityScheme,
                                        assemble_semi_discrete, split_blocks)
from adaptive_pi.models import EquilibriumState, hme_linearized

settings.register_profile(
    "repo",
    max_examples=30,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def random_split(seed, n_cells=None, n_vars=None):
    """Small dense split operator with random entries, N_x <= 12 and N <= 4."""
    rng = np.random.default_rng(seed)
    n_cells = n_cells or int(rng.integers(2, 13))
    n_vars = n_vars or int(rng.integers(1, 5))
    n = n_cells * n_vars
    a = rng.normal(size=(n, n)) - 2.0 * np.eye(n)
    k = int(rng.integers(1, n_cells)) * n_vars
    return SplitOperator(a[:k, :k], a[:k, k:], a[k:, :k], a[k:, k:], k // n_vars, n_vars)


@pytest.fixture
def fig1_model():
    return hme_linearized(EquilibriumState(1.0, np.pi, 1.0), 4)


@pytest.fixture
def hme_split(fig1_model):
    grid = Grid1D(-1.0, 1.0, 10)
    op = assemble_semi_discrete(fig1_model, grid, RelaxationProfile(1e-2, 1e-1, 0.0), ViscosityScheme("upwind"))
    return split_blocks(op, 5)
