import numpy as np
import pytest

from knowgen.genmodel import GenerativeModel, enumerate_policies

# Frozen outputs of independent pure-Python summation/enumeration oracles.
ORACLE = {
    "kl_075_025_vs_half": 0.13081203594113697,
    "mi_04_01": 0.19274475702175753,
    "omega_04_01_at_041": 0.3299314861514471,
    "opt_2x2": {0.0: 0.0, 1.0: -0.6931471805599453},
    "opt_3x3": {0.0: 0.0, 0.41: 0.0, 1.0: -1.0986122886681096},
    "joint_states11_obs11": 0.32,
    "evidence_obs11": 0.325,
    "efe_toy": (0.3617729874261988, 1.4708084763221114),
    "source_entropy_532": 1.0296530140645737,
    "cue_G_best": 2.0617283794576764,
    "cue_G_worst": 9.741728379457678,
}


def random_stochastic(rng, rows, cols, alpha=1.0):
    return rng.dirichlet(np.full(rows, alpha), size=cols).T


def random_model(rng, n, m, T, k=1, policies=None, gamma=1.0):
    """Random model with strictly positive entries throughout."""
    A = random_stochastic(rng, m, n)
    B = np.stack([random_stochastic(rng, n, n) for _ in range(k)])
    C = rng.dirichlet(np.ones(m))
    D = rng.dirichlet(np.ones(n))
    if policies is None:
        policies = enumerate_policies(k, T - 1)
    return GenerativeModel(A, B, C, D, gamma, T, tuple(policies))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
