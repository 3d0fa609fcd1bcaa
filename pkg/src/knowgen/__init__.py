"""Knowledge generation as free-energy minimization.

Two layers: a semantic-network layer scoring concept-stimulus matrices by
their information-transfer energy, and a discrete active-inference agent
whose perception, planning and learning loops produce declarative,
procedural and conditional knowledge.
"""

from .environment import GenerativeProcess, env_step
from .fixtures import FIXTURES, fixture
from .genmodel import (
    DirichletCounts,
    GenerativeModel,
    LearningTrace,
    StepRecord,
    enumerate_policies,
    expected_model,
    joint_probability,
    update_dirichlet,
)
from .inference import (
    BeliefState,
    EFEReport,
    ExactPosterior,
    ExpansionReport,
    FreeEnergyReport,
    Perception,
    exact_posterior,
    expand_concepts,
    expected_free_energy,
    free_energy_decompositions,
    infer_states,
    perceive,
    plan,
    select_action,
    surprisal_trace,
    window_surprisal,
)
from .knowledge import (
    Agent,
    ExpansionConfig,
    RegimeConfig,
    Scenario,
    classify_regime,
    run_curriculum,
    run_episode,
)
from .probmath import (
    DomainError,
    JointDistribution,
    entropy,
    kl_divergence,
    mutual_information,
    normalize_columns,
    sample_categorical,
    softmax,
)
from .semnet import (
    ConceptStimulusMatrix,
    TransferEnergyReport,
    induced_joint,
    lambda_profile,
    machine_transfer_energy,
    optimize_matrix,
    similarity_matrix,
    synsets,
    transfer_energy,
)

__version__ = "0.1.0"
