"""Discrete generative model, policies and Dirichlet learning.

Orientation: columns index hidden concepts. ``A[:, j]`` is the stimulus
distribution of concept ``j`` and ``B[a][:, j]`` the successor distribution
of concept ``j`` under action ``a``. Time steps are 0-based; a policy holds
one action per transition, so ``policy[t]`` moves the state from step ``t``
to ``t + 1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .probmath import DomainError, as_categorical, as_column_stochastic, normalize_columns

Policy = tuple[int, ...]

POLICY_CAP = 4096


def _frozen(x: np.ndarray) -> np.ndarray:
    x = np.array(x, dtype=float)
    x.setflags(write=False)
    return x


@dataclass(frozen=True)
class GenerativeModel:
    """Likelihood ``A`` (m x n), transitions ``B`` (k x n x n), preferences
    ``C`` (T x m), initial prior ``D`` (n), precision and policy set.

    A model with horizon 1 needs no transitions, so ``B`` may then be empty.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    gamma: float = 1.0
    horizon: int = 1
    policies: tuple[Policy, ...] = ((),)

    def __post_init__(self):
        A = _frozen(as_column_stochastic(self.A, "A"))
        m, n = A.shape
        B = np.asarray(self.B, dtype=float)
        if B.size == 0:
            B = np.zeros((0, n, n))
        if B.ndim != 3 or B.shape[1:] != (n, n):
            raise DomainError(f"B must have shape (actions, {n}, {n}), got {B.shape}")
        for k, mat in enumerate(B):
            as_column_stochastic(mat, f"B[{k}]")
        if self.horizon < 1:
            raise DomainError("horizon must be at least 1")
        C = np.asarray(self.C, dtype=float)
        if C.ndim == 1:
            C = np.tile(C, (self.horizon, 1))
        if C.shape != (self.horizon, m):
            raise DomainError(f"C must have shape ({self.horizon}, {m}), got {C.shape}")
        for t, row in enumerate(C):
            as_categorical(row, f"C[{t}]")
        D = as_categorical(self.D, "D")
        if D.shape != (n,):
            raise DomainError(f"D must have length {n}")
        if self.gamma < 0:
            raise DomainError("gamma must be non-negative")
        policies = tuple(tuple(int(a) for a in p) for p in self.policies)
        if not policies:
            raise DomainError("at least one policy is required")
        for p in policies:
            if len(p) != self.horizon - 1:
                raise DomainError(f"policy {p} has length {len(p)}, expected {self.horizon - 1}")
            if any(a < 0 or a >= B.shape[0] for a in p):
                raise DomainError(f"policy {p} uses an action outside 0..{B.shape[0] - 1}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", _frozen(B))
        object.__setattr__(self, "C", _frozen(C))
        object.__setattr__(self, "D", _frozen(D))
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "policies", policies)

    @property
    def n_stimuli(self) -> int:
        return self.A.shape[0]

    @property
    def n_concepts(self) -> int:
        return self.A.shape[1]

    @property
    def n_actions(self) -> int:
        return self.B.shape[0]

    def policy_array(self) -> np.ndarray:
        return np.array(self.policies, dtype=int).reshape(len(self.policies), self.horizon - 1)


@dataclass
class DirichletCounts:
    """Concentration parameters ``a`` (m x n), ``b`` (k x n x n), ``d`` (n)."""

    a: np.ndarray
    b: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        self.a = np.array(self.a, dtype=float)
        self.d = np.array(self.d, dtype=float)
        b = np.array(self.b, dtype=float)
        n = self.a.shape[1] if self.a.ndim == 2 else -1
        if b.size == 0:
            b = np.zeros((0, n, n))
        self.b = b
        if self.a.ndim != 2 or self.d.shape != (n,) or b.ndim != 3 or b.shape[1:] != (n, n):
            raise DomainError(
                f"inconsistent Dirichlet shapes a={self.a.shape} b={b.shape} d={self.d.shape}"
            )
        for name, x in (("a", self.a), ("b", self.b), ("d", self.d)):
            if not np.all(np.isfinite(x)) or np.any(x <= 0):
                raise DomainError(f"Dirichlet counts {name} must be strictly positive")

    def copy(self) -> "DirichletCounts":
        return DirichletCounts(self.a.copy(), self.b.copy(), self.d.copy())

    def equals(self, other: "DirichletCounts") -> bool:
        return (
            np.array_equal(self.a, other.a)
            and np.array_equal(self.b, other.b)
            and np.array_equal(self.d, other.d)
        )

    @classmethod
    def uniform(cls, n_stimuli: int, n_concepts: int, n_actions: int, value: float = 1.0):
        return cls(
            np.full((n_stimuli, n_concepts), value),
            np.full((n_actions, n_concepts, n_concepts), value),
            np.full(n_concepts, value),
        )


def expected_model(
    counts: DirichletCounts,
    gamma: float,
    horizon: int,
    C,
    policies: Sequence[Policy],
) -> GenerativeModel:
    """Model whose A, B, D are the column-wise Dirichlet means of ``counts``."""
    B = np.stack([normalize_columns(bk) for bk in counts.b]) if len(counts.b) else counts.b
    return GenerativeModel(
        A=normalize_columns(counts.a),
        B=B,
        C=C,
        D=normalize_columns(counts.d),
        gamma=gamma,
        horizon=horizon,
        policies=tuple(policies),
    )


def enumerate_policies(n_actions: int, depth: int, cap: int = POLICY_CAP) -> list[Policy]:
    """All action sequences of length ``depth`` in lexicographic order."""
    if n_actions < 1 and depth > 0:
        raise DomainError("need at least one action to build non-empty policies")
    if depth < 0:
        raise DomainError("policy depth must be non-negative")
    count = n_actions**depth if depth > 0 else 1
    if count > cap:
        raise DomainError(
            f"{n_actions}^{depth} = {count} policies exceeds the cap of {cap}; "
            "supply an explicit 'policies' list in the scenario instead"
        )
    return [tuple(p) for p in itertools.product(range(n_actions), repeat=depth)]


def joint_probability(
    gm: GenerativeModel,
    states: Sequence[int],
    obs: Sequence[int],
    policy_index: int,
    policy_prior,
) -> float:
    """p(obs, states, policy) under the factorized generative model."""
    T = gm.horizon
    if len(states) != T or len(obs) != T:
        raise DomainError(f"states and obs must both have length {T}")
    q_pi = as_categorical(policy_prior, "policy_prior")
    if q_pi.size != len(gm.policies):
        raise DomainError("policy_prior length does not match the policy set")
    policy = gm.policies[policy_index]
    p = gm.D[states[0]] * q_pi[policy_index]
    for t in range(T - 1):
        p *= gm.B[policy[t], states[t + 1], states[t]]
    for t in range(T):
        p *= gm.A[obs[t], states[t]]
    return float(p)


@dataclass
class StepRecord:
    """What the learner saw at one time step.

    ``posterior`` is q(theta_t); ``action`` is the transition taken out of
    step ``t`` (``None`` at the final step).
    """

    observation: int
    posterior: np.ndarray
    action: Optional[int] = None


@dataclass
class LearningTrace:
    steps: list[StepRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def __add__(self, other: "LearningTrace") -> "LearningTrace":
        return LearningTrace(self.steps + other.steps)


def update_dirichlet(counts: DirichletCounts, trace: LearningTrace, lr: float = 1.0) -> DirichletCounts:
    """Posterior-weighted count accumulation.

    Per step the observed row of ``a`` gains ``lr * q(theta_t)``; each
    transition adds ``lr * outer(q(theta_{t+1}), q(theta_t))`` to ``b`` of the
    action taken; ``d`` gains ``lr * q(theta_0)`` once per trace. A trace may
    hold several episodes back to back: a step whose predecessor has
    ``action=None`` starts a new episode.
    """
    out = counts.copy()
    m, n = out.a.shape
    prev: Optional[StepRecord] = None
    for step in trace.steps:
        q = np.asarray(step.posterior, dtype=float)
        if q.shape != (n,):
            raise DomainError(f"posterior has shape {q.shape}, expected ({n},)")
        if not 0 <= step.observation < m:
            raise DomainError(f"observation {step.observation} outside 0..{m - 1}")
        out.a[step.observation] += lr * q
        if prev is None or prev.action is None:
            out.d += lr * q
        else:
            if not 0 <= prev.action < out.b.shape[0]:
                raise DomainError(f"action {prev.action} outside the transition set")
            out.b[prev.action] += lr * np.outer(q, prev.posterior)
        prev = step
    return out
