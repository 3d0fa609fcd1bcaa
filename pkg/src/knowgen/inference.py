"""Variational perception, expected free energy, planning and action.

Perception is mean-field: the posterior over a policy's state trajectory is
a product of per-step marginals ``q(theta_t | pi)``, refined by damped
coordinate updates that never increase the free energy

    F(pi) = E_q[ln q(theta~ | pi) - ln p(phi~, theta~ | pi)].

Logs of model matrices are floored at 1e-16 so that deterministic
transitions do not poison the potentials with ``-inf``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .genmodel import DirichletCounts, GenerativeModel, Policy, expected_model
from .probmath import (
    DomainError,
    as_categorical,
    entropy,
    kl_divergence,
    log_stable,
    softmax,
    xlogy,
)

DAMPING = 0.5
CONV_TOL = 1e-8
MAX_SWEEPS = 64
ENUM_GUARD = 10**6


@dataclass
class Perception:
    posteriors: np.ndarray  # T x n
    free_energy: float
    sweeps: int
    converged: bool
    history: list[float] = field(default_factory=list)


@dataclass
class BeliefState:
    """Per-policy state posteriors plus the policy posterior.

    ``free_energy[k]`` is ``inf`` for policies whose past actions disagree
    with the actions actually taken.
    """

    per_policy_posteriors: np.ndarray  # P x T x n
    free_energy: np.ndarray
    policy_posterior: np.ndarray
    iteration_count: int = 0
    converged: bool = True

    def marginals(self) -> np.ndarray:
        """Bayesian model average of the state posteriors over policies."""
        return np.einsum("p,ptn->tn", self.policy_posterior, self.per_policy_posteriors)


@dataclass(frozen=True)
class FreeEnergyReport:
    direct: float
    divergence_plus_surprise: float
    complexity_minus_accuracy: float
    divergence: float
    surprise: float
    complexity: float
    accuracy: float


@dataclass(frozen=True)
class EFEReport:
    risk: np.ndarray  # P x T, zero outside the evaluated window
    ambiguity: np.ndarray  # P x T

    @property
    def per_step(self) -> np.ndarray:
        return self.risk + self.ambiguity

    @property
    def totals(self) -> np.ndarray:
        return self.per_step.sum(axis=1)


@dataclass(frozen=True)
class ExactPosterior:
    marginals: np.ndarray  # T x n
    surprisal: float
    joint: np.ndarray  # n^T trajectory posterior, axis t = theta_t


@dataclass(frozen=True)
class SurprisalTrace:
    per_step: np.ndarray
    mean: float
    flagged: bool


@dataclass(frozen=True)
class ExpansionReport:
    triggered: bool
    window_surprisal: float
    threshold: float
    n_before: int
    n_after: int


def _check_obs(gm: GenerativeModel, obs: Sequence[int]) -> list[int]:
    obs = [int(o) for o in obs]
    if len(obs) > gm.horizon:
        raise DomainError(f"{len(obs)} observations exceed the horizon {gm.horizon}")
    for o in obs:
        if not 0 <= o < gm.n_stimuli:
            raise DomainError(f"observation {o} outside 0..{gm.n_stimuli - 1}")
        if not np.any(gm.A[o] > 0):
            raise DomainError(f"observation {o} has zero likelihood under every concept")
    return obs


def _check_policy(gm: GenerativeModel, policy: Policy) -> tuple[int, ...]:
    policy = tuple(int(a) for a in policy)
    if len(policy) != gm.horizon - 1 or any(not 0 <= a < gm.n_actions for a in policy):
        raise DomainError(f"policy {policy} is not valid for this model")
    return policy


def _mf_energy(qs: np.ndarray, lnA: np.ndarray, lnD: np.ndarray, lnB: list, obs: list) -> float:
    F = float(np.sum(qs * np.log(np.where(qs > 0, qs, 1.0)))) - float(qs[0] @ lnD)
    for t, o in enumerate(obs):
        F -= float(qs[t] @ lnA[o])
    for t, lb in enumerate(lnB):
        F -= float(qs[t + 1] @ lb @ qs[t])
    return F


def mean_field_free_energy(gm: GenerativeModel, policy: Policy, obs: Sequence[int], qs) -> float:
    """F(pi) for a product of per-step marginals ``qs`` (T x n)."""
    qs = np.asarray(qs, dtype=float)
    lnB = [log_stable(gm.B[a]) for a in policy]
    return _mf_energy(qs, log_stable(gm.A), log_stable(gm.D), lnB, list(obs))


def perceive(
    gm: GenerativeModel,
    policy: Policy,
    obs: Sequence[int],
    damping: float = DAMPING,
    tol: float = CONV_TOL,
    max_sweeps: int = MAX_SWEEPS,
) -> Perception:
    """Mean-field posterior over the states of one policy given an observation prefix.

    Each sweep visits t = 0..T-1 in order and moves ``q_t`` a fraction
    ``damping`` of the way towards its exact coordinate minimizer
    ``softmax(lnA[obs_t] + lnB[a_{t-1}] q_{t-1} + lnB[a_t]^T q_{t+1})``,
    with ``ln D`` replacing the incoming term at t = 0. Stops once the
    largest change in a sweep is below ``tol``.
    """
    policy = _check_policy(gm, policy)
    obs = _check_obs(gm, obs)
    T, n = gm.horizon, gm.n_concepts
    lnA, lnD = log_stable(gm.A), log_stable(gm.D)
    lnB_all = log_stable(gm.B)
    lnB = [lnB_all[a] for a in policy]

    qs = np.empty((T, n))
    qs[0] = gm.D
    for t, a in enumerate(policy):
        qs[t + 1] = gm.B[a] @ qs[t]

    history = [_mf_energy(qs, lnA, lnD, lnB, obs)]
    converged = False
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        delta = 0.0
        for t in range(T):
            v = lnD.copy() if t == 0 else lnB[t - 1] @ qs[t - 1]
            if t < len(obs):
                v = v + lnA[obs[t]]
            if t < T - 1:
                v = v + lnB[t].T @ qs[t + 1]
            e = np.exp(v - v.max())
            target = e / e.sum()
            new = (1.0 - damping) * qs[t] + damping * target
            delta = max(delta, float(np.abs(new - qs[t]).max()))
            qs[t] = new
        history.append(_mf_energy(qs, lnA, lnD, lnB, obs))
        if delta < tol:
            converged = True
            break
    qs /= qs.sum(axis=1, keepdims=True)
    return Perception(qs, history[-1], sweeps, converged, history)


def _trajectory_log_joint(gm: GenerativeModel, policy: Policy, obs: Sequence[int]) -> np.ndarray:
    """ln p(obs, theta~ | pi) for every trajectory, as an n^T array (true logs)."""
    T, n = gm.horizon, gm.n_concepts
    if n**T > ENUM_GUARD:
        raise DomainError(f"enumeration of {n}^{T} trajectories exceeds the guard {ENUM_GUARD}")
    with np.errstate(divide="ignore"):
        logj = np.log(gm.D).reshape((n,) + (1,) * (T - 1))
        for t, o in enumerate(obs):
            shape = [1] * T
            shape[t] = n
            logj = logj + np.log(gm.A[o]).reshape(shape)
        for t, a in enumerate(policy):
            shape = [1] * T
            shape[t], shape[t + 1] = n, n
            # axis t is the predecessor, so lay out B transposed
            logj = logj + np.log(gm.B[a].T).reshape(shape)
    return logj


def exact_posterior(gm: GenerativeModel, policy: Policy, obs: Sequence[int]) -> ExactPosterior:
    """Brute-force Bayes over every state trajectory; a test oracle."""
    policy = _check_policy(gm, policy)
    obs = _check_obs(gm, obs)
    logj = _trajectory_log_joint(gm, policy, obs)
    top = logj.max()
    if top == -np.inf:
        raise DomainError("observation sequence has zero probability under this policy")
    w = np.exp(logj - top)
    z = w.sum()
    post = w / z
    T = gm.horizon
    marg = np.stack([post.sum(axis=tuple(k for k in range(T) if k != t)) for t in range(T)])
    return ExactPosterior(marg, float(-(np.log(z) + top)), post)


def trajectory_free_energy(gm: GenerativeModel, policy: Policy, obs: Sequence[int], q_joint) -> float:
    """F for an arbitrary distribution over state trajectories (n^T array)."""
    policy = _check_policy(gm, policy)
    obs = _check_obs(gm, obs)
    q = np.asarray(q_joint, dtype=float)
    logj = _trajectory_log_joint(gm, policy, obs)
    support = q > 0
    if np.any(logj[support] == -np.inf):
        return np.inf
    return float(np.sum(q[support] * (np.log(q[support]) - logj[support])))


def free_energy_decompositions(gm: GenerativeModel, q, obs: int) -> FreeEnergyReport:
    """Single-step F computed directly and via both textbook splits."""
    q = as_categorical(q, "q")
    prior = gm.D
    lik = gm.A[int(obs)]
    joint = lik * prior
    evidence = joint.sum()
    if evidence <= 0:
        raise DomainError(f"observation {obs} has zero evidence")
    support = q > 0
    if np.any(joint[support] == 0):
        raise DomainError("q places mass on states that cannot produce the observation")
    direct = float(np.sum(q[support] * (np.log(q[support]) - np.log(joint[support]))))
    surprise = float(-np.log(evidence))
    divergence = kl_divergence(q, joint / evidence)
    complexity = kl_divergence(q, prior)
    accuracy = float(np.sum(q[support] * np.log(lik[support])))
    return FreeEnergyReport(
        direct=direct,
        divergence_plus_surprise=divergence + surprise,
        complexity_minus_accuracy=complexity - accuracy,
        divergence=divergence,
        surprise=surprise,
        complexity=complexity,
        accuracy=accuracy,
    )


def expected_free_energy(gm: GenerativeModel, beliefs, start: int = 0) -> EFEReport:
    """Risk plus ambiguity per policy and step, summed over steps ``start..T-1``.

    ``beliefs`` is P x T x n (per-policy state marginals). Risk is
    ``KL[A q_t || C_t]``, ambiguity the belief-weighted entropy of A's columns.
    """
    qs = np.asarray(beliefs, dtype=float)
    P, T = len(gm.policies), gm.horizon
    if qs.shape != (P, T, gm.n_concepts):
        raise DomainError(f"beliefs must have shape {(P, T, gm.n_concepts)}, got {qs.shape}")
    col_entropy = -xlogy(gm.A, gm.A).sum(axis=0)
    risk = np.zeros((P, T))
    amb = np.zeros((P, T))
    for k in range(P):
        for t in range(start, T):
            q_obs = gm.A @ qs[k, t]
            bad = np.flatnonzero((q_obs > 0) & (gm.C[t] == 0))
            if bad.size:
                raise DomainError(f"C[{t}] has zero mass on predicted stimulus {int(bad[0])}")
            nz = q_obs > 0
            risk[k, t] = max(float(np.sum(q_obs[nz] * (np.log(q_obs[nz]) - np.log(gm.C[t][nz])))), 0.0)
            amb[k, t] = float(qs[k, t] @ col_entropy)
    return EFEReport(risk, amb)


def plan(F, G, gamma: float) -> np.ndarray:
    """q(pi) = softmax(-(F + gamma * G)); ``F = inf`` removes a policy."""
    F = np.asarray(F, dtype=float)
    G = np.asarray(G, dtype=float)
    if F.shape != G.shape:
        raise DomainError("F and G must have the same length")
    with np.errstate(invalid="ignore"):
        score = -(F + gamma * G)
    score[np.isnan(score)] = -np.inf
    return softmax(score)


def select_action(q_pi, policies: Sequence[Policy], t: int) -> int:
    """Action at step ``t`` with the largest summed policy mass; lowest index wins ties."""
    q_pi = np.asarray(q_pi, dtype=float)
    actions = np.array([p[t] for p in policies], dtype=int)
    mass = np.bincount(actions, weights=q_pi, minlength=actions.max() + 1)
    return int(np.argmax(mass))


def infer_states(gm: GenerativeModel, obs: Sequence[int], taken: Sequence[int] = ()) -> BeliefState:
    """Perceive under every policy; policies contradicting ``taken`` get F = inf."""
    P, T, n = len(gm.policies), gm.horizon, gm.n_concepts
    taken = tuple(taken)
    qs = np.zeros((P, T, n))
    F = np.full(P, np.inf)
    sweeps, converged = 0, True
    for k, policy in enumerate(gm.policies):
        res = perceive(gm, policy, obs)
        qs[k] = res.posteriors
        sweeps = max(sweeps, res.sweeps)
        converged = converged and res.converged
        if policy[: len(taken)] == taken:
            F[k] = res.free_energy
    q_pi = plan(F, np.zeros(P), gm.gamma)
    return BeliefState(qs, F, q_pi, sweeps, converged)


def predictive(gm: GenerativeModel, q_pi, beliefs, t: int) -> np.ndarray:
    """Policy-mixed stimulus distribution at step ``t``."""
    beliefs = np.asarray(beliefs, dtype=float)
    return gm.A @ np.einsum("p,pn->n", np.asarray(q_pi, dtype=float), beliefs[:, t])


def surprisal_trace(gm: GenerativeModel, q_pi, obs: Sequence[int]) -> SurprisalTrace:
    """Per-step -ln p(obs_t | obs_<t) under a fixed mixture of exact policy filters.

    The running mean estimates the entropy of the stimulus stream. A zero
    predictive probability is recorded as ``inf`` and flagged.
    """
    q_pi = as_categorical(q_pi, "q_pi")
    if q_pi.size != len(gm.policies):
        raise DomainError("q_pi length does not match the policy set")
    obs = [int(o) for o in obs]
    if len(obs) > gm.horizon:
        raise DomainError(f"{len(obs)} observations exceed the horizon {gm.horizon}")
    if any(not 0 <= o < gm.n_stimuli for o in obs):
        raise DomainError("observation outside the stimulus alphabet")
    P = len(gm.policies)
    pol = gm.policy_array()
    pred = np.tile(gm.D, (P, 1))
    out = np.empty(len(obs))
    for t, o in enumerate(obs):
        lik = pred @ gm.A[o]  # P
        p = float(q_pi @ lik)
        out[t] = np.inf if p <= 0 else -np.log(p)
        post = pred * gm.A[o]
        z = post.sum(axis=1, keepdims=True)
        # a policy that deems the observation impossible keeps its prediction
        post = np.where(z > 0, post / np.where(z > 0, z, 1.0), pred)
        if t < gm.horizon - 1:
            pred = np.einsum("pij,pj->pi", gm.B[pol[:, t]], post)
    flagged = bool(np.any(np.isinf(out)))
    mean = float(out.mean()) if out.size else 0.0
    return SurprisalTrace(out, mean, flagged)


def default_expansion_threshold(n_stimuli: int) -> float:
    return 0.9 * np.log(n_stimuli)


def window_surprisal(gm: GenerativeModel, window: Sequence[int]) -> float:
    """Mean -ln p(stimulus) under the single-step prior predictive ``A @ D``."""
    if len(window) == 0:
        return 0.0
    p = gm.A @ gm.D
    with np.errstate(divide="ignore"):
        return float(np.mean(-np.log(p[np.asarray(window, dtype=int)])))


def expand_concepts(
    counts: DirichletCounts,
    gm: GenerativeModel,
    window: Sequence[int],
    threshold: Optional[float] = None,
    prior: float = 1.0,
) -> tuple[DirichletCounts, GenerativeModel, ExpansionReport]:
    """Append one hidden concept when the window is poorly explained.

    The new likelihood column starts at ``prior`` plus the window's stimulus
    counts; new transition rows/columns and the new initial-state entry start
    at ``prior``. Existing counts are left as they are.
    """
    if threshold is None:
        threshold = default_expansion_threshold(gm.n_stimuli)
    if threshold <= 0:
        raise DomainError("expansion threshold must be positive")
    if prior <= 0:
        raise DomainError("prior concentration must be positive")
    n = gm.n_concepts
    score = window_surprisal(gm, window)
    if not score > threshold:
        return counts, gm, ExpansionReport(False, score, float(threshold), n, n)
    m = gm.n_stimuli
    new_col = prior + np.bincount(np.asarray(window, dtype=int), minlength=m).astype(float)
    a = np.column_stack([counts.a, new_col])
    k = counts.b.shape[0]
    b = np.full((k, n + 1, n + 1), float(prior))
    b[:, :n, :n] = counts.b
    d = np.append(counts.d, float(prior))
    grown = DirichletCounts(a, b, d)
    model = expected_model(grown, gm.gamma, gm.horizon, gm.C, gm.policies)
    return grown, model, ExpansionReport(True, score, float(threshold), n, n + 1)
