"""Perception/learning loop (I) and policy/action loop (II), run as episodes.

An episode is one horizon-length trial against a generative process. A
curriculum runs episodes back to back with persistent Dirichlet counts: a
learning phase, then an optional use phase in which loop I learning may be
frozen while perception keeps running.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .environment import GenerativeProcess
from .genmodel import DirichletCounts, GenerativeModel, LearningTrace, StepRecord, expected_model, update_dirichlet
from .inference import (
    default_expansion_threshold,
    expand_concepts,
    expected_free_energy,
    infer_states,
    plan,
    predictive,
    select_action,
    window_surprisal,
)
from .probmath import DomainError

DECLARATIVE = "declarative"
PROCEDURAL = "procedural"
CONDITIONAL = "conditional"
UNCLASSIFIED = "unclassified"
REGIMES = (DECLARATIVE, PROCEDURAL, CONDITIONAL)

LEARNING = "learning"
USE = "use"


@dataclass(frozen=True)
class RegimeConfig:
    loop_I_learning: bool = True
    loop_II: bool = False
    loop_I_frozen_in_use: bool = False

    def __post_init__(self):
        if not (self.loop_I_learning or self.loop_II):
            raise DomainError("at least one loop must be active")

    def active_loops(self, phase: str) -> frozenset:
        if phase not in (LEARNING, USE):
            raise DomainError(f"phase must be 'learning' or 'use', got {phase!r}")
        loops = set()
        if self.loop_I_learning and not (phase == USE and self.loop_I_frozen_in_use):
            loops.add("I")
        if self.loop_II:
            loops.add("II")
        return frozenset(loops)

    def learns(self, phase: str) -> bool:
        return "I" in self.active_loops(phase)

    def to_dict(self) -> dict:
        return {
            "loop_I_learning": self.loop_I_learning,
            "loop_II": self.loop_II,
            "loop_I_frozen_in_use": self.loop_I_frozen_in_use,
        }


_TABLE = {
    (frozenset({"I"}), frozenset({"I"})): DECLARATIVE,
    (frozenset({"I", "II"}), frozenset({"II"})): PROCEDURAL,
    (frozenset({"I", "II"}), frozenset({"I", "II"})): CONDITIONAL,
}


def classify_loops(learning_loops, use_loops) -> str:
    return _TABLE.get((frozenset(learning_loops), frozenset(use_loops)), UNCLASSIFIED)


def classify_regime(cfg: RegimeConfig) -> str:
    """Knowledge type implied by which loops run while learning and while using."""
    return classify_loops(cfg.active_loops(LEARNING), cfg.active_loops(USE))


@dataclass
class Agent:
    """The learner: a generative model plus (optionally) the counts behind it."""

    model: GenerativeModel
    counts: Optional[DirichletCounts] = None
    learning_rate: float = 1.0

    def __post_init__(self):
        if self.counts is not None:
            c = self.counts
            m, n = self.model.A.shape
            if c.a.shape != (m, n) or c.b.shape != self.model.B.shape:
                raise DomainError("Dirichlet counts do not match the model dimensions")

    def with_counts(self, counts: DirichletCounts) -> "Agent":
        gm = self.model
        model = expected_model(counts, gm.gamma, gm.horizon, gm.C, gm.policies)
        return Agent(model, counts, self.learning_rate)


@dataclass(frozen=True)
class StepRow:
    tau: int
    observation: int
    action: Optional[int]
    F: float
    G: Optional[float]
    surprisal: float
    n_concepts: int


@dataclass
class EpisodeTrace:
    rows: list[StepRow]
    regime: str
    phase: str
    seed: Optional[int]
    episode: int = 0

    @property
    def observations(self) -> list[int]:
        return [r.observation for r in self.rows]

    @property
    def actions(self) -> list[Optional[int]]:
        return [r.action for r in self.rows]

    def mean_surprisal(self) -> float:
        return float(np.mean([r.surprisal for r in self.rows]))

    def mean_F(self) -> float:
        return float(np.mean([r.F for r in self.rows]))


def _expected(q_pi: np.ndarray, values: np.ndarray) -> float:
    live = q_pi > 0
    return float(np.dot(q_pi[live], values[live]))


def _check_alphabets(agent: Agent, env) -> None:
    if agent.model.n_stimuli != env.n_stimuli:
        raise DomainError(
            f"agent expects {agent.model.n_stimuli} stimuli but the environment emits {env.n_stimuli}"
        )


def run_episode(
    agent: Agent,
    env,
    cfg: RegimeConfig,
    phase: str,
    rng: np.random.Generator,
    episode: int = 0,
    seed: Optional[int] = None,
) -> tuple[EpisodeTrace, Agent]:
    """One trial: observe, perceive, and (loop II) plan and act at every step.

    ``env`` only needs ``reset(rng)``, ``step(action, rng)``, ``n_stimuli``
    and ``n_actions``; the engine never reads the environment's state.
    Returns the trace and the agent after any end-of-episode learning.
    """
    _check_alphabets(agent, env)
    if cfg.loop_II and env.n_actions < agent.model.n_actions:
        raise DomainError("the agent has more actions than the environment accepts")
    gm = agent.model
    T, P = gm.horizon, len(gm.policies)
    regime = classify_regime(cfg)

    obs: list[int] = []
    taken: list[int] = []
    rows: list[StepRow] = []
    q_pi = np.full(P, 1.0 / P)
    beliefs = None
    phi = env.reset(rng)
    for t in range(T):
        if t == 0:
            pred = gm.A @ gm.D
        else:
            pred = predictive(gm, q_pi, beliefs.per_policy_posteriors, t)
        with np.errstate(divide="ignore"):
            surprisal = float(-np.log(pred[phi]))
        obs.append(phi)
        beliefs = infer_states(gm, obs, taken)
        action = None
        G = None
        if t < T - 1:
            if cfg.loop_II:
                efe = expected_free_energy(gm, beliefs.per_policy_posteriors, start=t + 1)
                q_pi = plan(beliefs.free_energy, efe.totals, gm.gamma)
                action = select_action(q_pi, gm.policies, t)
                G = _expected(q_pi, efe.totals)
                taken.append(action)
            else:
                q_pi = beliefs.policy_posterior
                # passive dynamics are modelled by transition 0
                taken.append(0)
        else:
            q_pi = beliefs.policy_posterior
        rows.append(StepRow(t, phi, action, _expected(q_pi, beliefs.free_energy), G, surprisal, gm.n_concepts))
        if t < T - 1:
            phi = env.step(action, rng)

    new_agent = agent
    if cfg.learns(phase) and agent.counts is not None:
        marg = beliefs.marginals()
        steps = [
            StepRecord(obs[t], marg[t], taken[t] if t < T - 1 else None) for t in range(T)
        ]
        counts = update_dirichlet(agent.counts, LearningTrace(steps), agent.learning_rate)
        new_agent = agent.with_counts(counts)
    return EpisodeTrace(rows, regime, phase, seed, episode), new_agent


def absorb_window(agent: Agent, window) -> Agent:
    """One Dirichlet update treating each window stimulus as a single-step trial."""
    if agent.counts is None:
        raise DomainError("agent has no Dirichlet counts to update")
    gm = agent.model
    steps = []
    for o in window:
        q = gm.D * gm.A[int(o)]
        steps.append(StepRecord(int(o), q / q.sum(), None))
    counts = update_dirichlet(agent.counts, LearningTrace(steps), agent.learning_rate)
    return agent.with_counts(counts)


def first_action(agent: Agent, first_obs: int) -> int:
    """The action loop II would take right after seeing ``first_obs``."""
    gm = agent.model
    beliefs = infer_states(gm, [first_obs])
    efe = expected_free_energy(gm, beliefs.per_policy_posteriors, start=1)
    q_pi = plan(beliefs.free_energy, efe.totals, gm.gamma)
    return select_action(q_pi, gm.policies, 0)


@dataclass(frozen=True)
class ExpansionConfig:
    window: int = 10
    threshold: Optional[float] = None
    prior: float = 1.0


@dataclass
class Scenario:
    process: GenerativeProcess
    agent: Agent
    regime: RegimeConfig
    episodes: int = 1
    use_episodes: int = 0
    seed: int = 0
    expansion: Optional[ExpansionConfig] = None
    name: str = "scenario"


@dataclass
class CurriculumResult:
    summary: dict
    traces: list[EpisodeTrace]
    agent: Agent
    expansions: list[dict] = field(default_factory=list)


def preferred_stimulus(gm: GenerativeModel) -> Optional[int]:
    """Most preferred final-step stimulus, or None when preferences are flat."""
    c = gm.C[-1]
    if np.allclose(c, c[0]):
        return None
    return int(np.argmax(c))


def _rate(flags: list[bool]) -> Optional[float]:
    return float(np.mean(flags)) if flags else None


def run_curriculum(
    scenario: Scenario,
    episodes: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    use_episodes: Optional[int] = None,
) -> CurriculumResult:
    """Learning episodes then use episodes, with counts carried throughout."""
    episodes = scenario.episodes if episodes is None else episodes
    use_episodes = scenario.use_episodes if use_episodes is None else use_episodes
    if episodes < 1:
        raise DomainError("episodes must be at least 1")
    if use_episodes < 0:
        raise DomainError("use_episodes must be non-negative")
    rng = np.random.default_rng(scenario.seed) if rng is None else rng
    env = scenario.process.copy()
    agent = scenario.agent
    cfg = scenario.regime
    exp_cfg = scenario.expansion
    window: list[int] = []
    traces: list[EpisodeTrace] = []
    expansions: list[dict] = []
    per_episode = []
    preferred_hits = {LEARNING: [], USE: []}

    schedule = [LEARNING] * episodes + [USE] * use_episodes
    for k, phase in enumerate(schedule):
        trace, agent = run_episode(agent, env, cfg, phase, rng, episode=k, seed=scenario.seed)
        traces.append(trace)
        target = preferred_stimulus(agent.model)
        hit = None if target is None else trace.rows[-1].observation == target
        if hit is not None:
            preferred_hits[phase].append(hit)
        per_episode.append(
            {
                "episode": k,
                "phase": phase,
                "mean_surprisal": trace.mean_surprisal(),
                "mean_F": trace.mean_F(),
                "preferred": hit,
                "n_concepts": agent.model.n_concepts,
            }
        )
        if exp_cfg is not None and agent.counts is not None and cfg.learns(phase):
            window = (window + trace.observations)[-exp_cfg.window :]
            if len(window) == exp_cfg.window:
                counts, model, report = expand_concepts(
                    agent.counts, agent.model, window, exp_cfg.threshold, exp_cfg.prior
                )
                if report.triggered:
                    agent = Agent(model, counts, agent.learning_rate)
                    expansions.append(
                        {"episode": k, "report": report, "window": list(window), "agent": agent}
                    )
                    window = []

    gm = agent.model
    summary = {
        "scenario": scenario.name,
        "regime": classify_regime(cfg),
        "regime_config": cfg.to_dict(),
        "seed": scenario.seed,
        "episodes": episodes,
        "use_episodes": use_episodes,
        "learning_rate": agent.learning_rate,
        "per_episode": per_episode,
        "surprisal_curve": [e["mean_surprisal"] for e in per_episode],
        "F_curve": [e["mean_F"] for e in per_episode],
        "preferred_frequency": {
            LEARNING: _rate(preferred_hits[LEARNING]),
            USE: _rate(preferred_hits[USE]),
        },
        "expansions": [
            {
                "episode": e["episode"],
                "window_surprisal": e["report"].window_surprisal,
                "threshold": e["report"].threshold,
                "n_before": e["report"].n_before,
                "n_after": e["report"].n_after,
            }
            for e in expansions
        ],
        "expansion_config": None
        if exp_cfg is None
        else {
            "window": exp_cfg.window,
            "threshold": exp_cfg.threshold
            if exp_cfg.threshold is not None
            else float(default_expansion_threshold(gm.n_stimuli)),
            "prior": exp_cfg.prior,
        },
        "final_model": {"A": gm.A.tolist(), "B": gm.B.tolist(), "D": gm.D.tolist()},
        "final_dirichlet": None
        if agent.counts is None
        else {"a": agent.counts.a.tolist(), "b": agent.counts.b.tolist(), "d": agent.counts.d.tolist()},
        "gamma": gm.gamma,
        "horizon": gm.horizon,
    }
    return CurriculumResult(summary, traces, agent, expansions)


__all__ = [
    "Agent",
    "CONDITIONAL",
    "CurriculumResult",
    "DECLARATIVE",
    "EpisodeTrace",
    "ExpansionConfig",
    "LEARNING",
    "PROCEDURAL",
    "RegimeConfig",
    "Scenario",
    "StepRow",
    "UNCLASSIFIED",
    "USE",
    "absorb_window",
    "classify_loops",
    "classify_regime",
    "first_action",
    "preferred_stimulus",
    "run_curriculum",
    "run_episode",
    "window_surprisal",
]
