"""Named scenarios: small formal analogs of the three knowledge regimes.

* ``discrimination-2x2`` - two concepts, two stimuli, no actions. Each trial
  holds one hidden concept fixed for five steps; the agent learns which
  stimulus each concept produces (declarative).
* ``tmaze`` - start, junction and two arms; two actions; only the right arm
  yields the preferred stimulus. The agent must learn the two-step route and
  then use it with learning frozen (procedural).
* ``cue-conditional`` - a cue seen at the start says which arm pays off in
  this trial; the right move depends on the cue (conditional).
* ``novel-stimulus`` - a three-state world explored by an agent that knows
  only two concepts; used to exercise concept expansion.
"""

from __future__ import annotations

import numpy as np

from .environment import GenerativeProcess
from .genmodel import DirichletCounts, enumerate_policies, expected_model
from .knowledge import Agent, ExpansionConfig, RegimeConfig, Scenario
from .probmath import DomainError, softmax

FIXTURES = ("discrimination-2x2", "tmaze", "cue-conditional", "novel-stimulus")


def _agent(counts: DirichletCounts, C, gamma: float, horizon: int, policies) -> Agent:
    return Agent(expected_model(counts, gamma, horizon, C, policies), counts)


def discrimination_2x2() -> Scenario:
    horizon = 5
    process = GenerativeProcess(
        A_star=[[0.9, 0.1], [0.1, 0.9]],
        initial_state=[0.5, 0.5],
    )
    # a barely tilted likelihood to break the label symmetry, a firm even
    # prior over concepts and slow plasticity so the curve spans the run
    counts = DirichletCounts(
        a=[[1.1, 1.0], [1.0, 1.1]],
        b=[[[20.0, 1.0], [1.0, 20.0]]],
        d=[5.0, 5.0],
    )
    agent = _agent(counts, C=[0.5, 0.5], gamma=1.0, horizon=horizon, policies=[(0,) * (horizon - 1)])
    agent.learning_rate = 0.02
    regime = RegimeConfig(loop_I_learning=True, loop_II=False, loop_I_frozen_in_use=False)
    return Scenario(process, agent, regime, episodes=200, seed=7, name="discrimination-2x2")


# t-maze stimuli and states
START_VIEW, JUNCTION_VIEW, REWARD, NO_REWARD = range(4)


def _tmaze_preferences() -> np.ndarray:
    return softmax([0.0, 0.0, 3.0, -3.0])


def tmaze() -> Scenario:
    # states: 0 start, 1 junction, 2 left arm, 3 right arm
    # action 0 advances (start -> junction -> left arm); action 1 waits at
    # the start or turns right at the junction
    A_star = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.1, 0.9],
            [0.0, 0.0, 0.9, 0.1],
        ]
    )
    advance = np.zeros((4, 4))
    advance[1, 0] = advance[2, 1] = advance[2, 2] = advance[3, 3] = 1.0
    turn = np.zeros((4, 4))
    turn[0, 0] = turn[3, 1] = turn[2, 2] = turn[3, 3] = 1.0
    B_star = np.stack([advance, turn])
    process = GenerativeProcess(A_star, B_star, initial_state=0)

    horizon = 3
    a = np.full((4, 4), 0.1)
    a[START_VIEW, 0] = 10.0
    a[JUNCTION_VIEW, 1] = 10.0
    a[REWARD:, 2:] = 1.0  # arms: reward contingency unknown
    counts = DirichletCounts(a=a, b=10.0 * B_star + 0.1, d=[10.0, 0.1, 0.1, 0.1])
    agent = _agent(
        counts,
        C=_tmaze_preferences(),
        gamma=1.0,
        horizon=horizon,
        policies=enumerate_policies(2, horizon - 1),
    )
    regime = RegimeConfig(loop_I_learning=True, loop_II=True, loop_I_frozen_in_use=True)
    return Scenario(process, agent, regime, episodes=100, use_episodes=50, seed=11, name="tmaze")


CUE_LEFT, CUE_RIGHT = 0, 1


def cue_conditional() -> Scenario:
    # states (context, place): 0 (L, start) 1 (R, start) 2 (L, left) 3 (R, left)
    # 4 (L, right) 5 (R, right); in context L the left arm pays off
    A_star = np.zeros((4, 6))
    A_star[:, 0] = [0.9, 0.1, 0.0, 0.0]
    A_star[:, 1] = [0.1, 0.9, 0.0, 0.0]
    A_star[:, 2] = [0.0, 0.0, 0.9, 0.1]
    A_star[:, 3] = [0.0, 0.0, 0.1, 0.9]
    A_star[:, 4] = [0.0, 0.0, 0.1, 0.9]
    A_star[:, 5] = [0.0, 0.0, 0.9, 0.1]
    go_left = np.eye(6)
    go_right = np.eye(6)
    for ctx in (0, 1):
        go_left[:, ctx] = 0.0
        go_left[2 + ctx, ctx] = 1.0
        go_right[:, ctx] = 0.0
        go_right[4 + ctx, ctx] = 1.0
    B_star = np.stack([go_left, go_right])
    process = GenerativeProcess(A_star, B_star, initial_state=[0.5, 0.5, 0, 0, 0, 0])

    horizon = 3
    a = np.full((4, 6), 0.1)
    a[:2, 0] = [18.0, 2.0]
    a[:2, 1] = [2.0, 18.0]
    a[REWARD:, 2:] = 1.0
    counts = DirichletCounts(a=a, b=10.0 * B_star + 0.1, d=[5.0, 5.0, 0.1, 0.1, 0.1, 0.1])
    agent = _agent(
        counts,
        C=_tmaze_preferences(),
        gamma=1.0,
        horizon=horizon,
        policies=enumerate_policies(2, horizon - 1),
    )
    regime = RegimeConfig(loop_I_learning=True, loop_II=True, loop_I_frozen_in_use=False)
    return Scenario(process, agent, regime, episodes=100, use_episodes=50, seed=5, name="cue-conditional")


def novel_stimulus() -> Scenario:
    # the world sits in state 2, which the agent has no concept for
    A_star = np.array(
        [
            [0.9, 0.05, 0.025],
            [0.05, 0.9, 0.025],
            [0.05, 0.05, 0.95],
        ]
    )
    process = GenerativeProcess(A_star, initial_state=2)
    horizon = 4
    counts = DirichletCounts(
        a=[[50.0, 1.0], [1.0, 50.0], [1.0, 1.0]],
        b=[[[50.0, 1.0], [1.0, 50.0]]],
        d=[1.0, 1.0],
    )
    agent = _agent(counts, C=np.full(3, 1.0 / 3), gamma=1.0, horizon=horizon, policies=[(0,) * (horizon - 1)])
    regime = RegimeConfig(loop_I_learning=True, loop_II=False, loop_I_frozen_in_use=False)
    return Scenario(
        process,
        agent,
        regime,
        episodes=10,
        seed=3,
        expansion=ExpansionConfig(window=10),
        name="novel-stimulus",
    )


_BUILDERS = {
    "discrimination-2x2": discrimination_2x2,
    "tmaze": tmaze,
    "cue-conditional": cue_conditional,
    "novel-stimulus": novel_stimulus,
}


def fixture(name: str) -> Scenario:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise DomainError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}") from None
