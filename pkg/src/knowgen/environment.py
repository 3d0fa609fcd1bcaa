"""Simulated generative processes: the world the agent samples stimuli from.

The true state of a :class:`GenerativeProcess` is private. Agents only ever
see the stimulus indices returned by :meth:`reset` and :meth:`step`.
"""

from __future__ import annotations

from typing import Optional, Union

import numpy as np

from .probmath import DomainError, as_categorical, as_column_stochastic, sample_categorical


class GenerativeProcess:
    """Emission ``A_star`` (m x n*), controlled transitions ``B_star`` (k x n* x n*),
    an autonomous transition used when no action is taken (identity unless
    given), and an initial state (index or distribution) drawn at each reset.
    """

    def __init__(self, A_star, B_star=(), initial_state: Union[int, np.ndarray, list] = 0, autonomous=None):
        self.A_star = as_column_stochastic(A_star, "A_star")
        m, n = self.A_star.shape
        B = np.asarray(B_star, dtype=float)
        if B.size == 0:
            B = np.zeros((0, n, n))
        if B.ndim != 3 or B.shape[1:] != (n, n):
            raise DomainError(f"B_star must have shape (actions, {n}, {n}), got {B.shape}")
        for k, mat in enumerate(B):
            as_column_stochastic(mat, f"B_star[{k}]")
        self.B_star = B
        self.autonomous = np.eye(n) if autonomous is None else as_column_stochastic(autonomous, "autonomous")
        if self.autonomous.shape != (n, n):
            raise DomainError(f"autonomous transition must be {n} x {n}")
        if np.ndim(initial_state) == 0:
            idx = int(initial_state)
            if not 0 <= idx < n:
                raise DomainError(f"initial_state {idx} outside 0..{n - 1}")
            self.initial = np.eye(n)[idx]
        else:
            self.initial = as_categorical(initial_state, "initial_state")
            if self.initial.shape != (n,):
                raise DomainError(f"initial_state distribution must have length {n}")
        self._state = int(np.argmax(self.initial))

    @property
    def n_stimuli(self) -> int:
        return self.A_star.shape[0]

    @property
    def n_states(self) -> int:
        return self.A_star.shape[1]

    @property
    def n_actions(self) -> int:
        return self.B_star.shape[0]

    def copy(self) -> "GenerativeProcess":
        clone = GenerativeProcess(self.A_star, self.B_star, self.initial, self.autonomous)
        clone._state = self._state
        return clone

    def _emit(self, rng: np.random.Generator) -> int:
        return sample_categorical(self.A_star[:, self._state], rng)

    def reset(self, rng: np.random.Generator) -> int:
        """Draw a fresh initial state and return its first stimulus."""
        self._state = sample_categorical(self.initial, rng)
        return self._emit(rng)

    def step(self, action: Optional[int], rng: np.random.Generator) -> int:
        if action is None:
            trans = self.autonomous
        else:
            if not 0 <= int(action) < self.n_actions:
                raise DomainError(f"action {action} outside 0..{self.n_actions - 1}")
            trans = self.B_star[int(action)]
        self._state = sample_categorical(trans[:, self._state], rng)
        return self._emit(rng)

    def to_dict(self) -> dict:
        init = self.initial
        one_hot = np.count_nonzero(init) == 1 and init.max() == 1.0
        return {
            "A_star": self.A_star.tolist(),
            "B_star": self.B_star.tolist(),
            "initial_state": int(np.argmax(init)) if one_hot else init.tolist(),
            "autonomous": self.autonomous.tolist(),
        }


def env_step(gp: GenerativeProcess, action: Optional[int], rng: np.random.Generator) -> int:
    """Advance ``gp`` by one transition (autonomous when ``action`` is None) and emit."""
    return gp.step(action, rng)
