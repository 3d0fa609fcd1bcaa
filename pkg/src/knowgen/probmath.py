"""Categorical and Dirichlet probability kernels.

All information quantities are in nats. ``0 * ln 0`` is taken as 0.
Distributions are plain numpy arrays; the ``as_*`` helpers validate them
and reject anything outside a 1e-10 normalization tolerance instead of
silently renormalizing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

NORM_TOL = 1e-10
LOG_FLOOR = 1e-16


class DomainError(ValueError):
    """Raised when an input lies outside the domain of an operation."""


def as_categorical(probs, name: str = "distribution") -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise DomainError(f"{name} must be a non-empty vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise DomainError(f"{name} has non-finite entries")
    if np.any(p < 0):
        raise DomainError(f"{name} has negative entries")
    total = p.sum()
    if abs(total - 1.0) > NORM_TOL:
        raise DomainError(f"{name} sums to {total!r}, not 1")
    return p


def as_column_stochastic(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise DomainError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)) or np.any(a < 0):
        raise DomainError(f"{name} must be finite and non-negative")
    sums = a.sum(axis=0)
    bad = np.flatnonzero(np.abs(sums - 1.0) > NORM_TOL)
    if bad.size:
        raise DomainError(f"{name} column {int(bad[0])} sums to {sums[bad[0]]!r}, not 1")
    return a


@dataclass(frozen=True)
class JointDistribution:
    """A normalized two-way table ``probs[i, j]`` with optional axis labels."""

    probs: np.ndarray
    row_labels: Sequence[str] = field(default=())
    col_labels: Sequence[str] = field(default=())

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 2:
            raise DomainError(f"joint distribution must be 2-D, got shape {p.shape}")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise DomainError("joint distribution must be finite and non-negative")
        if abs(p.sum() - 1.0) > NORM_TOL:
            raise DomainError(f"joint distribution sums to {p.sum()!r}, not 1")
        if self.row_labels and len(self.row_labels) != p.shape[0]:
            raise DomainError("row_labels length does not match rows")
        if self.col_labels and len(self.col_labels) != p.shape[1]:
            raise DomainError("col_labels length does not match columns")
        object.__setattr__(self, "probs", p)

    def row_marginal(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    def col_marginal(self) -> np.ndarray:
        return self.probs.sum(axis=0)


def xlogy(x, y) -> np.ndarray:
    """Elementwise ``x * ln(y)`` with ``0 * ln(anything) = 0``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.zeros(np.broadcast(x, y).shape)
    mask = np.broadcast_to(x != 0, out.shape)
    xb = np.broadcast_to(x, out.shape)
    yb = np.broadcast_to(y, out.shape)
    with np.errstate(divide="ignore"):
        out[mask] = xb[mask] * np.log(yb[mask])
    return out


def log_stable(x) -> np.ndarray:
    """Natural log with a 1e-16 floor, for potentials built from sparse matrices."""
    return np.log(np.maximum(np.asarray(x, dtype=float), LOG_FLOOR))


def entropy(d) -> float:
    p = as_categorical(d)
    return float(max(-xlogy(p, p).sum(), 0.0))


def kl_divergence(p, q) -> float:
    p = as_categorical(p, "p")
    q = as_categorical(q, "q")
    if p.shape != q.shape:
        raise DomainError(f"dimension mismatch: {p.shape} vs {q.shape}")
    bad = np.flatnonzero((p > 0) & (q == 0))
    if bad.size:
        raise DomainError(f"p is not absolutely continuous w.r.t. q at index {int(bad[0])}")
    support = p > 0
    return float(max(np.sum(p[support] * (np.log(p[support]) - np.log(q[support]))), 0.0))


def mutual_information(j) -> float:
    """I(X;Y) of a joint table, computed cell by cell from its marginals."""
    if not isinstance(j, JointDistribution):
        j = JointDistribution(np.asarray(j, dtype=float))
    p = j.probs
    outer = np.outer(j.row_marginal(), j.col_marginal())
    support = p > 0
    return float(max(np.sum(p[support] * np.log(p[support] / outer[support])), 0.0))


def softmax(values, gamma: float = 1.0) -> np.ndarray:
    """``exp(gamma * v) / sum``; larger values get more mass."""
    v = np.asarray(values, dtype=float)
    if gamma < 0:
        raise DomainError("gamma must be non-negative")
    if v.ndim != 1 or v.size == 0:
        raise DomainError("softmax expects a non-empty vector")
    if np.any(np.isnan(v)) or np.any(v == np.inf):
        raise DomainError("softmax values must be finite or -inf")
    if gamma == 0:
        return np.full(v.size, 1.0 / v.size)
    z = gamma * v
    top = z.max()
    if top == -np.inf:
        raise DomainError("softmax of all -inf values is undefined")
    e = np.exp(z - top)
    return e / e.sum()


def sample_categorical(d, rng: np.random.Generator) -> int:
    p = as_categorical(d)
    u = rng.random()
    idx = int(np.searchsorted(np.cumsum(p), u, side="right"))
    # guard against cumsum rounding just below 1
    idx = min(idx, p.size - 1)
    while p[idx] == 0:
        idx -= 1
    return idx


def normalize_columns(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
        squeeze = True
    else:
        squeeze = False
    if np.any(a < 0) or not np.all(np.isfinite(a)):
        raise DomainError("normalize_columns expects finite non-negative entries")
    sums = a.sum(axis=0)
    zero = np.flatnonzero(sums <= 0)
    if zero.size:
        raise DomainError(f"column {int(zero[0])} has zero sum")
    out = a / sums
    return out[:, 0] if squeeze else out
