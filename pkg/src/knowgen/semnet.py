"""Concept-stimulus matrices and the information-transfer energy.

A :class:`ConceptStimulusMatrix` stores ``entries[j, i]`` with rows indexing
stimuli and columns indexing concepts. The matrix induces a joint
distribution over (concept, stimulus) pairs proportional to its entries,
from which the mutual information I(S, R), the concept entropy H(S) and the
energy ``omega(lam) = -lam * I + (1 - lam) * H`` are computed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .probmath import DomainError, JointDistribution, entropy, mutual_information

DEFAULT_LAMBDA = 0.41

MODES = ("binary", "weighted")


@dataclass(frozen=True)
class ConceptStimulusMatrix:
    entries: np.ndarray
    mode: str = "binary"
    stimulus_labels: Sequence[str] = field(default=())
    concept_labels: Sequence[str] = field(default=())

    def __post_init__(self):
        e = np.array(self.entries, dtype=float)
        if e.ndim != 2 or 0 in e.shape:
            raise DomainError(f"entries must be a non-empty 2-D matrix, got shape {e.shape}")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not np.all(np.isfinite(e)) or np.any(e < 0):
            raise DomainError("entries must be finite and non-negative")
        if self.mode == "binary" and not np.all((e == 0) | (e == 1)):
            raise DomainError("binary mode requires entries in {0, 1}")
        if not np.any(e > 0):
            raise DomainError("matrix has no nonzero entry; the induced joint does not exist")
        m, n = e.shape
        stim = tuple(self.stimulus_labels) or tuple(f"r{j}" for j in range(m))
        conc = tuple(self.concept_labels) or tuple(f"s{i}" for i in range(n))
        if len(stim) != m or len(conc) != n:
            raise DomainError("label counts do not match matrix shape")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "stimulus_labels", stim)
        object.__setattr__(self, "concept_labels", conc)

    @classmethod
    def from_concept_vectors(cls, vectors, mode: str = "binary", **labels) -> "ConceptStimulusMatrix":
        """Build from one row per concept, i.e. each concept's stimulus vector."""
        return cls(np.asarray(vectors, dtype=float).T, mode=mode, **labels)

    @property
    def n_stimuli(self) -> int:
        return self.entries.shape[0]

    @property
    def n_concepts(self) -> int:
        return self.entries.shape[1]

    def concept_vectors(self) -> np.ndarray:
        """Row i is concept i expressed over the stimuli."""
        return self.entries.T

    def to_dict(self) -> dict:
        entries = self.entries
        if self.mode == "binary":
            rows = [[int(x) for x in row] for row in entries]
        else:
            rows = [[float(x) for x in row] for row in entries]
        return {
            "stimulus_labels": list(self.stimulus_labels),
            "concept_labels": list(self.concept_labels),
            "mode": self.mode,
            "entries": rows,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ConceptStimulusMatrix":
        for key in ("mode", "entries"):
            if key not in obj:
                raise DomainError(f"matrix file is missing field {key!r}")
        return cls(
            np.asarray(obj["entries"], dtype=float),
            mode=obj["mode"],
            stimulus_labels=obj.get("stimulus_labels", ()),
            concept_labels=obj.get("concept_labels", ()),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass(frozen=True)
class TransferEnergyReport:
    lam: float
    information: float
    concept_entropy: float
    omega: float
    a_omega: Optional[float] = None
    scaled_omega: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "information": self.information,
            "concept_entropy": self.concept_entropy,
            "omega": self.omega,
            "a_omega": self.a_omega,
            "scaled_omega": self.scaled_omega,
        }


def induced_joint(csm: ConceptStimulusMatrix) -> JointDistribution:
    """p(s_i, r_j) proportional to the link weights; rows are concepts."""
    e = csm.entries
    total = e.sum()
    if total <= 0:
        raise DomainError("all-zero matrix has no induced joint")
    return JointDistribution(e.T / total, row_labels=csm.concept_labels, col_labels=csm.stimulus_labels)


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    return lam


def _omega(info: float, h: float, lam: float) -> float:
    return -lam * info + (1.0 - lam) * h


def transfer_energy(csm: ConceptStimulusMatrix, lam: float = DEFAULT_LAMBDA) -> TransferEnergyReport:
    lam = _check_lambda(lam)
    joint = induced_joint(csm)
    info = mutual_information(joint)
    h = entropy(joint.row_marginal())
    omega = _omega(info, h, lam)
    if lam > 0:
        return TransferEnergyReport(lam, info, h, omega, a_omega=1.0 / lam - 1.0, scaled_omega=omega / lam)
    return TransferEnergyReport(lam, info, h, omega)


def machine_transfer_energy(csm: ConceptStimulusMatrix) -> float:
    """Transmission energy for a zero-entropy transmitter: the mutual information itself."""
    return mutual_information(induced_joint(csm))


def similarity_matrix(csm: ConceptStimulusMatrix) -> np.ndarray:
    """Cosine similarity between concept stimulus-vectors.

    A concept with no stimuli has similarity 0 to everything, itself included.
    """
    v = csm.concept_vectors()
    norms = np.linalg.norm(v, axis=1)
    gram = v @ v.T
    denom = np.outer(norms, norms)
    sim = np.zeros_like(gram)
    nz = denom > 0
    sim[nz] = gram[nz] / denom[nz]
    sim = np.clip(sim, 0.0, 1.0)
    live = norms > 0
    # identical nonzero vectors are exactly similar, free of rounding
    same = np.all(v[:, None, :] == v[None, :, :], axis=-1) & np.outer(live, live)
    sim = (sim + sim.T) / 2.0
    sim[same] = 1.0
    return sim


def synsets(csm: ConceptStimulusMatrix) -> list[list[int]]:
    """Group concepts whose stimulus links are identical, ordered by first member."""
    if csm.mode != "binary":
        raise DomainError("synsets are defined on binary link sets only")
    groups: dict[bytes, list[int]] = {}
    for i, col in enumerate(csm.concept_vectors()):
        groups.setdefault(col.astype(np.uint8).tobytes(), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def lambda_profile(csm: ConceptStimulusMatrix, grid: int) -> list[TransferEnergyReport]:
    """Transfer energy at ``grid`` evenly spaced lambda values including both endpoints."""
    if grid < 2:
        raise DomainError("grid must have at least 2 points")
    return [transfer_energy(csm, lam) for lam in np.linspace(0.0, 1.0, grid)]


def _binary_energy(bits: np.ndarray, lam: float) -> float:
    total = bits.sum()
    p = bits.T / total  # concepts x stimuli
    ps = p.sum(axis=1)
    pr = p.sum(axis=0)
    nz = p > 0
    info = float(np.sum(p[nz] * np.log(p[nz] / np.outer(ps, pr)[nz])))
    psn = ps[ps > 0]
    h = float(-np.sum(psn * np.log(psn)))
    return _omega(info, h, lam)


def greedy_descent(bits: np.ndarray, lam: float) -> tuple[np.ndarray, float]:
    """Steepest single-bit-flip descent on omega, never visiting the all-zero matrix."""
    bits = bits.copy()
    energy = _binary_energy(bits, lam)
    while True:
        best_gain, best_pos, best_energy = 0.0, None, energy
        for pos in np.ndindex(bits.shape):
            bits[pos] ^= 1
            if bits.any():
                e = _binary_energy(bits, lam)
                if energy - e > best_gain + 1e-12:
                    best_gain, best_pos, best_energy = energy - e, pos, e
            bits[pos] ^= 1
        if best_pos is None:
            return bits, energy
        bits[best_pos] ^= 1
        energy = best_energy


def optimize_matrix(
    n_concepts: int,
    n_stimuli: int,
    lam: float = DEFAULT_LAMBDA,
    rng: Optional[np.random.Generator] = None,
    restarts: int = 8,
) -> tuple[ConceptStimulusMatrix, TransferEnergyReport]:
    """Least-effort binary matrix for a fixed lambda via greedy restarts.

    Each restart draws a uniformly random nonzero binary matrix and runs
    steepest bit-flip descent; the lowest-energy local minimum wins (earliest
    restart on ties).
    """
    if n_concepts < 1 or n_stimuli < 1:
        raise DomainError("matrix dimensions must be positive")
    if restarts < 1:
        raise DomainError("restarts must be at least 1")
    lam = _check_lambda(lam)
    rng = rng if rng is not None else np.random.default_rng()
    best_bits, best_energy = None, np.inf
    for _ in range(restarts):
        start = rng.integers(0, 2, size=(n_stimuli, n_concepts), dtype=np.uint8)
        while not start.any():
            start = rng.integers(0, 2, size=(n_stimuli, n_concepts), dtype=np.uint8)
        bits, energy = greedy_descent(start, lam)
        if energy < best_energy - 1e-12:
            best_bits, best_energy = bits, energy
    csm = ConceptStimulusMatrix(best_bits.astype(float), mode="binary")
    return csm, transfer_energy(csm, lam)
