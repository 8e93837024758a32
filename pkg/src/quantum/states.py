"""Exact and diagonal-ensemble representations of doubly entangled photon pairs.

Each photon carries a polarization qubit (H=0, V=1) and a frequency-band qubit
(signal/idler band = 0, shifted band = 1). A pair lives in the 16-dim space
ordered (pol_a, freq_a, pol_b, freq_b).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from src.quantum import linalg
from src.utils.config import config
from src.utils.errors import DomainError, UnsupportedStateError
from src.utils.helpers import require_probability

POL_A, FREQ_A, POL_B, FREQ_B = 0, 1, 2, 3
PAIR_QUBITS = 4
PAIR_DIM = 16


class DepBasisState(str, Enum):
    """The eight two-photon basis states of the DEP Werner mixture."""

    PHI_PLUS = "Φ+"
    PHI_MINUS = "Φ−"
    PSI_PLUS = "Ψ+"
    PSI_MINUS = "Ψ−"
    GAMMA_PLUS = "Γ+"
    GAMMA_MINUS = "Γ−"
    UPSILON_PLUS = "Υ+"
    UPSILON_MINUS = "Υ−"

    @property
    def index(self) -> int:
        return _ORDER.index(self)

    @property
    def label(self) -> tuple[int, int, int]:
        """(flag_a, flag_b, phase): flag = polarization mismatched to band."""
        return _LABELS[self]

    @classmethod
    def from_label(cls, label: tuple[int, int, int]) -> "DepBasisState":
        return _BY_LABEL[tuple(label)]


_ORDER = list(DepBasisState)

# First branch (pol_a, freq_a, pol_b, freq_b); the second branch flips every bit.
_FIRST_BRANCH = {
    "PHI": (0, 0, 0, 0),
    "PSI": (0, 0, 1, 0),
    "GAMMA": (1, 0, 0, 0),
    "UPSILON": (1, 0, 1, 0),
}
_FLAGS = {"PHI": (0, 0), "PSI": (0, 1), "GAMMA": (1, 0), "UPSILON": (1, 1)}

_LABELS = {
    s: (*_FLAGS[s.name.rsplit("_", 1)[0]], 0 if s.name.endswith("PLUS") else 1)
    for s in DepBasisState
}
_BY_LABEL = {label: s for s, label in _LABELS.items()}


def basis_vector(state: DepBasisState) -> np.ndarray:
    """Normalized 16-dim ket of a basis state."""
    family = state.name.rsplit("_", 1)[0]
    first = _FIRST_BRANCH[family]
    second = tuple(1 - bit for bit in first)
    sign = 1.0 if state.name.endswith("PLUS") else -1.0
    return (linalg.basis_ket(first) + sign * linalg.basis_ket(second)) / math.sqrt(2)


BASIS_VECTORS = np.array([basis_vector(s) for s in DepBasisState])
BASIS_PROJECTORS = np.array([linalg.ket_to_density(v) for v in BASIS_VECTORS])


def validate_density(matrix: np.ndarray, dim: int) -> np.ndarray:
    """Return a read-only complex copy of ``matrix`` after checking it is a density matrix."""
    m = np.array(matrix, dtype=complex, copy=True)
    if m.shape != (dim, dim):
        raise DomainError(f"Expected a {dim}x{dim} matrix, got {m.shape}")
    herm = linalg.hermiticity_error(m)
    if herm > config.HERMITICITY_TOL:
        raise DomainError(f"Matrix is not Hermitian (max deviation {herm:.3e})")
    trace = np.trace(m).real
    if abs(trace - 1.0) > config.NORMALIZATION_TOL:
        raise DomainError(f"Trace must be 1, got {trace:.15g}")
    low = linalg.min_eigenvalue(m)
    if low < -config.PSD_TOL:
        raise DomainError(f"Matrix is not positive semidefinite (min eigenvalue {low:.3e})")
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class FullPairState:
    """Exact 16x16 density matrix of one photon pair."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", validate_density(self.matrix, PAIR_DIM))

    @classmethod
    def from_ket(cls, ket: np.ndarray) -> "FullPairState":
        ket = np.asarray(ket, dtype=complex).reshape(-1)
        return cls(linalg.ket_to_density(ket / np.linalg.norm(ket)))

    @classmethod
    def maximally_mixed(cls) -> "FullPairState":
        return cls(np.eye(PAIR_DIM, dtype=complex) / PAIR_DIM)

    def weight(self, state: DepBasisState) -> float:
        v = BASIS_VECTORS[state.index]
        return float(np.real(v.conj() @ self.matrix @ v))

    def fidelity(self) -> float:
        """Overlap with Φ+."""
        return self.weight(DepBasisState.PHI_PLUS)


@dataclass(frozen=True)
class PairEnsemble:
    """Probability weights over the eight basis states plus junk mass outside them."""

    weights: tuple[float, ...]
    junk: float = 0.0
    fidelity: float = field(init=False)

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        if len(weights) != len(_ORDER):
            raise DomainError(f"Expected {len(_ORDER)} weights, got {len(weights)}")
        if any(not math.isfinite(w) or w < 0.0 for w in weights):
            raise DomainError(f"Weights must be finite and non-negative: {weights}")
        junk = float(self.junk)
        if not math.isfinite(junk) or junk < 0.0:
            raise DomainError(f"Junk mass must be non-negative, got {junk!r}")
        total = math.fsum(weights) + junk
        if abs(total - 1.0) > config.NORMALIZATION_TOL:
            raise DomainError(f"Weights plus junk must sum to 1, got {total:.15g}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "junk", junk)
        object.__setattr__(self, "fidelity", weights[0])

    @classmethod
    def from_mapping(cls, mapping: dict[DepBasisState, float], junk: float = 0.0) -> "PairEnsemble":
        return cls(tuple(float(mapping.get(s, 0.0)) for s in _ORDER), junk)

    @classmethod
    def from_unnormalized(cls, weights, junk: float = 0.0) -> "PairEnsemble":
        """Build from raw numerical weights: clip round-off negatives, assign the remainder to junk."""
        cleaned = []
        for w in weights:
            w = float(np.real(w))
            if w < -config.NORMALIZATION_TOL:
                raise DomainError(f"Negative weight {w:.3e}")
            cleaned.append(max(w, 0.0))
        remainder = 1.0 - math.fsum(cleaned) - junk
        if remainder < -config.NORMALIZATION_TOL:
            raise DomainError(f"Weights exceed unit mass by {-remainder:.3e}")
        return cls(tuple(cleaned), junk + max(remainder, 0.0))

    def weight(self, state: DepBasisState) -> float:
        return self.weights[state.index]


def make_werner(F: float) -> PairEnsemble:
    """F on Φ+, (1−F)/7 on each of the seven other basis states."""
    F = require_probability("F", F)
    other = (1.0 - F) / 7.0
    return PairEnsemble((F,) + (other,) * 7, 0.0)


def make_pure(state: DepBasisState) -> PairEnsemble:
    return PairEnsemble.from_mapping({state: 1.0})


def fidelity(e: PairEnsemble) -> float:
    return e.fidelity


def twirl(e: PairEnsemble) -> PairEnsemble:
    """Werner ensemble with the same fidelity."""
    return make_werner(e.fidelity)


def embed(e: PairEnsemble) -> FullPairState:
    """Σ weights[s]·|s⟩⟨s| as an exact density matrix."""
    if e.junk > 0.0:
        raise UnsupportedStateError(
            f"Ensemble carries junk mass {e.junk:.3e}, which has no canonical matrix form"
        )
    matrix = np.tensordot(np.asarray(e.weights), BASIS_PROJECTORS, axes=1)
    return FullPairState(matrix)


def project_diagonal(m: FullPairState) -> PairEnsemble:
    """Diagonal weights ⟨s|m|s⟩ in the eight-state basis; the rest becomes junk."""
    weights = np.real(np.einsum("si,ij,sj->s", BASIS_VECTORS.conj(), m.matrix, BASIS_VECTORS))
    return PairEnsemble.from_unnormalized(weights)


def random_ensemble(rng: np.random.Generator, junk: bool = False) -> PairEnsemble:
    """Uniformly random point of the weight simplex (optionally with a junk share)."""
    raw = rng.dirichlet(np.ones(9 if junk else 8))
    if junk:
        return PairEnsemble.from_unnormalized(raw[:8])
    return PairEnsemble.from_unnormalized(raw)
