"""Imperfect-apparatus models: noisy projections and the depolarizing one-qubit map."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from src.models.schemas import NoiseParams
from src.quantum import linalg
from src.quantum.states import FREQ_A, FREQ_B, POL_A, POL_B, FullPairState, PairEnsemble, make_werner
from src.utils.config import config
from src.utils.helpers import require_probability

_QUBIT_OF = {("a", "pol"): POL_A, ("a", "freq"): FREQ_A, ("b", "pol"): POL_B, ("b", "freq"): FREQ_B}


@dataclass(frozen=True)
class Selector:
    """One two-level degree of freedom of one photon."""

    photon: Literal["a", "b"]
    dof: Literal["pol", "freq"] = "pol"

    @property
    def qubit(self) -> int:
        try:
            return _QUBIT_OF[(self.photon, self.dof)]
        except KeyError:
            raise ValueError(f"Unknown selector {self.photon}/{self.dof}") from None


@dataclass(frozen=True)
class MeasurementOutcome:
    """One branch of a noisy two-outcome measurement."""

    bit: int
    probability: float
    post_state: Optional[FullPairState]


def povm_elements(eta: float) -> tuple[np.ndarray, np.ndarray]:
    """P0 = η|0⟩⟨0| + (1−η)|1⟩⟨1|, P1 = η|1⟩⟨1| + (1−η)|0⟩⟨0|."""
    eta = require_probability("eta", eta)
    p0 = eta * linalg.PROJ0 + (1.0 - eta) * linalg.PROJ1
    p1 = eta * linalg.PROJ1 + (1.0 - eta) * linalg.PROJ0
    return p0, p1


def _sqrt_diagonal(element: np.ndarray) -> np.ndarray:
    # POVM elements here are diagonal in the computational basis.
    return np.diag(np.sqrt(np.clip(np.real(np.diag(element)), 0.0, None))).astype(complex)


def measure_qubit(rho: np.ndarray, qubit: int, eta: float) -> list[tuple[int, float, Optional[np.ndarray]]]:
    """Noisy Z measurement of one qubit of an n-qubit matrix.

    Returns (bit, probability, normalized post-state or None) for both outcomes.
    """
    n = linalg.n_qubits(rho)
    branches = []
    for bit, element in enumerate(povm_elements(eta)):
        root = linalg.expand_operator(_sqrt_diagonal(element), [qubit], n)
        unnormalized = linalg.conjugate(rho, root)
        probability = float(np.real(np.trace(unnormalized)))
        if probability <= 0.0:
            branches.append((bit, 0.0, None))
            continue
        branches.append((bit, probability, unnormalized / probability))
    return branches


def measure_qubit_unnormalized(rho: np.ndarray, qubit: int, eta: float) -> list[np.ndarray]:
    """Both subnormalized branches √P_i ρ √P_i of a noisy Z measurement."""
    n = linalg.n_qubits(rho)
    return [
        linalg.conjugate(rho, linalg.expand_operator(_sqrt_diagonal(element), [qubit], n))
        for element in povm_elements(eta)
    ]


def one_qubit_channel(rho: np.ndarray, unitary: np.ndarray, qubit: int, p1: float) -> np.ndarray:
    """p1·U ρ U† + (1−p1)·tr_q(ρ) ⊗ I/2 on qubit ``qubit`` of an n-qubit matrix."""
    p1 = require_probability("p1", p1)
    ideal = linalg.apply_unitary(rho, unitary, [qubit])
    if p1 == 1.0:
        return ideal
    return p1 * ideal + (1.0 - p1) * linalg.twirl_qubit(rho, qubit)


def noisy_measure(
    state: FullPairState, target: Selector, eta: float
) -> tuple[MeasurementOutcome, MeasurementOutcome]:
    """Measure one degree of freedom of one photon with projection quality η."""
    outcomes = [
        MeasurementOutcome(
            bit=bit,
            probability=probability,
            post_state=FullPairState(post) if post is not None else None,
        )
        for bit, probability, post in measure_qubit(state.matrix, target.qubit, eta)
    ]
    return outcomes[0], outcomes[1]


def noisy_one_qubit_op(
    state: FullPairState, ideal_op: np.ndarray, target: Selector, p1: float
) -> FullPairState:
    """Imperfect single-qubit operation on one degree of freedom."""
    return FullPairState(one_qubit_channel(state.matrix, np.asarray(ideal_op, dtype=complex), target.qubit, p1))


def transmit(F_target: float) -> PairEnsemble:
    """One segment's distribution of a DEP pair: the channel leaves a Werner mixture."""
    return make_werner(F_target)


def fidelity_at_distance(length_km: float, scale_km: float | None = None) -> float:
    """Extrapolated link fidelity (1 + 7·exp(−L/L0))/8; not a law stated for the protocol."""
    scale_km = config.DISTANCE_SCALE_KM if scale_km is None else scale_km
    if length_km < 0 or scale_km <= 0:
        raise ValueError("length must be non-negative and the scale positive")
    return (1.0 + 7.0 * math.exp(-length_km / scale_km)) / 8.0


def transmit_over(length_km: float, scale_km: float | None = None) -> PairEnsemble:
    return transmit(fidelity_at_distance(length_km, scale_km))


def coerce_noise(noise: NoiseParams | None) -> NoiseParams:
    return NoiseParams.ideal() if noise is None else noise
