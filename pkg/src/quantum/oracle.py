"""Exact dense simulation of the purification optics, distillation and swapping.

Ground truth for every analytic recursion. No sampling: every measurement keeps
all branches, so results are deterministic.

Photon layout inside an n-qubit matrix: each photon occupies two adjacent
qubits (polarization, frequency band). A pair uses qubits 0-3, two pairs 0-7.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from src.models.schemas import CompareReport, NoiseParams
from src.quantum import linalg
from src.quantum.noise import coerce_noise, measure_qubit_unnormalized, one_qubit_channel
from src.quantum.states import (
    PAIR_DIM,
    FullPairState,
    embed,
    make_werner,
    validate_density,
)
from src.utils.config import config
from src.utils.errors import DegenerateSelectionError
from src.utils.helpers import require_probability

logger = logging.getLogger(__name__)


class ElementKind(str, Enum):
    WDM = "WDM"
    HWP = "HWP"
    PBS = "PBS"
    WAVELENGTH_CONVERTER = "wavelength-converter"


@dataclass(frozen=True)
class OpticalElement:
    """A linear-optics element acting on one photon's (polarization, band) qubits.

    Routers (PBS, WDM) return one projector per output arm; the others return a
    single unitary.
    """

    kind: ElementKind
    port: Optional[str] = None

    def local_operators(self) -> list[np.ndarray]:
        if self.kind is ElementKind.PBS:
            return [np.kron(linalg.PROJ0, linalg.I2), np.kron(linalg.PROJ1, linalg.I2)]
        if self.kind is ElementKind.WDM:
            return [np.kron(linalg.I2, linalg.PROJ0), np.kron(linalg.I2, linalg.PROJ1)]
        if self.kind is ElementKind.HWP:
            return [np.kron(linalg.X, linalg.I2)]
        return [np.kron(linalg.I2, linalg.X)]

    def apply(self, rho: np.ndarray, pol_qubit: int) -> np.ndarray:
        """Act on the photon whose polarization is ``pol_qubit``; router arms add incoherently."""
        n = linalg.n_qubits(rho)
        targets = [pol_qubit, pol_qubit + 1]
        out = np.zeros_like(rho)
        for op in self.local_operators():
            out = out + linalg.conjugate(rho, linalg.expand_operator(op, targets, n))
        return out


PBS = OpticalElement(ElementKind.PBS)
WDM = OpticalElement(ElementKind.WDM)
HWP = OpticalElement(ElementKind.HWP, port="lower")
CONVERTER = OpticalElement(ElementKind.WAVELENGTH_CONVERTER, port="V")


def port_projector(lower: bool) -> np.ndarray:
    """PBS then WDM: the lower port collects polarization mismatched to the band."""
    arms_pol = PBS.local_operators()
    arms_band = WDM.local_operators()
    target = 1 if lower else 0
    return sum(
        arms_pol[pol] @ arms_band[band]
        for pol in (0, 1)
        for band in (0, 1)
        if pol ^ band == target
    )


def degeneration_unitary() -> np.ndarray:
    """Converter on the V arm of a PBS: band ← band ⊕ polarization."""
    arm_h, arm_v = PBS.local_operators()
    (converter,) = CONVERTER.local_operators()
    return arm_h + converter @ arm_v


def degenerate(rho: np.ndarray, pol_qubits: list[int] | tuple[int, ...]) -> np.ndarray:
    """Apply the degeneration unitary to each listed photon (it is its own inverse)."""
    n = linalg.n_qubits(rho)
    unitary = degeneration_unitary()
    for q in pol_qubits:
        rho = linalg.conjugate(rho, linalg.expand_operator(unitary, [q, q + 1], n))
    return rho


PORT_PATTERNS = {(0, 0): "1-3", (0, 1): "1-4", (1, 0): "2-3", (1, 1): "2-4"}


def _step1_branches(rho: np.ndarray, noise: NoiseParams) -> dict[str, np.ndarray]:
    lower = port_projector(True)
    upper = port_projector(False)
    branches = {}
    for (port_a, port_b), name in PORT_PATTERNS.items():
        proj = np.kron(lower if port_a else upper, lower if port_b else upper)
        branch = linalg.conjugate(rho, proj)
        for fired, pol_qubit in ((port_a, 0), (port_b, 2)):
            if fired:
                branch = one_qubit_channel(branch, linalg.X, pol_qubit, noise.p1)
        branches[name] = branch
    return branches


def step1_branches(s: FullPairState, noise: NoiseParams | None = None) -> dict[str, float]:
    """Weights of the four exit-port patterns (port 1/2 for photon a, 3/4 for photon b)."""
    branches = _step1_branches(s.matrix, coerce_noise(noise))
    return {name: float(np.real(np.trace(b))) for name, b in branches.items()}


def simulate_step1_optics(s: FullPairState, noise: NoiseParams | None = None) -> FullPairState:
    """Route each photon by PBS+WDM, flip polarization on the lower ports, recombine."""
    branches = _step1_branches(s.matrix, coerce_noise(noise))
    return FullPairState(sum(branches.values()))


@dataclass(frozen=True, eq=False)
class TwoPairState:
    """256x256 density matrix over pair1 ⊗ pair2."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", validate_density(self.matrix, PAIR_DIM * PAIR_DIM))

    @classmethod
    def of(cls, pair1: FullPairState, pair2: FullPairState) -> "TwoPairState":
        return cls(np.kron(pair1.matrix, pair2.matrix))


def _parity_roots(eta: float) -> tuple[np.ndarray, np.ndarray]:
    """√ of the noisy parity POVM elements on two qubits (even, odd)."""
    even = np.diag([1, 0, 0, 1]).astype(complex)
    odd = np.diag([0, 1, 1, 0]).astype(complex)
    return (
        np.sqrt(eta) * even + np.sqrt(1.0 - eta) * odd,
        np.sqrt(eta) * odd + np.sqrt(1.0 - eta) * even,
    )


# pair1 photons a1, b1 -> pol qubits 0, 2; pair2 photons a2, b2 -> 4, 6
_A1, _B1, _A2, _B2 = 0, 2, 4, 6


def _distillation_patterns(two: TwoPairState, noise: NoiseParams) -> dict[str, np.ndarray]:
    rho = degenerate(two.matrix, (_A1, _B1, _A2, _B2))
    for q in (_A1, _B1, _A2, _B2):
        rho = one_qubit_channel(rho, linalg.H, q, noise.p1)
    n = linalg.n_qubits(rho)
    roots = _parity_roots(require_probability("eta", noise.eta))
    patterns = {}
    for alice, root_a in zip(("even", "odd"), roots):
        rho_a = linalg.conjugate(rho, linalg.expand_operator(root_a, [_A1, _A2], n))
        for bob, root_b in zip(("even", "odd"), roots):
            patterns[f"{alice}-{bob}"] = linalg.conjugate(
                rho_a, linalg.expand_operator(root_b, [_B1, _B2], n)
            )
    return patterns


def distillation_patterns(
    pair1: FullPairState, pair2: FullPairState, noise: NoiseParams | None = None
) -> dict[str, float]:
    """Probabilities of the four parity coincidence patterns before post-selection."""
    patterns = _distillation_patterns(TwoPairState.of(pair1, pair2), coerce_noise(noise))
    return {name: float(np.real(np.trace(m))) for name, m in patterns.items()}


def simulate_distillation(
    pair1: FullPairState, pair2: FullPairState, noise: NoiseParams | None = None
) -> tuple[float, FullPairState]:
    """Phase-error distillation of two step-1-corrected pairs.

    Degenerate to polarization Bell states, rotate all four polarizations by a
    half-wave plate (Φ− becomes Ψ+), compare polarization parities on each
    side and keep the pair when both sides agree. The second pair is read out
    in the diagonal basis; a disagreement is fixed by a phase flip on b1.
    """
    noise = coerce_noise(noise)
    patterns = _distillation_patterns(TwoPairState.of(pair1, pair2), noise)
    accepted = patterns["even-even"] + patterns["odd-odd"]
    p_succ = float(np.real(np.trace(accepted)))
    if p_succ < config.MIN_SUCCESS_PROBABILITY:
        raise DegenerateSelectionError(p_succ)

    n = linalg.n_qubits(accepted)
    readout = linalg.apply_unitary(linalg.apply_unitary(accepted, linalg.H, [_A2]), linalg.H, [_B2])
    kept = np.zeros_like(readout)
    for m_a in (0, 1):
        for m_b in (0, 1):
            proj = linalg.expand_operator(
                np.kron(linalg.PROJ1 if m_a else linalg.PROJ0, linalg.PROJ1 if m_b else linalg.PROJ0),
                [_A2, _B2],
                n,
            )
            branch = linalg.conjugate(readout, proj)
            if m_a != m_b:
                branch = linalg.apply_unitary(branch, linalg.Z, [_B1])
            kept = kept + branch
    pair = linalg.partial_trace(kept, [0, 1, 2, 3]) / p_succ
    pair = degenerate(pair, (0, 2))
    logger.debug("distillation accepted with p_succ=%.12g", p_succ)
    return p_succ, FullPairState(pair)


@dataclass(frozen=True)
class SwapResult:
    """Announced Bell outcomes (phase bit, parity bit, band flags) and corrected outer pairs."""

    probabilities: dict[tuple[int, int, int, int], float]
    outcome_states: dict[tuple[int, int, int, int], FullPairState] = field(repr=False)
    state: FullPairState = field(repr=False)


# outer photon x -> pol 0, node photons y1 -> 2, y2 -> 4, outer photon z -> 6
_X, _Y1, _Y2, _Z = 0, 2, 4, 6


def simulate_swap(
    pair1: FullPairState, pair2: FullPairState, noise: NoiseParams | None = None
) -> SwapResult:
    """Bell measurement on the node's two photons, announced correction on the far photon."""
    noise = coerce_noise(noise)
    rho = degenerate(TwoPairState.of(pair1, pair2).matrix, (_X, _Y1, _Y2, _Z))
    rho = linalg.apply_unitary(rho, linalg.CNOT, [_Y1, _Y2])
    rho = linalg.apply_unitary(rho, linalg.H, [_Y1])
    n = linalg.n_qubits(rho)

    probabilities: dict[tuple[int, int, int, int], float] = {}
    outcome_states: dict[tuple[int, int, int, int], FullPairState] = {}
    total = np.zeros((PAIR_DIM, PAIR_DIM), dtype=complex)
    for phase_bit, after_phase in enumerate(measure_qubit_unnormalized(rho, _Y1, noise.eta)):
        for parity_bit, after_parity in enumerate(measure_qubit_unnormalized(after_phase, _Y2, noise.eta)):
            for flag1 in (0, 1):
                for flag2 in (0, 1):
                    proj = linalg.expand_operator(
                        np.kron(linalg.PROJ1 if flag1 else linalg.PROJ0, linalg.PROJ1 if flag2 else linalg.PROJ0),
                        [_Y1 + 1, _Y2 + 1],
                        n,
                    )
                    branch = linalg.conjugate(after_parity, proj)
                    correction = np.linalg.matrix_power(linalg.X, parity_bit) @ np.linalg.matrix_power(linalg.Z, phase_bit)
                    branch = one_qubit_channel(branch, correction, _Z, noise.p1)
                    if flag2:
                        branch = linalg.apply_unitary(branch, linalg.X, [_X + 1])
                    if flag1:
                        branch = linalg.apply_unitary(branch, linalg.X, [_Z + 1])
                    outer = degenerate(linalg.partial_trace(branch, [_X, _X + 1, _Z, _Z + 1]), (0, 2))
                    key = (phase_bit, parity_bit, flag1, flag2)
                    weight = float(np.real(np.trace(outer)))
                    probabilities[key] = weight
                    if weight > config.MIN_SUCCESS_PROBABILITY:
                        outcome_states[key] = FullPairState(outer / weight)
                    total = total + outer
    return SwapResult(probabilities, outcome_states, FullPairState(total))


def purify_state(state: FullPairState, noise: NoiseParams | None = None) -> tuple[float, FullPairState]:
    """Full oracle round on two copies of ``state``: step-1 optics then distillation."""
    corrected = simulate_step1_optics(state, noise)
    return simulate_distillation(corrected, corrected, noise)


def simulate_round(F: float, noise: NoiseParams | None = None) -> tuple[float, float]:
    """(p_succ, output fidelity) of one oracle round on two Werner(F) pairs."""
    p_succ, out = purify_state(embed(make_werner(F)), noise)
    return p_succ, out.fidelity()


def _qubit_werner(F: float) -> np.ndarray:
    phi_plus = linalg.ket_to_density((linalg.basis_ket((0, 0)) + linalg.basis_ket((1, 1))) / np.sqrt(2))
    return F * phi_plus + (1.0 - F) / 3.0 * (np.eye(4, dtype=complex) - phi_plus)


def simulate_bennett_round(F1: float, F2: float | None = None) -> tuple[float, float]:
    """(p_succ, output fidelity) of bilateral-CNOT distillation on two qubit Werner pairs."""
    F1 = require_probability("F1", F1)
    F2 = F1 if F2 is None else require_probability("F2", F2)
    # qubits: a1, b1, a2, b2
    rho = np.kron(_qubit_werner(F1), _qubit_werner(F2))
    rho = linalg.apply_unitary(rho, linalg.CNOT, [0, 2])
    rho = linalg.apply_unitary(rho, linalg.CNOT, [1, 3])
    accepted = np.zeros_like(rho)
    for bit in (0, 1):
        proj = linalg.PROJ1 if bit else linalg.PROJ0
        accepted = accepted + linalg.conjugate(rho, linalg.expand_operator(np.kron(proj, proj), [2, 3], 4))
    p_succ = float(np.real(np.trace(accepted)))
    if p_succ < config.MIN_SUCCESS_PROBABILITY:
        raise DegenerateSelectionError(p_succ)
    pair = linalg.partial_trace(accepted, [0, 1]) / p_succ
    phi_plus = (linalg.basis_ket((0, 0)) + linalg.basis_ket((1, 1))) / np.sqrt(2)
    return p_succ, float(np.real(phi_plus.conj() @ pair @ phi_plus))


def compare(
    analytic: float,
    oracle: float,
    tolerance: float | None = None,
    name: str = "",
    expected_gap: bool = False,
) -> CompareReport:
    """Absolute difference with a verdict; ``expected_gap`` rows pass only when they differ."""
    tolerance = config.ORACLE_TOLERANCE if tolerance is None else tolerance
    difference = abs(float(analytic) - float(oracle))
    passed = difference > tolerance if expected_gap else difference <= tolerance
    return CompareReport(
        name=name,
        analytic=float(analytic),
        oracle=float(oracle),
        difference=difference,
        tolerance=tolerance,
        passed=passed,
        expected_gap=expected_gap,
    )
