"""Scalar fidelity recursions for one two-pair purification round.

Step 1 corrects bit flips deterministically with wave plates; step 2 distills
phase errors from two corrected pairs by coincidence post-selection.
"""
from __future__ import annotations

import logging
from typing import Callable, Literal

import numpy as np
from scipy.optimize import bisect

from src.models.schemas import NoiseParams, PurificationMode, PurificationSchedule, RoundFidelity, RoundResult
from src.quantum.noise import coerce_noise
from src.utils.config import config
from src.utils.errors import ComputationError, TargetUnreachableError, UnpurifiableError
from src.utils.helpers import require_probability

logger = logging.getLogger(__name__)

NoisyVariant = Literal["closed-form", "oracle"]


def ideal_step1(F: float) -> float:
    """Φ+ weight after the wave-plate bit-flip correction."""
    F = require_probability("F", F)
    return (4.0 * F + 3.0) / 7.0


def ideal_round(F: float) -> RoundResult:
    p = ideal_step1(F)
    q = 1.0 - p
    denominator = p * p + q * q
    return RoundResult(f_out=p * p / denominator, p_succ=denominator)


def noisy_step1(F: float, p1: float) -> tuple[float, float]:
    """Unnormalized (Φ+, Φ−) weights after imperfect wave plates; 1 − a − b leaves the subspace."""
    F = require_probability("F", F)
    p1 = require_probability("p1", p1)
    spread = (2.0 * p1 + p1 * p1) * (1.0 - F) / 7.0
    a = F + spread
    b = (1.0 - F) / 7.0 + spread
    return a, b


def _distilled(a: float, b: float) -> tuple[float, float]:
    weight = a * a + b * b
    if weight <= 0.0:
        raise ComputationError(f"distillation weight must be positive, got {weight!r}")
    return a * a / weight, weight


def noisy_round(F: float, noise: NoiseParams | None = None, variant: NoisyVariant = "closed-form") -> RoundResult:
    """One round under imperfect operations.

    The ``closed-form`` variant evaluates the closed-form recursion: ``f_distilled`` is
    the post-selected fidelity a²/(a²+b²) and ``f_out`` the final fidelity after
    the four noisy wave plates and the η-limited parity check. The ``oracle``
    variant runs the dense optics simulation instead.
    """
    noise = coerce_noise(noise)
    if variant == "oracle":
        from src.quantum.oracle import simulate_round

        p_succ, f_out = simulate_round(F, noise)
        return RoundResult(f_out=min(max(f_out, 0.0), 1.0), p_succ=min(p_succ, 1.0))
    if variant != "closed-form":
        raise ValueError(f"Unknown noisy variant {variant!r}")

    a, b = noisy_step1(F, noise.p1)
    f_distilled, p_distilled = _distilled(a, b)

    eta = noise.eta
    gates = noise.p1 ** 4
    agree = eta * eta + (1.0 - eta) ** 2
    kept = gates * f_distilled * agree
    numerator = kept + (1.0 - gates) / 64.0
    denominator = kept + gates * (1.0 - f_distilled) * 2.0 * eta * (1.0 - eta) + (1.0 - gates) / 8.0
    if denominator <= 0.0:
        raise ComputationError(f"final-fidelity denominator must be positive, got {denominator!r}")
    return RoundResult(
        f_out=numerator / denominator,
        p_succ=denominator,
        f_distilled=f_distilled,
        p_distilled=p_distilled,
    )


def bennett_distill(F1: float, F2: float) -> RoundResult:
    """Bilateral-CNOT distillation of two qubit Werner pairs of fidelities F1, F2."""
    F1 = require_probability("F1", F1)
    F2 = require_probability("F2", F2)
    e1 = (1.0 - F1) / 3.0
    e2 = (1.0 - F2) / 3.0
    # accepted when both pairs share the bit parity: (Φ±,Φ±) or (Ψ±,Ψ±)
    p_succ = (F1 + e1) * (F2 + e2) + 4.0 * e1 * e2
    if p_succ <= 0.0:
        raise ComputationError(f"baseline success probability must be positive, got {p_succ!r}")
    return RoundResult(f_out=(F1 * F2 + e1 * e2) / p_succ, p_succ=p_succ)


def bennett_round(F: float) -> RoundResult:
    return bennett_distill(F, F)


def round_map(
    mode: PurificationMode,
    noise: NoiseParams | None = None,
    stage: RoundFidelity = "final",
) -> Callable[[float], RoundResult]:
    """The one-round map F ↦ RoundResult for a purification mode.

    For ``noisy-dep`` the returned result's ``f_out``/``p_succ`` hold the chosen
    ``stage``; the other modes have a single stage.
    """
    if mode == "ideal-dep":
        return ideal_round
    if mode == "noisy-dep":
        noise = coerce_noise(noise)
        if stage == "distilled":

            def distilled(F: float) -> RoundResult:
                result = noisy_round(F, noise)
                return RoundResult(f_out=result.f_distilled, p_succ=result.p_distilled)

            return distilled
        if stage != "final":
            raise ValueError(f"Unknown round stage {stage!r}")
        return lambda F: noisy_round(F, noise)
    if mode == "bennett":
        return bennett_round
    raise ValueError(f"Unknown purification mode {mode!r}")


def _gain(mode: PurificationMode, noise: NoiseParams, stage: RoundFidelity = "final") -> Callable[[float], float]:
    # Improvement of the round over the fidelity its two-pair step receives.
    if mode == "ideal-dep":
        return lambda F: ideal_round(F).f_out - ideal_step1(F)
    if mode == "noisy-dep":
        step = round_map(mode, noise, stage)

        def gain(F: float) -> float:
            return step(F).f_out - noisy_step1(F, noise.p1)[0]

        return gain
    if mode == "bennett":
        return lambda F: bennett_round(F).f_out - F
    raise ValueError(f"Unknown purification mode {mode!r}")


def threshold(
    mode: PurificationMode,
    noise: NoiseParams | None = None,
    stage: RoundFidelity = "final",
) -> float:
    """Lower edge of the highest interval on which a round improves fidelity.

    The improving interval reaches up to F = 1 for the ideal map; under noise
    it ends at the round map's attractor. Raises UnpurifiableError with
    ``threshold=None`` when no fidelity improves.
    """
    noise = coerce_noise(noise)
    gain = _gain(mode, noise, stage)
    lo, hi = config.THRESHOLD_BRACKET
    grid = np.linspace(lo, hi, config.THRESHOLD_SCAN_POINTS)
    gains = [gain(float(x)) for x in grid]

    top = next((i for i in range(len(grid) - 1, -1, -1) if gains[i] > 0.0), None)
    if top is None:
        raise UnpurifiableError(fidelity=hi, threshold=None, mode=mode)
    last = next((i for i in range(top - 1, -1, -1) if gains[i] <= 0.0), None)
    if last is None:
        logger.warning("every fidelity up to %.6g improves under %s; returning bracket edge %.3g", grid[top], mode, lo)
        return float(lo)
    if gains[last] == 0.0:
        return float(grid[last])
    root = bisect(
        gain,
        float(grid[last]),
        float(grid[last + 1]),
        xtol=config.THRESHOLD_XTOL,
        maxiter=config.THRESHOLD_MAX_ITER,
    )
    logger.debug("threshold(%s, %s, p1=%s, eta=%s) = %.12g", mode, stage, noise.p1, noise.eta, root)
    return float(root)


def fixed_point(
    mode: PurificationMode,
    noise: NoiseParams | None = None,
    start: float = 1.0,
    stage: RoundFidelity = "final",
) -> float:
    """Attractor of the round map reached from ``start``."""
    step = round_map(mode, noise, stage)
    F = require_probability("start", start)
    for _ in range(config.MAX_ITERATED_ROUNDS):
        nxt = step(F).f_out
        if abs(nxt - F) < config.FIXED_POINT_TOL:
            return nxt
        F = nxt
    raise ComputationError(f"{mode} round map did not settle within {config.MAX_ITERATED_ROUNDS} rounds")


def iterate_to_target(
    F0: float,
    F_target: float,
    mode: PurificationMode = "ideal-dep",
    noise: NoiseParams | None = None,
    stage: RoundFidelity = "final",
) -> PurificationSchedule:
    """Apply rounds until ``F_target`` is met, accumulating the expected pair cost.

    The purifiable check and the iterated map use the same ``stage``.
    """
    F0 = require_probability("F0", F0)
    F_target = require_probability("F_target", F_target)
    if F0 >= F_target:
        return PurificationSchedule(rounds=0, fidelity_trace=[F0], expected_pairs=1.0)

    limit = threshold(mode, noise, stage)
    if F0 <= limit:
        raise UnpurifiableError(fidelity=F0, threshold=limit, mode=mode)

    step = round_map(mode, noise, stage)
    trace = [F0]
    probabilities: list[float] = []
    cost = 1.0
    F = F0
    for _ in range(config.MAX_ITERATED_ROUNDS):
        result = step(F)
        cost *= 2.0 / result.p_succ
        trace.append(result.f_out)
        probabilities.append(result.p_succ)
        logger.debug("round %d: F=%.12g p_succ=%.6g", len(probabilities), result.f_out, result.p_succ)
        if result.f_out >= F_target:
            return PurificationSchedule(
                rounds=len(probabilities),
                fidelity_trace=trace,
                expected_pairs=cost,
                success_probabilities=probabilities,
            )
        if abs(result.f_out - F) < config.FIXED_POINT_TOL:
            raise TargetUnreachableError(target=F_target, attractor=result.f_out, mode=mode)
        F = result.f_out
    raise TargetUnreachableError(target=F_target, attractor=F, mode=mode)
