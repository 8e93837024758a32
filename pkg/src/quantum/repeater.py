"""Nested repeater chain: entanglement swapping at the nodes, purification per level."""
from __future__ import annotations

import logging
import math

import numpy as np

from src.models.schemas import ChainConfig, ChainReport, NoiseParams, RoundFidelity
from src.quantum import oracle
from src.quantum.noise import coerce_noise
from src.quantum.purification import noisy_round, threshold
from src.quantum.states import (
    BASIS_PROJECTORS,
    DepBasisState,
    FullPairState,
    PairEnsemble,
    embed,
    make_werner,
)
from src.utils.config import config
from src.utils.errors import ChainCollapseError, UnpurifiableError

logger = logging.getLogger(__name__)

_LABELS = [s.label for s in DepBasisState]
_INDEX = {label: i for i, label in enumerate(_LABELS)}
_PHASE_FLIP = [_INDEX[(fa, fb, ph ^ 1)] for fa, fb, ph in _LABELS]
# out[g] = Σ_h a[h]·b[g ⊕ h] over (flag, flag, phase) labels
_XOR = np.array(
    [[_INDEX[tuple(x ^ y for x, y in zip(g, h))] for h in _LABELS] for g in _LABELS]
)
_SUBSPACE = BASIS_PROJECTORS.sum(axis=0)


def node_error_rates(noise: NoiseParams | None = None) -> tuple[float, float, float]:
    """(kept, phase-flipped, lost) shares of one node's Bell measurement and correction.

    Each announced bit is wrong with probability 1 − η; a wrong phase bit flips
    the phase, a wrong parity bit leaves the subspace. The correction
    depolarizes with probability 1 − p1: a quarter kept, a quarter flipped,
    half lost.
    """
    noise = coerce_noise(noise)
    p1, eta = noise.p1, noise.eta
    kept = p1 * eta * eta + (1.0 - p1) / 4.0
    flipped = p1 * eta * (1.0 - eta) + (1.0 - p1) / 4.0
    return kept, flipped, 1.0 - kept - flipped


def swap(a: PairEnsemble, b: PairEnsemble, noise: NoiseParams | None = None) -> PairEnsemble:
    """Outer pair after swapping ``a`` and ``b`` at their shared node."""
    wa = np.asarray(a.weights)
    wb = np.asarray(b.weights)
    joined = np.array([wa @ wb[_XOR[g]] for g in range(len(_LABELS))])
    kept, flipped, _ = node_error_rates(noise)
    weights = kept * joined + flipped * joined[_PHASE_FLIP]
    return PairEnsemble.from_unnormalized(weights)


def swap_oracle(a: FullPairState, b: FullPairState, noise: NoiseParams | None = None) -> FullPairState:
    """Dense Bell measurement at the node, averaged over announced outcomes."""
    return oracle.simulate_swap(a, b, noise).state


def _level_threshold(noise: NoiseParams, stage: RoundFidelity, fidelity: float) -> float:
    try:
        return threshold("noisy-dep", noise, stage)
    except UnpurifiableError:
        raise ChainCollapseError(level=1, fidelity=fidelity, threshold=math.nan) from None


def run_repeater(cfg: ChainConfig) -> ChainReport:
    """Fold swap + ``rounds_per_level`` purification rounds over log2(N) levels.

    Each level swaps adjacent links first, then purifies the longer link.
    Links are re-formed as Werner pairs after every purification round, which is
    the input the round recursions assume.
    """
    if cfg.mode == "oracle":
        return _run_oracle(cfg)

    stage = cfg.stage
    limit = _level_threshold(cfg.noise, stage, cfg.f0) if cfg.rounds_per_level and cfg.levels else 0.0
    link = make_werner(cfg.f0)
    cost = 1.0
    per_level = []
    for level in range(1, cfg.levels + 1):
        link = swap(link, link, cfg.noise)
        cost *= 2.0
        for _ in range(cfg.rounds_per_level):
            if link.fidelity <= limit:
                raise ChainCollapseError(level=level, fidelity=link.fidelity, threshold=limit)
            result = noisy_round(link.fidelity, cfg.noise)
            if stage == "distilled":
                fidelity, p_succ = result.f_distilled, result.p_distilled
            else:
                fidelity, p_succ = result.f_out, result.p_succ
            cost *= 2.0 / p_succ
            link = make_werner(fidelity)
        logger.debug("level %d: F=%.12g cost=%.6g", level, link.fidelity, cost)
        per_level.append(link.fidelity)
    return ChainReport(
        final_fidelity=link.fidelity,
        per_level_fidelity=per_level,
        expected_cost=cost,
        levels=cfg.levels,
        final_junk=link.junk,
    )


def _run_oracle(cfg: ChainConfig) -> ChainReport:
    limit = _level_threshold(cfg.noise, cfg.stage, cfg.f0) if cfg.rounds_per_level and cfg.levels else 0.0
    state = embed(make_werner(cfg.f0))
    cost = 1.0
    per_level = []
    for level in range(1, cfg.levels + 1):
        state = swap_oracle(state, state, cfg.noise)
        cost *= 2.0
        for _ in range(cfg.rounds_per_level):
            fidelity = state.fidelity()
            if fidelity <= limit:
                raise ChainCollapseError(level=level, fidelity=fidelity, threshold=limit)
            p_succ, purified = oracle.purify_state(state, cfg.noise)
            cost *= 2.0 / p_succ
            state = embed(make_werner(min(max(purified.fidelity(), 0.0), 1.0)))
        per_level.append(state.fidelity())
    final = state.fidelity()
    return ChainReport(
        final_fidelity=min(max(final, 0.0), 1.0),
        per_level_fidelity=per_level,
        expected_cost=cost,
        levels=cfg.levels,
        final_junk=max(1.0 - float(np.trace(state.matrix @ _SUBSPACE).real), 0.0),
    )


def decay_scan(n_max: int, f0: float, noise: NoiseParams | None = None) -> list[tuple[int, float]]:
    """Fidelity of N chained links after N − 1 swaps, no purification, N = 1..n_max."""
    if n_max < 2:
        raise ValueError(f"n_max must be at least 2, got {n_max}")
    link = make_werner(f0)
    chained = link
    series = [(1, link.fidelity)]
    for n in range(2, n_max + 1):
        chained = swap(chained, link, noise)
        series.append((n, chained.fidelity))
    return series


def decay_fit(series: list[tuple[int, float]], attractor: float = 1.0 / 8.0) -> tuple[float, float]:
    """Slope of log(F_N − attractor) against N and the largest fit residual."""
    points = [(n, f - attractor) for n, f in series if f - attractor > config.FIXED_POINT_TOL]
    if len(points) < 2:
        raise ValueError("need at least two points above the attractor to fit a decay")
    ns = np.array([n for n, _ in points], dtype=float)
    logs = np.log([d for _, d in points])
    slope, intercept = np.polyfit(ns, logs, 1)
    residual = float(np.max(np.abs(logs - (slope * ns + intercept))))
    return float(slope), residual
