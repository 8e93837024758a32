"""Tests for the dense optics, distillation and swapping simulator."""
import numpy as np
import pytest

from src.models.schemas import NoiseParams
from src.quantum import linalg
from src.quantum.oracle import (
    CONVERTER,
    HWP,
    PBS,
    WDM,
    TwoPairState,
    compare,
    degenerate,
    degeneration_unitary,
    distillation_patterns,
    port_projector,
    simulate_bennett_round,
    simulate_distillation,
    simulate_round,
    simulate_step1_optics,
    simulate_swap,
    step1_branches,
)
from src.quantum.purification import bennett_round, ideal_round, ideal_step1, noisy_round
from src.quantum.repeater import swap
from src.quantum.states import (
    DepBasisState,
    FullPairState,
    PairEnsemble,
    embed,
    make_pure,
    make_werner,
    project_diagonal,
    random_ensemble,
)
from src.utils.config import config
from src.utils.errors import DegenerateSelectionError, DomainError

NOISY = NoiseParams(p1=0.97, eta=0.95)


def _random_density(rng, dim=16):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


@pytest.mark.parametrize("element", [PBS, WDM, HWP, CONVERTER])
@pytest.mark.parametrize("pol_qubit", [0, 2])
def test_elements_preserve_trace_and_positivity(element, pol_qubit):
    """Every element is a unitary or a complete set of routing projectors."""
    rho = _random_density(np.random.default_rng(11))
    out = element.apply(rho, pol_qubit)
    assert np.trace(out).real == pytest.approx(1.0, abs=1e-12)
    assert linalg.min_eigenvalue(out) > -1e-12
    completeness = sum(op.conj().T @ op for op in element.local_operators())
    np.testing.assert_allclose(completeness, np.eye(4), atol=1e-15)


def test_ports_partition_the_photon():
    """Upper and lower ports are complementary projectors."""
    upper, lower = port_projector(False), port_projector(True)
    np.testing.assert_allclose(upper + lower, np.eye(4), atol=1e-15)
    np.testing.assert_allclose(upper @ lower, np.zeros((4, 4)), atol=1e-15)


def test_degeneration_is_self_inverse():
    """The converter-on-V unitary squares to the identity."""
    u = degeneration_unitary()
    np.testing.assert_allclose(u @ u, np.eye(4), atol=1e-15)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-15)


def test_degeneration_maps_gamma_to_polarization_psi():
    """Γ+ becomes (|VH⟩ + |HV⟩) with band flags (1, 0)."""
    rho = degenerate(embed(make_pure(DepBasisState.GAMMA_PLUS)).matrix, (0, 2))
    # (pol_a, freq_a, pol_b, freq_b) = (1,1,0,0) -> 12 and (0,1,1,0) -> 6
    assert rho[12, 12].real == pytest.approx(0.5)
    assert rho[6, 6].real == pytest.approx(0.5)
    assert rho[12, 6].real == pytest.approx(0.5)


def test_step1_leaves_phi_plus_on_ports_one_and_three():
    """Φ+ exits ports 1 and 3 untouched."""
    state = embed(make_pure(DepBasisState.PHI_PLUS))
    assert simulate_step1_optics(state).fidelity() == pytest.approx(1.0)
    assert step1_branches(state)["1-3"] == pytest.approx(1.0)


def test_step1_corrects_upsilon_with_both_plates():
    """Υ+ exits ports 2 and 4 and is flipped back to Φ+."""
    state = embed(make_pure(DepBasisState.UPSILON_PLUS))
    assert simulate_step1_optics(state).fidelity() == pytest.approx(1.0)
    assert step1_branches(state)["2-4"] == pytest.approx(1.0)


def test_step1_werner_half():
    """Werner(0.5) leaves with Φ+ weight 5/7."""
    assert simulate_step1_optics(embed(make_werner(0.5))).fidelity() == pytest.approx(5 / 7, abs=1e-12)


def test_step1_matches_recursion_on_random_fidelities():
    """Oracle and (4F+3)/7 agree within 1e-10 for 100 random F."""
    rng = np.random.default_rng(5)
    for F in rng.uniform(0.0, 1.0, 100):
        out = simulate_step1_optics(embed(make_werner(F)))
        assert compare(ideal_step1(F), out.fidelity()).passed


@pytest.mark.parametrize("F", [0.2, 0.6, 0.93])
def test_step1_output_is_bell_diagonal(F):
    """The corrected pair is exactly p·Φ+ + (1−p)·Φ−."""
    p = ideal_step1(F)
    expected = embed(PairEnsemble.from_mapping({DepBasisState.PHI_PLUS: p, DepBasisState.PHI_MINUS: 1 - p}))
    out = simulate_step1_optics(embed(make_werner(F)))
    assert np.max(np.abs(out.matrix - expected.matrix)) < 1e-12


def test_noisy_step1_branches_sum_to_one():
    """Port-pattern weights cover the whole state under noisy plates."""
    weights = step1_branches(embed(make_werner(0.4)), NOISY)
    assert sum(weights.values()) == pytest.approx(1.0, abs=1e-12)
    assert set(weights) == {"1-3", "1-4", "2-3", "2-4"}


def test_two_pair_state_validates():
    """TwoPairState checks the 256-dim density-matrix conditions."""
    with pytest.raises(DomainError):
        TwoPairState(np.eye(256))
    pair = embed(make_werner(0.7))
    assert TwoPairState.of(pair, pair).matrix.shape == (256, 256)


def test_distillation_of_perfect_pairs():
    """Two Φ+ pairs always pass and stay Φ+."""
    phi = embed(make_pure(DepBasisState.PHI_PLUS))
    p_succ, out = simulate_distillation(phi, phi)
    assert p_succ == pytest.approx(1.0)
    assert out.fidelity() == pytest.approx(1.0)


def test_distillation_at_point_six():
    """Werner(0.6) pairs after step 1 distill to 0.91929."""
    corrected = simulate_step1_optics(embed(make_werner(0.6)))
    p_succ, out = simulate_distillation(corrected, corrected)
    analytic = ideal_round(0.6)
    assert compare(analytic.f_out, out.fidelity()).passed
    assert compare(analytic.p_succ, p_succ).passed
    assert out.fidelity() == pytest.approx(0.91929, abs=1e-5)


def test_round_matches_recursion_on_random_fidelities():
    """Full oracle rounds agree with the ideal recursion for 100 random F."""
    rng = np.random.default_rng(9)
    for F in rng.uniform(0.0, 1.0, 100):
        p_succ, f_out = simulate_round(F)
        analytic = ideal_round(F)
        assert abs(f_out - analytic.f_out) < 1e-10
        assert abs(p_succ - analytic.p_succ) < 1e-10


def test_distillation_patterns_sum_to_one():
    """The four coincidence patterns exhaust the probability before post-selection."""
    pair = simulate_step1_optics(embed(make_werner(0.75)), NOISY)
    patterns = distillation_patterns(pair, pair, NOISY)
    assert sum(patterns.values()) == pytest.approx(1.0, abs=1e-12)
    assert set(patterns) == {"even-even", "even-odd", "odd-even", "odd-odd"}


def test_distillation_rejects_everything():
    """Φ+ against Φ− never coincides."""
    with pytest.raises(DegenerateSelectionError) as excinfo:
        simulate_distillation(embed(make_pure(DepBasisState.PHI_PLUS)), embed(make_pure(DepBasisState.PHI_MINUS)))
    assert f"{config.MIN_SUCCESS_PROBABILITY:.0e}" in str(excinfo.value)


def test_noisy_distillation_runs_below_ideal():
    """Imperfect plates and projections cost fidelity."""
    p_succ, f_out = simulate_round(0.75, NoiseParams(p1=0.99, eta=1.0))
    assert 0 < p_succ <= 1
    assert f_out < ideal_round(0.75).f_out


@pytest.mark.parametrize("noise", [NoiseParams.ideal(), NoiseParams(p1=0.99, eta=1.0), NOISY])
def test_oracle_variant_of_noisy_round(noise):
    """The oracle variant reports the dense round's fidelity and success weight."""
    result = noisy_round(0.75, noise, variant="oracle")
    p_succ, f_out = simulate_round(0.75, noise)
    assert result.f_out == pytest.approx(f_out, abs=1e-15)
    assert result.p_succ == pytest.approx(p_succ, abs=1e-15)
    if noise.is_ideal:
        assert result.f_out == pytest.approx(ideal_round(0.75).f_out, abs=1e-10)


def test_unknown_noisy_variant_rejected():
    """Only the closed-form and oracle variants exist."""
    with pytest.raises(ValueError):
        noisy_round(0.75, NOISY, variant="guess")


def test_oracle_is_deterministic():
    """Two identical runs give bit-identical matrices."""
    pair = simulate_step1_optics(embed(make_werner(0.7)), NOISY)
    first = simulate_distillation(pair, pair, NOISY)
    second = simulate_distillation(pair, pair, NOISY)
    assert first[0] == second[0]
    assert np.array_equal(first[1].matrix, second[1].matrix)


def test_final_stage_ideal_limit_differs_from_oracle():
    """The saturating final-stage expression disagrees with the oracle at ideal operations."""
    report = compare(
        noisy_round(0.75, NoiseParams.ideal()).f_out,
        simulate_round(0.75)[1],
        expected_gap=True,
    )
    assert report.passed
    assert report.difference > 1e-3


def test_swap_of_perfect_pairs():
    """Φ+ ⊗ Φ+ swaps to Φ+ for every announced outcome."""
    phi = embed(make_pure(DepBasisState.PHI_PLUS))
    result = simulate_swap(phi, phi)
    assert sum(result.probabilities.values()) == pytest.approx(1.0)
    assert result.state.fidelity() == pytest.approx(1.0)
    for key, state in result.outcome_states.items():
        assert state.fidelity() == pytest.approx(1.0), key
    for (phase, parity, flag1, flag2), weight in result.probabilities.items():
        expected = 0.25 if flag1 == flag2 == 0 else 0.0
        assert weight == pytest.approx(expected, abs=1e-15)


def test_swap_with_mixed_pair_is_mixed():
    """A maximally mixed partner leaves a maximally mixed outer pair."""
    result = simulate_swap(embed(make_pure(DepBasisState.PHI_PLUS)), FullPairState.maximally_mixed())
    np.testing.assert_allclose(result.state.matrix, np.eye(16) / 16, atol=1e-12)


def test_swap_werner_law():
    """Werner(0.95) pairs swap to 1/8 + 7/8·w², w = (8F−1)/7."""
    pair = embed(make_werner(0.95))
    w = (8 * 0.95 - 1) / 7
    assert simulate_swap(pair, pair).state.fidelity() == pytest.approx(1 / 8 + 7 / 8 * w * w, abs=1e-12)


@pytest.mark.parametrize("seed", [0, 1, 2])
@pytest.mark.parametrize("noise", [NoiseParams.ideal(), NOISY])
def test_closed_form_swap_matches_oracle(seed, noise):
    """The closed-form composition law reproduces every diagonal weight and the lost mass."""
    rng = np.random.default_rng(seed)
    a, b = random_ensemble(rng), random_ensemble(rng)
    dense = project_diagonal(simulate_swap(embed(a), embed(b), noise).state)
    closed = swap(a, b, noise)
    np.testing.assert_allclose(closed.weights, dense.weights, atol=1e-10)
    assert closed.junk == pytest.approx(dense.junk, abs=1e-10)


@pytest.mark.parametrize("F", [0.3, 0.5, 0.8, 1.0])
def test_bennett_recursion_matches_four_qubit_oracle(F):
    """Bilateral-CNOT simulation reproduces the hard-coded baseline."""
    p_succ, f_out = simulate_bennett_round(F)
    analytic = bennett_round(F)
    assert f_out == pytest.approx(analytic.f_out, abs=1e-12)
    assert p_succ == pytest.approx(analytic.p_succ, abs=1e-12)


def test_compare_verdicts():
    """Equal values pass; expected gaps pass only when values differ."""
    same = compare(0.5, 0.5)
    assert same.difference == 0.0
    assert same.passed
    assert not compare(0.5, 0.5, expected_gap=True).passed
    assert not compare(0.5, 0.6, tolerance=1e-10).passed
