import numpy as np
import pytest

from bellmeter.analyzer import (
    PATTERNS,
    AnalyzerConfig,
    Outcome,
    bell_projection_probs,
    bs_transform,
    classify,
    distinguishable_outcome_probs,
    distinguishable_pattern_probs,
    ideal_outcome_probs,
    mixed_pattern_probs,
    pattern_outcomes,
    quantum_pattern_probs,
)
from bellmeter.polarization import PolarizationState, prepare_elliptical
from bellmeter.twophoton import BELL_STATES, TwoPhotonState, tensor

IDEAL = AnalyzerConfig()

PHI_PLUS = TwoPhotonState(BELL_STATES[0])
PHI_MINUS = TwoPhotonState(BELL_STATES[1])
PSI_PLUS = TwoPhotonState(BELL_STATES[2])
PSI_MINUS = TwoPhotonState(BELL_STATES[3])


def random_state(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return TwoPhotonState(v / np.linalg.norm(v))


def random_product_state(rng):
    d = rng.normal(size=2) + 1j * rng.normal(size=2)
    p = rng.normal(size=2) + 1j * rng.normal(size=2)
    return tensor(
        PolarizationState.from_vector(d), PolarizationState.from_vector(p)
    )


def test_bs_transform_unitary():
    rng = np.random.default_rng(9)
    for _ in range(100):
        cfg = AnalyzerConfig(
            transmittance_h=rng.uniform(0.05, 0.95),
            transmittance_v=rng.uniform(0.05, 0.95),
            geometric_phase=bool(rng.integers(2)),
        )
        u = bs_transform(cfg)
        assert np.max(np.abs(u @ u.conj().T - np.eye(4))) < 1e-12


def test_bs_transform_rejects_degenerate_transmittance():
    with pytest.raises(ValueError):
        bs_transform(AnalyzerConfig(transmittance_h=0.0))
    with pytest.raises(ValueError):
        bs_transform(AnalyzerConfig(transmittance_v=1.0))


def test_analyzer_config_validation():
    with pytest.raises(ValueError):
        AnalyzerConfig(mode_overlap=1.5)
    with pytest.raises(ValueError):
        AnalyzerConfig(detector_map=("D1", "D1", "D2", "D3"))


def test_bell_state_routing_with_geometric_phase():
    # Psi+ anti-bunches across the output ports, Psi- bunches into one port,
    # Phi+/- always end in a single detector (inconclusive)
    p = ideal_outcome_probs(PSI_PLUS, IDEAL)
    assert abs(p.psi_plus - 1.0) < 1e-12 and p.inconclusive < 1e-12
    p = ideal_outcome_probs(PSI_MINUS, IDEAL)
    assert abs(p.psi_minus - 1.0) < 1e-12
    for state in (PHI_PLUS, PHI_MINUS):
        p = ideal_outcome_probs(state, IDEAL)
        assert abs(p.inconclusive - 1.0) < 1e-12


def test_psi_plus_exits_different_ports():
    # with the phase, the two Psi+ photons leave by different output ports
    probs = quantum_pattern_probs(PSI_PLUS, IDEAL)
    cross_port = 0.0
    for pr, (k, l) in zip(probs, PATTERNS):
        if (k < 2) != (l < 2):
            cross_port += pr
    assert abs(cross_port - 1.0) < 1e-12


def test_roles_swap_without_geometric_phase():
    # the naive beamsplitter model: the singlet anti-bunches instead
    cfg = AnalyzerConfig(geometric_phase=False)
    p = ideal_outcome_probs(PSI_MINUS, cfg)
    assert abs(p.psi_plus - 1.0) < 1e-12
    p = ideal_outcome_probs(PSI_PLUS, cfg)
    assert abs(p.psi_minus - 1.0) < 1e-12


def test_ideal_outcome_examples():
    hv = TwoPhotonState(np.array([0, 1, 0, 0], dtype=complex))
    p = ideal_outcome_probs(hv, IDEAL)
    assert abs(p.psi_plus - 0.5) < 1e-12 and abs(p.psi_minus - 0.5) < 1e-12

    hh = TwoPhotonState(np.array([1, 0, 0, 0], dtype=complex))
    p = ideal_outcome_probs(hh, IDEAL)
    assert abs(p.inconclusive - 1.0) < 1e-12

    state = tensor(prepare_elliptical(0.0, 45.0, +1), prepare_elliptical(0.0, 45.0, +1))
    p = ideal_outcome_probs(state, IDEAL)
    assert abs(p.psi_plus - 0.5) < 1e-12 and abs(p.psi_minus) < 1e-12
    assert abs(p.inconclusive - 0.5) < 1e-12


def test_oracle_equivalence_on_random_states():
    rng = np.random.default_rng(2718)
    for _ in range(100):
        state = random_state(rng)
        got = ideal_outcome_probs(state, IDEAL)
        want = bell_projection_probs(state)
        assert abs(got.psi_plus - want.psi_plus) < 1e-10
        assert abs(got.psi_minus - want.psi_minus) < 1e-10
        assert abs(got.inconclusive - want.inconclusive) < 1e-10


def test_probabilities_sum_to_one_any_branch_any_transmittance():
    rng = np.random.default_rng(99)
    for _ in range(50):
        cfg = AnalyzerConfig(
            transmittance_h=rng.uniform(0.1, 0.9),
            transmittance_v=rng.uniform(0.1, 0.9),
        )
        state = random_state(rng)
        for probs in (
            quantum_pattern_probs(state, cfg),
            distinguishable_pattern_probs(state, cfg),
            mixed_pattern_probs(state, cfg, rng.uniform(0, 1)),
        ):
            assert abs(probs.sum() - 1.0) < 1e-12


def test_distinguishable_45_45_quarters():
    state = tensor(prepare_elliptical(0.0, 45.0, +1), prepare_elliptical(0.0, 45.0, +1))
    p = distinguishable_outcome_probs(state, IDEAL)
    assert abs(p.psi_plus - 0.25) < 1e-12
    assert abs(p.psi_minus - 0.25) < 1e-12
    assert abs(p.inconclusive - 0.5) < 1e-12


def test_distinguishable_hh_enumeration():
    # both photons horizontal: every routing is inconclusive (same detector,
    # or the cross-port all-H pair D1 & D4)
    hh = TwoPhotonState(np.array([1, 0, 0, 0], dtype=complex))
    p = distinguishable_outcome_probs(hh, IDEAL)
    assert abs(p.inconclusive - 1.0) < 1e-12
    probs = distinguishable_pattern_probs(hh, IDEAL)
    by_pattern = dict(zip(PATTERNS, probs))
    assert abs(by_pattern[(0, 2)] - 0.5) < 1e-12  # one photon per port, both H
    assert abs(by_pattern[(0, 0)] - 0.25) < 1e-12
    assert abs(by_pattern[(2, 2)] - 0.25) < 1e-12


def test_distinguishable_unbalanced_routing():
    # T_H = 0.6: one transmitted + one reflected (same output port) has
    # probability 2 T R = 0.48, both-same-decision (different ports) 0.52
    cfg = AnalyzerConfig(transmittance_h=0.6)
    hh = TwoPhotonState(np.array([1, 0, 0, 0], dtype=complex))
    probs = dict(zip(PATTERNS, distinguishable_pattern_probs(hh, cfg)))
    same_port = probs[(0, 0)] + probs[(2, 2)]
    assert abs(same_port - 2 * 0.6 * 0.4) < 1e-12
    assert abs(probs[(0, 2)] - (0.6**2 + 0.4**2)) < 1e-12


def test_distinguishable_invariant_under_photon_exchange():
    rng = np.random.default_rng(17)
    for _ in range(30):
        d = PolarizationState.from_vector(rng.normal(size=2) + 1j * rng.normal(size=2))
        p = PolarizationState.from_vector(rng.normal(size=2) + 1j * rng.normal(size=2))
        cfg = AnalyzerConfig(
            transmittance_h=rng.uniform(0.2, 0.8), transmittance_v=rng.uniform(0.2, 0.8)
        )
        a = distinguishable_outcome_probs(tensor(d, p), cfg)
        b = distinguishable_outcome_probs(tensor(p, d), cfg)
        assert abs(a.psi_plus - b.psi_plus) < 1e-12
        assert abs(a.psi_minus - b.psi_minus) < 1e-12


def test_classify_mapping():
    assert classify(("D1", "D3")) == Outcome.PSI_PLUS
    assert classify(("D2", "D4")) == Outcome.PSI_PLUS
    assert classify(("D1", "D2")) == Outcome.PSI_MINUS
    assert classify(("D3", "D4")) == Outcome.PSI_MINUS
    assert classify(("D2", "D2")) == Outcome.INCONCLUSIVE
    assert classify(("D1", "D4")) == Outcome.INCONCLUSIVE
    assert classify(("D2", "D3")) == Outcome.INCONCLUSIVE


def test_classify_rejects_bad_patterns():
    with pytest.raises(ValueError):
        classify(("D1",))
    with pytest.raises(ValueError):
        classify(("D1", "D2", "D3"))
    with pytest.raises(ValueError):
        classify(("D1", "D9"))


def test_detector_map_override_relabels_patterns():
    # swapping the wiring of the two ports' H detectors keeps the physics but
    # relabels which mode pairs count as Psi+
    default_outcomes = pattern_outcomes(AnalyzerConfig())
    swapped = AnalyzerConfig(detector_map=("D4", "D2", "D1", "D3"))
    swapped_outcomes = pattern_outcomes(swapped)
    assert default_outcomes != swapped_outcomes
    p = ideal_outcome_probs(PSI_PLUS, swapped)
    # modes (1H, 2V) now read D4 & D3 -> Psi-, (1V, 2H) read D2 & D1 -> Psi-
    assert abs(p.psi_minus - 1.0) < 1e-12
