"""Linear-optics partial Bell analyzer.

Model of the coincidence apparatus: a (possibly unbalanced) non-polarizing
beamsplitter carrying the geometric 180-degree phase between the horizontal
components of its two counter-propagating inputs, one polarizing beamsplitter
per output port, and four single-photon detectors.

Mode convention: the data photon enters input port 1, the program photon
input port 2.  The four spatial/polarization modes are ordered

    0 = (port 1, H),  1 = (port 1, V),  2 = (port 2, H),  3 = (port 2, V)

and keep that meaning at the output.  The default detector wiring is
D1=(1,H), D2=(1,V), D4=(2,H), D3=(2,V), which reproduces the coincidence
table: D1&D3 or D2&D4 fire together for Psi+, D1&D2 or D3&D4 for Psi-,
anything else (including both photons in one detector) is inconclusive.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .twophoton import TwoPhotonState, bell_probabilities

DETECTORS = ("D1", "D2", "D3", "D4")

# default wiring of the mode order (1H, 1V, 2H, 2V) to detector labels
DEFAULT_DETECTOR_MAP = ("D1", "D2", "D4", "D3")

# unordered two-photon output patterns over the 4 modes, (k, l) with k <= l
PATTERNS: tuple[tuple[int, int], ...] = tuple(
    (k, l) for k in range(4) for l in range(k, 4)
)

_PSI_PLUS_PAIRS = (frozenset({"D1", "D3"}), frozenset({"D2", "D4"}))
_PSI_MINUS_PAIRS = (frozenset({"D1", "D2"}), frozenset({"D3", "D4"}))


class Outcome(enum.IntEnum):
    """Result of one analyzed photon pair."""

    INCONCLUSIVE = 0
    PSI_PLUS = 1
    PSI_MINUS = 2


class OutcomeProbs(NamedTuple):
    psi_plus: float
    psi_minus: float
    inconclusive: float


@dataclass(frozen=True)
class AnalyzerConfig:
    """Static parameters of the Bell analyzer.

    transmittance_h/v are intensity transmittances of the beamsplitter for the
    two linear polarizations (identical at both input ports); mode_overlap is
    the scalar indistinguishability of the two photons at the beamsplitter;
    geometric_phase applies the extra 180-degree phase to the horizontal
    component of input port 2.
    """

    transmittance_h: float = 0.5
    transmittance_v: float = 0.5
    mode_overlap: float = 1.0
    geometric_phase: bool = True
    detector_map: tuple[str, str, str, str] = DEFAULT_DETECTOR_MAP

    def __post_init__(self):
        for name in ("transmittance_h", "transmittance_v", "mode_overlap"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if sorted(self.detector_map) != sorted(DETECTORS):
            raise ValueError(
                f"detector_map must be a permutation of {DETECTORS}, got {self.detector_map}"
            )


def bs_transform(config: AnalyzerConfig) -> np.ndarray:
    """4x4 single-photon mode transform of the beamsplitter.

    Block diagonal in polarization; each block is a real unitary built from
    the polarization's amplitude transmittance/reflectance.  With the
    geometric phase enabled the H block of input port 2 picks up a sign flip,
    which is what swaps the bunching roles of Psi+ and Psi-.
    """
    for t in (config.transmittance_h, config.transmittance_v):
        if not 0.0 < t < 1.0:
            raise ValueError(f"beamsplitter transmittance must lie in (0, 1), got {t}")
    t_h, r_h = np.sqrt(config.transmittance_h), np.sqrt(1.0 - config.transmittance_h)
    t_v, r_v = np.sqrt(config.transmittance_v), np.sqrt(1.0 - config.transmittance_v)
    g = -1.0 if config.geometric_phase else 1.0
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0], u[0, 2] = t_h, g * r_h
    u[2, 0], u[2, 2] = r_h, -g * t_h
    u[1, 1], u[1, 3] = t_v, r_v
    u[3, 1], u[3, 3] = r_v, -t_v
    return u


def _embedded_amplitudes(state: TwoPhotonState) -> np.ndarray:
    """Joint amplitude matrix over (data mode, program mode)."""
    psi = np.zeros((4, 4), dtype=complex)
    amps = state.amplitudes
    for i in range(2):  # data polarization -> mode i (port 1)
        for j in range(2):  # program polarization -> mode 2+j (port 2)
            psi[i, 2 + j] = amps[2 * i + j]
    return psi


def quantum_pattern_probs(state: TwoPhotonState, config: AnalyzerConfig) -> np.ndarray:
    """Output-pattern probabilities for fully indistinguishable (bosonic) photons.

    Propagates the two-photon amplitude through bs_transform and collects the
    coefficient of each unordered pair of output modes, in PATTERNS order.
    """
    u = bs_transform(config)
    a = u @ _embedded_amplitudes(state) @ u.T
    probs = np.empty(len(PATTERNS))
    for idx, (k, l) in enumerate(PATTERNS):
        if k == l:
            probs[idx] = 2.0 * abs(a[k, k]) ** 2
        else:
            probs[idx] = abs(a[k, l] + a[l, k]) ** 2
    return probs


def distinguishable_pattern_probs(state: TwoPhotonState, config: AnalyzerConfig) -> np.ndarray:
    """Output-pattern probabilities for fully distinguishable photons.

    Each photon is routed independently (no two-photon interference); the
    joint amplitudes of the ordered mode pairs are squared individually.
    """
    u = bs_transform(config)
    a = u @ _embedded_amplitudes(state) @ u.T
    probs = np.empty(len(PATTERNS))
    for idx, (k, l) in enumerate(PATTERNS):
        if k == l:
            probs[idx] = abs(a[k, k]) ** 2
        else:
            probs[idx] = abs(a[k, l]) ** 2 + abs(a[l, k]) ** 2
    return probs


def mixed_pattern_probs(
    state: TwoPhotonState, config: AnalyzerConfig, mode_overlap: float | None = None
) -> np.ndarray:
    """Partial-distinguishability mixture M * quantum + (1 - M) * distinguishable."""
    m = config.mode_overlap if mode_overlap is None else mode_overlap
    if not 0.0 <= m <= 1.0:
        raise ValueError(f"mode overlap must lie in [0, 1], got {m}")
    if m == 1.0:
        return quantum_pattern_probs(state, config)
    if m == 0.0:
        return distinguishable_pattern_probs(state, config)
    return m * quantum_pattern_probs(state, config) + (1.0 - m) * distinguishable_pattern_probs(
        state, config
    )


def classify(pattern: Sequence[str]) -> Outcome:
    """Map a detector coincidence pattern (two fired detectors) to an outcome.

    D1&D3 or D2&D4 -> Psi+; D1&D2 or D3&D4 -> Psi-; everything else,
    including both photons in the same detector and the remaining cross
    pairs D1&D4 and D2&D3, is inconclusive.
    """
    fired = tuple(pattern)
    if len(fired) != 2:
        raise ValueError(f"a coincidence pattern must contain exactly 2 photons, got {len(fired)}")
    for d in fired:
        if d not in DETECTORS:
            raise ValueError(f"unknown detector {d!r}")
    pair = frozenset(fired)
    if pair in _PSI_PLUS_PAIRS:
        return Outcome.PSI_PLUS
    if pair in _PSI_MINUS_PAIRS:
        return Outcome.PSI_MINUS
    return Outcome.INCONCLUSIVE


def pattern_outcomes(config: AnalyzerConfig) -> tuple[Outcome, ...]:
    """Outcome of each entry of PATTERNS under the configured detector wiring."""
    return tuple(
        classify((config.detector_map[k], config.detector_map[l])) for (k, l) in PATTERNS
    )


def _aggregate(probs: np.ndarray, config: AnalyzerConfig) -> OutcomeProbs:
    totals = {Outcome.PSI_PLUS: 0.0, Outcome.PSI_MINUS: 0.0, Outcome.INCONCLUSIVE: 0.0}
    for p, outcome in zip(probs, pattern_outcomes(config)):
        totals[outcome] += float(p)
    return OutcomeProbs(
        totals[Outcome.PSI_PLUS], totals[Outcome.PSI_MINUS], totals[Outcome.INCONCLUSIVE]
    )


def ideal_outcome_probs(state: TwoPhotonState, config: AnalyzerConfig) -> OutcomeProbs:
    """Outcome probabilities for perfectly overlapping photons.

    For a balanced beamsplitter with the geometric phase this equals the Bell
    projection probabilities (|c_Psi+|^2, |c_Psi-|^2, |c_Phi+|^2 + |c_Phi-|^2).
    """
    return _aggregate(quantum_pattern_probs(state, config), config)


def distinguishable_outcome_probs(state: TwoPhotonState, config: AnalyzerConfig) -> OutcomeProbs:
    """Outcome probabilities for temporally separated (non-interfering) photons."""
    return _aggregate(distinguishable_pattern_probs(state, config), config)


def bell_projection_probs(state: TwoPhotonState) -> OutcomeProbs:
    """Reference probabilities (Psi+, Psi-, rest) straight from the Bell decomposition."""
    p = bell_probabilities(state)
    return OutcomeProbs(p.psi_plus, p.psi_minus, p.phi_plus + p.phi_minus)
