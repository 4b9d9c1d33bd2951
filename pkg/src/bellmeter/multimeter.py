"""Phase-covariant quantum multimeter: POVM family, trade-off and estimators.

The program qubit selects an equatorial measurement basis
(|H> +/- e^{i phi}|V>)/sqrt(2).  The one-parameter POVM family interpolates
between the unambiguous partial Bell measurement (eta = 1, inconclusive rate
1/2, fidelity 1) and an error-prone von Neumann-like measurement (eta = 0,
no inconclusive results, fidelity 3/4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import polarization as pol
from .analyzer import Outcome
from .errors import InvalidNormalizationError, NoDataError, UnsupportedFeatureError
from .experiment import CountRecord, ExperimentConfig, shoulder_counts, simulate_counts, with_pairs_per_point
from .twophoton import BELL_STATES

_HERMITIAN_TOL = 1e-12
_EQUATOR_TOL = 1e-9


@dataclass(frozen=True)
class PovmElement:
    """Hermitian positive semidefinite effect on the two-photon space."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > _HERMITIAN_TOL:
            raise ValueError("POVM element is not Hermitian")
        if np.min(np.linalg.eigvalsh(m)) < -_HERMITIAN_TOL:
            raise ValueError("POVM element is not positive semidefinite")
        object.__setattr__(self, "matrix", m)


def povm_elements(eta: float) -> tuple[PovmElement, PovmElement, PovmElement]:
    """The two-photon POVM (Pi+, Pi-, Pi?) of the multimeter.

    Pi+/- = |Psi+/-><Psi+/-| + (1-eta)/2 (|Phi+><Phi+| + |Phi-><Phi-|),
    Pi?   = eta (|Phi+><Phi+| + |Phi-><Phi-|).
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    phi_p, phi_m, psi_p, psi_m = (np.outer(b, b.conj()) for b in BELL_STATES)
    phi_part = phi_p + phi_m
    return (
        PovmElement(psi_p + 0.5 * (1.0 - eta) * phi_part),
        PovmElement(psi_m + 0.5 * (1.0 - eta) * phi_part),
        PovmElement(eta * phi_part),
    )


def theory_PI(eta: float) -> float:
    """Inconclusive probability eta/2, independent of the selected basis phi."""
    return eta / 2.0


def fidelity_from_PI(p_inconclusive: float) -> float:
    """Mean fidelity F = (3 - 2 P_I) / (4 (1 - P_I)) of the conclusive outcomes."""
    if not 0.0 <= p_inconclusive < 1.0:
        raise ValueError(f"P_I must lie in [0, 1), got {p_inconclusive}")
    return (3.0 - 2.0 * p_inconclusive) / (4.0 * (1.0 - p_inconclusive))


def effective_povm(
    program: pol.PolarizationState, eta: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """POVM induced on the data qubit by fixing the program state.

    Contracts each two-photon element with the program state.  Only equatorial
    programs are accepted; for those the result takes the closed form
    pi+/- = (1 - P_I)[F |psi+/-><psi+/-| + (1 - F)|psi-/+><psi-/+|] and
    pi? = P_I * identity, with P_I = eta/2.
    """
    if abs(abs(program.h) - abs(program.v)) > _EQUATOR_TOL:
        raise ValueError("program state must lie on the Bloch-sphere equator (|h| == |v|)")
    chi = program.vector
    elements = povm_elements(eta)
    reduced = []
    for element in elements:
        big = element.matrix.reshape(2, 2, 2, 2)  # (d1, p1, d2, p2)
        small = np.einsum("abcd,d,b->ac", big, chi, chi.conj())
        reduced.append(small)
    return tuple(reduced)


def reinterpret(
    outcomes: Sequence[int] | np.ndarray, eta: float, rng: np.random.Generator
) -> np.ndarray:
    """Relax an unambiguous outcome stream to the eta < 1 measurement.

    Each inconclusive outcome is kept with probability eta and otherwise
    relabeled Psi+ or Psi- with probability 1/2 each; conclusive outcomes pass
    through unchanged.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    out = np.asarray(outcomes, dtype=np.int64).copy()
    inconclusive = out == int(Outcome.INCONCLUSIVE)
    relabel = inconclusive & (rng.random(out.shape) >= eta)
    coin = rng.random(out.shape) < 0.5
    out[relabel & coin] = int(Outcome.PSI_PLUS)
    out[relabel & ~coin] = int(Outcome.PSI_MINUS)
    return out


def estimate_PI(counts: CountRecord) -> float:
    """Inconclusive rate as the complement of the normalized conclusive rates.

    P_I = 1 - 1/2 [ (C++ + C-+) / (2 (C++_sh + C-+_sh))
                  + (C-- + C+-) / (2 (C--_sh + C+-_sh)) ].
    """
    s_plus = counts.sh_pp + counts.sh_mp
    s_minus = counts.sh_mm + counts.sh_pm
    if s_plus <= 0 or s_minus <= 0:
        raise InvalidNormalizationError(
            f"shoulder sums must be positive, got {s_plus} and {s_minus}"
        )
    return 1.0 - 0.5 * (
        (counts.c_pp + counts.c_mp) / (2.0 * s_plus)
        + (counts.c_mm + counts.c_pm) / (2.0 * s_minus)
    )


def pi_stderr(counts: CountRecord) -> float:
    """First-order propagated statistical error of estimate_PI."""
    s_plus = counts.sh_pp + counts.sh_mp
    s_minus = counts.sh_mm + counts.sh_pm
    if s_plus <= 0 or s_minus <= 0:
        raise InvalidNormalizationError(
            f"shoulder sums must be positive, got {s_plus} and {s_minus}"
        )
    c_plus = counts.c_pp + counts.c_mp
    c_minus = counts.c_mm + counts.c_pm
    var_a = c_plus / (4.0 * s_plus**2) + c_plus**2 / (4.0 * s_plus**3)
    var_b = c_minus / (4.0 * s_minus**2) + c_minus**2 / (4.0 * s_minus**3)
    return 0.5 * math.sqrt(var_a + var_b)


def conclusive_fidelity(counts: CountRecord) -> float:
    """Fraction of conclusive events with the correct Bell class."""
    total = counts.conclusive_total
    if total <= 0:
        raise NoDataError("no conclusive events recorded")
    return (counts.c_pp + counts.c_mm) / total


@dataclass(frozen=True)
class MultimeterPoint:
    """One sweep point of the multimeter run."""

    phi: float
    eta: float
    p_inconclusive: float
    pi_stderr: float
    fidelity: float
    error_rate: float
    error_rate_stderr: float
    counts: CountRecord


def run_multimeter_sweep(
    phis: Sequence[float],
    eta: float,
    config: ExperimentConfig,
    pairs_per_point: float = 100_000.0,
    seed: int | None = None,
    program_copies: int = 1,
) -> list[MultimeterPoint]:
    """Simulate the multimeter over a grid of basis phases.

    Per phi the data photon is prepared alternately in the two basis states
    psi+(phi) and psi-(phi) while the program photon carries psi+(phi).  Only
    the unambiguous analyzer is physically simulated; eta < 1 is produced by
    relabeling inconclusive outcomes, so the shoulder normalization stays that
    of the raw measurement.
    """
    if program_copies != 1:
        raise UnsupportedFeatureError(
            f"only single-copy (N=1) program registers are implemented, got N={program_copies}"
        )
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    if len(phis) == 0:
        return []
    master = config.seed if seed is None else seed
    point_cfg = with_pairs_per_point(config, pairs_per_point)
    streams = np.random.SeedSequence(master).spawn(len(phis))
    points: list[MultimeterPoint] = []
    for stream, phi in zip(streams, phis):
        rng = np.random.default_rng(stream)
        program = pol.recipe_multimeter(phi, +1)
        data_plus = pol.recipe_multimeter(phi, +1)
        data_minus = pol.recipe_multimeter(phi, -1)
        main_plus = simulate_counts(data_plus, program, 0.0, point_cfg, rng, eta=eta)
        main_minus = simulate_counts(data_minus, program, 0.0, point_cfg, rng, eta=eta)
        sh_plus = shoulder_counts(+1, point_cfg, rng)
        sh_minus = shoulder_counts(-1, point_cfg, rng)
        counts = CountRecord(
            c_pp=main_plus.psi_plus,
            c_mp=main_plus.psi_minus,
            c_pm=main_minus.psi_plus,
            c_mm=main_minus.psi_minus,
            sh_pp=sh_plus.psi_plus,
            sh_mp=sh_plus.psi_minus,
            sh_pm=sh_minus.psi_plus,
            sh_mm=sh_minus.psi_minus,
        )
        try:
            p_inc = estimate_PI(counts)
            p_inc_err = pi_stderr(counts)
        except InvalidNormalizationError:
            p_inc = p_inc_err = math.nan
        try:
            fid = conclusive_fidelity(counts)
            err = (counts.c_mp + counts.c_pm) / counts.conclusive_total
            err_std = math.sqrt(max(err * (1.0 - err), 0.0) / counts.conclusive_total)
        except NoDataError:
            fid = err = err_std = math.nan
        points.append(
            MultimeterPoint(
                phi=float(phi),
                eta=float(eta),
                p_inconclusive=p_inc,
                pi_stderr=p_inc_err,
                fidelity=fid,
                error_rate=err,
                error_rate_stderr=err_std,
                counts=counts,
            )
        )
    return points
