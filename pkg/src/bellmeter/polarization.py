"""Jones calculus for single-photon polarization qubits and wave-plate recipes.

All angles are degrees (fast-axis angle measured from the horizontal).
States produced by different recipes are only defined up to a global phase,
so comparisons should go through :func:`overlap`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import cos, radians, sin, sqrt

import numpy as np

_NORM_TOL = 1e-9


class PlateKind(enum.Enum):
    HALF = "half"
    QUARTER = "quarter"


# retardance of the slow axis relative to the fast axis, degrees
_RETARDANCE_DEG = {PlateKind.HALF: 180.0, PlateKind.QUARTER: 90.0}


@dataclass(frozen=True)
class PolarizationState:
    """Normalized Jones vector over the (H, V) linear basis."""

    h: complex
    v: complex

    def __post_init__(self):
        object.__setattr__(self, "h", complex(self.h))
        object.__setattr__(self, "v", complex(self.v))
        norm_sq = abs(self.h) ** 2 + abs(self.v) ** 2
        if abs(norm_sq - 1.0) > _NORM_TOL:
            raise ValueError(f"polarization state is not normalized: |h|^2+|v|^2 = {norm_sq}")

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.h, self.v], dtype=complex)

    @staticmethod
    def from_vector(vec) -> "PolarizationState":
        vec = np.asarray(vec, dtype=complex)
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise ValueError("cannot normalize a zero Jones vector")
        return PolarizationState(vec[0] / norm, vec[1] / norm)


HORIZONTAL = PolarizationState(1.0, 0.0)
VERTICAL = PolarizationState(0.0, 1.0)


@dataclass(frozen=True)
class WavePlate:
    """A half- or quarter-wave retarder at fast-axis angle ``angle_deg`` (mod 180)."""

    kind: PlateKind
    angle_deg: float


@dataclass(frozen=True)
class PrepRecipe:
    """Two-plate state preparation from |H>: quarter-wave plate first, then half-wave plate."""

    qwp_deg: float
    hwp_deg: float

    def plates(self) -> tuple[WavePlate, WavePlate]:
        return (
            WavePlate(PlateKind.QUARTER, self.qwp_deg),
            WavePlate(PlateKind.HALF, self.hwp_deg),
        )


def waveplate_matrix(plate: WavePlate) -> np.ndarray:
    """Jones matrix of a rotated ideal retarder.

    Convention: R(theta) @ diag(1, exp(-i delta)) @ R(-theta), where R is the
    active rotation by the fast-axis angle and delta the retardance (180 deg
    for a half-wave plate, 90 deg for a quarter-wave plate).  With this sign a
    quarter-wave plate at +45 deg maps |H> to (|H> + i|V>)/sqrt(2), and the
    two-plate recipes below reproduce their analytic targets.
    """
    th = radians(plate.angle_deg)
    c, s = cos(th), sin(th)
    rot = np.array([[c, -s], [s, c]])
    delta = radians(_RETARDANCE_DEG[plate.kind])
    retarder = np.array([[1.0, 0.0], [0.0, np.exp(-1j * delta)]])
    return rot @ retarder @ rot.T


def apply_plate(state: PolarizationState, plate: WavePlate) -> PolarizationState:
    """Send a polarization state through a wave plate."""
    out = waveplate_matrix(plate) @ state.vector
    return PolarizationState.from_vector(out)


def prepare_from_recipe(recipe: PrepRecipe, state: PolarizationState = HORIZONTAL) -> PolarizationState:
    """Apply a two-plate recipe (QWP then HWP) to an input state, |H> by default."""
    qwp, hwp = recipe.plates()
    return apply_plate(apply_plate(state, qwp), hwp)


def prepare_elliptical(epsilon_deg: float, theta_deg: float, sign: int = +1) -> PolarizationState:
    """Elliptically polarized state with ellipticity epsilon and axis angle theta.

    The half-axes are x = cos(epsilon) along the direction theta and
    y = sin(epsilon) across it, so tan(epsilon) = y/x and the state is
    (x cos th + i y sin th)|H> +/- (x sin th - i y cos th)|V>, already unit norm.
    """
    x, y = cos(radians(epsilon_deg)), sin(radians(epsilon_deg))
    th = radians(theta_deg)
    s = 1.0 if sign >= 0 else -1.0
    return PolarizationState(
        x * cos(th) + 1j * y * sin(th),
        s * (x * sin(th) - 1j * y * cos(th)),
    )


def recipe_discriminator(epsilon_deg: float, theta_deg: float, sign: int = +1) -> PrepRecipe:
    """Wave-plate angles preparing prepare_elliptical(epsilon, theta, sign) from |H>.

    QWP at +/-epsilon, then HWP at +/-(epsilon+theta)/2.
    """
    s = 1.0 if sign >= 0 else -1.0
    return PrepRecipe(qwp_deg=s * epsilon_deg, hwp_deg=s * (epsilon_deg + theta_deg) / 2.0)


def prepare_equatorial(phi_deg: float, sign: int = +1) -> PolarizationState:
    """Equatorial Bloch-sphere state (|H> +/- e^{i phi}|V>)/sqrt(2)."""
    s = 1.0 if sign >= 0 else -1.0
    return PolarizationState(1.0 / sqrt(2.0), s * np.exp(1j * radians(phi_deg)) / sqrt(2.0))


def recipe_multimeter(phi_deg: float, sign: int = +1) -> PrepRecipe:
    """Wave-plate angles preparing prepare_equatorial(phi, sign) from |H>.

    The plus state uses QWP at -phi/2 and HWP at (90 - phi)/4; the minus state
    flips both plate angles, which shifts phi by 180 deg.
    """
    s = 1.0 if sign >= 0 else -1.0
    return PrepRecipe(qwp_deg=s * (-phi_deg / 2.0), hwp_deg=s * (90.0 - phi_deg) / 4.0)


def overlap(s1: PolarizationState, s2: PolarizationState) -> complex:
    """Inner product <s1|s2>, conjugate-linear in the first argument."""
    return complex(np.conj(s1.h) * s2.h + np.conj(s1.v) * s2.v)
