"""Kinematics of a pair of two-link scallops swimming side by side.

Each scallop is two rigid links of length L joined at a hinge. Its planar
placement is the hinge position (x, y) and the angle theta of the first
link against the lab x-axis; its only shape variable is the opening angle
sigma between the links. Link j of scallop i points along

    e_i^(j) = (cos(theta_i + (j-1) sigma_i), sin(theta_i + (j-1) sigma_i)).

Angles are stored unwrapped (no mod-2pi reduction) so that rotation
accumulated over many stroke cycles stays measurable.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

# The drag model is derived for nearly open scallops; states outside this
# band around pi are still integrable but physically questionable.
SIGMA_VALIDITY_WINDOW = 0.5


class ModelValidityWarning(UserWarning):
    """Configuration drifted outside the regime the drag model assumes."""


@dataclass(frozen=True)
class ScallopPairParams:
    """Physical constants of the pair plus the derived coupling strength.

    lambda_ = ln(h/L) / ln(a/L) measures the hydrodynamic interaction
    between the two scallops (0 = decoupled, 1 = touching). Lambda is
    always the derived combination 1 - lambda_**2, never stored
    independently.
    """

    L: float
    h: float
    a: float
    c_par: float
    c_perp: float

    def __post_init__(self):
        for name in ("L", "h", "a", "c_par", "c_perp"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        lam = self.lambda_
        if not (0.0 <= lam < 1.0):
            raise ValueError(
                f"interaction strength lambda = ln(h/L)/ln(a/L) = {lam:.6g} "
                "outside [0, 1); require a < h < L (or h = L for a decoupled pair)"
            )

    @property
    def lambda_(self) -> float:
        return math.log(self.h / self.L) / math.log(self.a / self.L)

    @property
    def Lambda(self) -> float:
        return 1.0 - self.lambda_**2

    def with_lambda(self, lam: float) -> "ScallopPairParams":
        """Copy with h back-solved so that the coupling equals ``lam``."""
        if not (0.0 <= lam < 1.0):
            raise ValueError(f"lambda must lie in [0, 1), got {lam!r}")
        return replace(self, h=self.L * (self.a / self.L) ** lam)

    def nondimensionalized(self) -> "ScallopPairParams":
        """Rescale all lengths by 1/L (L becomes 1; lambda is unchanged).

        Positions and displacements produced under the rescaled parameters
        are measured in units of the link length.
        """
        return replace(self, L=1.0, h=self.h / self.L, a=self.a / self.L)


@dataclass(frozen=True)
class SystemState:
    """Placement and shape of both scallops (8 scalar coordinates)."""

    x1: float
    y1: float
    theta1: float
    x2: float
    y2: float
    theta2: float
    sigma1: float
    sigma2: float

    def __post_init__(self):
        values = self.as_array()
        if not np.all(np.isfinite(values)):
            raise ValueError(f"state coordinates must be finite, got {values}")
        for name, sigma in (("sigma1", self.sigma1), ("sigma2", self.sigma2)):
            if not 0.0 < sigma < 2.0 * math.pi:
                raise ValueError(f"{name} = {sigma!r} outside (0, 2*pi)")
            if abs(sigma - math.pi) > SIGMA_VALIDITY_WINDOW:
                warnings.warn(
                    f"{name} = {sigma:.4f} is more than {SIGMA_VALIDITY_WINDOW} rad "
                    "from pi; the interaction model assumes nearly open scallops",
                    ModelValidityWarning,
                    stacklevel=2,
                )

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.x1, self.y1, self.theta1, self.x2, self.y2, self.theta2,
             self.sigma1, self.sigma2]
        )

    @classmethod
    def from_array(cls, values) -> "SystemState":
        values = np.asarray(values, dtype=float)
        if values.shape != (8,):
            raise ValueError(f"expected 8 coordinates, got shape {values.shape}")
        return cls(*values)

    def hinge(self, i: int) -> np.ndarray:
        _check_scallop_index(i)
        return np.array([self.x1, self.y1]) if i == 1 else np.array([self.x2, self.y2])

    def angles(self, i: int) -> tuple[float, float]:
        _check_scallop_index(i)
        if i == 1:
            return self.theta1, self.sigma1
        return self.theta2, self.sigma2


@dataclass(frozen=True)
class StateRates:
    """Time derivatives of the 8 state coordinates."""

    xdot1: float
    ydot1: float
    thetadot1: float
    xdot2: float
    ydot2: float
    thetadot2: float
    sigmadot1: float
    sigmadot2: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.as_array())):
            raise ValueError("rates must be finite")

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.xdot1, self.ydot1, self.thetadot1, self.xdot2, self.ydot2,
             self.thetadot2, self.sigmadot1, self.sigmadot2]
        )

    @classmethod
    def from_array(cls, values) -> "StateRates":
        values = np.asarray(values, dtype=float)
        if values.shape != (8,):
            raise ValueError(f"expected 8 rates, got shape {values.shape}")
        return cls(*values)


def _check_scallop_index(i: int) -> None:
    if i not in (1, 2):
        raise ValueError(f"scallop index must be 1 or 2, got {i!r}")


def _check_link_index(j: int) -> None:
    if j not in (1, 2):
        raise ValueError(f"link index must be 1 or 2, got {j!r}")


def link_direction(theta: float, sigma: float, j: int) -> np.ndarray:
    """Unit direction of link j for a scallop at orientation theta, shape sigma."""
    _check_link_index(j)
    angle = theta + (j - 1) * sigma
    return np.array([math.cos(angle), math.sin(angle)])


def perp(v) -> np.ndarray:
    """Counterclockwise quarter turn, (x, y) -> (-y, x).

    This orientation makes d/dt (cos a, sin a) = adot * perp(e) hold, which
    the rigid-link velocity formula relies on.
    """
    v = np.asarray(v, dtype=float)
    return np.array([-v[1], v[0]])


def point_on_link(state: SystemState, i: int, j: int, s: float, L: float) -> np.ndarray:
    """Position of the material point at arclength s along link j of scallop i."""
    _check_scallop_index(i)
    _check_link_index(j)
    if not 0.0 <= s <= L:
        raise ValueError(f"arclength s = {s!r} outside [0, {L}]")
    theta, sigma = state.angles(i)
    return state.hinge(i) + s * link_direction(theta, sigma, j)


def point_velocity(state: SystemState, rates: StateRates, i: int, j: int,
                   s: float, L: float) -> np.ndarray:
    """Velocity of the material point at arclength s along link j of scallop i.

    Rigid-link kinematics: hinge velocity plus s * perp(e) times the link's
    angular rate (thetadot for link 1, thetadot + sigmadot for link 2).
    """
    _check_scallop_index(i)
    _check_link_index(j)
    if not 0.0 <= s <= L:
        raise ValueError(f"arclength s = {s!r} outside [0, {L}]")
    theta, sigma = state.angles(i)
    if i == 1:
        hinge_dot = np.array([rates.xdot1, rates.ydot1])
        ang_rate = rates.thetadot1 + (j - 1) * rates.sigmadot1
    else:
        hinge_dot = np.array([rates.xdot2, rates.ydot2])
        ang_rate = rates.thetadot2 + (j - 1) * rates.sigmadot2
    return hinge_dot + (s * ang_rate) * perp(link_direction(theta, sigma, j))


def paired_initial_state(theta0: float, sigma1: float, sigma2: float,
                         separation: float, x1: float = 0.0, y1: float = 0.0) -> SystemState:
    """Both scallops at orientation theta0, scallop 2 offset by ``separation``
    perpendicular to the common link direction."""
    offset = separation * perp(np.array([math.cos(theta0), math.sin(theta0)]))
    return SystemState(
        x1=x1, y1=y1, theta1=theta0,
        x2=x1 + offset[0], y2=y1 + offset[1], theta2=theta0,
        sigma1=sigma1, sigma2=sigma2,
    )
