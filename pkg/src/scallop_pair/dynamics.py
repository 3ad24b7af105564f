"""Shape-driven dynamics of the pair as a drift-less control system.

Force and torque balance determines the rigid motion from the shape rates:
qdot = -R(lambda)^{-1} Phi(lambda) u with u = (sigmadot1, sigmadot2), i.e.

    d(state)/dt = u1 * v1(state) + u2 * v2(state)

for two control vector fields v1, v2. Cycling the controls around a small
loop produces net motion along the Lie bracket [v1, v2]; this module
provides the numerical bracket, its closed-form small-angle expansion, the
resulting displacement constants, and bounds on the coupling strength.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from ._kernels import kernel
from .geometry import ScallopPairParams, StateRates, SystemState


class SingularResistance(RuntimeError):
    """The resistance matrix fell below the scale-relative singularity floor."""

    def __init__(self, det: float, floor: float, context: str = ""):
        self.det = det
        self.floor = floor
        msg = f"|det R| = {abs(det):.3e} below singularity floor {floor:.3e}"
        if context:
            msg += f" ({context})"
        super().__init__(msg)


class FDUnstable(RuntimeError):
    """Finite-difference bracket failed its step-halving consistency check."""


@dataclass(frozen=True)
class ControlPair:
    """Shape angular velocities (u1, u2) = (sigmadot1, sigmadot2)."""

    u1: float
    u2: float

    def __post_init__(self):
        if not (math.isfinite(self.u1) and math.isfinite(self.u2)):
            raise ValueError("controls must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.u1, self.u2])


@dataclass(frozen=True)
class ExpansionCoefficients:
    """Small-angle expansion of the bracket [v1, v2] near the open pair.

    At the configuration (theta0, theta0, pi + eps, pi + eps*cos(phi)) the
    bracket expands to (xi1*eps^2, eta1*eps^2, vartheta*eps, xi2*eps^2,
    eta2*eps^2, vartheta*eps, 0, 0) up to o(eps^2). vartheta is shared by
    both orientation slots; (xi_i, eta_i) are proportional to
    (cos(theta0), sin(theta0)) with a common scalar per scallop.
    """

    xi1: float
    eta1: float
    vartheta: float
    xi2: float
    eta2: float
    phi: float
    theta0: float
    lambda_: float
    L: float
    c_par: float
    c_perp: float

    def bracket_vector(self, eps: float) -> np.ndarray:
        """Predicted bracket 8-vector at perturbation size eps."""
        return np.array([
            self.xi1 * eps**2, self.eta1 * eps**2, self.vartheta * eps,
            self.xi2 * eps**2, self.eta2 * eps**2, self.vartheta * eps,
            0.0, 0.0,
        ])


def _rates_array(state8: np.ndarray, u1: float, u2: float,
                 params: ScallopPairParams, context: str = "") -> np.ndarray:
    rates, det, floor = kernel.rates_and_det(
        state8, u1, u2, params.lambda_, params.L, params.c_par, params.c_perp)
    if abs(det) < floor:
        raise SingularResistance(det, floor, context)
    return rates


def solve_rates(state: SystemState, params: ScallopPairParams,
                controls: ControlPair) -> StateRates:
    """Rigid and shape rates produced by the controls at this state."""
    rates = _rates_array(state.as_array(), controls.u1, controls.u2, params)
    return StateRates.from_array(rates)


def control_vector_field(state: SystemState, params: ScallopPairParams,
                         k: int) -> np.ndarray:
    """Vector field v_k = (-R^{-1} phi_k, e_k) as an 8-vector (k in {1, 2})."""
    if k not in (1, 2):
        raise ValueError(f"control index must be 1 or 2, got {k!r}")
    return _rates_array(state.as_array(), 1.0 if k == 1 else 0.0,
                        1.0 if k == 2 else 0.0, params)


def lie_bracket_numeric(state: SystemState, params: ScallopPairParams,
                        step: float = 1e-5, richardson_tol: float = 1e-4) -> np.ndarray:
    """[v1, v2] = Dv2 v1 - Dv1 v2 by central differences over all 8 coordinates.

    The bracket is evaluated at ``step`` and ``step/2``; if the two results
    differ by more than richardson_tol in relative norm (and the bracket is
    not itself below resolution), FDUnstable is raised. The half-step
    result is returned. Shape slots are exactly zero because both fields
    carry constant shape components.
    """
    q0 = state.as_array()

    def field(q: np.ndarray, k: int) -> np.ndarray:
        return _rates_array(q, 1.0 if k == 1 else 0.0, 1.0 if k == 2 else 0.0,
                            params, context="bracket stencil point")

    def bracket(h: float) -> np.ndarray:
        J1 = np.zeros((8, 8))
        J2 = np.zeros((8, 8))
        for idx in range(8):
            dq = np.zeros(8)
            dq[idx] = h
            J1[:, idx] = (field(q0 + dq, 1) - field(q0 - dq, 1)) / (2.0 * h)
            J2[:, idx] = (field(q0 + dq, 2) - field(q0 - dq, 2)) / (2.0 * h)
        v1 = field(q0, 1)
        v2 = field(q0, 2)
        # shape rows of both Jacobians vanish identically (constant shape
        # components), so the bracket's shape slots come out exactly zero
        return J2 @ v1 - J1 @ v2

    coarse = bracket(step)
    fine = bracket(0.5 * step)
    field_scale = max(np.linalg.norm(field(q0, 1)), np.linalg.norm(field(q0, 2)), 1e-300)
    resolution = 1e-10 * field_scale
    change = np.linalg.norm(fine - coarse)
    if np.linalg.norm(fine) <= resolution and change <= resolution:
        return fine
    if change > richardson_tol * max(np.linalg.norm(fine), resolution):
        raise FDUnstable(
            f"bracket changed by {change:.3e} (relative "
            f"{change / max(np.linalg.norm(fine), resolution):.3e}) when halving "
            f"the step from {step:g}"
        )
    return fine


def expansion_coefficients(phi: float, theta0: float,
                           params: ScallopPairParams) -> ExpansionCoefficients:
    """Closed-form bracket expansion coefficients at phase phi, heading theta0."""
    lam = params.lambda_
    L, c_par, c_perp = params.L, params.c_par, params.c_perp
    sin_half_sq = math.sin(0.5 * phi) ** 2
    prefactor = L * lam * sin_half_sq / (64.0 * c_par * c_perp * (1.0 - lam**2))
    term_a = c_perp**2 * (2.0 + lam) - c_par * c_perp
    term_b = 3.0 * c_par**2 - 2.0 * c_perp * c_par - c_perp**2
    combo1 = term_a + math.cos(phi) * term_b
    combo2 = term_b + math.cos(phi) * (c_perp**2 * (2.0 + lam) - c_perp * c_par)
    vartheta = -lam / (16.0 * (1.0 - lam)) * sin_half_sq
    return ExpansionCoefficients(
        xi1=prefactor * math.cos(theta0) * combo1,
        eta1=prefactor * math.sin(theta0) * combo1,
        vartheta=vartheta,
        xi2=prefactor * math.cos(theta0) * combo2,
        eta2=prefactor * math.sin(theta0) * combo2,
        phi=phi, theta0=theta0, lambda_=lam, L=L, c_par=c_par, c_perp=c_perp,
    )


def square_stroke_displacement_prediction(gamma1: float, gamma2: float, tau: float,
                                          eps: float, phi: float, theta0: float,
                                          params: ScallopPairParams) -> np.ndarray:
    """Leading-order state change over one rectangular control loop.

    The loop (0,-g2), (-g1,0), (0,g2), (g1,0), each leg lasting tau, moves
    the state by -g1*g2*tau^2 times the bracket at the starting
    configuration; shapes return exactly. Flipping the sign of either
    gamma reverses the loop orientation and negates the prediction.
    """
    coeffs = expansion_coefficients(phi, theta0, params)
    return -gamma1 * gamma2 * tau**2 * coeffs.bracket_vector(eps)


def constant_C(params: ScallopPairParams) -> float:
    """Midpoint displacement constant C(L, lambda, c_par, c_perp)."""
    lam = params.lambda_
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"lambda = {lam!r} outside [0, 1)")
    num = params.L * lam * (params.c_perp**2 * (1.0 + lam)
                            - 3.0 * params.c_par * params.c_perp
                            + 3.0 * params.c_par**2)
    return num / (128.0 * params.c_par * params.c_perp * (1.0 - lam**2))


def constant_C_tilde(lam: float, L: float) -> float:
    """C specialized to c_perp = 2*c_par: L*lam*(1+4*lam) / (256*(1-lam^2))."""
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"lambda = {lam!r} outside [0, 1); pole at lambda = 1")
    return L * lam * (1.0 + 4.0 * lam) / (256.0 * (1.0 - lam**2))


def theoretical_midpoint_displacement(phi: float, eps: float, gamma1: float,
                                      gamma2: float, tau: float,
                                      params: ScallopPairParams) -> float:
    """Leading-order net midpoint displacement magnitude over one loop,
    C * gamma1 * gamma2 * tau^2 * eps^2 * sin(phi)^2 / 2."""
    return abs(constant_C(params) * gamma1 * gamma2 * tau**2 * eps**2
               * math.sin(phi) ** 2 / 2.0)


@dataclass(frozen=True)
class LambdaBounds:
    """Coupling-strength bounds implied by kappa*a < h < L/kappa.

    lambda_star_upper is -ln(kappa)/ln(a/L); lambda_star_lower is its
    complement to 1. kappa_window is the open interval of kappa for which
    the upper bound lies in (1/2, 1).
    """

    lambda_star_lower: float
    lambda_star_upper: float
    kappa_window: tuple[float, float]


def lambda_bounds(kappa: float, a: float, L: float) -> LambdaBounds:
    if not (kappa > 0 and math.isfinite(kappa)):
        raise ValueError(f"kappa must be positive, got {kappa!r}")
    if not 0 < a < L:
        raise ValueError(f"need 0 < a < L, got a = {a!r}, L = {L!r}")
    upper = -math.log(kappa) / math.log(a / L)
    if not 0.0 < upper < 1.0:
        raise ValueError(
            f"kappa = {kappa!r} gives upper bound {upper:.4g} outside (0, 1)"
        )
    ratio = L / a
    return LambdaBounds(
        lambda_star_lower=1.0 - upper,
        lambda_star_upper=upper,
        kappa_window=(math.sqrt(ratio), ratio),
    )


def estimate_lambda0(state_sampler: Iterable[SystemState] | Callable[[], Iterable[SystemState]],
                     params_template: ScallopPairParams,
                     resolution: int = 64) -> float:
    """Empirical invertibility threshold of R over sampled states.

    Scans lambda on the uniform grid j/resolution (j = 0..resolution-1);
    at the first grid value where some sampled state's |det R| drops below
    the singularity floor, bisects within the bracketing interval. Returns
    1.0 if no singularity is found (a conservative answer: invertibility
    held everywhere scanned). Doubling the resolution refines the grid to
    a superset, so the estimate never increases with resolution.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    states = list(state_sampler() if callable(state_sampler) else state_sampler)
    if not states:
        raise ValueError("state sampler produced no states")
    angles = [(s.theta1, s.sigma1, s.theta2, s.sigma2) for s in states]
    L, c_par, c_perp = params_template.L, params_template.c_par, params_template.c_perp

    def singular_at(lam: float) -> bool:
        for th1, sg1, th2, sg2 in angles:
            R, _ = kernel.assemble_matrices(th1, sg1, th2, sg2, lam, L, c_par, c_perp)
            if abs(np.linalg.det(R)) < kernel.det_floor(R):
                return True
        return False

    previous = 0.0
    found = None
    for j in range(resolution):
        lam = j / resolution
        if singular_at(lam):
            found = lam
            break
        previous = lam
    if found is None:
        return 1.0
    if found == 0.0:
        return 0.0
    lo, hi = previous, found
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if singular_at(mid):
            hi = mid
        else:
            lo = mid
    return hi
