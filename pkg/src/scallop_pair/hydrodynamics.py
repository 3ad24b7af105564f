"""Drag forces and torques on the coupled pair, and their matrix form.

Resistive force theory gives the force density on each link as a linear
map of the local velocity, with an interaction correction that couples
link j of one scallop to link j of the other (strength lambda). Link-level
integrals of the densities produce a small set of blocks (A, b, alpha, d,
omega_coef, varpi, beta) that assemble into the 6x6 resistance matrix R
and the 6x2 shape-coupling matrix Phi of the force/torque balance

    R(t; lambda) qdot + Phi(t; lambda) sigmadot = 0,

with qdot = (xdot1, ydot1, thetadot1, xdot2, ydot2, thetadot2) and
sigmadot = (sigmadot1, sigmadot2). R is used exactly as derived: it is not
symmetric for lambda > 0 and no symmetrization is applied.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import kernel
from .geometry import (
    ScallopPairParams,
    StateRates,
    SystemState,
    link_direction,
    perp,
    point_velocity,
)


@dataclass(frozen=True)
class LinkBlocks:
    """Integrated force/torque blocks for one scallop.

    A (2x2), b and alpha (2-vectors) multiply the scallop's own rigid and
    shape rates in the force balance; d couples its torque to the other
    scallop's translation; omega_coef, varpi and beta are the rotational
    and shape torque coefficients. varpi and beta are symmetric under
    swapping the scallop labels.
    """

    A: np.ndarray
    b: np.ndarray
    alpha: np.ndarray
    d: np.ndarray
    omega_coef: float
    varpi: float
    beta: float


@dataclass(frozen=True)
class ResistanceAssembly:
    """Assembled resistance system at one configuration.

    Row/column ordering of R is (x1, y1, theta1, x2, y2, theta2); Phi
    columns correspond to (sigmadot1, sigmadot2). det_R is kept for
    invertibility monitoring.
    """

    R: np.ndarray
    Phi: np.ndarray
    det_R: float
    lambda_used: float


def rft_operator(e, c_par: float, c_perp: float) -> np.ndarray:
    """Local drag operator c_perp*I + (c_par - c_perp) e (x) e for unit e."""
    e = np.asarray(e, dtype=float)
    norm = float(np.hypot(e[0], e[1]))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"link direction must be a unit vector, |e| = {norm!r}")
    return c_perp * np.eye(2) + (c_par - c_perp) * np.outer(e, e)


def force_density(state: SystemState, rates: StateRates, params: ScallopPairParams,
                  i: int, j: int, s: float) -> np.ndarray:
    """Hydrodynamic force per unit length at arclength s on link j of scallop i.

    The local drag responds to the point's own velocity plus, with weight
    lambda, to the velocity of the matching point on link j of the other
    scallop (the only interaction retained for nearly parallel pairs).
    """
    other = 3 - i
    lam = params.lambda_
    Lam = params.Lambda
    theta_i, sigma_i = state.angles(i)
    theta_o, sigma_o = state.angles(other)
    J_own = rft_operator(link_direction(theta_i, sigma_i, j), params.c_par, params.c_perp)
    J_other = rft_operator(link_direction(theta_o, sigma_o, j), params.c_par, params.c_perp)
    v_own = point_velocity(state, rates, i, j, s, params.L)
    v_other = point_velocity(state, rates, other, j, s, params.L)
    return (-1.0 / Lam) * (J_own @ v_own) + (lam / Lam) * (J_other @ v_other)


def torque_density(state: SystemState, rates: StateRates, params: ScallopPairParams,
                   i: int, j: int, s: float) -> float:
    """Torque per unit length about scallop i's hinge from the force density."""
    theta_i, sigma_i = state.angles(i)
    lever = s * link_direction(theta_i, sigma_i, j)
    f = force_density(state, rates, params, i, j, s)
    return float(lever[0] * f[1] - lever[1] * f[0])


def link_blocks(state: SystemState, params: ScallopPairParams, i: int) -> LinkBlocks:
    """Integrated blocks for scallop i at the given configuration."""
    if i not in (1, 2):
        raise ValueError(f"scallop index must be 1 or 2, got {i!r}")
    other = 3 - i
    L, c_par, c_perp = params.L, params.c_par, params.c_perp
    theta_i, sigma_i = state.angles(i)
    theta_o, sigma_o = state.angles(other)
    e1 = link_direction(theta_i, sigma_i, 1)
    e2 = link_direction(theta_i, sigma_i, 2)
    f1 = link_direction(theta_o, sigma_o, 1)
    f2 = link_direction(theta_o, sigma_o, 2)

    A = L * (2.0 * c_perp * np.eye(2) + (c_par - c_perp) * (np.outer(e1, e1) + np.outer(e2, e2)))
    b = 0.5 * L**2 * c_perp * perp(e1 + e2)
    alpha = 0.5 * L**2 * c_perp * perp(e2)
    d = 0.5 * L**2 * (c_par - c_perp) * ((perp(e1) @ f1) * f1 + (perp(e2) @ f2) * f2) + b
    omega_coef = 2.0 * L**3 * c_perp / 3.0
    varpi = L**3 * c_perp / 3.0 * (e1 @ f1 + e2 @ f2)
    beta = L**3 * c_perp / 3.0 * (e2 @ f2)
    return LinkBlocks(A=A, b=b, alpha=alpha, d=d, omega_coef=omega_coef,
                      varpi=varpi, beta=beta)


def assemble(state: SystemState, params: ScallopPairParams) -> ResistanceAssembly:
    """Assemble R(lambda) and Phi(lambda) at the given state."""
    R, Phi = kernel.assemble_matrices(
        state.theta1, state.sigma1, state.theta2, state.sigma2,
        params.lambda_, params.L, params.c_par, params.c_perp,
    )
    if not (np.all(np.isfinite(R)) and np.all(np.isfinite(Phi))):
        raise ValueError("resistance assembly produced non-finite blocks")
    det = float(np.linalg.det(R))
    return ResistanceAssembly(R=R, Phi=Phi, det_R=det, lambda_used=params.lambda_)


def singularity_floor(R: np.ndarray) -> float:
    """Scale-relative |det| threshold below which R is treated as singular."""
    return kernel.det_floor(np.asarray(R, dtype=float))
