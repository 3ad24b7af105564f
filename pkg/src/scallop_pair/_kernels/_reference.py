"""Pure-NumPy kernel backend.

Implements the per-step hot path of the simulation: assembling the 6x6
resistance matrix R and 6x2 shape-coupling matrix Phi from the four
configuration angles, solving R qdot = -Phi u, and running the fixed-step
RK4 loop for a prescribed stroke. The compiled backend in _core.pyx
implements the same contract; equivalence is enforced by tests.

State ordering is (x1, y1, theta1, x2, y2, theta2, sigma1, sigma2); the
resistance system acts on the first six coordinates.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "python"

# |det R| below DET_FLOOR_COEFF * prod(|diag R|) is treated as singular.
# The product of the (positive) diagonal equals the sixth power of the
# geometric mean of the diagonal, so the floor tracks the matrix scale.
DET_FLOOR_COEFF = 1e-12

SQUARE, SINUSOIDAL = 0, 1


def assemble_matrices(theta1: float, sigma1: float, theta2: float, sigma2: float,
                      lam: float, L: float, c_par: float, c_perp: float):
    """Resistance matrix R(lambda) and shape-coupling matrix Phi(lambda).

    Block layout (rows = force/torque balance of scallop 1 then 2):

        R = [[ A1,    b1,  -lam*A2, -lam*b2  ],
             [ b1^T,  w,   -lam*d1, -lam*vpi ],
             [-lam*A1,-lam*b1,  A2,  b2      ],
             [-lam*d2,-lam*vpi, b2^T, w      ]]

        Phi = [[ alpha1, -lam*alpha2], [w/2, -lam*beta],
               [-lam*alpha1, alpha2 ], [-lam*beta, w/2 ]]
    """
    e11 = np.array([math.cos(theta1), math.sin(theta1)])
    e12 = np.array([math.cos(theta1 + sigma1), math.sin(theta1 + sigma1)])
    e21 = np.array([math.cos(theta2), math.sin(theta2)])
    e22 = np.array([math.cos(theta2 + sigma2), math.sin(theta2 + sigma2)])

    A1 = L * (2.0 * c_perp * np.eye(2) + (c_par - c_perp) * (np.outer(e11, e11) + np.outer(e12, e12)))
    A2 = L * (2.0 * c_perp * np.eye(2) + (c_par - c_perp) * (np.outer(e21, e21) + np.outer(e22, e22)))

    half_L2_cperp = 0.5 * L * L * c_perp
    b1 = half_L2_cperp * _perp(e11 + e12)
    b2 = half_L2_cperp * _perp(e21 + e22)
    alpha1 = half_L2_cperp * _perp(e12)
    alpha2 = half_L2_cperp * _perp(e22)

    half_L2_dc = 0.5 * L * L * (c_par - c_perp)
    d1 = half_L2_dc * ((_perp(e11) @ e21) * e21 + (_perp(e12) @ e22) * e22) + b1
    d2 = half_L2_dc * ((_perp(e21) @ e11) * e11 + (_perp(e22) @ e12) * e12) + b2

    L3_cperp_3 = L**3 * c_perp / 3.0
    w = 2.0 * L3_cperp_3
    varpi = L3_cperp_3 * (e11 @ e21 + e12 @ e22)
    beta = L3_cperp_3 * (e12 @ e22)

    R = np.empty((6, 6))
    R[0:2, 0:2] = A1
    R[0:2, 2] = b1
    R[0:2, 3:5] = -lam * A2
    R[0:2, 5] = -lam * b2
    R[2, 0:2] = b1
    R[2, 2] = w
    R[2, 3:5] = -lam * d1
    R[2, 5] = -lam * varpi
    R[3:5, 0:2] = -lam * A1
    R[3:5, 2] = -lam * b1
    R[3:5, 3:5] = A2
    R[3:5, 5] = b2
    R[5, 0:2] = -lam * d2
    R[5, 2] = -lam * varpi
    R[5, 3:5] = b2
    R[5, 5] = w

    Phi = np.empty((6, 2))
    Phi[0:2, 0] = alpha1
    Phi[2, 0] = 0.5 * w
    Phi[3:5, 0] = -lam * alpha1
    Phi[5, 0] = -lam * beta
    Phi[0:2, 1] = -lam * alpha2
    Phi[2, 1] = -lam * beta
    Phi[3:5, 1] = alpha2
    Phi[5, 1] = 0.5 * w

    return R, Phi


def _perp(v: np.ndarray) -> np.ndarray:
    return np.array([-v[1], v[0]])


def det_floor(R: np.ndarray) -> float:
    return DET_FLOOR_COEFF * float(np.prod(np.abs(np.diag(R))))


def rates_and_det(state, u1: float, u2: float, lam: float, L: float,
                  c_par: float, c_perp: float):
    """Full 8-component state rates for controls (u1, u2), plus det R.

    Returns (rates, det, floor). det may be below floor; the caller decides
    whether that is an error.
    """
    state = np.asarray(state, dtype=float)
    R, Phi = assemble_matrices(state[2], state[6], state[5], state[7],
                               lam, L, c_par, c_perp)
    det = float(np.linalg.det(R))
    floor = det_floor(R)
    rates = np.empty(8)
    if abs(det) < floor:
        rates[:] = np.nan
        return rates, det, floor
    rates[:6] = np.linalg.solve(R, -(Phi[:, 0] * u1 + Phi[:, 1] * u2))
    rates[6] = u1
    rates[7] = u2
    return rates, det, floor


def _position_rates(q: np.ndarray, u1: float, u2: float, lam: float, L: float,
                    c_par: float, c_perp: float, want_det: bool):
    R, Phi = assemble_matrices(q[2], q[6], q[5], q[7], lam, L, c_par, c_perp)
    det = float(np.linalg.det(R)) if want_det else None
    floor = det_floor(R)
    if det is not None and abs(det) < floor:
        return None, det
    qdot = np.empty(8)
    qdot[:6] = np.linalg.solve(R, -(Phi[:, 0] * u1 + Phi[:, 1] * u2))
    qdot[6] = u1
    qdot[7] = u2
    return qdot, det


def integrate_stroke(state0, lam: float, L: float, c_par: float, c_perp: float,
                     kind: int, p1: float, p2: float, p3: float,
                     n_steps: int, dt: float):
    """Classical RK4 over n_steps of size dt under a prescribed stroke.

    kind=SQUARE: (p1, p2, p3) = (gamma1, gamma2, tau); the control is held
    constant over each step (steps are aligned with the switching times, so
    every step lies inside one leg and the leg ODE is autonomous).
    kind=SINUSOIDAL: (p1, p2, p3) = (eps, omega_freq, phi); controls are
    u1 = -eps*w*sin(w t), u2 = -eps*w*sin(w t + phi), evaluated per stage.

    Returns (states, dets, status, n_done): states is (n_done+1, 8), dets
    the matching |det R| history (signed), status 0 on success or 1 if the
    resistance matrix fell below the singularity floor at step n_done.
    """
    q = np.array(state0, dtype=float)
    states = np.empty((n_steps + 1, 8))
    dets = np.empty(n_steps + 1)
    states[0] = q

    if kind == SQUARE:
        gamma1, gamma2, tau = p1, p2, p3
        steps_per_leg = int(round(tau / dt))
        legs = ((0.0, -gamma2), (-gamma1, 0.0), (0.0, gamma2), (gamma1, 0.0))
    elif kind == SINUSOIDAL:
        eps, omega, phi = p1, p2, p3
        amp = eps * omega
    else:
        raise ValueError(f"unknown stroke kind code {kind!r}")

    for k in range(n_steps):
        if kind == SQUARE:
            u1, u2 = legs[(k // steps_per_leg) % 4]
            ua = ub = uc = (u1, u2)
        else:
            t = k * dt
            ua = (-amp * math.sin(omega * t), -amp * math.sin(omega * t + phi))
            tm = k * dt + 0.5 * dt
            ub = (-amp * math.sin(omega * tm), -amp * math.sin(omega * tm + phi))
            te = (k + 1) * dt
            uc = (-amp * math.sin(omega * te), -amp * math.sin(omega * te + phi))

        k1, det = _position_rates(q, ua[0], ua[1], lam, L, c_par, c_perp, True)
        dets[k] = det
        if k1 is None:
            return states[: k + 1], dets[: k + 1], 1, k
        k2, _ = _position_rates(q + (0.5 * dt) * k1, ub[0], ub[1], lam, L, c_par, c_perp, False)
        k3, _ = _position_rates(q + (0.5 * dt) * k2, ub[0], ub[1], lam, L, c_par, c_perp, False)
        k4, _ = _position_rates(q + dt * k3, uc[0], uc[1], lam, L, c_par, c_perp, False)
        q = q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        states[k + 1] = q

    R, _ = assemble_matrices(q[2], q[6], q[5], q[7], lam, L, c_par, c_perp)
    dets[n_steps] = float(np.linalg.det(R))
    if abs(dets[n_steps]) < det_floor(R):
        return states, dets, 1, n_steps
    return states, dets, 0, n_steps
