"""Shared oracles for the test suite.

These deliberately avoid the library's assembled-matrix and kernel-loop
code paths: block values are recovered by numerically integrating the
force/torque densities, and trajectories can be re-integrated with a
local RK4 built only on solve_rates.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import simpson

from scallop_pair import ControlPair, ScallopPairParams, SystemState, solve_rates

REFERENCE_PARAMS = ScallopPairParams(L=10.0, h=1.0, a=0.25, c_par=1.0, c_perp=2.0)


def reference_params_nondim() -> ScallopPairParams:
    return REFERENCE_PARAMS.nondimensionalized()


def random_state(rng, sigma_window: float = 0.45) -> SystemState:
    return SystemState(
        x1=rng.uniform(-2, 2), y1=rng.uniform(-2, 2),
        theta1=rng.uniform(-2 * math.pi, 2 * math.pi),
        x2=rng.uniform(-2, 2), y2=rng.uniform(-2, 2),
        theta2=rng.uniform(-2 * math.pi, 2 * math.pi),
        sigma1=math.pi + rng.uniform(-sigma_window, sigma_window),
        sigma2=math.pi + rng.uniform(-sigma_window, sigma_window),
    )


def _link_dirs(state: SystemState):
    e = {}
    for i in (1, 2):
        theta, sigma = state.angles(i)
        e[(i, 1)] = np.array([math.cos(theta), math.sin(theta)])
        e[(i, 2)] = np.array([math.cos(theta + sigma), math.sin(theta + sigma)])
    return e


def density_profiles(state: SystemState, rates8: np.ndarray,
                     params: ScallopPairParams, i: int, s: np.ndarray):
    """Force density (n, 2) and torque density (n,) for both links of
    scallop i, vectorized over arclength. Independent re-derivation used
    as the quadrature oracle."""
    other = 3 - i
    lam, Lam = params.lambda_, params.Lambda
    e = _link_dirs(state)
    hinge_dot = {1: rates8[0:2], 2: rates8[3:5]}
    theta_dot = {1: rates8[2], 2: rates8[5]}
    sigma_dot = {1: rates8[6], 2: rates8[7]}

    force = np.zeros((len(s), 2))
    torque = np.zeros(len(s))
    for j in (1, 2):
        J_own = params.c_perp * np.eye(2) + (params.c_par - params.c_perp) * np.outer(e[(i, j)], e[(i, j)])
        J_oth = params.c_perp * np.eye(2) + (params.c_par - params.c_perp) * np.outer(e[(other, j)], e[(other, j)])
        perp_own = np.array([-e[(i, j)][1], e[(i, j)][0]])
        perp_oth = np.array([-e[(other, j)][1], e[(other, j)][0]])
        v_own = hinge_dot[i][None, :] + np.outer(s * (theta_dot[i] + (j - 1) * sigma_dot[i]), perp_own)
        v_oth = hinge_dot[other][None, :] + np.outer(s * (theta_dot[other] + (j - 1) * sigma_dot[other]), perp_oth)
        f = (-1.0 / Lam) * v_own @ J_own.T + (lam / Lam) * v_oth @ J_oth.T
        force += f
        lever = np.outer(s, e[(i, j)])
        torque += lever[:, 0] * f[:, 1] - lever[:, 1] * f[:, 0]
    return force, torque


def quadrature_blocks(state: SystemState, params: ScallopPairParams, i: int,
                      n_points: int = 1001) -> dict:
    """Recover the integrated blocks of scallop i from 1000-interval
    composite Simpson quadrature of the densities under unit-rate probes."""
    other = 3 - i
    lam, Lam = params.lambda_, params.Lambda
    s = np.linspace(0.0, params.L, n_points)

    def probe(**rates):
        full = np.zeros(8)
        index = {"x1": 0, "y1": 1, "theta1": 2, "x2": 3, "y2": 4, "theta2": 5,
                 "sigma1": 6, "sigma2": 7}
        for key, value in rates.items():
            full[index[key]] = value
        force, torque = density_profiles(state, full, params, i, s)
        F = np.array([simpson(force[:, 0], x=s), simpson(force[:, 1], x=s)])
        T = simpson(torque, x=s)
        return F, T

    own, oth = str(i), str(other)
    Fx, Tx = probe(**{f"x{own}": 1.0})
    Fy, Ty = probe(**{f"y{own}": 1.0})
    Fth, Tth = probe(**{f"theta{own}": 1.0})
    Fsg, Tsg = probe(**{f"sigma{own}": 1.0})
    _, Tox = probe(**{f"x{oth}": 1.0})
    _, Toy = probe(**{f"y{oth}": 1.0})
    _, Toth = probe(**{f"theta{oth}": 1.0})
    _, Tosg = probe(**{f"sigma{oth}": 1.0})

    blocks = {
        "A": -Lam * np.column_stack([Fx, Fy]),
        "b_force": -Lam * Fth,
        "b_torque": -Lam * np.array([Tx, Ty]),
        "alpha": -Lam * Fsg,
        "omega_coef": -Lam * Tth,
        "omega_half": -Lam * Tsg,
    }
    if lam > 0:
        blocks["d"] = (Lam / lam) * np.array([Tox, Toy])
        blocks["varpi"] = (Lam / lam) * Toth
        blocks["beta"] = (Lam / lam) * Tosg
    return blocks


def rk4_on_solve_rates(state: SystemState, params: ScallopPairParams,
                       control_fn, t0: float, t1: float, n_steps: int,
                       freeze_per_step: bool = False) -> np.ndarray:
    """Local RK4 using only the public solve_rates; oracle for the kernel loop.

    freeze_per_step holds the control at its step-start value through all
    four stages, as required for piecewise-constant (square) programs whose
    switches sit on mesh points.
    """
    q = state.as_array()
    dt = (t1 - t0) / n_steps

    def rhs(t, qv):
        u = control_fn(t)
        return solve_rates(SystemState.from_array(qv), params,
                           ControlPair(u[0], u[1])).as_array()

    for k in range(n_steps):
        t = t0 + k * dt
        if freeze_per_step:
            ta = tb = tc = t
        else:
            ta, tb, tc = t, t + 0.5 * dt, t + dt
        k1 = rhs(ta, q)
        k2 = rhs(tb, q + 0.5 * dt * k1)
        k3 = rhs(tb, q + 0.5 * dt * k2)
        k4 = rhs(tc, q + dt * k3)
        q = q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return q


def net_midpoint(states: np.ndarray) -> np.ndarray:
    return 0.5 * (states[-1, 0:2] + states[-1, 3:5] - states[0, 0:2] - states[0, 3:5])


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x, dtype=float)),
                            np.log(np.asarray(y, dtype=float)), 1)[0])
