# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel backend.

Same contract as _reference.py: resistance/coupling assembly, rates solve,
and the RK4 stroke loop, with a hand-rolled 6x6 LU (partial pivoting) so
the inner loop performs no Python calls. Floating-point evaluation order
mirrors the reference so the two backends agree to rounding error.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport NAN, cos, fabs, llround, sin

cnp.import_array()

BACKEND_NAME = "compiled"
DET_FLOOR_COEFF = 1e-12
SQUARE = 0
SINUSOIDAL = 1

cdef double _FLOOR_COEFF = 1e-12
cdef int _SQUARE = 0
cdef int _SINUSOIDAL = 1


cdef void _assemble_c(double theta1, double sigma1, double theta2, double sigma2,
                      double lam, double L, double c_par, double c_perp,
                      double[6][6] R, double[6][2] Phi) noexcept nogil:
    cdef double e11x = cos(theta1), e11y = sin(theta1)
    cdef double e12x = cos(theta1 + sigma1), e12y = sin(theta1 + sigma1)
    cdef double e21x = cos(theta2), e21y = sin(theta2)
    cdef double e22x = cos(theta2 + sigma2), e22y = sin(theta2 + sigma2)

    cdef double dc = c_par - c_perp
    cdef double two_cperp = 2.0 * c_perp

    # A_i = L * (2 c_perp I + dc (e_i1 (x) e_i1 + e_i2 (x) e_i2))
    cdef double A1xx = L * (two_cperp + dc * (e11x * e11x + e12x * e12x))
    cdef double A1xy = L * (dc * (e11x * e11y + e12x * e12y))
    cdef double A1yy = L * (two_cperp + dc * (e11y * e11y + e12y * e12y))
    cdef double A2xx = L * (two_cperp + dc * (e21x * e21x + e22x * e22x))
    cdef double A2xy = L * (dc * (e21x * e21y + e22x * e22y))
    cdef double A2yy = L * (two_cperp + dc * (e21y * e21y + e22y * e22y))

    # b_i = (L^2/2) c_perp perp(e_i1 + e_i2), alpha_i = (L^2/2) c_perp perp(e_i2)
    cdef double half_L2_cperp = 0.5 * L * L * c_perp
    cdef double b1x = half_L2_cperp * (-(e11y + e12y))
    cdef double b1y = half_L2_cperp * (e11x + e12x)
    cdef double b2x = half_L2_cperp * (-(e21y + e22y))
    cdef double b2y = half_L2_cperp * (e21x + e22x)
    cdef double alpha1x = half_L2_cperp * (-e12y)
    cdef double alpha1y = half_L2_cperp * e12x
    cdef double alpha2x = half_L2_cperp * (-e22y)
    cdef double alpha2y = half_L2_cperp * e22x

    # d_i = (L^2/2) dc [ (perp(e_i1).e_o1) e_o1 + (perp(e_i2).e_o2) e_o2 ] + b_i
    cdef double half_L2_dc = 0.5 * L * L * dc
    cdef double p1 = -e11y * e21x + e11x * e21y   # perp(e11) . e21
    cdef double p2 = -e12y * e22x + e12x * e22y   # perp(e12) . e22
    cdef double d1x = half_L2_dc * (p1 * e21x + p2 * e22x) + b1x
    cdef double d1y = half_L2_dc * (p1 * e21y + p2 * e22y) + b1y
    cdef double q1 = -e21y * e11x + e21x * e11y   # perp(e21) . e11
    cdef double q2 = -e22y * e12x + e22x * e12y   # perp(e22) . e12
    cdef double d2x = half_L2_dc * (q1 * e11x + q2 * e12x) + b2x
    cdef double d2y = half_L2_dc * (q1 * e11y + q2 * e12y) + b2y

    cdef double L3_cperp_3 = L * L * L * c_perp / 3.0
    cdef double w = 2.0 * L3_cperp_3
    cdef double dot1 = e11x * e21x + e11y * e21y
    cdef double dot2 = e12x * e22x + e12y * e22y
    cdef double varpi = L3_cperp_3 * (dot1 + dot2)
    cdef double beta = L3_cperp_3 * dot2

    R[0][0] = A1xx;        R[0][1] = A1xy;        R[0][2] = b1x
    R[1][0] = A1xy;        R[1][1] = A1yy;        R[1][2] = b1y
    R[2][0] = b1x;         R[2][1] = b1y;         R[2][2] = w
    R[0][3] = -lam * A2xx; R[0][4] = -lam * A2xy; R[0][5] = -lam * b2x
    R[1][3] = -lam * A2xy; R[1][4] = -lam * A2yy; R[1][5] = -lam * b2y
    R[2][3] = -lam * d1x;  R[2][4] = -lam * d1y;  R[2][5] = -lam * varpi
    R[3][0] = -lam * A1xx; R[3][1] = -lam * A1xy; R[3][2] = -lam * b1x
    R[4][0] = -lam * A1xy; R[4][1] = -lam * A1yy; R[4][2] = -lam * b1y
    R[5][0] = -lam * d2x;  R[5][1] = -lam * d2y;  R[5][2] = -lam * varpi
    R[3][3] = A2xx;        R[3][4] = A2xy;        R[3][5] = b2x
    R[4][3] = A2xy;        R[4][4] = A2yy;        R[4][5] = b2y
    R[5][3] = b2x;         R[5][4] = b2y;         R[5][5] = w

    Phi[0][0] = alpha1x;        Phi[0][1] = -lam * alpha2x
    Phi[1][0] = alpha1y;        Phi[1][1] = -lam * alpha2y
    Phi[2][0] = 0.5 * w;        Phi[2][1] = -lam * beta
    Phi[3][0] = -lam * alpha1x; Phi[3][1] = alpha2x
    Phi[4][0] = -lam * alpha1y; Phi[4][1] = alpha2y
    Phi[5][0] = -lam * beta;    Phi[5][1] = 0.5 * w


cdef double _lu_factor(double[6][6] A, int[6] piv) noexcept nogil:
    """In-place LU with partial pivoting; returns det (0.0 if exactly singular)."""
    cdef int i, j, k, p
    cdef double det = 1.0
    cdef double amax, tmp
    for k in range(6):
        p = k
        amax = fabs(A[k][k])
        for i in range(k + 1, 6):
            if fabs(A[i][k]) > amax:
                amax = fabs(A[i][k])
                p = i
        if p != k:
            for j in range(6):
                tmp = A[k][j]
                A[k][j] = A[p][j]
                A[p][j] = tmp
            det = -det
        piv[k] = p
        if A[k][k] == 0.0:
            return 0.0
        det *= A[k][k]
        for i in range(k + 1, 6):
            A[i][k] /= A[k][k]
            for j in range(k + 1, 6):
                A[i][j] -= A[i][k] * A[k][j]
    return det


cdef void _lu_solve(double[6][6] A, int[6] piv, double[6] b) noexcept nogil:
    cdef int i, j
    cdef double tmp
    for i in range(6):
        if piv[i] != i:
            tmp = b[i]
            b[i] = b[piv[i]]
            b[piv[i]] = tmp
    for i in range(1, 6):
        for j in range(i):
            b[i] -= A[i][j] * b[j]
    for i in range(5, -1, -1):
        for j in range(i + 1, 6):
            b[i] -= A[i][j] * b[j]
        b[i] /= A[i][i]


cdef double _rates_c(double* q, double u1, double u2, double lam, double L,
                     double c_par, double c_perp, double* out,
                     double* floor_out) noexcept nogil:
    """Fill out[0:8] with the state rates; return det R (floor via floor_out).

    The singularity floor is reported, not enforced: callers decide whether
    a small determinant aborts. Only an exact LU breakdown poisons the
    output with NaN.
    """
    cdef double[6][6] R
    cdef double[6][2] Phi
    cdef double[6] rhs
    cdef int[6] piv
    cdef int i
    cdef double det, floor_acc
    _assemble_c(q[2], q[6], q[5], q[7], lam, L, c_par, c_perp, R, Phi)
    floor_acc = 1.0
    for i in range(6):
        floor_acc *= fabs(R[i][i])
    floor_out[0] = _FLOOR_COEFF * floor_acc
    for i in range(6):
        rhs[i] = -(Phi[i][0] * u1 + Phi[i][1] * u2)
    det = _lu_factor(R, piv)
    if det == 0.0:
        for i in range(8):
            out[i] = <double> NAN
        return det
    _lu_solve(R, piv, rhs)
    for i in range(6):
        out[i] = rhs[i]
    out[6] = u1
    out[7] = u2
    return det


def assemble_matrices(double theta1, double sigma1, double theta2, double sigma2,
                      double lam, double L, double c_par, double c_perp):
    """Resistance matrix R(lambda) and coupling matrix Phi(lambda) as arrays."""
    cdef double[6][6] R
    cdef double[6][2] Phi
    _assemble_c(theta1, sigma1, theta2, sigma2, lam, L, c_par, c_perp, R, Phi)
    R_out = np.empty((6, 6))
    Phi_out = np.empty((6, 2))
    cdef double[:, ::1] Rv = R_out
    cdef double[:, ::1] Pv = Phi_out
    cdef int i, j
    for i in range(6):
        for j in range(6):
            Rv[i, j] = R[i][j]
        Pv[i, 0] = Phi[i][0]
        Pv[i, 1] = Phi[i][1]
    return R_out, Phi_out


def det_floor(R):
    """Scale-relative singularity threshold, DET_FLOOR_COEFF * prod|diag|."""
    cdef cnp.ndarray[double, ndim=2] Ra = np.ascontiguousarray(R, dtype=np.float64)
    cdef double acc = 1.0
    cdef int i
    for i in range(6):
        acc *= fabs(Ra[i, i])
    return DET_FLOOR_COEFF * acc


def rates_and_det(state, double u1, double u2, double lam, double L,
                  double c_par, double c_perp):
    """State rates for controls (u1, u2) plus det R and its singularity floor."""
    cdef cnp.ndarray[double, ndim=1] q = np.ascontiguousarray(state, dtype=np.float64)
    rates = np.empty(8)
    cdef double[::1] out = rates
    cdef double floor = 0.0
    cdef double det = _rates_c(&q[0], u1, u2, lam, L, c_par, c_perp, &out[0], &floor)
    if fabs(det) < floor:
        rates[:] = np.nan
    return rates, det, floor


def integrate_stroke(state0, double lam, double L, double c_par, double c_perp,
                     int kind, double p1, double p2, double p3,
                     long n_steps, double dt):
    """RK4 over n_steps of size dt; see the reference backend for semantics."""
    cdef cnp.ndarray[double, ndim=1] q0 = np.ascontiguousarray(state0, dtype=np.float64)
    states_out = np.empty((n_steps + 1, 8))
    dets_out = np.empty(n_steps + 1)
    cdef double[:, ::1] states = states_out
    cdef double[::1] dets = dets_out

    cdef double[8] q, k1, k2, k3, k4, qs
    cdef double[6][6] R
    cdef double[6][2] Phi
    cdef int[6] piv
    cdef int i
    cdef long k, n_done = n_steps
    cdef int status = 0
    cdef long steps_per_leg = 0
    cdef long leg
    cdef double gamma1 = 0.0, gamma2 = 0.0
    cdef double eps = 0.0, omega = 0.0, phi = 0.0, amp = 0.0
    cdef double ua1, ua2, ub1, ub2, uc1, uc2
    cdef double t, tm, te, det, floor, tmp

    if kind == SQUARE:
        gamma1 = p1
        gamma2 = p2
        steps_per_leg = llround(p3 / dt)
    elif kind == SINUSOIDAL:
        eps = p1
        omega = p2
        phi = p3
        amp = eps * omega
    else:
        raise ValueError(f"unknown stroke kind code {kind!r}")

    for i in range(8):
        q[i] = q0[i]
        states[0, i] = q[i]

    with nogil:
        for k in range(n_steps):
            if kind == _SQUARE:
                leg = (k // steps_per_leg) % 4
                if leg == 0:
                    ua1 = 0.0
                    ua2 = -gamma2
                elif leg == 1:
                    ua1 = -gamma1
                    ua2 = 0.0
                elif leg == 2:
                    ua1 = 0.0
                    ua2 = gamma2
                else:
                    ua1 = gamma1
                    ua2 = 0.0
                ub1 = uc1 = ua1
                ub2 = uc2 = ua2
            else:
                t = k * dt
                ua1 = -amp * sin(omega * t)
                ua2 = -amp * sin(omega * t + phi)
                tm = k * dt + 0.5 * dt
                ub1 = -amp * sin(omega * tm)
                ub2 = -amp * sin(omega * tm + phi)
                te = (k + 1) * dt
                uc1 = -amp * sin(omega * te)
                uc2 = -amp * sin(omega * te + phi)

            det = _rates_c(q, ua1, ua2, lam, L, c_par, c_perp, k1, &floor)
            dets[k] = det
            if fabs(det) < floor:
                status = 1
                n_done = k
                break
            for i in range(8):
                qs[i] = q[i] + (0.5 * dt) * k1[i]
            _rates_c(qs, ub1, ub2, lam, L, c_par, c_perp, k2, &floor)
            for i in range(8):
                qs[i] = q[i] + (0.5 * dt) * k2[i]
            _rates_c(qs, ub1, ub2, lam, L, c_par, c_perp, k3, &floor)
            for i in range(8):
                qs[i] = q[i] + dt * k3[i]
            _rates_c(qs, uc1, uc2, lam, L, c_par, c_perp, k4, &floor)
            for i in range(8):
                tmp = ((k1[i] + 2.0 * k2[i]) + 2.0 * k3[i]) + k4[i]
                q[i] = q[i] + (dt / 6.0) * tmp
                states[k + 1, i] = q[i]

        if status == 0:
            _assemble_c(q[2], q[6], q[5], q[7], lam, L, c_par, c_perp, R, Phi)
            floor = 1.0
            for i in range(6):
                floor *= fabs(R[i][i])
            floor *= _FLOOR_COEFF
            det = _lu_factor(R, piv)
            dets[n_steps] = det
            if fabs(det) < floor:
                status = 1
                n_done = n_steps

    if status == 1 and n_done < n_steps:
        return states_out[: n_done + 1], dets_out[: n_done + 1], 1, n_done
    return states_out, dets_out, status, n_done
