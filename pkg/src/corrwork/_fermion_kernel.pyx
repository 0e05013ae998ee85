# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fermionic search kernel; see ``_fermion_py`` for the reference."""
import numpy as np
from libc.math cimport log, sqrt, hypot

DEF N_BISECT = 60


cdef inline double xlogx(double x) nogil:
    return x * log(x) if x > 0.0 else 0.0


cdef inline double binary(double m) nogil:
    return -xlogx(0.5 * (1.0 + m)) - xlogx(0.5 * (1.0 - m))


cdef inline double entropy(double q0, double q1, double q2, double q3, double q4) nogil:
    cdef double ee = hypot(q1, q2)
    cdef double eo = hypot(q3, q4)
    return -(xlogx(0.5 * (q0 + ee)) + xlogx(0.5 * (q0 - ee))
             + xlogx(0.5 * (1.0 - q0 + eo)) + xlogx(0.5 * (1.0 - q0 - eo)))


cdef inline double free_energy(double q0, double q1, double q2, double q3, double q4,
                               double omega, double ee, double eo, double T) nogil:
    cdef double E = omega * (1.0 - q2) - ee * q1 + eo * q3
    if T == 0.0:
        return E
    return E - T * entropy(q0, q1, q2, q3, q4)


def project_evaluate(X, double omega, double eps_even, double eps_odd, double T,
                     tau_q, double f_tau, double budget):
    cdef double[:, ::1] Xv = np.ascontiguousarray(np.atleast_2d(X), dtype=np.float64)
    cdef double[::1] tq = np.ascontiguousarray(tau_q, dtype=np.float64)
    cdef Py_ssize_t n = Xv.shape[0], i
    cdef int it
    I_out = np.empty(n)
    dF_out = np.empty(n)
    Q_out = np.empty((n, 5))
    cdef double[::1] Iv = I_out
    cdef double[::1] dFv = dF_out
    cdef double[:, ::1] Qv = Q_out
    cdef double p, re, ro, q[5], d[5], lo, hi, mid, f, df
    with nogil:
        for i in range(n):
            p = Xv[i, 0]
            if p < 0.0:
                p = 0.0
            elif p > 1.0:
                p = 1.0
            re = hypot(Xv[i, 1], Xv[i, 2])
            if re < 1.0:
                re = 1.0
            ro = hypot(Xv[i, 3], Xv[i, 4])
            if ro < 1.0:
                ro = 1.0
            q[0] = p
            q[1] = p * Xv[i, 1] / re
            q[2] = p * Xv[i, 2] / re
            q[3] = (1.0 - p) * Xv[i, 3] / ro
            q[4] = (1.0 - p) * Xv[i, 4] / ro
            df = free_energy(q[0], q[1], q[2], q[3], q[4], omega, eps_even, eps_odd, T) - f_tau
            if df > budget:
                for it in range(5):
                    d[it] = q[it] - tq[it]
                lo = 0.0
                hi = 1.0
                for it in range(N_BISECT):
                    mid = 0.5 * (lo + hi)
                    f = free_energy(tq[0] + mid * d[0], tq[1] + mid * d[1], tq[2] + mid * d[2],
                                    tq[3] + mid * d[3], tq[4] + mid * d[4],
                                    omega, eps_even, eps_odd, T) - f_tau
                    if f <= budget:
                        lo = mid
                    else:
                        hi = mid
                for it in range(5):
                    q[it] = tq[it] + lo * d[it]
                df = free_energy(q[0], q[1], q[2], q[3], q[4], omega, eps_even, eps_odd, T) - f_tau
            for it in range(5):
                Qv[i, it] = q[it]
            dFv[i] = df
            Iv[i] = (binary(q[2] + q[4]) + binary(q[2] - q[4])
                     - entropy(q[0], q[1], q[2], q[3], q[4]))
    return I_out, dF_out, Q_out
