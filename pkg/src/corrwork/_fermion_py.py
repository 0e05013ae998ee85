"""Pure numpy implementation of the fermionic search kernel.

Mirrors ``_fermion_kernel.pyx`` and is used when the compiled extension is
missing or ``CORRWORK_PURE_PYTHON`` is set.

State coordinates ``q = (p, p x_e, p z_e, (1-p) x_o, (1-p) z_o)`` are linear
in the density matrix, so segments toward the thermal state stay physical.
"""
import numpy as np

N_BISECT = 60


def box_to_linear(X):
    """Map search-box points ``(p, x_e, z_e, x_o, z_o)`` to linear coordinates.

    Bloch vectors outside the unit disk are pulled radially onto it.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    p = np.clip(X[:, 0], 0.0, 1.0)
    re = np.maximum(1.0, np.hypot(X[:, 1], X[:, 2]))
    ro = np.maximum(1.0, np.hypot(X[:, 3], X[:, 4]))
    return np.stack([p, p * X[:, 1] / re, p * X[:, 2] / re,
                     (1 - p) * X[:, 3] / ro, (1 - p) * X[:, 4] / ro], axis=1)


def _xlogx(x):
    out = np.zeros_like(x)
    m = x > 0
    out[m] = x[m] * np.log(x[m])
    return out


def _binary(m):
    return -_xlogx((1 + m) / 2) - _xlogx((1 - m) / 2)


def entropy_linear(Q):
    ee = np.hypot(Q[:, 1], Q[:, 2])
    eo = np.hypot(Q[:, 3], Q[:, 4])
    p = Q[:, 0]
    return -(_xlogx((p + ee) / 2) + _xlogx((p - ee) / 2)
             + _xlogx((1 - p + eo) / 2) + _xlogx((1 - p - eo) / 2))


def free_energy_linear(Q, omega, eps_even, eps_odd, T):
    E = omega * (1 - Q[:, 2]) - eps_even * Q[:, 1] + eps_odd * Q[:, 3]
    if T == 0:
        return E
    return E - T * entropy_linear(Q)


def mutual_information_linear(Q):
    m1 = Q[:, 2] + Q[:, 4]
    m2 = Q[:, 2] - Q[:, 4]
    return _binary(m1) + _binary(m2) - entropy_linear(Q)


def project_evaluate(X, omega, eps_even, eps_odd, T, tau_q, f_tau, budget):
    """Mutual information after pulling each candidate inside the work budget.

    Candidates whose free-energy cost exceeds ``budget`` are moved along the
    segment toward the thermal state ``tau_q`` until the cost equals the
    budget (bisection).  Returns ``(I, dF, Q)``.
    """
    Q = box_to_linear(X)
    tau_q = np.asarray(tau_q, dtype=float)
    dF = free_energy_linear(Q, omega, eps_even, eps_odd, T) - f_tau
    over = dF > budget
    if np.any(over):
        D = Q[over] - tau_q
        lo = np.zeros(len(D))
        hi = np.ones(len(D))
        for _ in range(N_BISECT):
            mid = 0.5 * (lo + hi)
            f = free_energy_linear(tau_q + mid[:, None] * D, omega, eps_even, eps_odd, T) - f_tau
            ok = f <= budget
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
        Q[over] = tau_q + lo[:, None] * D
        dF[over] = free_energy_linear(Q[over], omega, eps_even, eps_odd, T) - f_tau
    return mutual_information_linear(Q), dF, Q
