"""Two interacting fermionic modes.

``H = omega (n1 + n2) + eps_even (b1 b2 + h.c.) + eps_odd (b1^dag b2 + h.c.)``
in the Fock basis ``(|0>, |1_1 1_2>, |1_2>, |1_1>)``.  The parity
superselection rule makes every physical state block diagonal,
``p rho_even (+) (1-p) rho_odd``, and each block is a qubit with its own
Bloch vector.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from . import kernels
from . import quantum as qm
from .optimize import SearchBox, maximize

LN2 = math.log(2.0)
TOL_I = 1e-4  # "maximal correlation reached" detection
FEASIBILITY_TOL = 1e-6

# Fock index of each product-basis state |n1 n2>: 00, 01, 10, 11
PRODUCT_ORDER = np.array([0, 2, 3, 1])


@dataclass(frozen=True)
class FermionModel:
    omega: float
    eps_even: float
    eps_odd: float
    temperature: float

    def __post_init__(self):
        if not self.omega >= 0:
            raise ValueError("omega must be nonnegative")
        qm.ThermoContext(self.temperature)

    @property
    def ctx(self) -> qm.ThermoContext:
        return qm.ThermoContext(self.temperature)

    @property
    def beta(self) -> float:
        return self.ctx.beta

    @property
    def even_gap(self) -> float:
        """sqrt(omega^2 + eps_even^2), half the splitting of the even block."""
        return math.hypot(self.omega, self.eps_even)

    def noninteracting(self) -> "FermionModel":
        return FermionModel(self.omega, 0.0, 0.0, self.temperature)


@dataclass(frozen=True)
class FermionStateParams:
    """``p rho_even + (1-p) rho_odd`` with a Bloch vector per parity sector.

    Even sector: ``z`` weights ``|0>`` against ``|1_1 1_2>``; odd sector:
    ``z`` weights ``|1_2>`` against ``|1_1>``.
    """

    p: float
    x_even: float = 0.0
    y_even: float = 0.0
    z_even: float = 0.0
    x_odd: float = 0.0
    y_odd: float = 0.0
    z_odd: float = 0.0

    @property
    def r_even(self) -> float:
        return math.sqrt(self.x_even**2 + self.y_even**2 + self.z_even**2)

    @property
    def r_odd(self) -> float:
        return math.sqrt(self.x_odd**2 + self.y_odd**2 + self.z_odd**2)

    def is_valid(self, tol: float = 1e-12) -> bool:
        return (-tol <= self.p <= 1 + tol and self.r_even <= 1 + tol
                and self.r_odd <= 1 + tol)

    def validate(self, tol: float = 1e-12) -> "FermionStateParams":
        if not self.is_valid(tol):
            raise qm.ValidationError(
                f"invalid fermionic state: p={self.p}, r_even={self.r_even}, r_odd={self.r_odd}")
        return self

    def linear(self) -> np.ndarray:
        """Coordinates ``(p, p x_e, p z_e, (1-p) x_o, (1-p) z_o)`` (y dropped)."""
        q = 1.0 - self.p
        return np.array([self.p, self.p * self.x_even, self.p * self.z_even,
                         q * self.x_odd, q * self.z_odd])

    @classmethod
    def from_linear(cls, q) -> "FermionStateParams":
        p = float(min(max(q[0], 0.0), 1.0))
        xe, ze = (q[1] / p, q[2] / p) if p > 0 else (0.0, 0.0)
        xo, zo = (q[3] / (1 - p), q[4] / (1 - p)) if p < 1 else (0.0, 0.0)
        return cls(p, float(xe), 0.0, float(ze), float(xo), 0.0, float(zo))

    def to_matrix(self) -> np.ndarray:
        """Dense 4x4 density matrix in the Fock basis."""
        rho = np.zeros((4, 4), dtype=complex)
        rho[:2, :2] = self.p * _bloch_block(self.x_even, self.y_even, self.z_even)
        rho[2:, 2:] = (1 - self.p) * _bloch_block(self.x_odd, self.y_odd, self.z_odd)
        return rho

    @classmethod
    def from_matrix(cls, rho, atol: float = 1e-9) -> "FermionStateParams":
        rho = np.asarray(rho, dtype=complex)
        if np.max(np.abs(rho[:2, 2:])) > atol:
            raise qm.ValidationError("state has even-odd coherences (superselection violated)")
        p = float(np.real(rho[0, 0] + rho[1, 1]))
        xe, ye, ze = _block_bloch(rho[:2, :2], p)
        xo, yo, zo = _block_bloch(rho[2:, 2:], 1 - p)
        return cls(p, xe, ye, ze, xo, yo, zo)


def _bloch_block(x, y, z):
    return 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]])


def _block_bloch(block, weight):
    if weight <= 0:
        return 0.0, 0.0, 0.0
    b = block / weight
    return (float(2 * b[0, 1].real), float(-2 * b[0, 1].imag), float((b[0, 0] - b[1, 1]).real))


@dataclass(frozen=True)
class FermionSpectrum:
    lambda_1: float
    lambda_2: float
    lambda_3: float
    lambda_4: float
    eigvecs: np.ndarray  # columns |lambda_1> .. |lambda_4> in the Fock basis

    @property
    def values(self) -> np.ndarray:
        return np.array([self.lambda_1, self.lambda_2, self.lambda_3, self.lambda_4])


def hamiltonian(model: FermionModel) -> np.ndarray:
    w, ee, eo = model.omega, model.eps_even, model.eps_odd
    # b2^dag b1^dag |0> = -|1_1 1_2>, hence the minus sign in the even block
    return np.array([[0, -ee, 0, 0],
                     [-ee, 2 * w, 0, 0],
                     [0, 0, w, eo],
                     [0, 0, eo, w]], dtype=complex)


def local_hamiltonian(omega: float) -> np.ndarray:
    """Single-mode Hamiltonian on (|0>, |1>)."""
    return np.diag([0.0, omega]).astype(complex)


def spectrum(model: FermionModel) -> FermionSpectrum:
    w, ee = model.omega, model.eps_even
    R = model.even_gap
    l1 = w + R
    l4 = -ee * (ee / l1) if l1 > 0 else 0.0  # w - R without cancellation (w >= 0)
    V = np.zeros((4, 4))
    for col, lam in ((0, l1), (3, l4)):
        n = math.hypot(ee, lam)
        # ee = lam = 0 only when omega = eps_even = 0; pick the Fock states
        V[:2, col] = (ee / n, -lam / n) if n > 0 else ((0.0, 1.0) if col == 0 else (1.0, 0.0))
    s = 1 / math.sqrt(2)
    V[2:, 1] = (s, s)
    V[2:, 2] = (s, -s)
    return FermionSpectrum(l1, w + model.eps_odd, w - model.eps_odd, l4, V)


def _thermal_params_beta(omega, eps_even, eps_odd, beta) -> FermionStateParams:
    R = math.hypot(omega, eps_even)
    a = abs(eps_odd)
    if math.isinf(beta):
        te = 1.0 if R > 0 else 0.0
        to = 1.0 if a > 0 else 0.0
        p = 1.0 if R > a else (0.0 if R < a else 0.5)
    else:
        te, to = math.tanh(beta * R), math.tanh(beta * a)
        # cosh(bR) / (cosh(bR) + cosh(b a)) = expit(-ln(cosh(b a) / cosh(bR)))
        log_ratio = (beta * (a - R) + math.log1p(math.exp(-2 * beta * a))
                     - math.log1p(math.exp(-2 * beta * R)))
        p = float(expit(-log_ratio))
    ze, xe = (te * omega / R, te * eps_even / R) if R > 0 else (0.0, 0.0)
    xo = -math.copysign(to, eps_odd) if a > 0 else 0.0
    return FermionStateParams(p, xe, 0.0, ze, xo, 0.0, 0.0)


def thermal_params(model: FermionModel, beta: float | None = None) -> FermionStateParams:
    """Closed-form parameters of the Gibbs state (``beta`` overrides the model's)."""
    b = model.beta if beta is None else float(beta)
    if b < 0:
        raise ValueError("beta must be nonnegative")
    return _thermal_params_beta(model.omega, model.eps_even, model.eps_odd, b)


def log_partition_function(model: FermionModel) -> float:
    """ln Z for T > 0."""
    if model.temperature == 0:
        raise ValueError("ln Z diverges at T = 0; use thermal_free_energy")
    lam = spectrum(model).values
    lmin = lam.min()
    return float(-model.beta * lmin + np.log(np.sum(np.exp(-model.beta * (lam - lmin)))))


def thermal_free_energy(model: FermionModel) -> float:
    """F(tau) = -T ln Z, evaluated relative to the ground energy."""
    lam = spectrum(model).values
    lmin = float(lam.min())
    if model.temperature == 0:
        return lmin
    return lmin - model.temperature * float(np.log(np.sum(np.exp(-model.beta * (lam - lmin)))))


def tau0(model: FermionModel) -> float:
    """Marginal polarization of the thermal state: populations (1 +- tau0)/2."""
    s = thermal_params(model)
    return s.p * s.z_even


def energy(s: FermionStateParams, model: FermionModel) -> float:
    return (model.omega * (1 - s.p * s.z_even) - s.p * model.eps_even * s.x_even
            + (1 - s.p) * model.eps_odd * s.x_odd)


def _xlogx(x: float) -> float:
    return x * math.log(x) if x > 0 else 0.0


def _binary(m: float) -> float:
    m = min(max(m, -1.0), 1.0)
    return -_xlogx((1 + m) / 2) - _xlogx((1 - m) / 2)


def eigenvalues_params(s: FermionStateParams) -> np.ndarray:
    re, ro = min(s.r_even, 1.0), min(s.r_odd, 1.0)
    return np.array([s.p * (1 + re) / 2, s.p * (1 - re) / 2,
                     (1 - s.p) * (1 + ro) / 2, (1 - s.p) * (1 - ro) / 2])


def entropy_params(s: FermionStateParams) -> float:
    return max(0.0, -sum(_xlogx(float(v)) for v in eigenvalues_params(s)))


def free_energy(s: FermionStateParams, model: FermionModel) -> float:
    E = energy(s, model)
    return E if model.temperature == 0 else E - model.temperature * entropy_params(s)


def marginals_params(s: FermionStateParams) -> tuple:
    """Diagonal single-mode states ``diag(P(empty), P(occupied))`` of modes 1 and 2."""
    m1 = s.p * s.z_even + (1 - s.p) * s.z_odd
    m2 = s.p * s.z_even - (1 - s.p) * s.z_odd
    return (np.array([(1 + m1) / 2, (1 - m1) / 2]), np.array([(1 + m2) / 2, (1 - m2) / 2]))


def mutual_information_params(s: FermionStateParams) -> float:
    m1 = s.p * s.z_even + (1 - s.p) * s.z_odd
    m2 = s.p * s.z_even - (1 - s.p) * s.z_odd
    return max(0.0, _binary(m1) + _binary(m2) - entropy_params(s))


def to_product_order(rho) -> np.ndarray:
    """Reorder a Fock-basis matrix to the product basis |n1 n2> (00, 01, 10, 11).

    For parity-block-diagonal states the reduced states obtained from this
    ordering coincide with the fermionic marginals.
    """
    rho = np.asarray(rho)
    return rho[np.ix_(PRODUCT_ORDER, PRODUCT_ORDER)]


def dense_marginals(rho) -> tuple:
    r = to_product_order(rho)
    return qm.partial_trace(r, (2, 2), 1), qm.partial_trace(r, (2, 2), 2)


def dense_mutual_information(rho) -> float:
    return qm.mutual_information(to_product_order(rho), (2, 2))


def thermal_mutual_information(model: FermionModel) -> float:
    return mutual_information_params(thermal_params(model))


@dataclass(frozen=True)
class WMin:
    value: float
    positive: bool


def w_min(model: FermionModel) -> WMin:
    """Free-energy cost of the cheapest maximally correlated pure state."""
    v = model.omega - max(abs(model.eps_even), abs(model.eps_odd)) - thermal_free_energy(model)
    return WMin(float(v), v > 0)


def maximally_correlated_state(model: FermionModel) -> FermionStateParams:
    """Lowest-energy pure state with maximally mixed marginals."""
    if abs(model.eps_even) > abs(model.eps_odd):
        return FermionStateParams(1.0, x_even=math.copysign(1.0, model.eps_even))
    return FermionStateParams(0.0, x_odd=-1.0 if model.eps_odd >= 0 else 1.0)


class GroundStateLimit(enum.Enum):
    RHO3 = "rho3"
    RHO4 = "rho4"
    EQUAL_MIXTURE = "equal_mixture"


def ground_state_limit(model: FermionModel) -> GroundStateLimit:
    """Zero-temperature limit: odd-sector ground state (rho3), even (rho4), or both."""
    d = abs(model.eps_odd) - model.even_gap
    if d > 0:
        return GroundStateLimit.RHO3
    if d < 0:
        return GroundStateLimit.RHO4
    return GroundStateLimit.EQUAL_MIXTURE


@dataclass(frozen=True)
class CorrelationResult:
    state: FermionStateParams
    I_final: float
    delta_I: float
    F_spent: float
    I_thermal: float
    W: float
    evaluations: int = 0
    analytic: bool = False


SEARCH_BOX = SearchBox(np.array([0.0, -1, -1, -1, -1]), np.ones(5), 5)


def _params_to_box(s: FermionStateParams) -> np.ndarray:
    return np.array([s.p, s.x_even, s.z_even, s.x_odd, s.z_odd])


def maximize_correlations(model: FermionModel, W: float, *, seeds=(), n_starts: int = 5,
                          min_step: float = 1e-6, box: SearchBox = SEARCH_BOX) -> CorrelationResult:
    """Maximize the final mutual information subject to F(rho) - F(tau) <= W.

    Candidates are parametrized by ``(p, x_e, z_e, x_o, z_o)`` with ``y = 0``;
    any candidate that costs more than ``W`` is pulled toward the thermal state
    until it fits, so every evaluated point is feasible.  ``seeds`` are extra
    start states, e.g. the optimum at a smaller budget.
    """
    if not W >= 0:
        raise ValueError("work budget W must be nonnegative")
    tau = thermal_params(model)
    I_tau = mutual_information_params(tau)
    f_tau = thermal_free_energy(model)
    if W == 0:
        return CorrelationResult(tau, I_tau, 0.0, 0.0, I_tau, W)
    wm = w_min(model)
    if W >= wm.value:
        s = maximally_correlated_state(model)
        return CorrelationResult(s, 2 * LN2, 2 * LN2 - I_tau, free_energy(s, model) - f_tau,
                                 I_tau, W, analytic=True)

    args = (model.omega, model.eps_even, model.eps_odd, model.temperature, tau.linear(), f_tau, W)

    def objective(X):
        return kernels.project_evaluate(X, *args)[0]

    starts = [_params_to_box(tau),
              _params_to_box(FermionStateParams(1.0, x_even=1.0 if model.eps_even >= 0 else -1.0)),
              _params_to_box(FermionStateParams(0.0, x_odd=-1.0 if model.eps_odd >= 0 else 1.0))]
    starts += [_params_to_box(s) for s in seeds]
    res = maximize(objective, box=box, starts=np.array(starts), n_starts=n_starts,
                   min_step=min_step, vectorized=True)
    _, dF, Q = kernels.project_evaluate(res.point[None, :], *args)
    s = FermionStateParams.from_linear(Q[0])
    I = mutual_information_params(s)
    return CorrelationResult(s, I, I - I_tau, float(dF[0]), I_tau, W, res.evaluations)


def correlation_curve(model: FermionModel, W_grid, **kw) -> list:
    """Optimal results over an increasing W grid, each warm-started from the last.

    Warm starting makes ``I_final`` nondecreasing in ``W``.
    """
    out = []
    prev = []
    for W in W_grid:
        r = maximize_correlations(model, float(W), seeds=prev, **kw)
        out.append(r)
        prev = [r.state]
    return out
