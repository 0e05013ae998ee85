"""Two bosonic modes with ``H = omega (n1 + n2) + eps (a1 a2 + a1^dag a2^dag)``.

Gaussian states are described by covariance matrices in the quadrature order
``(x1, p1, x2, p2)`` with ``Gamma_mn = <{X_m, X_n}>``; the vacuum has
``Gamma = 1``.  Energies are normal ordered, so the vacuum has zero energy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import quantum as qm
from .optimize import SearchBox, maximize

EPS_POS = 1e-10

OMEGA = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
_Z = np.diag([1.0, -1.0])
J = np.block([[np.zeros((2, 2)), _Z], [_Z, np.zeros((2, 2))]])


class UnstableHamiltonian(ValueError):
    """|eps| >= omega: the quadratic Hamiltonian is not bounded below."""


@dataclass(frozen=True)
class BosonModel:
    omega: float
    eps: float
    temperature: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not abs(self.eps) < self.omega:
            raise UnstableHamiltonian(f"need |eps| < omega, got eps={self.eps}, omega={self.omega}")
        qm.ThermoContext(self.temperature)

    @property
    def ctx(self) -> qm.ThermoContext:
        return qm.ThermoContext(self.temperature)

    @property
    def omega_tilde(self) -> float:
        return math.sqrt(self.omega**2 - self.eps**2)

    def noninteracting(self) -> "BosonModel":
        return BosonModel(self.omega, 0.0, self.temperature)


@dataclass(frozen=True)
class GaussianState:
    """Zero-mean Gaussian state; ``nu``/``r`` record the form ``nu S(r) S(r)^T`` if known."""

    gamma: np.ndarray
    nu: float | None = None
    r: float | None = None

    @classmethod
    def from_params(cls, nu: float, r: float) -> "GaussianState":
        S = squeeze_symplectic(r)
        return cls(nu * S @ S.T, float(nu), float(r))


def bogoliubov_u(model: BosonModel) -> float:
    return 0.5 * math.atanh(model.eps / model.omega)


def initial_nu(model: BosonModel) -> float:
    """coth(omega_tilde / 2T); exactly 1 at T = 0."""
    if model.temperature == 0:
        return 1.0
    x = model.omega_tilde / (2 * model.temperature)
    return 1.0 / math.tanh(x) if x < 350 else 1.0


def squeeze_symplectic(r: float) -> np.ndarray:
    """Two-mode squeezer ``cosh r * 1 - sinh r * J``; ``S(r) S(r)^T = S(2r)``."""
    return math.cosh(r) * np.eye(4) - math.sinh(r) * J


def quadratic_form(model: BosonModel) -> np.ndarray:
    """Matrix ``M`` with ``H = X^T M X / 2 - omega``."""
    return model.omega * np.eye(4) + model.eps * J


def thermal_covariance(model: BosonModel) -> GaussianState:
    return GaussianState.from_params(initial_nu(model), bogoliubov_u(model))


def symplectic_eigenvalues(g) -> np.ndarray:
    """Symplectic spectrum (ascending, one value per mode) of a covariance matrix."""
    gamma = g.gamma if isinstance(g, GaussianState) else np.asarray(g, dtype=float)
    n = gamma.shape[0] // 2
    Om = np.kron(np.eye(n), OMEGA[:2, :2])
    if not np.allclose(gamma, gamma.T, atol=1e-12):
        raise qm.ValidationError("covariance matrix is not symmetric")
    ev = np.sort(np.abs(np.linalg.eigvals(1j * Om @ gamma)))
    nus = ev[::2]
    if nus[0] < 1 - EPS_POS:
        raise qm.ValidationError(f"covariance violates the uncertainty relation (nu={nus[0]})")
    return nus


def entropy_function(nu) -> np.ndarray:
    """Entropy of a single mode with symplectic eigenvalue ``nu``; f(1) = 0."""
    nu = np.maximum(np.asarray(nu, dtype=float), 1.0)
    a, b = (nu + 1) / 2, (nu - 1) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = a * np.log(a) - np.where(b > 0, b * np.log(np.where(b > 0, b, 1.0)), 0.0)
    return out


def gaussian_entropy(g) -> float:
    return float(np.sum(entropy_function(symplectic_eigenvalues(g))))


def gaussian_energy(g, model: BosonModel) -> float:
    gamma = g.gamma if isinstance(g, GaussianState) else np.asarray(g, dtype=float)
    return float(0.25 * np.trace(quadratic_form(model) @ gamma) - model.omega)


def gaussian_free_energy(g, model: BosonModel) -> float:
    E = gaussian_energy(g, model)
    return E if model.temperature == 0 else E - model.temperature * gaussian_entropy(g)


def gaussian_mutual_information(nu: float, r: float) -> float:
    """I of ``nu S(r) S(r)^T``: each marginal has symplectic eigenvalue nu cosh 2r."""
    return float(2 * entropy_function(nu * math.cosh(2 * r)) - 2 * entropy_function(nu))


def covariance_mutual_information(g) -> float:
    """Mutual information from the covariance blocks (dense path)."""
    gamma = g.gamma if isinstance(g, GaussianState) else np.asarray(g, dtype=float)
    return (gaussian_entropy(gamma[:2, :2]) + gaussian_entropy(gamma[2:, 2:])
            - gaussian_entropy(gamma))


def family_energy(nu, r, model: BosonModel):
    return nu * (model.omega * np.cosh(2 * r) - model.eps * np.sinh(2 * r)) - model.omega


def family_free_energy(nu, r, model: BosonModel):
    E = family_energy(nu, r, model)
    return E if model.temperature == 0 else E - 2 * model.temperature * entropy_function(nu)


def thermal_free_energy(model: BosonModel) -> float:
    """F(tau) = -T ln Z of two oscillators of frequency omega_tilde, shifted by -2 omega_tilde sinh^2 u."""
    wt, u = model.omega_tilde, bogoliubov_u(model)
    shift = -2 * wt * math.sinh(u) ** 2
    if model.temperature == 0:
        return shift
    return shift + 2 * model.temperature * math.log1p(-math.exp(-wt / model.temperature))


@dataclass(frozen=True)
class BosonResult:
    nu: float
    r: float
    I_final: float
    delta_I: float
    F_spent: float
    I_thermal: float
    W: float


def _squeeze_for_budget(nu, model, budget_F):
    """Largest extra squeezing s >= 0 with F(nu, |u| + s) <= budget_F; NaN if none."""
    base = model.temperature * 2 * entropy_function(nu) if model.temperature > 0 else 0.0
    ratio = (budget_F + model.omega + base) / (nu * model.omega_tilde)
    return np.where(ratio >= 1, 0.5 * np.arccosh(np.maximum(ratio, 1.0)), np.nan)


def maximize_correlations_boson(model: BosonModel, W: float, *, grid_points: int = 33,
                                min_step: float = 1e-12) -> BosonResult:
    """Best mutual information reachable by cooling plus aligned two-mode squeezing.

    The family is ``nu S(r) S(r)^T`` with ``nu`` in ``[1, nu(T)]`` and
    ``|r| = |u| + s``.  For each ``nu`` the squeezing ``s`` that spends the
    whole budget is explicit, leaving a one-dimensional search over ``nu``
    restricted to the interval where some ``s >= 0`` is affordable.
    """
    if not W >= 0:
        raise ValueError("work budget W must be nonnegative")
    u = bogoliubov_u(model)
    nu_T = initial_nu(model)
    f_tau = family_free_energy(nu_T, u, model)
    I_tau = gaussian_mutual_information(nu_T, u)
    sign = 1.0 if u >= 0 else -1.0
    budget_F = f_tau + W

    def result(nu):
        s = float(_squeeze_for_budget(nu, model, budget_F))
        r = sign * (abs(u) + s)
        I = gaussian_mutual_information(nu, r)
        return BosonResult(float(nu), r, I, I - I_tau,
                           float(family_free_energy(nu, r, model) - f_tau), I_tau, W)

    if W == 0:
        return BosonResult(nu_T, u, I_tau, 0.0, 0.0, I_tau, W)
    if nu_T - 1 < 1e-14:
        return result(1.0)

    # cost of (nu, s = 0) decreases on [1, nu_T]; find where it meets the budget
    def excess(nu):
        return float(family_free_energy(nu, u, model)) - budget_F

    nu_lo = 1.0 if excess(1.0) <= 0 else brentq(excess, 1.0, nu_T, xtol=1e-15, rtol=1e-15)

    def objective(X):
        nu = X[:, 0]
        s = _squeeze_for_budget(nu, model, budget_F)
        return 2 * entropy_function(nu * np.cosh(2 * (abs(u) + s))) - 2 * entropy_function(nu)

    box = SearchBox(np.array([nu_lo]), np.array([nu_T]), grid_points)
    res = maximize(objective, box=box, starts=[[nu_T], [nu_lo]], n_starts=3,
                   min_step=min_step * max(1.0, nu_T), vectorized=True)
    return result(res.point[0])
