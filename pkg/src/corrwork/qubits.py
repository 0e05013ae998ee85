"""Two qubits coupled by ``omega (sz(x)1 + 1(x)sz) + eps sz(x)sz``.

The thermal state is diagonal in the product basis, so every state reached by
the two-step protocol is described by three Bloch coefficients
``(a_z, b_z, c_zz)``.  Step I shifts ``c_zz`` against the coupling; step II
moves the local Bloch vectors toward the local Gibbs states.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import quantum as qm

SZ = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)
# sz(x)1, 1(x)sz and sz(x)sz on the diagonal, basis |uu>, |ud>, |du>, |dd>
_SZ1 = np.array([1.0, 1.0, -1.0, -1.0])
_SZ2 = np.array([1.0, -1.0, 1.0, -1.0])
_SZZ = _SZ1 * _SZ2


class PositivityError(ValueError):
    """Requested move leaves the set of density matrices."""


class UnsupportedRegime(ValueError):
    """Protocol step is not defined for this sign of the coupling."""


def sgn(x: float) -> int:
    return int(x > 0) - int(x < 0)


@dataclass(frozen=True)
class QubitModel:
    omega: float
    eps: float
    temperature: float

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError("omega must be nonnegative")
        qm.ThermoContext(self.temperature)

    @property
    def ctx(self) -> qm.ThermoContext:
        return qm.ThermoContext(self.temperature)

    @property
    def beta(self) -> float:
        return self.ctx.beta


@dataclass(frozen=True)
class QubitDiagState:
    a_z: float
    b_z: float
    c_zz: float

    def populations(self) -> np.ndarray:
        """Diagonal of the density matrix in the basis |uu>, |ud>, |du>, |dd>."""
        return (1 + self.a_z * _SZ1 + self.b_z * _SZ2 + self.c_zz * _SZZ) / 4

    def matrix(self) -> np.ndarray:
        return np.diag(self.populations()).astype(complex)

    def min_eigenvalue(self) -> float:
        return float(self.populations().min())

    def is_positive(self) -> bool:
        return self.min_eigenvalue() >= -qm.EPS_POS


def hamiltonian(model: QubitModel) -> np.ndarray:
    w, e = model.omega, model.eps
    return np.diag(w * (_SZ1 + _SZ2) + e * _SZZ).astype(complex)


def local_hamiltonian(model: QubitModel) -> np.ndarray:
    return model.omega * SZ


def thermal_coefficients(model: QubitModel, beta: float | None = None) -> QubitDiagState:
    """Bloch coefficients of the thermal state (``beta`` overrides the model's).

    Evaluated from the Boltzmann weights with the ground energy factored out,
    which equals ``a_z = -2 e^{-beta eps} sinh(2 beta omega) / Z`` and
    ``c_zz = 1 - 4 e^{beta eps} / Z`` but stays finite for large beta.
    """
    b = model.beta if beta is None else float(beta)
    if not b >= 0:
        raise ValueError("beta must be nonnegative")
    E = np.real(np.diag(hamiltonian(model)))
    if math.isinf(b):
        w = (E - E.min() <= 1e-12 * max(1.0, abs(E.min()))).astype(float)
    else:
        w = np.exp(-(E - E.min()) * b)
    p = w / w.sum()
    return QubitDiagState(float(p @ _SZ1), float(p @ _SZ2), float(p @ _SZZ))


def gibbs_bloch(model: QubitModel) -> float:
    """``a_z`` of the local Gibbs state of ``omega sz``: ``-tanh(beta omega)``."""
    if model.temperature == 0:
        return -1.0 if model.omega > 0 else 0.0
    return -math.tanh(model.omega / model.temperature)


def czz_window(state: QubitDiagState) -> tuple:
    """Allowed ``c_zz`` range at fixed local vectors: ``[|a+b|-1, 1-|a-b|]``."""
    return abs(state.a_z + state.b_z) - 1, 1 - abs(state.a_z - state.b_z)


def max_alpha_one(model: QubitModel, state: QubitDiagState | None = None) -> float:
    """Largest step-I shift keeping the state positive."""
    s = thermal_coefficients(model) if state is None else state
    lo, hi = czz_window(s)
    if model.eps > 0:
        return max(0.0, s.c_zz - lo)
    if model.eps < 0:
        return max(0.0, hi - s.c_zz)
    return 0.0


def step_one(state: QubitDiagState, model: QubitModel, alpha_I: float) -> QubitDiagState:
    """Shift ``c_zz`` by ``-sgn(eps) alpha_I`` with local vectors fixed."""
    if alpha_I < 0:
        raise ValueError("alpha_I must be nonnegative")
    bound = max_alpha_one(model, state)
    if sgn(model.eps) != 0 and alpha_I > bound + 1e-12:
        raise PositivityError(f"alpha_I = {alpha_I} exceeds the positivity bound {bound}")
    return replace(state, c_zz=state.c_zz - sgn(model.eps) * alpha_I)


def _binary_entropy(a: float) -> float:
    return qm.entropy_from_probs([(1 + a) / 2, (1 - a) / 2])


def diag_mutual_information(state: QubitDiagState) -> float:
    s = qm.entropy_from_probs(np.clip(state.populations(), 0, None))
    return _binary_entropy(state.a_z) + _binary_entropy(state.b_z) - s


@dataclass(frozen=True)
class StepOneWork:
    W_I: float
    T_delta_I: float
    advantage: float
    W_direct: float


def step_one_work(before: QubitDiagState, after: QubitDiagState, model: QubitModel) -> StepOneWork:
    """Work of a step-I move, both from ``T dI - |eps| alpha`` and from dense free energies."""
    if not (math.isclose(before.a_z, after.a_z, abs_tol=1e-14)
            and math.isclose(before.b_z, after.b_z, abs_tol=1e-14)):
        raise ValueError("a step-I move changes only c_zz")
    alpha = sgn(model.eps) * (before.c_zz - after.c_zz)
    tdi = model.temperature * (diag_mutual_information(after) - diag_mutual_information(before))
    W = tdi - abs(model.eps) * alpha
    H = hamiltonian(model)
    direct = qm.free_energy(after.matrix(), H, model.ctx) - qm.free_energy(before.matrix(), H, model.ctx)
    return StepOneWork(W, tdi, tdi - W, direct)


def step_two_candidate(state: QubitDiagState, model: QubitModel, alpha_II: float,
                       reference: QubitDiagState | None = None) -> QubitDiagState:
    """Step II without any regime or positivity check.

    The local vectors become ``(1 - alpha) a_tau + alpha a_gamma`` where
    ``a_tau`` comes from ``reference`` (the thermal coefficients by default).
    """
    ref = thermal_coefficients(model) if reference is None else reference
    g = gibbs_bloch(model)
    return QubitDiagState((1 - alpha_II) * ref.a_z + alpha_II * g,
                          (1 - alpha_II) * ref.b_z + alpha_II * g, state.c_zz)


def step_two_violation(model: QubitModel, alpha_II: float) -> float:
    """Smallest eigenvalue of the step-II candidate after saturated step I, for ``eps > 0``.

    Closed form ``-alpha/2 * tanh(b w) * expm1(2 b eps) / (cosh(2 b w) + e^{2 b eps})``,
    written without cancellation so the sign is resolved even when the value
    is far below machine precision.
    """
    if model.eps <= 0:
        raise UnsupportedRegime("the step-II obstruction concerns eps > 0")
    b = model.beta
    if math.isinf(b):
        return -alpha_II / 2 if model.eps > model.omega else 0.0
    x, y = b * model.omega, 2 * b * model.eps
    m = max(2 * x, y)
    den = 0.5 * (math.exp(2 * x - m) + math.exp(-2 * x - m)) + math.exp(y - m)
    num = math.tanh(x) * math.exp(y - m) * -math.expm1(-y)
    return -0.5 * alpha_II * num / den


def step_two(state: QubitDiagState, model: QubitModel, alpha_II: float,
             reference: QubitDiagState | None = None) -> QubitDiagState:
    """Move marginals toward the local Gibbs states; only defined for ``eps <= 0``."""
    if not 0 <= alpha_II <= 1:
        raise ValueError("alpha_II must lie in [0, 1]")
    if model.eps > 0:
        raise UnsupportedRegime("step II violates positivity for eps > 0")
    if model.eps == 0:
        return state
    out = step_two_candidate(state, model, alpha_II, reference)
    if not out.is_positive():
        raise PositivityError(f"step II result has eigenvalue {out.min_eigenvalue():.3g}")
    return out


def saturated_step_one(model: QubitModel) -> QubitDiagState:
    tau = thermal_coefficients(model)
    return step_one(tau, model, max_alpha_one(model, tau))


def local_free_energy_change(state: QubitDiagState, model: QubitModel,
                             reference: QubitDiagState | None = None) -> float:
    """``F~_S1(state) - F~_S1(reference)`` for ``H_S1 = omega sz``.

    By symmetry of the model the value for S2 is the same whenever
    ``a_z == b_z``.
    """
    ref = thermal_coefficients(model) if reference is None else reference
    T = model.temperature
    return (model.omega * (state.a_z - ref.a_z)
            - T * (_binary_entropy(state.a_z) - _binary_entropy(ref.a_z)))


def default_temperature_grid(omega: float = 1.0, n: int = 150) -> np.ndarray:
    return omega * np.linspace(0.02, 3.0, n)


@dataclass(frozen=True)
class AdvantageRow:
    T: float
    eps: float
    alpha_II: float
    a_tau: float
    a_gibbs: float
    a_final: float
    c_zz: float
    delta_F_tilde: float


def advantage_row(omega: float, eps: float, alpha_II: float, T: float) -> AdvantageRow:
    if eps > 0:
        raise UnsupportedRegime("step II needs eps <= 0")
    model = QubitModel(omega, eps, T)
    tau = thermal_coefficients(model)
    final = step_two(saturated_step_one(model), model, alpha_II, tau)
    return AdvantageRow(T, eps, alpha_II, tau.a_z, gibbs_bloch(model), final.a_z, final.c_zz,
                      local_free_energy_change(final, model, tau))


def advantage_sweep(omega=1.0, eps_list=None, alpha_II=0.5, T_grid=None) -> list:
    """Local free-energy change after steps I (saturated) and II.

    Rows are ordered by temperature, then by coupling in input order.
    """
    eps_list = [-0.1 * k for k in range(11)] if eps_list is None else list(eps_list)
    T_grid = default_temperature_grid(omega) if T_grid is None else T_grid
    return [advantage_row(omega, e, alpha_II, float(T)) for T in T_grid for e in eps_list]


def curve_minimum(T_grid, values) -> tuple:
    """Location of a curve's minimum: discrete argmin refined by a parabola.

    Returns ``(index, T_min, value_min)``; endpoints are returned unrefined.
    """
    T_grid = np.asarray(T_grid, dtype=float)
    values = np.asarray(values, dtype=float)
    k = int(np.argmin(values))
    if k == 0 or k == len(values) - 1:
        return k, float(T_grid[k]), float(values[k])
    x0, x1, x2 = T_grid[k - 1:k + 2]
    y0, y1, y2 = values[k - 1:k + 2]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    A = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    B = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
    if A <= 0:
        return k, float(x1), float(y1)
    xv = -B / (2 * A)
    C = y1 - A * x1 * x1 - B * x1
    return k, float(xv), float(A * xv * xv + B * xv + C)
