"""Finite-dimensional state algebra for bipartite systems.

Density matrices and Hamiltonians are plain complex ``numpy`` arrays; the
bipartite split is passed explicitly as ``dims=(d1, d2)``.  Energies are in
units where hbar = k_B = 1 and all logarithms are natural (entropies in nats).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: eigenvalue tolerance used for positivity checks and clamping
EPS_POS = 1e-10
#: tolerance for Hermiticity and unit trace
EPS_HERM = 1e-9


class ValidationError(ValueError):
    """Input is not a valid Hamiltonian or density matrix."""


@dataclass(frozen=True)
class ThermoContext:
    """Bath temperature. ``temperature == 0`` means ``beta == inf``."""

    temperature: float

    def __post_init__(self):
        if not self.temperature >= 0 or math.isinf(self.temperature):
            raise ValidationError(f"temperature must be finite and >= 0, got {self.temperature}")

    @classmethod
    def from_beta(cls, beta: float) -> "ThermoContext":
        if beta < 0:
            raise ValidationError("beta must be nonnegative")
        if math.isinf(beta):
            return cls(0.0)
        if beta == 0:
            raise ValidationError("beta = 0 (infinite temperature) has no finite T")
        return cls(1.0 / beta)

    @property
    def beta(self) -> float:
        return math.inf if self.temperature == 0 else 1.0 / self.temperature


def _as_ctx(ctx) -> ThermoContext:
    return ctx if isinstance(ctx, ThermoContext) else ThermoContext(float(ctx))


def check_hermitian(H, atol=EPS_HERM):
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {H.shape}")
    if not np.allclose(H, H.conj().T, atol=atol, rtol=0):
        raise ValidationError("matrix is not Hermitian")
    return H


def check_density_matrix(rho, dims=None, atol=EPS_HERM):
    """Validate ``rho`` and return it with tiny negative eigenvalues clamped.

    Eigenvalues in ``[-EPS_POS, 0)`` are set to zero and the state is
    renormalized; anything more negative raises :class:`ValidationError`.
    """
    rho = check_hermitian(rho, atol)
    if dims is not None and int(np.prod(dims)) != rho.shape[0]:
        raise ValidationError(f"dims {dims} do not match matrix size {rho.shape[0]}")
    if abs(np.trace(rho) - 1) > atol:
        raise ValidationError(f"trace is {np.trace(rho).real:.3g}, not 1")
    w, v = np.linalg.eigh(rho)
    if w[0] < -EPS_POS:
        raise ValidationError(f"negative eigenvalue {w[0]:.3g}")
    if w[0] < 0:
        w = np.clip(w, 0, None)
        w /= w.sum()
        rho = (v * w) @ v.conj().T
    return rho


def _eigvals_clamped(rho):
    w = np.linalg.eigvalsh(np.asarray(rho, dtype=complex))
    if w[0] < -EPS_POS:
        raise ValidationError(f"negative eigenvalue {w[0]:.3g}")
    return np.clip(w, 0, None)


def entropy_from_probs(p) -> float:
    """Shannon entropy -sum p ln p with 0 ln 0 = 0."""
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def thermal_state(H, ctx) -> np.ndarray:
    """Gibbs state ``exp(-beta H) / Z``.

    At ``T = 0`` this is the uniform mixture over the ground space (eigenvalues
    within ``1e-12 * max(1, |E0|)`` of the minimum).
    """
    return thermal_state_beta(H, _as_ctx(ctx).beta)


def thermal_state_beta(H, beta: float) -> np.ndarray:
    """Gibbs state at inverse temperature ``beta`` (``0`` and ``inf`` allowed)."""
    if not beta >= 0:
        raise ValidationError("beta must be nonnegative")
    H = check_hermitian(H)
    E, V = np.linalg.eigh(H)
    if math.isinf(beta):
        w = (E - E[0] <= 1e-12 * max(1.0, abs(E[0]))).astype(float)
    else:
        w = np.exp(-(E - E[0]) * beta)
    w /= w.sum()
    return (V * w) @ V.conj().T


def log_partition_function(H, ctx) -> float:
    """``ln Z`` for ``T > 0``, computed with the ground energy factored out."""
    ctx = _as_ctx(ctx)
    if ctx.temperature == 0:
        raise ValueError("ln Z diverges at T = 0; use equilibrium_free_energy")
    E = np.linalg.eigvalsh(check_hermitian(H))
    return float(-ctx.beta * E[0] + np.log(np.sum(np.exp(-ctx.beta * (E - E[0])))))


def equilibrium_free_energy(H, ctx) -> float:
    """``-T ln Z``; the ground energy at ``T = 0``."""
    ctx = _as_ctx(ctx)
    E = np.linalg.eigvalsh(check_hermitian(H))
    if ctx.temperature == 0:
        return float(E[0])
    return float(E[0] - ctx.temperature * np.log(np.sum(np.exp(-ctx.beta * (E - E[0])))))


def von_neumann_entropy(rho) -> float:
    """``-Tr(rho ln rho)`` in nats."""
    return entropy_from_probs(_eigvals_clamped(rho))


def partial_trace(rho, dims, keep: int) -> np.ndarray:
    """Reduced state of subsystem ``keep`` (1 or 2) of a bipartite ``rho``."""
    d1, d2 = dims
    rho = np.asarray(rho)
    if rho.shape != (d1 * d2, d1 * d2):
        raise ValidationError(f"dims {dims} do not match matrix shape {rho.shape}")
    r = rho.reshape(d1, d2, d1, d2)
    if keep == 1:
        return np.einsum("ijkj->ik", r)
    if keep == 2:
        return np.einsum("ijil->jl", r)
    raise ValueError(f"subsystem index must be 1 or 2, got {keep!r}")


def mutual_information(rho, dims) -> float:
    """``S(rho_1) + S(rho_2) - S(rho)``."""
    s1 = von_neumann_entropy(partial_trace(rho, dims, 1))
    s2 = von_neumann_entropy(partial_trace(rho, dims, 2))
    return max(0.0, s1 + s2 - von_neumann_entropy(rho))


def energy(rho, H) -> float:
    rho = np.asarray(rho)
    H = np.asarray(H)
    if rho.shape != H.shape:
        raise ValidationError(f"state {rho.shape} and Hamiltonian {H.shape} differ in size")
    return float(np.real(np.trace(H @ rho)))


def free_energy(rho, H, ctx) -> float:
    """Nonequilibrium free energy ``Tr(H rho) - T S(rho)``."""
    ctx = _as_ctx(ctx)
    E = energy(rho, H)
    if ctx.temperature == 0:
        return E
    return E - ctx.temperature * von_neumann_entropy(rho)


def relative_entropy(rho, sigma, log_sigma=None) -> float:
    """``S(rho||sigma) = -S(rho) - Tr(rho ln sigma)``.

    Returns ``inf`` when the support of ``rho`` is not contained in the
    support of ``sigma`` (overlap above ``EPS_POS`` with sigma's kernel).
    Passing ``log_sigma`` (e.g. from :func:`thermal_log`) skips the
    eigendecomposition of ``sigma``, which loses relative accuracy in very
    small eigenvalues.
    """
    rho = np.asarray(rho, dtype=complex)
    if log_sigma is not None:
        cross = -float(np.real(np.trace(rho @ np.asarray(log_sigma))))
        return max(0.0, cross - von_neumann_entropy(rho))
    w, V = np.linalg.eigh(np.asarray(sigma, dtype=complex))
    if w[0] < -EPS_POS:
        raise ValidationError(f"negative eigenvalue {w[0]:.3g} in sigma")
    # populations of rho in sigma's eigenbasis
    pops = np.real(np.einsum("ij,ik,kj->j", V.conj(), rho, V))
    kernel = w <= EPS_POS
    if np.any(pops[kernel] > EPS_POS):
        return math.inf
    cross = -float(np.sum(pops[~kernel] * np.log(w[~kernel])))
    return max(0.0, cross - von_neumann_entropy(rho))


def thermal_log(H, ctx) -> np.ndarray:
    """``ln tau = -beta H - ln Z`` built from the spectrum of ``H`` (``T > 0``)."""
    ctx = _as_ctx(ctx)
    if ctx.temperature == 0:
        raise ValueError("ln tau is unbounded at T = 0")
    E, V = np.linalg.eigh(check_hermitian(H))
    x = -ctx.beta * (E - E[0])
    x = x - np.log(np.sum(np.exp(x)))
    return (V * x) @ V.conj().T


@dataclass(frozen=True)
class WorkBound:
    delta_F: float
    T_delta_I: float
    satisfied: bool


def work_bound_check(tau, rho, H, ctx, dims, tol=1e-9) -> WorkBound:
    """Compare the free-energy cost of ``tau -> rho`` with ``T * Delta I``.

    ``satisfied`` is only a statement of the noninteracting bound when ``H``
    has no interaction part; for interacting ``H`` it may legitimately be
    ``False``.
    """
    ctx = _as_ctx(ctx)
    dF = free_energy(rho, H, ctx) - free_energy(tau, H, ctx)
    tdi = ctx.temperature * (mutual_information(rho, dims) - mutual_information(tau, dims))
    return WorkBound(dF, tdi, dF >= tdi - tol)


def kron_local(A, B):
    """``A (x) B`` as a dense array."""
    return np.kron(np.asarray(A), np.asarray(B))


def random_density_matrix(d, rng, rank=None):
    """Random full-rank (or rank-``rank``) density matrix from a Ginibre matrix."""
    k = d if rank is None else rank
    G = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_hermitian(d, rng, scale=1.0):
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (A + A.conj().T) / 2
