"""Bloch-Fano decomposition of bipartite states and interaction Hamiltonians.

A state on ``C^d1 (x) C^d2`` is written as

    rho = (1 + sum_m a_m s_m(x)1 + sum_n b_n 1(x)s_n + sum_mn c_mn s_m(x)s_n) / (d1 d2)

with traceless Hermitian generators normalized to ``Tr(s_m s_n) = 2 delta_mn``.
The generalized Gell-Mann matrices are used throughout unless a basis is
passed explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import quantum as qm


@lru_cache(maxsize=None)
def _gell_mann(d: int) -> tuple:
    mats = []
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = m[k, j] = 1
            mats.append(m)
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = -1j
            m[k, j] = 1j
            mats.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        mats.append(np.diag(np.sqrt(2.0 / (l * (l + 1))) * diag).astype(complex))
    for m in mats:
        m.setflags(write=False)
    return tuple(mats)


def gell_mann_basis(d: int) -> list:
    """The ``d**2 - 1`` generalized Gell-Mann matrices.

    Ordering is symmetric/antisymmetric pairs for each ``j < k`` followed by
    the diagonal generators, so ``d = 2`` gives ``[sx, sy, sz]``.
    """
    if d < 2:
        raise ValueError("dimension must be >= 2")
    return list(_gell_mann(d))


def check_basis(basis, atol=1e-12) -> None:
    """Raise if ``basis`` violates ``Tr(s_m s_n) = 2 delta_mn`` or tracelessness."""
    basis = [np.asarray(s) for s in basis]
    d = basis[0].shape[0]
    if len(basis) != d * d - 1:
        raise ValueError(f"need {d * d - 1} generators, got {len(basis)}")
    gram = np.array([[np.trace(a @ b) for b in basis] for a in basis])
    if not np.allclose(gram, 2 * np.eye(len(basis)), atol=atol):
        raise ValueError("generators are not Tr-orthonormal to 2")
    if not all(abs(np.trace(s)) < atol and np.allclose(s, s.conj().T, atol=atol) for s in basis):
        raise ValueError("generators must be traceless and Hermitian")


def _dim_from_len(n: int) -> int:
    d = int(round(np.sqrt(n + 1)))
    if d * d - 1 != n:
        raise ValueError(f"vector length {n} is not d**2 - 1")
    return d


@dataclass(frozen=True)
class BlochForm:
    """Local Bloch vectors ``a``, ``b`` and correlation tensor ``c``."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    @property
    def dims(self) -> tuple:
        return _dim_from_len(len(self.a)), _dim_from_len(len(self.b))


@dataclass(frozen=True)
class InteractionCoeffs:
    """``H_I = sum eps_mn s_m(x)s_n`` plus single-sided parts to absorb locally.

    ``local_1`` and ``local_2`` are the coefficients of ``s_m(x)1`` and
    ``1(x)s_n``; ``constant`` multiplies the identity.
    """

    eps: np.ndarray
    local_1: np.ndarray
    local_2: np.ndarray
    constant: float = 0.0


def _bases(dims, basis1, basis2):
    d1, d2 = dims
    return (gell_mann_basis(d1) if basis1 is None else list(basis1),
            gell_mann_basis(d2) if basis2 is None else list(basis2))


def _components(M, dims, basis1, basis2):
    """Traces of ``M`` against ``s_m(x)1``, ``1(x)s_n`` and ``s_m(x)s_n``."""
    d1, d2 = dims
    M = np.asarray(M).reshape(d1, d2, d1, d2)
    B1 = np.array(basis1)
    B2 = np.array(basis2)
    # Tr(M (A (x) B)) = sum M[i,j,k,l] A[k,i] B[l,j]
    t_c = np.real(np.einsum("ijkl,mki,nlj->mn", M, B1, B2))
    t_a = np.real(np.einsum("ijkj,mki->m", M, B1))
    t_b = np.real(np.einsum("ijil,nlj->n", M, B2))
    return t_a, t_b, t_c


def decompose_state(rho, dims, basis1=None, basis2=None) -> BlochForm:
    """Bloch-Fano coefficients of a bipartite state."""
    d1, d2 = dims
    basis1, basis2 = _bases(dims, basis1, basis2)
    if np.shape(rho) != (d1 * d2, d1 * d2):
        raise ValueError(f"dims {dims} do not match state shape {np.shape(rho)}")
    t_a, t_b, t_c = _components(rho, dims, basis1, basis2)
    return BlochForm(d1 / 2 * t_a, d2 / 2 * t_b, d1 * d2 / 4 * t_c)


def reconstruct(bf: BlochForm, basis1=None, basis2=None) -> np.ndarray:
    """Inverse of :func:`decompose_state`; positivity is not enforced."""
    d1, d2 = bf.dims
    basis1, basis2 = _bases((d1, d2), basis1, basis2)
    c = np.asarray(bf.c)
    if c.shape != (d1 * d1 - 1, d2 * d2 - 1):
        raise ValueError(f"correlation tensor has shape {c.shape}")
    I1, I2 = np.eye(d1), np.eye(d2)
    rho = np.eye(d1 * d2, dtype=complex)
    rho += np.kron(np.tensordot(bf.a, basis1, axes=1), I2)
    rho += np.kron(I1, np.tensordot(bf.b, basis2, axes=1))
    rho += sum(np.kron(s1, np.tensordot(c[m], basis2, axes=1)) for m, s1 in enumerate(basis1))
    return rho / (d1 * d2)


def positivity_check(bf: BlochForm, basis1=None, basis2=None) -> tuple:
    """``(is_positive, min_eigenvalue)`` of the reconstructed operator."""
    lam = float(np.linalg.eigvalsh(reconstruct(bf, basis1, basis2))[0])
    return lam >= -qm.EPS_POS, lam


def decompose_interaction(H_I, dims, basis1=None, basis2=None) -> InteractionCoeffs:
    """Expand ``H_I`` into correlation coefficients and absorbable local parts."""
    d1, d2 = dims
    basis1, basis2 = _bases(dims, basis1, basis2)
    t_a, t_b, t_c = _components(H_I, dims, basis1, basis2)
    return InteractionCoeffs(eps=t_c / 4, local_1=t_a / (2 * d2), local_2=t_b / (2 * d1),
                             constant=float(np.real(np.trace(H_I))) / (d1 * d2))


def interaction_matrix(coeffs: InteractionCoeffs, dims, basis1=None, basis2=None,
                       with_local=False) -> np.ndarray:
    """Dense ``sum eps_mn s_m(x)s_n`` (optionally with the local remainders)."""
    d1, d2 = dims
    basis1, basis2 = _bases(dims, basis1, basis2)
    H = sum(np.kron(s1, np.tensordot(coeffs.eps[m], basis2, axes=1))
            for m, s1 in enumerate(basis1))
    if with_local:
        H = H + np.kron(np.tensordot(coeffs.local_1, basis1, axes=1), np.eye(d2))
        H = H + np.kron(np.eye(d1), np.tensordot(coeffs.local_2, basis2, axes=1))
        H = H + coeffs.constant * np.eye(d1 * d2)
    return H


def interaction_overlap(eps, c_rho, c_tau, dims) -> float:
    """``Tr(H_I (rho - tau))`` from correlation tensors alone.

    The prefactor ``4 / (d1 d2)`` makes the tensor contraction equal the
    operator trace in any dimension; it is 1 for two qubits.
    """
    eps = np.asarray(eps.eps if isinstance(eps, InteractionCoeffs) else eps)
    dc = np.asarray(c_rho) - np.asarray(c_tau)
    if eps.shape != dc.shape:
        raise ValueError(f"shape mismatch {eps.shape} vs {dc.shape}")
    d1, d2 = dims
    return 4.0 / (d1 * d2) * float(np.sum(dc * eps))


def local_gibbs(H_local, ctx, basis=None) -> np.ndarray:
    """Bloch vector ``(d/2) Tr(gamma s_m)`` of the local Gibbs state."""
    H_local = np.asarray(H_local)
    d = H_local.shape[0]
    basis = gell_mann_basis(d) if basis is None else list(basis)
    gamma = qm.thermal_state(H_local, ctx)
    return np.array([d / 2 * np.real(np.trace(gamma @ s)) for s in basis])


def local_free_energy(rho, H_local, ctx, dims, subsystem) -> float:
    """``Tr(H_Si rho_Si) - T S(rho_Si)`` for one subsystem."""
    ctx = qm._as_ctx(ctx)
    r = qm.partial_trace(rho, dims, subsystem)
    return qm.free_energy(r, H_local, ctx)


def delta_F_tilde(rho, tau, H_local, ctx, dims, subsystem) -> float:
    """Change of the local free energy of subsystem ``subsystem`` from ``tau`` to ``rho``."""
    return (local_free_energy(rho, H_local, ctx, dims, subsystem)
            - local_free_energy(tau, H_local, ctx, dims, subsystem))


def delta_F_tilde_relative(rho, tau, H_local, ctx, dims, subsystem) -> float:
    """Same quantity as :func:`delta_F_tilde`, via relative entropies to the local Gibbs state.

    Requires ``T > 0``.
    """
    ctx = qm._as_ctx(ctx)
    if ctx.temperature == 0:
        raise ValueError("relative-entropy form needs T > 0")
    gamma = qm.thermal_state(H_local, ctx)
    r = qm.partial_trace(rho, dims, subsystem)
    t = qm.partial_trace(tau, dims, subsystem)
    return ctx.temperature * (qm.relative_entropy(r, gamma) - qm.relative_entropy(t, gamma))


@dataclass(frozen=True)
class FreeEnergyDecomposition:
    T_delta_I: float
    overlap: float
    delta_F1: float
    delta_F2: float
    total: float

    @property
    def sum_of_parts(self) -> float:
        return self.T_delta_I + self.overlap + self.delta_F1 + self.delta_F2


def split_local(H1, H2, H_I, dims, basis1=None, basis2=None):
    """Move single-sided terms of ``H_I`` into ``H1``/``H2``.

    Returns ``(H1', H2', coeffs)`` with ``H1' (x) 1 + 1 (x) H2' + sum eps s(x)s``
    equal to the original total Hamiltonian up to a multiple of the identity.
    """
    basis1, basis2 = _bases(dims, basis1, basis2)
    coeffs = decompose_interaction(H_I, dims, basis1, basis2)
    H1 = np.asarray(H1) + np.tensordot(coeffs.local_1, basis1, axes=1)
    H2 = np.asarray(H2) + np.tensordot(coeffs.local_2, basis2, axes=1)
    return H1, H2, coeffs


def free_energy_decomposition(rho, tau, H1, H2, H_I, ctx, dims,
                              basis1=None, basis2=None) -> FreeEnergyDecomposition:
    """Split ``F(rho) - F(tau)`` into correlation, interaction and local terms.

    ``H1`` and ``H2`` act on the single subsystems; ``H_I`` on the joint
    space.  ``total`` is evaluated directly from the full Hamiltonian, so
    ``total - sum_of_parts`` measures the closure error.
    """
    ctx = qm._as_ctx(ctx)
    d1, d2 = dims
    basis1, basis2 = _bases(dims, basis1, basis2)
    H = np.kron(H1, np.eye(d2)) + np.kron(np.eye(d1), H2) + np.asarray(H_I)
    H1a, H2a, coeffs = split_local(H1, H2, H_I, dims, basis1, basis2)
    c_rho = decompose_state(rho, dims, basis1, basis2).c
    c_tau = decompose_state(tau, dims, basis1, basis2).c
    return FreeEnergyDecomposition(
        T_delta_I=ctx.temperature * (qm.mutual_information(rho, dims) - qm.mutual_information(tau, dims)),
        overlap=interaction_overlap(coeffs.eps, c_rho, c_tau, dims),
        delta_F1=delta_F_tilde(rho, tau, H1a, ctx, dims, 1),
        delta_F2=delta_F_tilde(rho, tau, H2a, ctx, dims, 2),
        total=qm.free_energy(rho, H, ctx) - qm.free_energy(tau, H, ctx),
    )
