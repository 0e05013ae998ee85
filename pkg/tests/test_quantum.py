import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from corrwork import quantum as qm
from corrwork import qubits as qb

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def bell():
    v = np.array([1, 0, 0, 1]) / np.sqrt(2)
    return np.outer(v, v).astype(complex)


def random_unitary(d, rng):
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_context_rejects_bad_temperatures():
    for T in (-1.0, math.inf, math.nan):
        with pytest.raises(qm.ValidationError):
            qm.ThermoContext(T)
    assert qm.ThermoContext(0.0).beta == math.inf
    assert qm.ThermoContext.from_beta(math.inf).temperature == 0
    assert qm.ThermoContext.from_beta(4.0).temperature == 0.25


def test_non_hermitian_rejected():
    with pytest.raises(qm.ValidationError):
        qm.thermal_state(np.array([[0, 1], [0, 0]]), 1.0)


def test_density_matrix_checks():
    with pytest.raises(qm.ValidationError):
        qm.check_density_matrix(np.diag([1.2, -0.2]))
    with pytest.raises(qm.ValidationError):
        qm.check_density_matrix(np.diag([0.5, 0.4]))
    rho = qm.check_density_matrix(np.diag([1 + 1e-12, -1e-12]))
    assert np.linalg.eigvalsh(rho)[0] >= 0
    assert np.trace(rho).real == pytest.approx(1, abs=1e-15)


def test_infinite_temperature_is_maximally_mixed(rng):
    H = qm.random_hermitian(4, rng)
    assert np.allclose(qm.thermal_state_beta(H, 0.0), np.eye(4) / 4, atol=1e-14)


def test_noninteracting_thermal_state_factorizes():
    H1 = SZ
    H = np.kron(H1, np.eye(2)) + np.kron(np.eye(2), H1)
    g = qm.thermal_state(H1, 1.0)
    assert np.allclose(qm.thermal_state(H, 1.0), np.kron(g, g), atol=1e-14)


def test_zero_temperature_projects_on_ground_space():
    H = np.diag([1.0, -2.0, -2.0, 3.0])
    tau = qm.thermal_state(H, 0.0)
    assert np.allclose(tau, np.diag([0, 0.5, 0.5, 0]))
    assert qm.equilibrium_free_energy(H, 0.0) == -2.0


def test_entropy_examples():
    assert qm.von_neumann_entropy(bell()) == pytest.approx(0, abs=1e-14)
    assert qm.von_neumann_entropy(np.eye(4) / 4) == pytest.approx(math.log(4), abs=1e-14)


def test_entropy_of_qubit_thermal_state_from_closed_form_spectrum():
    omega, eps, beta = 1.0, 0.5, 1.0
    E = np.array([2 * omega + eps, -eps, -eps, -2 * omega + eps])
    p = np.exp(-beta * E) / np.exp(-beta * E).sum()
    tau = qm.thermal_state(qb.hamiltonian(qb.QubitModel(omega, eps, 1 / beta)), 1 / beta)
    assert qm.von_neumann_entropy(tau) == pytest.approx(-(p * np.log(p)).sum(), abs=1e-13)


def test_partial_trace_examples(rng):
    A = qm.random_density_matrix(2, rng)
    B = qm.random_density_matrix(3, rng)
    AB = np.kron(A, B)
    assert np.allclose(qm.partial_trace(AB, (2, 3), 1), A)
    assert np.allclose(qm.partial_trace(AB, (2, 3), 2), B)
    assert np.allclose(qm.partial_trace(bell(), (2, 2), 1), np.eye(2) / 2)
    with pytest.raises(ValueError):
        qm.partial_trace(AB, (2, 3), 3)
    with pytest.raises(qm.ValidationError):
        qm.partial_trace(AB, (2, 2), 1)


def test_mutual_information_examples(rng):
    AB = np.kron(qm.random_density_matrix(2, rng), qm.random_density_matrix(2, rng))
    assert qm.mutual_information(AB, (2, 2)) == pytest.approx(0, abs=1e-12)
    assert qm.mutual_information(bell(), (2, 2)) == pytest.approx(2 * math.log(2), abs=1e-12)


def test_relative_entropy_examples(rng):
    rho = qm.random_density_matrix(4, rng)
    assert qm.relative_entropy(rho, rho) == pytest.approx(0, abs=1e-12)
    psi = rng.normal(size=3) + 1j * rng.normal(size=3)
    psi /= np.linalg.norm(psi)
    sigma = qm.random_density_matrix(3, rng)
    w, V = np.linalg.eigh(sigma)
    log_sigma = (V * np.log(w)) @ V.conj().T
    expect = -np.real(psi.conj() @ log_sigma @ psi)
    assert qm.relative_entropy(np.outer(psi, psi.conj()), sigma) == pytest.approx(expect, abs=1e-12)
    assert qm.relative_entropy(np.eye(2) / 2, np.diag([1.0, 0.0])) == math.inf


def test_relative_entropy_of_mixed_state_to_qubit_gibbs():
    model = qb.QubitModel(1.0, 0.0, 1.0)
    H = qb.hamiltonian(model)
    tau = qm.thermal_state(H, 1.0)
    rho = np.eye(4) / 4
    d = qm.relative_entropy(rho, tau)
    assert d > 0
    assert d == pytest.approx(qm.free_energy(rho, H, 1.0) - qm.free_energy(tau, H, 1.0), abs=1e-12)


def test_thermal_free_energy_is_minus_T_ln_Z(rng):
    for d in (2, 3, 4, 8):
        H = qm.random_hermitian(d, rng)
        T = rng.uniform(0.1, 3)
        tau = qm.thermal_state(H, T)
        assert qm.free_energy(tau, H, T) == pytest.approx(-T * qm.log_partition_function(H, T), abs=1e-10)


def test_ground_state_free_energy_at_zero_temperature(rng):
    H = qm.random_hermitian(4, rng)
    w, V = np.linalg.eigh(H)
    g = np.outer(V[:, 0], V[:, 0].conj())
    assert qm.free_energy(g, H, 0.0) == pytest.approx(w[0], abs=1e-12)


def test_work_bound_examples(rng):
    H = np.kron(SZ, np.eye(2)) + np.kron(np.eye(2), SZ)
    tau = qm.thermal_state(H, 0.7)
    same = qm.work_bound_check(tau, tau, H, 0.7, (2, 2))
    assert same.delta_F == pytest.approx(0, abs=1e-14) and same.T_delta_I == pytest.approx(0, abs=1e-14)
    for _ in range(50):
        rho = qm.random_density_matrix(4, rng)
        assert qm.work_bound_check(tau, rho, H, 0.7, (2, 2)).satisfied


@given(st.integers(0, 10_000), st.floats(0.05, 5.0))
def test_relative_entropy_identity_property(seed, T):
    rng = np.random.default_rng(seed)
    H = qm.random_hermitian(4, rng)
    rho = qm.random_density_matrix(4, rng)
    tau = qm.thermal_state(H, T)
    lhs = (qm.free_energy(rho, H, T) - qm.free_energy(tau, H, T)) / T
    assert lhs == pytest.approx(qm.relative_entropy(rho, tau, qm.thermal_log(H, T)), abs=1e-9)


@given(st.integers(0, 10_000), st.floats(1.0, 5.0))
def test_relative_entropy_identity_eigen_path(seed, T):
    # moderate beta * spread, so tau's eigenvalues keep their relative accuracy
    rng = np.random.default_rng(seed)
    H = qm.random_hermitian(4, rng, scale=0.5)
    rho = qm.random_density_matrix(4, rng)
    tau = qm.thermal_state(H, T)
    lhs = (qm.free_energy(rho, H, T) - qm.free_energy(tau, H, T)) / T
    assert lhs == pytest.approx(qm.relative_entropy(rho, tau), abs=1e-9)


def test_thermal_log_matches_matrix_log(rng):
    H = qm.random_hermitian(3, rng)
    tau = qm.thermal_state(H, 0.8)
    w, V = np.linalg.eigh(tau)
    assert np.allclose(qm.thermal_log(H, 0.8), (V * np.log(w)) @ V.conj().T, atol=1e-10)
    with pytest.raises(ValueError):
        qm.thermal_log(H, 0.0)


@given(st.integers(0, 10_000))
def test_mutual_information_local_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    rho = qm.random_density_matrix(6, rng)
    U = np.kron(random_unitary(2, rng), random_unitary(3, rng))
    I0 = qm.mutual_information(rho, (2, 3))
    assert I0 >= 0
    assert qm.mutual_information(U @ rho @ U.conj().T, (2, 3)) == pytest.approx(I0, abs=1e-10)
    assert np.trace(qm.partial_trace(rho, (2, 3), 2)).real == pytest.approx(1, abs=1e-12)
