from itertools import combinations

import numpy as np
import pytest
from scipy.linalg import expm

from vvqe.fixtures import h2_path
from vvqe.hamiltonian_io import load_hamiltonian
from vvqe.oracle import spectrum, to_dense
from vvqe.pauli import PauliPolynomial, PauliString
from vvqe.statevector import StateVector, basis_state
from vvqe.ucc import AnsatzCircuit, Gate, build_ucc, default_doubles, default_singles
from vvqe.variance import (
    SampleMask,
    covariance_matrix,
    draw_mask,
    energy,
    energy_gradient,
    sampled_variance,
    sampled_variance_gradient,
    variance,
    variance_gradient,
)


@pytest.fixture(scope="module")
def h2():
    return load_hamiltonian(h2_path(1.0)).hamiltonian


@pytest.fixture(scope="module")
def circuit():
    return build_ucc(default_singles(4), default_doubles(4), 1, 4)


def random_state(n, rng):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(n, v / np.linalg.norm(v))


def dense_covariance(psi, h):
    mats = [s.to_matrix() for s in h.strings]
    v = psi.amplitudes
    means = np.array([np.vdot(v, m @ v) for m in mats])
    g = np.array([[np.vdot(v, a @ b @ v) for b in mats] for a in mats])
    return g - np.outer(means, means)


def dense_circuit_unitary(circuit, theta):
    u = np.eye(1 << circuit.n_qubits, dtype=complex)
    for g in circuit.gates:
        u = expm(-0.5j * g.angle(theta) * g.string.to_matrix()) @ u
    return u


# -- energy / variance / covariance ------------------------------------------------


def test_energy_of_eigenvector(h2):
    spec = spectrum(h2)
    for lam, v in zip(spec.values[:4], spec.vectors.T[:4]):
        assert energy(StateVector(4, v), h2) == pytest.approx(lam, abs=1e-10)


def test_energy_with_identity():
    h = PauliPolynomial.from_labels(1, {"Z0": 0.5, "": 0.25})
    assert energy(basis_state(1, "0"), h) == pytest.approx(0.75)


def test_energy_hf_reference_matches_dense(h2):
    psi = basis_state(4, "1100")
    assert energy(psi, h2) == pytest.approx(np.vdot(psi.amplitudes, to_dense(h2) @ psi.amplitudes).real, abs=1e-12)


def test_covariance_single_qubit():
    h = PauliPolynomial.from_labels(1, {"Z0": 1.0, "X0": 1.0})
    g = covariance_matrix(basis_state(1, "0"), h)
    order = [s.label for s in h.strings]
    expected = {("Z0", "Z0"): 0, ("X0", "X0"): 1, ("Z0", "X0"): 0, ("X0", "Z0"): 0}
    for i, a in enumerate(order):
        for j, b in enumerate(order):
            assert g.entries[i, j] == pytest.approx(expected[a, b], abs=1e-15)


def test_covariance_vanishes_on_eigenstates(h2):
    c = h2.real_coefficients()
    for v in spectrum(h2).vectors.T:
        assert abs(covariance_matrix(StateVector(4, v), h2).quadratic_form(c)) < 1e-9


def test_covariance_random_state_matches_dense(h2):
    rng = np.random.default_rng(1)
    dense = to_dense(h2)
    c = h2.real_coefficients()
    for _ in range(5):
        psi = random_state(4, rng)
        g = covariance_matrix(psi, h2)
        np.testing.assert_allclose(g.entries, dense_covariance(psi, h2), atol=1e-12)
        v = psi.amplitudes
        dense_var = np.vdot(v, dense @ dense @ v).real - np.vdot(v, dense @ v).real ** 2
        assert g.quadratic_form(c) == pytest.approx(dense_var, abs=1e-12)


def test_covariance_hermitian_psd_unit_diagonal(h2):
    rng = np.random.default_rng(2)
    for _ in range(10):
        g = covariance_matrix(random_state(4, rng), h2)
        assert g.hermitian_error() < 1e-10
        assert g.min_eigenvalue() >= -1e-9
        d = np.diag(g.entries).real
        assert np.all(d >= -1e-12) and np.all(d <= 1 + 1e-12)


def test_variance_examples(h2):
    plus = StateVector(1, np.array([1, 1]) / np.sqrt(2))
    assert variance(plus, PauliPolynomial.from_labels(1, {"Z0": 1.0})) == pytest.approx(1.0)
    for v in spectrum(h2).vectors.T:
        assert abs(variance(StateVector(4, v), h2)) < 1e-9
    uniform = StateVector(4, np.full(16, 0.25))
    dense = to_dense(h2)
    u = uniform.amplitudes
    expected = np.vdot(u, dense @ dense @ u).real - np.vdot(u, dense @ u).real ** 2
    assert variance(uniform, h2) == pytest.approx(expected, abs=1e-12)


def test_fast_path_equals_quadratic_form(h2):
    rng = np.random.default_rng(3)
    c = h2.real_coefficients()
    for _ in range(20):
        psi = random_state(4, rng)
        var = variance(psi, h2)
        assert var >= -1e-10
        assert var == pytest.approx(covariance_matrix(psi, h2).quadratic_form(c), abs=1e-9)


def test_zero_variance_iff_eigenvector(h2):
    dense = to_dense(h2)
    rng = np.random.default_rng(4)
    for v in spectrum(h2).vectors.T:
        psi = StateVector(4, v)
        assert variance(psi, h2) < 1e-9
    for _ in range(20):
        psi = random_state(4, rng)
        e = energy(psi, h2)
        residual = np.linalg.norm(dense @ psi.amplitudes - e * psi.amplitudes)
        assert (variance(psi, h2) < 1e-9) == (residual < 1e-5)
        assert residual > 1e-5


# -- gradients -----------------------------------------------------------------------


def rx_circuit():
    # angle = -2 * (-1/2) * theta = theta, i.e. R_X(theta)
    return AnsatzCircuit(1, [Gate(PauliString.from_ops("X"), -0.5, 0)], 1)


@pytest.mark.parametrize("theta", [0.3, 1.1, 2.5, -0.7])
def test_rx_variance_gradient_closed_form(theta):
    h = PauliPolynomial.from_labels(1, {"Z0": 1.0})
    ref = basis_state(1, "0")
    # dense oracle: state cos(t/2)|0> - i sin(t/2)|1>, so <Z> = cos t and var = sin^2 t
    u = expm(-0.5j * theta * PauliString.from_ops("X").to_matrix())
    psi = u @ ref.amplitudes
    z = np.diag([1.0, -1.0])
    assert 1 - np.vdot(psi, z @ psi).real ** 2 == pytest.approx(np.sin(theta) ** 2, abs=1e-12)
    grad = variance_gradient(rx_circuit(), [theta], ref, h)
    assert grad[0] == pytest.approx(np.sin(2 * theta), abs=1e-9)


def test_gradient_vanishes_at_exact_eigenstate(h2, circuit):
    # |1010> (both alpha) is an exact triplet eigenstate of the fixture
    ref = basis_state(4, "1010")
    theta = np.zeros(circuit.n_params)
    assert variance(ref, h2) < 1e-12
    assert np.linalg.norm(variance_gradient(circuit, theta, ref, h2)) < 1e-6
    assert np.linalg.norm(energy_gradient(circuit, theta, ref, h2)) < 1e-6


def test_variance_gradient_matches_forward_difference(h2, circuit):
    rng = np.random.default_rng(5)
    ref = basis_state(4, "1100")
    h = 1e-4
    for _ in range(3):
        theta = rng.uniform(0, 2 * np.pi, circuit.n_params)
        grad = variance_gradient(circuit, theta, ref, h2)
        # one-sided second-order stencil; the two-point version has O(h f'') error near 1e-5
        f = lambda t: variance(_state(circuit, t, ref), h2)
        base = f(theta)
        fwd = np.array([(-3 * base + 4 * f(theta + h * e) - f(theta + 2 * h * e)) / (2 * h) for e in np.eye(9)])
        np.testing.assert_allclose(grad, fwd, atol=1e-5)


def _state(circuit, theta, ref):
    return StateVector(circuit.n_qubits, dense_circuit_unitary(circuit, theta) @ ref.amplitudes)


def test_energy_gradient_of_empty_circuit(h2):
    circuit = AnsatzCircuit(4, [], 3)
    np.testing.assert_array_equal(energy_gradient(circuit, np.ones(3), basis_state(4, "1100"), h2), np.zeros(3))


def test_energy_gradient_matches_dense_oracle(h2, circuit):
    rng = np.random.default_rng(6)
    ref = basis_state(4, "0110")
    dense = to_dense(h2)
    theta = rng.uniform(0, 2 * np.pi, circuit.n_params)
    step = 1e-4

    def e_dense(t):
        psi = dense_circuit_unitary(circuit, t) @ ref.amplitudes
        return np.vdot(psi, dense @ psi).real

    oracle = np.array([(e_dense(theta + step * e) - e_dense(theta - step * e)) / (2 * step) for e in np.eye(9)])
    np.testing.assert_allclose(energy_gradient(circuit, theta, ref, h2), oracle, atol=1e-6)


# -- Hamiltonian sampling ------------------------------------------------------------


def test_draw_mask_contract():
    assert draw_mask(10, 1.0, 0).kept == tuple(range(10))
    assert len(draw_mask(10, 0.5, 0).kept) == 5
    assert len(draw_mask(15, 0.01, 0).kept) == 1
    assert draw_mask(20, 0.3, 42) == draw_mask(20, 0.3, 42)
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            draw_mask(10, bad, 0)


def test_draw_mask_is_uniform():
    rng = np.random.default_rng(0)
    counts = np.zeros(6)
    for _ in range(3000):
        counts[list(draw_mask(6, 0.5, rng).kept)] += 1
    np.testing.assert_allclose(counts / 3000, 0.5, atol=0.05)


def test_full_mask_equals_variance(h2):
    rng = np.random.default_rng(7)
    full = draw_mask(len(h2), 1.0, 0)
    for _ in range(5):
        psi = random_state(4, rng)
        assert sampled_variance(psi, h2, full) == pytest.approx(variance(psi, h2), abs=1e-9)


def test_submask_on_eigenstate_can_be_positive(h2):
    ground = StateVector(4, spectrum(h2, particle_filter=2).vectors[:, 0])
    values = [sampled_variance(ground, h2, draw_mask(len(h2), 0.3, s)) for s in range(20)]
    assert max(values) > 1e-6
    assert min(values) >= -1e-12


def test_sampled_variance_matches_dense_quadratic_form(h2):
    rng = np.random.default_rng(8)
    c = h2.real_coefficients()
    for seed in range(5):
        psi = random_state(4, rng)
        mask = draw_mask(len(h2), 0.4, seed)
        c_kept = np.zeros_like(c)
        c_kept[list(mask.kept)] = c[list(mask.kept)]
        g = dense_covariance(psi, h2).real
        expected = (c @ c) / (c_kept @ c_kept) * (c_kept @ g @ c_kept)
        assert sampled_variance(psi, h2, mask) == pytest.approx(expected, abs=1e-12)


def test_exhaustive_mask_average():
    rng = np.random.default_rng(9)
    strings = rng.choice(np.arange(1, 64), size=6, replace=False)
    h = PauliPolynomial(3, {PauliString(3, int(v) & 7, int(v) >> 3): rng.normal() for v in strings})
    c = h.real_coefficients()
    psi = random_state(3, rng)
    g = dense_covariance(psi, h).real
    for m in range(1, 7):
        masks = list(combinations(range(6), m))
        estimator = np.mean([sampled_variance(psi, h, SampleMask(6, k, m / 6)) for k in masks])
        direct = 0.0
        for k in masks:
            ck = np.zeros(6)
            ck[list(k)] = c[list(k)]
            direct += (c @ c) / (ck @ ck) * (ck @ g @ ck)
        assert estimator == pytest.approx(direct / len(masks), abs=1e-12)
    assert estimator == pytest.approx(variance(psi, h), abs=1e-12)


def test_sampled_gradient_full_mask(h2, circuit):
    theta = np.random.default_rng(10).uniform(0, 2 * np.pi, 9)
    ref = basis_state(4, "1100")
    full = draw_mask(len(h2), 1.0, 0)
    np.testing.assert_allclose(
        sampled_variance_gradient(circuit, theta, ref, h2, full), variance_gradient(circuit, theta, ref, h2), atol=1e-8
    )


def test_sampled_gradient_deterministic_and_dense(h2, circuit):
    theta = np.random.default_rng(11).uniform(0, 2 * np.pi, 9)
    ref = basis_state(4, "1001")
    m1 = draw_mask(len(h2), 0.3, np.random.default_rng(5))
    m2 = draw_mask(len(h2), 0.3, np.random.default_rng(5))
    g1 = sampled_variance_gradient(circuit, theta, ref, h2, m1)
    np.testing.assert_array_equal(g1, sampled_variance_gradient(circuit, theta, ref, h2, m2))

    c = h2.real_coefficients()
    ck = np.zeros_like(c)
    ck[list(m1.kept)] = c[list(m1.kept)]
    pref = (c @ c) / (ck @ ck)

    def dense_masked(t):
        psi = StateVector(4, dense_circuit_unitary(circuit, t) @ ref.amplitudes)
        return pref * ck @ dense_covariance(psi, h2).real @ ck

    step = 1e-4
    oracle = np.array([(dense_masked(theta + step * e) - dense_masked(theta - step * e)) / (2 * step) for e in np.eye(9)])
    np.testing.assert_allclose(g1, oracle, atol=1e-6)


def test_empty_and_mismatched_masks(h2):
    psi = basis_state(4, "1100")
    with pytest.raises(ValueError):
        sampled_variance(psi, h2, SampleMask(len(h2), (), 0.1))
    with pytest.raises(ValueError):
        sampled_variance(psi, h2, SampleMask(len(h2) + 1, (0,), 0.1))
