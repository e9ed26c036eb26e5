import numpy as np
import pytest

from vvqe.fixtures import h2_path
from vvqe.hamiltonian_io import load_hamiltonian
from vvqe.oracle import DimensionError, eigenstate_residual, spectrum, to_dense
from vvqe.pauli import PauliPolynomial, PauliString
from vvqe.statevector import StateVector, basis_state
from vvqe.variance import variance


@pytest.fixture(scope="module")
def h2():
    return load_hamiltonian(h2_path(0.74)).hamiltonian


def test_identity_and_z():
    np.testing.assert_array_equal(to_dense(PauliPolynomial.identity(2)), np.eye(4))
    np.testing.assert_array_equal(to_dense(PauliPolynomial.from_labels(1, {"Z0": 1.0})), np.diag([1, -1]))


def test_fixture_trace(h2):
    assert np.trace(to_dense(h2)).real == pytest.approx(16 * h2.identity_coefficient.real, abs=1e-12)


def test_dimension_cap():
    with pytest.raises(DimensionError):
        to_dense(PauliPolynomial.identity(13))


def test_spectrum_of_diag():
    np.testing.assert_array_equal(spectrum(np.diag([1.0, -1.0])).values, [-1, 1])


def test_two_electron_sector_has_six_levels(h2):
    full = spectrum(h2)
    sector = spectrum(h2, particle_filter=2)
    assert len(full) == 16 and len(sector) == 6
    # sub-multiset of the full spectrum
    remaining = list(full.values)
    for v in sector.values:
        k = int(np.argmin(np.abs(np.array(remaining) - v)))
        assert abs(remaining[k] - v) < 1e-10
        remaining.pop(k)


def test_sector_ground_state_is_fci_energy(h2):
    meta = load_hamiltonian(h2_path(0.74)).metadata
    assert spectrum(h2, particle_filter=2).values[0] == pytest.approx(float(meta["fci_energy"]), abs=1e-9)


def test_eigenpair_residuals(h2):
    dense = to_dense(h2)
    for spec in (spectrum(h2), spectrum(h2, particle_filter=2)):
        for lam, v in zip(spec.values, spec.vectors.T):
            assert np.linalg.norm(dense @ v - lam * v) < 1e-10


def test_non_hermitian_rejected():
    with pytest.raises(ValueError):
        spectrum(np.array([[0, 1], [0, 0]], dtype=float))


def test_residual_examples(h2):
    vec = spectrum(h2, particle_filter=2).vectors[:, 3]
    assert eigenstate_residual(StateVector(4, vec), h2) < 1e-10
    plus = StateVector(1, np.array([1, 1]) / np.sqrt(2))
    assert eigenstate_residual(plus, PauliPolynomial.from_labels(1, {"Z0": 1.0})) == pytest.approx(1.0)


def test_residual_squared_is_variance(h2):
    rng = np.random.default_rng(21)
    for _ in range(10):
        v = rng.normal(size=16) + 1j * rng.normal(size=16)
        psi = StateVector(4, v / np.linalg.norm(v))
        assert eigenstate_residual(psi, h2) ** 2 == pytest.approx(variance(psi, h2), abs=1e-9)


def test_basis_state_residual_of_diagonal_operator():
    h = PauliPolynomial(3, {PauliString.from_ops("ZZI"): 0.4, PauliString.from_ops("IIZ"): -1.0})
    assert eigenstate_residual(basis_state(3, "101"), h) < 1e-14
