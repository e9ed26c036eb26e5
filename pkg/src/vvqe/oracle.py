"""Exact diagonalization used as ground truth for small registers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliPolynomial
from .statevector import StateVector

MAX_QUBITS = 12


class DimensionError(ValueError):
    pass


def to_dense(op: PauliPolynomial) -> np.ndarray:
    if op.n_qubits > MAX_QUBITS:
        raise DimensionError(f"dense materialization capped at {MAX_QUBITS} qubits, got {op.n_qubits}")
    return op.to_matrix()


def hamming_weights(n_qubits: int) -> np.ndarray:
    return np.array([bin(i).count("1") for i in range(1 << n_qubits)])


@dataclass
class Spectrum:
    values: np.ndarray
    vectors: np.ndarray  # columns, embedded in the full 2**n space
    particle_number: int | None = None

    def __len__(self):
        return len(self.values)

    def nearest(self, energy: float) -> tuple[int, float]:
        k = int(np.argmin(np.abs(self.values - energy)))
        return k, float(self.values[k])


def spectrum(op: np.ndarray | PauliPolynomial, particle_filter: int | None = None, tol: float = 1e-10) -> Spectrum:
    """Ascending eigenpairs, optionally restricted to one Hamming-weight sector.

    The sector restriction projects onto the basis states first, so
    degeneracies across sectors never mix.
    """
    mat = to_dense(op) if isinstance(op, PauliPolynomial) else np.asarray(op)
    if np.max(np.abs(mat - mat.conj().T), initial=0.0) > tol:
        raise ValueError("spectrum requires a Hermitian operator")
    dim = mat.shape[0]
    if particle_filter is None:
        vals, vecs = np.linalg.eigh(mat)
        return Spectrum(vals, vecs)
    n_qubits = dim.bit_length() - 1
    idx = np.flatnonzero(hamming_weights(n_qubits) == particle_filter)
    if len(idx) == 0:
        raise ValueError(f"no basis states with {particle_filter} particles")
    vals, sub = np.linalg.eigh(mat[np.ix_(idx, idx)])
    vecs = np.zeros((dim, len(idx)), dtype=complex)
    vecs[idx, :] = sub
    return Spectrum(vals, vecs, particle_filter)


def eigenstate_residual(state: StateVector, op: PauliPolynomial) -> float:
    """``|| H psi - <H> psi ||``, which equals the square root of the variance."""
    mat = to_dense(op)
    psi = state.amplitudes
    h_psi = mat @ psi
    energy = np.vdot(psi, h_psi).real
    return float(np.linalg.norm(h_psi - energy * psi))
