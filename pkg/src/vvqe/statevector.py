"""Dense statevector simulation.

Bit-order convention: a bitstring is read left to right as qubit 0..n-1,
and qubit ``j`` is bit ``j`` of the amplitude index (qubit 0 is least
significant). ``basis_state(4, "0011")`` therefore has qubits 2 and 3 set
and lives at index ``0b1100 == 12``.

Rotations use ``exp(-i * angle / 2 * P)``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .pauli import PauliPolynomial, PauliString, QubitMismatchError

HERMITIAN_TOL = 1e-10


class NonHermitianError(ValueError):
    pass


@lru_cache(maxsize=None)
def _index(n_qubits: int) -> np.ndarray:
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    idx.setflags(write=False)
    return idx


@lru_cache(maxsize=None)
def _parity_table(n_qubits: int) -> np.ndarray:
    """popcount parity of every index, as +1/-1 signs."""
    idx = _index(n_qubits)
    bits = (idx[:, None] >> np.arange(max(n_qubits, 1))) & 1
    return np.where(bits.sum(axis=1) % 2, -1.0, 1.0)


def pauli_gather(p: PauliString) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(src, phase)`` such that ``(P psi)[j] = phase[j] * psi[src[j]]``."""
    idx = _index(p.n_qubits)
    src = idx ^ p.x
    signs = _parity_table(p.n_qubits)[src & p.z]
    y_phase = (1, 1j, -1, -1j)[bin(p.x & p.z).count("1") % 4]
    return src, y_phase * signs


class CompiledOperator:
    """A Pauli polynomial grouped by x-mask for batched action on states.

    Terms sharing an x-mask move amplitudes identically, so their phases
    collapse into one diagonal per group: ``(A psi)[j] = sum_g D[g, j] *
    psi[src[g, j]]``.
    """

    def __init__(self, poly: PauliPolynomial):
        n = poly.n_qubits
        groups: dict[int, np.ndarray] = {}
        for s, c in poly.items():
            src, phase = pauli_gather(s)
            if s.x in groups:
                groups[s.x] = groups[s.x] + c * phase
            else:
                groups[s.x] = c * phase
        idx = _index(n)
        xs = sorted(groups)
        self.n_qubits = n
        self.src = np.array([idx ^ x for x in xs], dtype=np.int64).reshape(len(xs), 1 << n)
        self.diag = np.array([groups[x] for x in xs], dtype=complex).reshape(len(xs), 1 << n)

    def apply(self, amps: np.ndarray) -> np.ndarray:
        """Apply to amplitudes of shape ``(..., 2**n)``."""
        if len(self.src) == 0:
            return np.zeros_like(amps)
        return np.einsum("gd,...gd->...d", self.diag, amps[..., self.src])

    def expect(self, amps: np.ndarray) -> np.ndarray:
        """Complex expectation values ``<psi|A|psi>`` over the leading axes."""
        return np.einsum("...d,...d->...", amps.conj(), self.apply(amps))


def compiled(poly: PauliPolynomial) -> CompiledOperator:
    cache = poly._cache
    if "compiled" not in cache:
        cache["compiled"] = CompiledOperator(poly)
    return cache["compiled"]


class StateVector:
    """Normalized amplitudes over ``2**n_qubits`` computational basis states."""

    def __init__(self, n_qubits: int, amplitudes):
        amps = np.asarray(amplitudes, dtype=complex)
        if amps.shape != (1 << n_qubits,):
            raise ValueError(f"expected {1 << n_qubits} amplitudes, got shape {amps.shape}")
        self.n_qubits = n_qubits
        self.amplitudes = amps

    def copy(self) -> StateVector:
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: StateVector) -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def rotate(self, p: PauliString, angle: float) -> StateVector:
        """In-place ``exp(-i angle/2 P)``; returns self."""
        if p.n_qubits != self.n_qubits:
            raise QubitMismatchError(f"qubit count mismatch: {p.n_qubits} vs {self.n_qubits}")
        src, phase = pauli_gather(p)
        pa = phase * self.amplitudes[src]
        self.amplitudes = np.cos(angle / 2) * self.amplitudes - 1j * np.sin(angle / 2) * pa
        return self

    def particle_number(self) -> float:
        weights = np.array([bin(i).count("1") for i in range(1 << self.n_qubits)])
        return float(np.sum(weights * np.abs(self.amplitudes) ** 2))

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits})"


def basis_state(n_qubits: int, bitstring: str) -> StateVector:
    if len(bitstring) != n_qubits or set(bitstring) - {"0", "1"}:
        raise ValueError(f"bitstring {bitstring!r} is not {n_qubits} binary digits")
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[bitstring_index(bitstring)] = 1.0
    return StateVector(n_qubits, amps)


def bitstring_index(bitstring: str) -> int:
    return sum(1 << j for j, b in enumerate(bitstring) if b == "1")


def apply_pauli_rotation(state: StateVector, p: PauliString, angle: float) -> StateVector:
    return state.copy().rotate(p, angle)


def expectation(state: StateVector, op: PauliPolynomial) -> float:
    """``<psi|A|psi>`` for a Hermitian Pauli polynomial."""
    if op.n_qubits != state.n_qubits:
        raise QubitMismatchError(f"qubit count mismatch: {op.n_qubits} vs {state.n_qubits}")
    if not op.is_hermitian():
        raise NonHermitianError("expectation requires a Hermitian polynomial")
    value = compiled(op).expect(state.amplitudes)
    if abs(value.imag) > HERMITIAN_TOL:
        raise NonHermitianError(f"imaginary expectation residue {value.imag:.3e}")
    return float(value.real)
