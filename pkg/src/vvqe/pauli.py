"""Pauli strings and Pauli polynomials in the (x-mask, z-mask) encoding.

A Pauli string on ``n`` qubits is stored as two integers ``x`` and ``z``.
Qubit ``j`` carries ``X`` if only bit ``j`` of ``x`` is set, ``Z`` if only
bit ``j`` of ``z`` is set, ``Y`` if both are set and ``I`` otherwise. The
operator represented is ``i**popcount(x & z) * X**x Z**z`` so that every
stored string is Hermitian with phase +1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

PRUNE_FLOOR = 1e-12

_PHASES = (1, 1j, -1, -1j)
_LABEL_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_TOKEN = re.compile(r"^([IXYZ])(\d+)$")


class QubitMismatchError(ValueError):
    """Raised when operands act on different numbers of qubits."""


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True, order=True)
class PauliString:
    n_qubits: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        full = (1 << self.n_qubits) - 1
        if self.x & ~full or self.z & ~full:
            raise ValueError(f"mask exceeds {self.n_qubits} qubits")

    @classmethod
    def identity(cls, n_qubits: int) -> PauliString:
        return cls(n_qubits)

    @classmethod
    def from_ops(cls, ops: str | Iterable[str]) -> PauliString:
        """Build from a per-qubit label sequence, qubit 0 first (``"XIZ"``)."""
        ops = list(ops)
        x = z = 0
        for j, op in enumerate(ops):
            try:
                bx, bz = _LABEL_BITS[op]
            except KeyError:
                raise ValueError(f"unknown Pauli label {op!r}") from None
            x |= bx << j
            z |= bz << j
        return cls(len(ops), x, z)

    @classmethod
    def from_label(cls, label: str, n_qubits: int) -> PauliString:
        """Parse a sparse label such as ``"X0 Z1 Y3"``; empty means identity."""
        x = z = 0
        seen = set()
        for token in label.split():
            m = _TOKEN.match(token)
            if m is None:
                raise ValueError(f"bad Pauli token {token!r}")
            op, q = m.group(1), int(m.group(2))
            if q >= n_qubits:
                raise ValueError(f"qubit index {q} out of range for {n_qubits} qubits")
            if q in seen:
                raise ValueError(f"qubit {q} appears twice in {label!r}")
            seen.add(q)
            bx, bz = _LABEL_BITS[op]
            x |= bx << q
            z |= bz << q
        return cls(n_qubits, x, z)

    @property
    def ops(self) -> tuple[str, ...]:
        out = []
        for j in range(self.n_qubits):
            bx, bz = (self.x >> j) & 1, (self.z >> j) & 1
            out.append("IZXY"[bx * 2 + bz])
        return tuple(out)

    @property
    def label(self) -> str:
        return " ".join(f"{op}{j}" for j, op in enumerate(self.ops) if op != "I")

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def commutes_with(self, other: PauliString) -> bool:
        _check_qubits(self.n_qubits, other.n_qubits)
        return (_popcount(self.x & other.z) + _popcount(self.z & other.x)) % 2 == 0

    def to_matrix(self) -> np.ndarray:
        """Dense matrix; qubit 0 is the least significant bit of the row index."""
        single = {
            "I": np.eye(2, dtype=complex),
            "X": np.array([[0, 1], [1, 0]], dtype=complex),
            "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
            "Z": np.array([[1, 0], [0, -1]], dtype=complex),
        }
        mat = np.ones((1, 1), dtype=complex)
        for op in self.ops:
            mat = np.kron(single[op], mat)
        return mat

    def __str__(self):
        return "".join(self.ops)

    def __repr__(self):
        return f"PauliString({''.join(self.ops)!r})"


def _check_qubits(a: int, b: int):
    if a != b:
        raise QubitMismatchError(f"qubit count mismatch: {a} vs {b}")


def pauli_mul(a: PauliString, b: PauliString) -> tuple[PauliString, complex]:
    """Return ``(s, phase)`` with ``a @ b == phase * s``."""
    _check_qubits(a.n_qubits, b.n_qubits)
    x, z = a.x ^ b.x, a.z ^ b.z
    k = (
        _popcount(a.x & a.z)
        + _popcount(b.x & b.z)
        - _popcount(x & z)
        + 2 * _popcount(a.z & b.x)
    ) % 4
    return PauliString(a.n_qubits, x, z), _PHASES[k]


def _prune(value: complex, floor: float) -> complex:
    re_, im = value.real, value.imag
    if abs(re_) < floor:
        re_ = 0.0
    if abs(im) < floor:
        im = 0.0
    return complex(re_, im)


class PauliPolynomial(Mapping):
    """Immutable linear combination of Pauli strings.

    Coefficients are complex. Real and imaginary parts below ``floor`` are
    dropped at construction, so a Hermitian operator ends up with purely
    real coefficients and an anti-Hermitian one with purely imaginary ones.
    """

    def __init__(
        self,
        n_qubits: int,
        terms: Mapping[PauliString, complex] | Iterable[tuple[PauliString, complex]] = (),
        floor: float = PRUNE_FLOOR,
    ):
        if n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[PauliString, complex] = {}
        for s, c in items:
            _check_qubits(n_qubits, s.n_qubits)
            acc[s] = acc.get(s, 0j) + complex(c)
        clean = {}
        for s in sorted(acc, key=lambda p: (p.weight, p.x, p.z)):
            c = _prune(acc[s], floor)
            if c != 0:
                clean[s] = c
        self._n = n_qubits
        self._terms = clean
        self._floor = floor
        self._cache: dict = {}

    @classmethod
    def from_labels(cls, n_qubits: int, terms: Mapping[str, complex] | Iterable[tuple[str, complex]]):
        items = terms.items() if isinstance(terms, Mapping) else terms
        return cls(n_qubits, [(PauliString.from_label(lbl, n_qubits), c) for lbl, c in items])

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0):
        return cls(n_qubits, {PauliString.identity(n_qubits): coeff})

    @property
    def n_qubits(self) -> int:
        return self._n

    @property
    def floor(self) -> float:
        return self._floor

    def __getitem__(self, key: PauliString) -> complex:
        return self._terms[key]

    def __iter__(self) -> Iterator[PauliString]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, PauliPolynomial):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self):
        return hash((self._n, tuple(self._terms.items())))

    def __repr__(self):
        body = ", ".join(f"{s.label or 'I'}: {c:.6g}" for s, c in self._terms.items())
        return f"PauliPolynomial({self._n}, {{{body}}})"

    def is_hermitian(self) -> bool:
        return all(c.imag == 0 for c in self._terms.values())

    def is_antihermitian(self) -> bool:
        return all(c.real == 0 for c in self._terms.values())

    @property
    def strings(self) -> list[PauliString]:
        return list(self._terms)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array(list(self._terms.values()), dtype=complex)

    def real_coefficients(self) -> np.ndarray:
        if not self.is_hermitian():
            raise ValueError("polynomial is not Hermitian")
        return self.coefficients.real

    @property
    def identity_coefficient(self) -> complex:
        return self._terms.get(PauliString.identity(self._n), 0j)

    def without_identity(self) -> PauliPolynomial:
        return PauliPolynomial(self._n, {s: c for s, c in self._terms.items() if not s.is_identity()})

    def masked(self, keep: Iterable[int]) -> PauliPolynomial:
        """Copy holding only the terms at the given positions."""
        strings = self.strings
        return PauliPolynomial(self._n, {strings[i]: self._terms[strings[i]] for i in keep})

    def canonical(self) -> PauliPolynomial:
        return PauliPolynomial(self._n, self._terms, self._floor)

    def scale(self, factor: complex) -> PauliPolynomial:
        return PauliPolynomial(self._n, {s: factor * c for s, c in self._terms.items()})

    def __add__(self, other: PauliPolynomial) -> PauliPolynomial:
        _check_qubits(self._n, other._n)
        return PauliPolynomial(self._n, list(self._terms.items()) + list(other._terms.items()))

    def __sub__(self, other: PauliPolynomial) -> PauliPolynomial:
        return self + other.scale(-1)

    def __mul__(self, other):
        if isinstance(other, PauliPolynomial):
            return poly_mul(self, other)
        return self.scale(other)

    __rmul__ = scale

    def __matmul__(self, other: PauliPolynomial) -> PauliPolynomial:
        return poly_mul(self, other)

    def adjoint(self) -> PauliPolynomial:
        return PauliPolynomial(self._n, {s: c.conjugate() for s, c in self._terms.items()})

    def squared(self) -> PauliPolynomial:
        """``self @ self``, cached since the variance path needs it repeatedly."""
        if "square" not in self._cache:
            self._cache["square"] = poly_mul(self, self)
        return self._cache["square"]

    def to_matrix(self) -> np.ndarray:
        dim = 1 << self._n
        out = np.zeros((dim, dim), dtype=complex)
        for s, c in self._terms.items():
            out += c * s.to_matrix()
        return out


def poly_mul(a: PauliPolynomial, b: PauliPolynomial) -> PauliPolynomial:
    _check_qubits(a.n_qubits, b.n_qubits)
    acc: dict[PauliString, complex] = {}
    for sa, ca in a.items():
        for sb, cb in b.items():
            s, ph = pauli_mul(sa, sb)
            acc[s] = acc.get(s, 0j) + ph * ca * cb
    return PauliPolynomial(a.n_qubits, acc, floor=min(a.floor, b.floor))


def frobenius_norm_sq(a: PauliPolynomial) -> float:
    """Sum of squared coefficient magnitudes, ``|c|^2``."""
    return float(sum(abs(c) ** 2 for c in a.values()))


def trace_of_square(a: PauliPolynomial) -> float:
    """``Tr[A^dagger A]`` via Pauli orthogonality: ``2**n * |c|^2``."""
    return (1 << a.n_qubits) * frobenius_norm_sq(a)
