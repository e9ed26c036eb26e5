"""Jordan-Wigner excitation generators and Trotterized UCC circuits.

Qubit ``j`` is spin-orbital ``j``. The annihilation operator is
``a_j = Z_0 ... Z_{j-1} (X_j + i Y_j) / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .pauli import PauliPolynomial, PauliString
from .statevector import StateVector, pauli_gather


def _ladder(j: int, n_qubits: int, dagger: bool) -> PauliPolynomial:
    zs = (1 << j) - 1
    x_part = PauliString(n_qubits, 1 << j, zs)
    y_part = PauliString(n_qubits, 1 << j, zs | (1 << j))
    sign = -1j if dagger else 1j
    return PauliPolynomial(n_qubits, {x_part: 0.5, y_part: 0.5 * sign})


def creation(j: int, n_qubits: int) -> PauliPolynomial:
    return _ladder(j, n_qubits, True)


def annihilation(j: int, n_qubits: int) -> PauliPolynomial:
    return _ladder(j, n_qubits, False)


def _product(factors: Sequence[PauliPolynomial]) -> PauliPolynomial:
    out = factors[0]
    for f in factors[1:]:
        out = out @ f
    return out


def _check_orbitals(orbitals: Sequence[int], n_qubits: int):
    if len(set(orbitals)) != len(orbitals):
        raise ValueError(f"orbital indices must be distinct: {tuple(orbitals)}")
    if any(o < 0 or o >= n_qubits for o in orbitals):
        raise ValueError(f"orbital index out of range for {n_qubits} qubits: {tuple(orbitals)}")


def jw_single(p: int, q: int, n_qubits: int) -> PauliPolynomial:
    """``a_p^dag a_q - a_q^dag a_p`` (anti-Hermitian, two Pauli terms)."""
    _check_orbitals((p, q), n_qubits)
    fwd = creation(p, n_qubits) @ annihilation(q, n_qubits)
    return fwd - fwd.adjoint()


def jw_double(p: int, q: int, r: int, s: int, n_qubits: int) -> PauliPolynomial:
    """``a_p^dag a_q^dag a_r a_s - a_s^dag a_r^dag a_p a_q`` (eight Pauli terms)."""
    _check_orbitals((p, q, r, s), n_qubits)
    fwd = _product([
        creation(p, n_qubits),
        creation(q, n_qubits),
        annihilation(r, n_qubits),
        annihilation(s, n_qubits),
    ])
    return fwd - fwd.adjoint()


@dataclass(frozen=True)
class ExcitationTerm:
    kind: str
    orbitals: tuple[int, ...]
    param_index: int

    def generator(self, n_qubits: int) -> PauliPolynomial:
        if self.kind == "single":
            return jw_single(*self.orbitals, n_qubits)
        return jw_double(*self.orbitals, n_qubits)


@dataclass(frozen=True)
class Gate:
    string: PauliString
    coefficient: float
    param_index: int

    def angle(self, params) -> float:
        return -2.0 * self.coefficient * params[self.param_index]


@dataclass
class AnsatzCircuit:
    """Gates in application order.

    Gate ``g`` applies ``exp(-i/2 * angle * P)`` with ``angle =
    -2 * coefficient * params[param_index]``, which equals
    ``exp(params[k] * i * coefficient * P)``.
    """

    n_qubits: int
    gates: list[Gate]
    n_params: int
    trotter_steps: int = 1
    excitations: list[ExcitationTerm] = field(default_factory=list)
    _arrays: tuple | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        for g in self.gates:
            if g.string.n_qubits != self.n_qubits:
                raise ValueError("gate qubit count does not match circuit")
            if not 0 <= g.param_index < self.n_params:
                raise ValueError(f"param_index {g.param_index} outside [0, {self.n_params})")

    def arrays(self):
        if self._arrays is None:
            gathers = [pauli_gather(g.string) for g in self.gates]
            dim = 1 << self.n_qubits
            src = np.array([s for s, _ in gathers], dtype=np.int64).reshape(-1, dim)
            phase = np.array([p for _, p in gathers], dtype=complex).reshape(-1, dim)
            coeff = np.array([g.coefficient for g in self.gates], dtype=float)
            pidx = np.array([g.param_index for g in self.gates], dtype=np.int64)
            self._arrays = (src, phase, coeff, pidx)
        return self._arrays


def default_singles(n_qubits: int) -> list[tuple[int, int]]:
    """Every spin-orbital pair ``(q, p)`` with ``q < p``, exciting ``p <- q``."""
    return [(p, q) for q, p in combinations(range(n_qubits), 2)]


def default_doubles(n_qubits: int, occupied: Sequence[int] | None = None) -> list[tuple[int, int, int, int]]:
    """Double excitations ``(p, q, r, s)`` meaning ``a_p^dag a_q^dag a_r a_s``.

    With ``occupied`` given, only occupied pairs to empty pairs. Otherwise
    every unordered split of two disjoint orbital pairs, exciting the lower
    pair into the higher one.
    """
    out = []
    if occupied is not None:
        occ = sorted(occupied)
        virt = [j for j in range(n_qubits) if j not in occ]
        for r, s in combinations(occ, 2):
            for p, q in combinations(virt, 2):
                out.append((q, p, r, s))
        return out
    pairs = list(combinations(range(n_qubits), 2))
    for a, b in combinations(pairs, 2):
        if set(a) & set(b):
            continue
        lo, hi = sorted((a, b))
        out.append((hi[1], hi[0], lo[1], lo[0]))
    return out


def build_ucc(
    singles: Sequence[tuple[int, int]],
    doubles: Sequence[tuple[int, int, int, int]],
    trotter_steps: int,
    n_qubits: int,
    independent_steps: bool = False,
) -> AnsatzCircuit:
    """Trotterized UCC circuit.

    The unitary of one step is ``prod_singles exp(t) prod_doubles exp(t)``
    written left to right in list order, so the last double acts on the
    reference first. With shared parameters each step uses ``theta / k``;
    ``independent_steps`` gives every step its own parameters instead.
    """
    if trotter_steps < 1:
        raise ValueError("trotter_steps must be >= 1")
    terms = [("single", tuple(t)) for t in singles] + [("double", tuple(t)) for t in doubles]
    for kind, orbs in terms:
        expect = 2 if kind == "single" else 4
        if len(orbs) != expect:
            raise ValueError(f"{kind} excitation needs {expect} orbitals, got {orbs}")
        _check_orbitals(orbs, n_qubits)
    n_terms = len(terms)
    n_params = n_terms * (trotter_steps if independent_steps else 1)
    scale = 1.0 if independent_steps else 1.0 / trotter_steps

    generators = [ExcitationTerm(kind, orbs, 0).generator(n_qubits) for kind, orbs in terms]
    excitations = []
    gates: list[Gate] = []
    for step in range(trotter_steps):
        offset = step * n_terms if independent_steps else 0
        step_gates = []
        for t, ((kind, orbs), gen) in enumerate(zip(terms, generators)):
            if step == 0 or independent_steps:
                excitations.append(ExcitationTerm(kind, orbs, offset + t))
            for s, c in gen.items():
                step_gates.append(Gate(s, scale * c.imag, offset + t))
        # operator product is written left to right; the rightmost acts first
        gates.extend(_reverse_terms(step_gates))
    return AnsatzCircuit(n_qubits, gates, n_params, trotter_steps, excitations)


def _reverse_terms(step_gates: list[Gate]) -> list[Gate]:
    # gates inside one excitation commute, so only the term order is reversed
    blocks: list[list[Gate]] = []
    for g in step_gates:
        if blocks and blocks[-1][0].param_index == g.param_index:
            blocks[-1].append(g)
        else:
            blocks.append([g])
    return [g for block in reversed(blocks) for g in block]


def prepare_batch(circuit: AnsatzCircuit, params: np.ndarray, references: np.ndarray) -> np.ndarray:
    """Apply ``U(params)`` to every reference for a batch of parameter vectors.

    ``params`` has shape ``(B, n_params)`` and ``references`` ``(R, 2**n)``;
    the result has shape ``(B, R, 2**n)``.
    """
    params = np.atleast_2d(np.asarray(params, dtype=float))
    if params.shape[1] != circuit.n_params:
        raise ValueError(f"expected {circuit.n_params} parameters, got {params.shape[1]}")
    refs = np.asarray(references, dtype=complex)
    amps = np.broadcast_to(refs, (params.shape[0],) + refs.shape).copy()
    if not circuit.gates:
        return amps
    src, phase, coeff, pidx = circuit.arrays()
    half = -coeff[None, :] * params[:, pidx]  # angle / 2 per (batch, gate)
    cos, sin = np.cos(half), np.sin(half)
    for g in range(len(coeff)):
        moved = phase[g] * amps[..., src[g]]
        amps = cos[:, g, None, None] * amps - 1j * sin[:, g, None, None] * moved
    return amps


def prepare_state(circuit: AnsatzCircuit, params, reference: StateVector) -> StateVector:
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.n_params,):
        raise ValueError(f"expected {circuit.n_params} parameters, got shape {params.shape}")
    if reference.n_qubits != circuit.n_qubits:
        raise ValueError("reference qubit count does not match circuit")
    amps = prepare_batch(circuit, params[None, :], reference.amplitudes[None, :])
    return StateVector(circuit.n_qubits, amps[0, 0])
