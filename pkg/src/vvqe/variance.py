"""Energy, energy variance, covariance matrix and their gradients.

All gradients are central finite differences. Parameter probes are batched
through :func:`vvqe.ucc.prepare_batch`, so one gradient costs one pass of
the circuit over ``2 * n_params`` parameter vectors.

Hamiltonian sampling draws from every stored term of ``H``, the identity
included; a kept identity term adds to ``|c_kept|^2`` but has zero
covariance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .pauli import PauliPolynomial, frobenius_norm_sq, pauli_mul
from .statevector import StateVector, compiled, expectation, pauli_gather
from .ucc import AnsatzCircuit, prepare_batch

FD_STEP = 1e-5


class NonFiniteCostError(ArithmeticError):
    pass


@dataclass
class CovarianceMatrix:
    entries: np.ndarray

    @property
    def n_terms(self) -> int:
        return self.entries.shape[0]

    def hermitian_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries).min())

    def quadratic_form(self, c) -> float:
        c = np.asarray(c, dtype=float)
        return float(c @ self.entries.real @ c)


@dataclass(frozen=True)
class SampleMask:
    n_terms: int
    kept: tuple[int, ...]
    rate: float
    seed: int | None = None

    @property
    def is_full(self) -> bool:
        return len(self.kept) == self.n_terms


def mask_size(n_terms: int, rate: float) -> int:
    return max(1, int(round(rate * n_terms)))


def draw_mask(n_terms: int, rate: float, rng: np.random.Generator | int | None = None) -> SampleMask:
    """Uniform subset of ``max(1, round(rate * n_terms))`` indices, without replacement."""
    if not 0 < rate <= 1:
        raise ValueError(f"sampling rate must lie in (0, 1], got {rate}")
    if n_terms < 1:
        raise ValueError("need at least one term to sample")
    seed = rng if isinstance(rng, int) else None
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    m = mask_size(n_terms, rate)
    kept = tuple(sorted(int(i) for i in rng.choice(n_terms, size=m, replace=False)))
    return SampleMask(n_terms, kept, rate, seed)


# -- batched kernels on raw amplitude arrays of shape (..., 2**n) -----------------


def energies_of(amps: np.ndarray, h: PauliPolynomial) -> np.ndarray:
    return compiled(h).expect(amps).real


def variances_of(amps: np.ndarray, h: PauliPolynomial) -> np.ndarray:
    second = compiled(h.squared()).expect(amps).real
    first = energies_of(amps, h)
    return second - first**2


def _masked_operator(h: PauliPolynomial, mask: SampleMask) -> tuple[PauliPolynomial, float]:
    if mask.n_terms != len(h):
        raise ValueError(f"mask covers {mask.n_terms} terms but the Hamiltonian has {len(h)}")
    if not mask.kept:
        raise ValueError("empty sample mask")
    sub = h.masked(mask.kept)
    kept_norm = frobenius_norm_sq(sub)
    if kept_norm == 0:
        raise ValueError("sampled coefficients are all zero")
    return sub, frobenius_norm_sq(h) / kept_norm


def sampled_variances_of(amps: np.ndarray, h: PauliPolynomial, mask: SampleMask) -> np.ndarray:
    """``(|c|^2/|c~|^2) c~^T Re(G) c~`` for every state in ``amps``.

    The quadratic form over the kept terms equals the variance of the
    partial Hamiltonian ``sum_kept c_i L_i``, evaluated here as
    ``||H~ psi||^2 - <H~>^2`` which touches only the kept terms.
    """
    sub, prefactor = _masked_operator(h, mask)
    op = compiled(sub)
    moved = op.apply(amps)
    second = np.einsum("...d,...d->...", moved.conj(), moved).real
    first = np.einsum("...d,...d->...", amps.conj(), moved).real
    return prefactor * (second - first**2)


# -- single-state API ---------------------------------------------------------


def energy(state: StateVector, h: PauliPolynomial) -> float:
    return expectation(state, h)


def variance(state: StateVector, h: PauliPolynomial) -> float:
    """``<H^2> - <H>^2`` from the cached ``H^2`` polynomial."""
    return expectation(state, h.squared()) - expectation(state, h) ** 2


def covariance_matrix(state: StateVector, h: PauliPolynomial) -> CovarianceMatrix:
    """``G_ij = <L_i L_j> - <L_i><L_j>`` over the terms of ``h`` in stored order."""
    strings = h.strings
    psi = state.amplitudes
    moved = []
    for s in strings:
        src, phase = pauli_gather(s)
        moved.append(phase * psi[src])
    means = np.array([np.vdot(psi, m) for m in moved]).real
    n = len(strings)
    g = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            prod, ph = pauli_mul(strings[i], strings[j])
            src, phase = pauli_gather(prod)
            g[i, j] = ph * np.vdot(psi, phase * psi[src]) - means[i] * means[j]
            if j != i:
                g[j, i] = np.conj(g[i, j])
    return CovarianceMatrix(g)


def sampled_variance(state: StateVector, h: PauliPolynomial, mask: SampleMask) -> float:
    return float(sampled_variances_of(state.amplitudes, h, mask))


def fd_gradient(batch_cost: Callable[[np.ndarray], np.ndarray], params, step: float = FD_STEP) -> np.ndarray:
    """Central differences of a cost that maps ``(B, K)`` parameters to ``(B,)`` values."""
    params = np.asarray(params, dtype=float)
    k = params.size
    shifts = step * np.eye(k)
    probes = np.concatenate([params + shifts, params - shifts])
    values = np.asarray(batch_cost(probes), dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonFiniteCostError("non-finite cost at a finite-difference probe")
    return (values[:k] - values[k:]) / (2 * step)


def _reference_amps(reference: StateVector) -> np.ndarray:
    return reference.amplitudes[None, :]


def variance_gradient(circuit: AnsatzCircuit, params, reference: StateVector, h: PauliPolynomial, step: float = FD_STEP) -> np.ndarray:
    refs = _reference_amps(reference)
    return fd_gradient(lambda p: variances_of(prepare_batch(circuit, p, refs)[:, 0], h), params, step)


def energy_gradient(circuit: AnsatzCircuit, params, reference: StateVector, h: PauliPolynomial, step: float = FD_STEP) -> np.ndarray:
    refs = _reference_amps(reference)
    return fd_gradient(lambda p: energies_of(prepare_batch(circuit, p, refs)[:, 0], h), params, step)


def sampled_variance_gradient(
    circuit: AnsatzCircuit,
    params,
    reference: StateVector,
    h: PauliPolynomial,
    mask: SampleMask,
    step: float = FD_STEP,
) -> np.ndarray:
    refs = _reference_amps(reference)
    return fd_gradient(lambda p: sampled_variances_of(prepare_batch(circuit, p, refs)[:, 0], h, mask), params, step)
