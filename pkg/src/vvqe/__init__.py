"""Variance-minimizing variational eigensolver on a dense statevector simulator."""

from .hamiltonian_io import load_hamiltonian
from .oracle import eigenstate_residual, spectrum, to_dense
from .pauli import PauliPolynomial, PauliString, pauli_mul
from .solvers import (
    OptimizerConfig,
    OrthogonalSet,
    cost_mixed,
    cost_ssvqe,
    cost_variance_set,
    minimize,
    minimize_sgd,
    multi_start_survey,
)
from .statevector import StateVector, basis_state, expectation
from .ucc import build_ucc, default_doubles, default_singles, prepare_state
from .variance import covariance_matrix, draw_mask, energy, sampled_variance, variance

__all__ = [
    "OptimizerConfig",
    "OrthogonalSet",
    "PauliPolynomial",
    "PauliString",
    "StateVector",
    "basis_state",
    "build_ucc",
    "cost_mixed",
    "cost_ssvqe",
    "cost_variance_set",
    "covariance_matrix",
    "default_doubles",
    "default_singles",
    "draw_mask",
    "eigenstate_residual",
    "energy",
    "expectation",
    "load_hamiltonian",
    "minimize",
    "minimize_sgd",
    "multi_start_survey",
    "pauli_mul",
    "prepare_state",
    "sampled_variance",
    "spectrum",
    "to_dense",
    "variance",
]
