"""Cost functions over orthogonal reference sets and their optimizers."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .oracle import spectrum
from .pauli import PauliPolynomial
from .statevector import basis_state
from .ucc import AnsatzCircuit, prepare_batch
from .variance import (
    FD_STEP,
    draw_mask,
    energies_of,
    fd_gradient,
    sampled_variances_of,
    variances_of,
)

logger = logging.getLogger(__name__)

BatchCost = Callable[[np.ndarray], np.ndarray]


class WeightError(ValueError):
    pass


@dataclass
class OrthogonalSet:
    """Reference basis states sharing one circuit ``U(theta)``.

    ``weights`` defaults to ``1/k`` for every reference.
    """

    hamiltonian: PauliPolynomial
    circuit: AnsatzCircuit
    references: list[str]
    weights: np.ndarray | None = None

    def __post_init__(self):
        n = self.circuit.n_qubits
        if self.hamiltonian.n_qubits != n:
            raise ValueError("Hamiltonian and circuit act on different qubit counts")
        if not self.references:
            raise ValueError("need at least one reference state")
        if len(set(self.references)) != len(self.references):
            raise ValueError("reference bitstrings must be distinct (orthogonal)")
        self.ref_amps = np.array([basis_state(n, r).amplitudes for r in self.references])
        if self.weights is None:
            self.weights = np.full(self.k, 1.0 / self.k)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (self.k,):
            raise WeightError(f"expected {self.k} weights, got {self.weights.shape}")

    @property
    def k(self) -> int:
        return len(self.references)

    @property
    def n_params(self) -> int:
        return self.circuit.n_params

    def states(self, params: np.ndarray) -> np.ndarray:
        """Amplitudes of shape ``(B, k, 2**n)`` for a ``(B, n_params)`` batch."""
        return prepare_batch(self.circuit, params, self.ref_amps)

    def energies(self, params) -> np.ndarray:
        return energies_of(self.states(params)[0], self.hamiltonian)

    def variances(self, params) -> np.ndarray:
        return variances_of(self.states(params)[0], self.hamiltonian)

    def observe(self, params) -> tuple[np.ndarray, np.ndarray]:
        amps = self.states(params)[0]
        return energies_of(amps, self.hamiltonian), variances_of(amps, self.hamiltonian)

    def particle_numbers(self) -> list[int]:
        return [r.count("1") for r in self.references]


def check_decreasing(weights) -> None:
    w = np.asarray(weights, dtype=float)
    if np.any(w <= 0) or np.any(np.diff(w) >= 0):
        raise WeightError("subspace-search weights must be positive and strictly decreasing")


def ssvqe_weights(k: int) -> np.ndarray:
    """Strictly decreasing weights ``(k, k-1, ..., 1) / sum``."""
    w = np.arange(k, 0, -1, dtype=float)
    return w / w.sum()


# -- batched costs -----------------------------------------------------------------


def variance_set_batch(oset: OrthogonalSet) -> BatchCost:
    return lambda p: variances_of(oset.states(p), oset.hamiltonian) @ oset.weights


def ssvqe_batch(oset: OrthogonalSet) -> BatchCost:
    check_decreasing(oset.weights)
    return lambda p: energies_of(oset.states(p), oset.hamiltonian) @ oset.weights


def mixed_batch(oset: OrthogonalSet, eta_v: float) -> BatchCost:
    if eta_v < 0:
        raise ValueError("eta_v must be non-negative")

    def cost(p):
        amps = oset.states(p)
        e = energies_of(amps, oset.hamiltonian).sum(axis=-1)
        if eta_v == 0:
            return e
        return e + eta_v * variances_of(amps, oset.hamiltonian).sum(axis=-1)

    return cost


def sampled_variance_set_batch(oset: OrthogonalSet, mask) -> BatchCost:
    return lambda p: sampled_variances_of(oset.states(p), oset.hamiltonian, mask) @ oset.weights


def _scalar(batch: BatchCost, params) -> float:
    return float(batch(np.asarray(params, dtype=float)[None, :])[0])


def cost_variance_set(oset: OrthogonalSet, params) -> float:
    return _scalar(variance_set_batch(oset), params)


def cost_ssvqe(oset: OrthogonalSet, params) -> float:
    return _scalar(ssvqe_batch(oset), params)


def cost_mixed(oset: OrthogonalSet, params, eta_v: float) -> float:
    return _scalar(mixed_batch(oset, eta_v), params)


def gradient(batch: BatchCost, params, step: float = FD_STEP) -> np.ndarray:
    return fd_gradient(batch, params, step)


# -- optimizer -------------------------------------------------------------------------


@dataclass
class OptimizerConfig:
    learning_rate: float = 0.1
    max_iterations: int = 5000
    grad_tol: float = 1e-8
    cost_tol: float = 1e-12
    stall_window: int = 10
    fd_step: float = FD_STEP
    schedule: list[tuple[int, float]] = field(default_factory=lambda: [(0, 1.0)])
    seed: int = 0
    theta_every: int = 0
    method: str = "gd"

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")
        if self.method not in ("gd", "bfgs"):
            raise ValueError(f"unknown method {self.method!r}")
        self.schedule = [(int(t), float(s)) for t, s in self.schedule]
        starts = [t for t, _ in self.schedule]
        if not self.schedule or starts[0] != 0:
            raise ValueError("schedule must start at iteration 0")
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("schedule iterations must be strictly increasing")
        if any(not 0 < s <= 1 for _, s in self.schedule):
            raise ValueError("sampling rates must lie in (0, 1]")

    def rate_at(self, iteration: int) -> float:
        rate = self.schedule[0][1]
        for start, s in self.schedule:
            if iteration >= start:
                rate = s
        return rate


def parse_schedule(text: str) -> list[tuple[int, float]]:
    """``"0:0.1,1000:1.0"`` -> ``[(0, 0.1), (1000, 1.0)]``."""
    out = []
    for chunk in text.split(","):
        start, sep, rate = chunk.strip().partition(":")
        if not sep:
            raise ValueError(f"bad schedule entry {chunk!r}; expected start:rate")
        out.append((int(start), float(rate)))
    return out


@dataclass
class IterationRecord:
    iteration: int
    cost: float
    grad_norm: float
    rate: float = 1.0
    energies: np.ndarray | None = None
    variances: np.ndarray | None = None
    theta: np.ndarray | None = None


@dataclass
class Trajectory:
    records: list[IterationRecord]
    theta: np.ndarray
    status: str
    message: str = ""

    @property
    def costs(self) -> np.ndarray:
        return np.array([r.cost for r in self.records])

    @property
    def final(self) -> IterationRecord:
        return self.records[-1]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])


Observer = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def _record(t, cost, g, rate, theta, observe, config):
    e = v = None
    if observe is not None:
        e, v = observe(theta)
    snap = None
    if config.theta_every and t % config.theta_every == 0:
        snap = theta.copy()
    return IterationRecord(t, float(cost), float(np.linalg.norm(g)), rate, e, v, snap)


def minimize(
    cost: Callable[[np.ndarray], float],
    grad: Callable[[np.ndarray], np.ndarray],
    theta0,
    config: OptimizerConfig,
    observe: Observer | None = None,
    rate_for: Callable[[int], float] | None = None,
) -> Trajectory:
    """Fixed-step gradient descent ``theta <- theta - eta * grad``.

    Stops when the gradient norm drops below ``grad_tol``, when the cost
    moved less than ``cost_tol`` over the last ``stall_window`` iterations,
    or after ``max_iterations`` updates. ``grad`` may take the iteration
    index as a second argument (used by the sampled optimizer); convergence
    checks are skipped at iterations whose ``rate_for`` is below one.
    """
    if config.method == "bfgs":
        return _minimize_bfgs(cost, grad, theta0, config, observe)
    theta = np.array(theta0, dtype=float)
    records: list[IterationRecord] = []
    eta = config.learning_rate
    status, message = "max-iterations", ""
    for t in range(config.max_iterations + 1):
        rate = rate_for(t) if rate_for else 1.0
        try:
            c = cost(theta)
            g = grad(theta, t) if rate_for else grad(theta)
        except ArithmeticError as exc:
            status, message = "failed", str(exc)
            break
        if not (np.isfinite(c) and np.all(np.isfinite(g))):
            status, message = "failed", f"non-finite cost or gradient at iteration {t}"
            break
        records.append(_record(t, c, g, rate, theta, observe, config))
        if rate >= 1.0:
            if records[-1].grad_norm < config.grad_tol:
                status, message = "converged", "gradient norm below threshold"
                break
            w = config.stall_window
            if len(records) > w and records[-1 - w].rate >= 1.0:
                if abs(records[-1 - w].cost - c) < config.cost_tol:
                    status, message = "converged", "cost stalled"
                    break
        if t == config.max_iterations:
            break
        theta = theta - eta * g
    if records and records[-1].theta is None:
        records[-1].theta = theta.copy()
    return Trajectory(records, theta, status, message)


def _minimize_bfgs(cost, grad, theta0, config, observe) -> Trajectory:
    from scipy.optimize import minimize as sp_minimize

    records: list[IterationRecord] = []

    def callback(xk):
        records.append(_record(len(records), cost(xk), grad(xk), 1.0, xk, observe, config))

    x0 = np.array(theta0, dtype=float)
    callback(x0)
    res = sp_minimize(cost, x0, jac=grad, method="BFGS", callback=callback,
                      options={"gtol": config.grad_tol, "maxiter": config.max_iterations})
    theta = np.asarray(res.x, dtype=float)
    if not np.isfinite(res.fun):
        return Trajectory(records, theta, "failed", str(res.message))
    status = "converged" if res.success else "max-iterations"
    if records:
        records[-1].theta = theta.copy()
    return Trajectory(records, theta, status, str(res.message))


def minimize_set(oset: OrthogonalSet, batch: BatchCost, theta0, config: OptimizerConfig, record_states: bool = True) -> Trajectory:
    return minimize(
        lambda p: _scalar(batch, p),
        lambda p: fd_gradient(batch, p, config.fd_step),
        theta0,
        config,
        observe=oset.observe if record_states else None,
    )


def minimize_sgd(oset: OrthogonalSet, theta0, config: OptimizerConfig, rng: np.random.Generator | None = None) -> Trajectory:
    """Gradient descent on the equal-weight variance cost with Hamiltonian sampling.

    Each iteration draws a fresh mask at the scheduled rate; the finite
    differences of that iteration all use the same mask. A full mask falls
    back to the exact variance, so a schedule of ``[(0, 1.0)]`` reproduces
    :func:`minimize` exactly.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    n_terms = len(oset.hamiltonian)
    exact = variance_set_batch(oset)

    def grad(theta, t):
        mask = draw_mask(n_terms, config.rate_at(t), rng)
        batch = exact if mask.is_full else sampled_variance_set_batch(oset, mask)
        return fd_gradient(batch, theta, config.fd_step)

    return minimize(lambda p: _scalar(exact, p), grad, theta0, config,
                    observe=oset.observe, rate_for=config.rate_at)


# -- multi-start survey ------------------------------------------------------------


@dataclass
class SurveyRecord:
    start: int
    theta0: np.ndarray
    theta: np.ndarray
    variance: float
    energy: float
    eigen_index: int
    eigenvalue: float
    accepted: bool
    status: str
    trajectory: Trajectory | None = None


def multi_start_survey(
    hamiltonian: PauliPolynomial,
    circuit: AnsatzCircuit,
    reference: str,
    n_starts: int,
    rng: np.random.Generator,
    config: OptimizerConfig | None = None,
    threshold: float = 1e-8,
    keep_trajectories: bool = False,
) -> list[SurveyRecord]:
    """Variance minimization from uniform random starts in ``[0, 2 pi)^K``.

    Each minimum is tagged with the nearest eigenvalue of the particle
    sector of ``reference`` and accepted when its variance is below
    ``threshold``.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    config = config or OptimizerConfig()
    oset = OrthogonalSet(hamiltonian, circuit, [reference])
    levels = spectrum(hamiltonian, particle_filter=reference.count("1"))
    batch = variance_set_batch(oset)
    out = []
    for i in range(n_starts):
        theta0 = rng.uniform(0, 2 * np.pi, circuit.n_params)
        traj = minimize_set(oset, batch, theta0, config, record_states=keep_trajectories)
        e, v = oset.observe(traj.theta)
        k, lam = levels.nearest(float(e[0]))
        accepted = bool(v[0] < threshold) and traj.status != "failed"
        logger.info("start %d: variance %.3e energy %.8f (%s)", i, v[0], e[0], traj.status)
        out.append(SurveyRecord(i, theta0, traj.theta, float(v[0]), float(e[0]), k, lam,
                                accepted, traj.status, traj if keep_trajectories else None))
    return out
