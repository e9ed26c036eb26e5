"""Experiment orchestration: build the problem from a config, run it, write artifacts.

Every mode writes ``summary.json``. Optimizing modes also write a wide
``trajectory.csv``; ``survey`` writes ``runs.csv`` and ``mds`` writes
``points.csv``. Files are written atomically and the JSON carries no
timestamps, so a repeated run with the same config and seed reproduces
it byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ConfigError, ExperimentConfig
from .fixtures import FIXTURE_DIR
from .hamiltonian_io import HamiltonianFile, HamiltonianFormatError, load_hamiltonian, write_atomic
from .mds import mds_embed
from .oracle import MAX_QUBITS, spectrum
from .solvers import (
    OrthogonalSet,
    Trajectory,
    WeightError,
    minimize_set,
    minimize_sgd,
    mixed_batch,
    multi_start_survey,
    ssvqe_batch,
    ssvqe_weights,
    variance_set_batch,
)
from .ucc import build_ucc, default_doubles, default_singles

logger = logging.getLogger(__name__)


@dataclass
class RunResult:
    summary: dict
    files: list[Path] = field(default_factory=list)
    failed: bool = False


def resolve_hamiltonian(path) -> Path:
    """Existing paths win; otherwise fall back to a bundled fixture of that name."""
    path = Path(path)
    if path.exists():
        return path
    bundled = FIXTURE_DIR / path.name
    if bundled.exists():
        return bundled
    raise ConfigError(f"Hamiltonian file not found: {path}")


def load_problem(cfg: ExperimentConfig) -> HamiltonianFile:
    if cfg.hamiltonian is None:
        raise ConfigError("no Hamiltonian given (config 'hamiltonian' or --hamiltonian)")
    try:
        ham = load_hamiltonian(resolve_hamiltonian(cfg.hamiltonian))
    except HamiltonianFormatError as exc:
        raise ConfigError(str(exc)) from None
    if not cfg.references and cfg.mode in ("survey", "mds"):
        hf = ham.metadata.get("hartree_fock_reference")
        if hf is None:
            raise ConfigError(f"{cfg.mode} mode needs a reference and the Hamiltonian file names none")
        cfg.references = [hf]
    for r in cfg.references:
        if len(r) != ham.n_qubits:
            raise ConfigError(f"reference {r!r} does not match {ham.n_qubits} qubits")
    return ham


def build_circuit(cfg: ExperimentConfig, n_qubits: int):
    spec = cfg.ansatz
    singles = default_singles(n_qubits) if spec.singles == "default" else spec.singles
    doubles = default_doubles(n_qubits, spec.occupied) if spec.doubles == "default" else spec.doubles
    try:
        return build_ucc(singles, doubles, spec.trotter_steps, n_qubits, spec.independent_steps)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def initial_theta(cfg: ExperimentConfig, n_params: int) -> np.ndarray:
    if cfg.theta0 is not None:
        if len(cfg.theta0) != n_params:
            raise ConfigError(f"theta0 has {len(cfg.theta0)} entries, the ansatz has {n_params}")
        return np.array(cfg.theta0, dtype=float)
    return np.random.default_rng(cfg.seed).uniform(0, 2 * np.pi, n_params)


# -- serialization ---------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, Path):
        return x.name
    return x


def dumps_summary(summary: dict) -> str:
    return json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n"


def trajectory_csv(traj: Trajectory) -> str:
    k = 0 if traj.records[0].energies is None else len(traj.records[0].energies)
    header = ["iteration", "cost"] + [f"E_{n}" for n in range(k)] + [f"var_{n}" for n in range(k)]
    header += ["s", "grad_norm"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in traj.records:
        row = [r.iteration, repr(r.cost)]
        if k:
            row += [repr(float(e)) for e in r.energies] + [repr(float(v)) for v in r.variances]
        w.writerow(row + [repr(r.rate), repr(r.grad_norm)])
    return buf.getvalue()


def _table(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# -- oracle comparison -------------------------------------------------------------


def oracle_comparison(ham: HamiltonianFile, references, energies) -> dict | None:
    if ham.n_qubits > MAX_QUBITS:
        return None
    sectors = {}
    states = []
    for ref, e in zip(references, energies):
        n = ref.count("1")
        if n not in sectors:
            sectors[n] = spectrum(ham.hamiltonian, particle_filter=n)
        idx, lam = sectors[n].nearest(float(e))
        states.append({"reference": ref, "eigen_index": idx, "eigenvalue": lam, "error": abs(float(e) - lam)})
    return {
        "sectors": {str(n): s.values for n, s in sorted(sectors.items())},
        "states": states,
        "max_error": max(s["error"] for s in states),
    }


def _trajectory_summary(traj: Trajectory, oset: OrthogonalSet, ham: HamiltonianFile) -> dict:
    e, v = oset.observe(traj.theta)
    return {
        "status": traj.status,
        "message": traj.message,
        "iterations": traj.final.iteration,
        "final_cost": traj.final.cost,
        "theta": traj.theta,
        "references": oset.references,
        "weights": oset.weights,
        "energies": e,
        "variances": v,
        "oracle": oracle_comparison(ham, oset.references, e),
    }


# -- modes -----------------------------------------------------------------------------


def _run_spectrum(cfg, ham, out):
    n = cfg.particle_number
    if n is None and "n_electrons" in ham.metadata:
        n = int(ham.metadata["n_electrons"])
    full = spectrum(ham.hamiltonian)
    summary = {"eigenvalues": full.values}
    if n is not None:
        summary["particle_number"] = n
        summary["sector_eigenvalues"] = spectrum(ham.hamiltonian, particle_filter=n).values
    return RunResult(summary)


def _run_survey(cfg, ham, out, embed=False):
    circuit = build_circuit(cfg, ham.n_qubits)
    records = multi_start_survey(
        ham.hamiltonian,
        circuit,
        cfg.references[0],
        cfg.n_starts,
        np.random.default_rng(cfg.seed),
        cfg.optimizer.build(cfg.seed),
        threshold=cfg.threshold,
    )
    rows = [
        [r.start, repr(r.energy), repr(r.variance), r.eigen_index, repr(r.eigenvalue), int(r.accepted), r.status]
        for r in records
    ]
    files = [out / "runs.csv"]
    write_atomic(files[0], _table(["start", "energy", "variance", "eigen_index", "eigenvalue", "accepted", "status"], rows))
    accepted = [r for r in records if r.accepted]
    summary = {
        "reference": cfg.references[0],
        "n_starts": len(records),
        "n_accepted": len(accepted),
        "threshold": cfg.threshold,
        "max_accepted_energy_error": max((abs(r.energy - r.eigenvalue) for r in accepted), default=None),
        "eigenvalues_found": sorted({r.eigen_index for r in accepted}),
        "runs": [
            {"start": r.start, "energy": r.energy, "variance": r.variance, "eigen_index": r.eigen_index,
             "accepted": r.accepted, "status": r.status, "theta": r.theta}
            for r in records
        ],
    }
    failed = any(r.status == "failed" for r in records)
    if embed:
        if len(accepted) < 3:
            summary["mds"] = {"error": f"only {len(accepted)} accepted minima; need 3 to embed"}
            return RunResult(summary, files, True)
        emb = mds_embed([r.theta for r in accepted])
        pts = [[r.start, repr(float(x)), repr(float(y)), r.eigen_index, repr(r.energy)]
               for r, (x, y) in zip(accepted, emb.points)]
        files.append(out / "points.csv")
        write_atomic(files[-1], _table(["start", "x", "y", "eigen_index", "energy"], pts))
        summary["mds"] = {"eigenvalues": emb.eigenvalues, "degenerate": emb.degenerate}
    return RunResult(summary, files, failed)


def _orthogonal_set(cfg, ham, weights=None):
    circuit = build_circuit(cfg, ham.n_qubits)
    try:
        return OrthogonalSet(ham.hamiltonian, circuit, list(cfg.references), weights)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _run_optimizer(cfg, ham, out):
    weights = cfg.weights
    if cfg.mode == "ssvqe" and weights is None:
        weights = ssvqe_weights(len(cfg.references))
    oset = _orthogonal_set(cfg, ham, weights)
    config = cfg.optimizer.build(cfg.seed)
    theta0 = initial_theta(cfg, oset.n_params)
    try:
        if cfg.mode == "ortho":
            traj = minimize_set(oset, variance_set_batch(oset), theta0, config)
        elif cfg.mode == "ssvqe":
            traj = minimize_set(oset, ssvqe_batch(oset), theta0, config)
        elif cfg.mode == "mixed":
            traj = minimize_set(oset, mixed_batch(oset, cfg.eta_v), theta0, config)
        else:
            traj = minimize_sgd(oset, theta0, config, np.random.default_rng(cfg.seed))
    except WeightError as exc:
        raise ConfigError(str(exc)) from None
    summary = _trajectory_summary(traj, oset, ham)
    summary["theta0"] = theta0
    if cfg.mode == "mixed":
        summary["eta_v"] = cfg.eta_v
    if cfg.mode == "sgd":
        summary["schedule"] = config.schedule
    if cfg.mode == "ssvqe":
        e = summary["energies"]
        summary["ordered"] = bool(np.all(np.diff(e) >= -1e-8))
        if cfg.compare_variance:
            plain = _orthogonal_set(cfg, ham)
            other = minimize_set(plain, variance_set_batch(plain), theta0, config, record_states=False)
            summary["equal_weight_variance"] = _trajectory_summary(other, plain, ham)
    files = [out / "trajectory.csv"]
    write_atomic(files[0], trajectory_csv(traj))
    return RunResult(summary, files, traj.status == "failed")


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> RunResult:
    """Run one experiment and write its artifacts into ``out_dir``.

    Raises :class:`ConfigError` before any computation when the inputs are
    inconsistent. Solver failures still write artifacts and are reported
    through ``RunResult.failed``.
    """
    out = Path(out_dir or cfg.out or ".")
    ham = load_problem(cfg)
    logger.info("%s: %d qubits, %d terms", cfg.mode, ham.n_qubits, ham.n_terms)
    if cfg.mode == "spectrum":
        result = _run_spectrum(cfg, ham, out)
    elif cfg.mode in ("survey", "mds"):
        result = _run_survey(cfg, ham, out, embed=cfg.mode == "mds")
    else:
        result = _run_optimizer(cfg, ham, out)
    summary = {
        "mode": cfg.mode,
        "seed": cfg.seed,
        "hamiltonian": {"file": Path(cfg.hamiltonian).name, "n_qubits": ham.n_qubits,
                        "n_terms": ham.n_terms, "metadata": ham.metadata},
        **result.summary,
    }
    result.summary = summary
    path = out / "summary.json"
    write_atomic(path, dumps_summary(summary))
    result.files.append(path)
    return result
