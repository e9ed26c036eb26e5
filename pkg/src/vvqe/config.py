"""Declarative experiment configuration (YAML or JSON documents)."""

from __future__ import annotations

from pathlib import Path
from typing import Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .solvers import OptimizerConfig, parse_schedule

MODES = ("spectrum", "survey", "ortho", "ssvqe", "mixed", "sgd", "mds")
MODE_ALIASES = {"ortho-variance": "ortho"}


class ConfigError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class AnsatzSpec(_Strict):
    singles: Union[Literal["default"], list[tuple[int, int]]] = "default"
    doubles: Union[Literal["default"], list[tuple[int, int, int, int]]] = "default"
    # occupied spin-orbitals for the default doubles; None means all pair partitions
    occupied: Optional[list[int]] = None
    trotter_steps: int = Field(1, ge=1)
    independent_steps: bool = False


class OptimizerSpec(_Strict):
    learning_rate: float = Field(0.1, gt=0)
    max_iterations: int = Field(5000, ge=0)
    grad_tol: float = Field(1e-8, ge=0)
    cost_tol: float = Field(1e-12, ge=0)
    stall_window: int = Field(10, ge=1)
    fd_step: float = Field(1e-5, gt=0)
    method: Literal["gd", "bfgs"] = "gd"
    schedule: Union[str, list[tuple[int, float]]] = [(0, 1.0)]
    theta_every: int = Field(0, ge=0)

    @field_validator("schedule")
    @classmethod
    def _schedule(cls, v):
        v = parse_schedule(v) if isinstance(v, str) else v
        OptimizerConfig(schedule=v)  # same checks as the optimizer itself
        return v

    def build(self, seed: int) -> OptimizerConfig:
        return OptimizerConfig(
            learning_rate=self.learning_rate,
            max_iterations=self.max_iterations,
            grad_tol=self.grad_tol,
            cost_tol=self.cost_tol,
            stall_window=self.stall_window,
            fd_step=self.fd_step,
            schedule=list(self.schedule),
            seed=seed,
            theta_every=self.theta_every,
            method=self.method,
        )


class ExperimentConfig(_Strict):
    mode: str
    hamiltonian: Optional[Path] = None
    seed: int = 0
    out: Optional[Path] = None
    ansatz: AnsatzSpec = AnsatzSpec()
    optimizer: OptimizerSpec = OptimizerSpec()
    references: list[str] = []
    weights: Optional[list[float]] = None
    eta_v: Optional[float] = Field(None, ge=0)
    theta0: Optional[list[float]] = None
    # survey / mds
    n_starts: int = Field(20, ge=1)
    threshold: float = Field(1e-8, gt=0)
    # spectrum; defaults to the fixture's electron count
    particle_number: Optional[int] = None
    # ssvqe: also run the equal-weight variance cost from the same start
    compare_variance: bool = True

    @field_validator("mode")
    @classmethod
    def _mode(cls, v):
        v = MODE_ALIASES.get(v, v)
        if v not in MODES:
            raise ValueError(f"unknown mode {v!r}; expected one of {', '.join(MODES)}")
        return v

    @field_validator("references")
    @classmethod
    def _bits(cls, refs):
        for r in refs:
            if not r or set(r) - {"0", "1"}:
                raise ValueError(f"reference {r!r} is not a bitstring")
        return refs

    @model_validator(mode="after")
    def _mode_fields(self):
        m = self.mode
        if m in ("survey", "mds") and len(self.references) > 1:
            raise ValueError(f"{m} mode takes a single reference")
        if m in ("ortho", "ssvqe", "mixed", "sgd") and not self.references:
            raise ValueError(f"{m} mode needs at least one reference")
        if m == "mixed" and self.eta_v is None:
            raise ValueError("mixed mode needs eta_v")
        if self.weights is not None and len(self.weights) != len(self.references):
            raise ValueError("weights and references differ in length")
        if len({len(r) for r in self.references}) > 1:
            raise ValueError("references have different lengths")
        return self


def parse_config(data: dict) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at top level")
    if data.get("hamiltonian") is not None:
        data["hamiltonian"] = path.parent / data["hamiltonian"]
    return parse_config(data)
