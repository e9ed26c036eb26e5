"""Plain-text Pauli Hamiltonian files.

Grammar, one item per line::

    # key: value          metadata header (optional, before or between terms)
    <coefficient>, <spec>  a term; spec is space-separated tokens such as
                           "X0 Z1 Y3", empty (or "I") for the identity

Blank lines are ignored. ``n_qubits`` comes from the ``n_qubits`` header
when present, otherwise from the largest qubit index in the file. Repeated
specs are rejected rather than merged.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .pauli import PauliPolynomial, PauliString


class HamiltonianFormatError(ValueError):
    def __init__(self, message: str, lineno: int | None = None, path=None):
        where = f"{path}:{lineno}: " if lineno is not None else ""
        super().__init__(where + message)
        self.lineno = lineno


@dataclass
class HamiltonianFile:
    hamiltonian: PauliPolynomial
    metadata: dict = field(default_factory=dict)

    @property
    def n_qubits(self) -> int:
        return self.hamiltonian.n_qubits

    @property
    def n_terms(self) -> int:
        return len(self.hamiltonian)


def _parse_coefficient(text: str, lineno: int, path) -> float:
    text = text.strip()
    try:
        value = float(text)
    except ValueError:
        try:
            value = complex(text.replace(" ", ""))
        except ValueError:
            raise HamiltonianFormatError(f"cannot parse coefficient {text!r}", lineno, path) from None
        if value.imag != 0:
            raise HamiltonianFormatError(f"non-real coefficient {text!r}", lineno, path)
        value = value.real
    return value


def parse_hamiltonian(text: str, path=None) -> HamiltonianFile:
    metadata: dict = {}
    raw: list[tuple[int, float, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if sep:
                metadata[key.strip()] = value.strip()
            continue
        coeff, sep, spec = line.partition(",")
        if not sep:
            raise HamiltonianFormatError("expected '<coefficient>, <pauli spec>'", lineno, path)
        spec = spec.strip()
        if spec == "I":
            spec = ""
        raw.append((lineno, _parse_coefficient(coeff, lineno, path), spec))
    if not raw:
        raise HamiltonianFormatError("no Hamiltonian terms found", None, path)

    max_index, max_line = -1, None
    for lineno, _, spec in raw:
        for token in spec.split():
            try:
                index = int(token[1:])
            except ValueError:
                raise HamiltonianFormatError(f"bad Pauli token {token!r}", lineno, path) from None
            if index > max_index:
                max_index, max_line = index, lineno
    if "n_qubits" in metadata:
        n_qubits = int(metadata["n_qubits"])
        if max_index >= n_qubits:
            raise HamiltonianFormatError(f"qubit index {max_index} exceeds n_qubits={n_qubits}", max_line, path)
    else:
        n_qubits = max(max_index + 1, 1)

    terms: dict[PauliString, float] = {}
    for lineno, coeff, spec in raw:
        try:
            s = PauliString.from_label(spec, n_qubits)
        except ValueError as exc:
            raise HamiltonianFormatError(str(exc), lineno, path) from None
        if s in terms:
            raise HamiltonianFormatError(f"duplicate term {spec or 'I'!r}", lineno, path)
        terms[s] = coeff
    metadata["n_qubits"] = str(n_qubits)
    return HamiltonianFile(PauliPolynomial(n_qubits, terms), metadata)


def load_hamiltonian(path) -> HamiltonianFile:
    path = Path(path)
    return parse_hamiltonian(path.read_text(), path)


def dump_hamiltonian(ham: PauliPolynomial, metadata: dict | None = None) -> str:
    if not ham.is_hermitian():
        raise ValueError("only Hermitian polynomials can be serialized")
    meta = dict(metadata or {})
    meta["n_qubits"] = str(ham.n_qubits)
    lines = [f"# {k}: {v}" for k, v in meta.items()]
    for s, c in ham.items():
        lines.append(f"{c.real!r}, {s.label}".rstrip())
    return "\n".join(lines) + "\n"


def write_atomic(path, text: str):
    """Write via a temp file in the same directory and rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
