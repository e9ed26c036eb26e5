"""Bundled molecular Hamiltonians (see tools/make_fixtures.py)."""

from pathlib import Path

FIXTURE_DIR = Path(__file__).resolve().parent

H2_BOND_LENGTHS = (0.5, 0.74, 0.8, 1.0, 1.5, 2.0)


def fixture_path(name: str) -> Path:
    path = FIXTURE_DIR / (name if name.endswith(".txt") else name + ".txt")
    if not path.exists():
        raise FileNotFoundError(f"no bundled fixture {name!r}")
    return path


def h2_path(bond_length: float) -> Path:
    return fixture_path(f"h2_sto3g_{bond_length:.2f}")


def h4_path() -> Path:
    return fixture_path("h4_sto6g_trapezoid")
