"""Regenerate the shipped Hamiltonian fixtures.

Requires pyscf, which is not a runtime dependency of the package:

    pip install pyscf
    python tools/make_fixtures.py

Integrals come from a restricted Hartree-Fock run. Spin-orbitals are
interleaved (2p = alpha, 2p+1 = beta of spatial orbital p), qubit j is
spin-orbital j, and the Jordan-Wigner map is the one in ``vvqe.ucc``.
Each fixture is checked against pyscf's FCI/CASCI ground energy.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from pyscf import ao2mo, fci, gto, mcscf, scf

from vvqe.hamiltonian_io import dump_hamiltonian
from vvqe.oracle import spectrum
from vvqe.pauli import PauliPolynomial
from vvqe.ucc import annihilation, creation

OUT = Path(__file__).resolve().parent.parent / "src" / "vvqe" / "fixtures"
H2_BOND_LENGTHS = (0.5, 0.74, 0.8, 1.0, 1.5, 2.0)
H4_TRAPEZOID = ((0.0, 0.0, 0.0), (1.8, 0.0, 0.0), (0.3, 1.0, 0.0), (1.1, 1.0, 0.0))


def qubit_hamiltonian(h1: np.ndarray, eri: np.ndarray, constant: float) -> PauliPolynomial:
    """Second-quantized Hamiltonian from spatial integrals (chemist notation)."""
    norb = h1.shape[0]
    n = 2 * norb
    cr = [creation(j, n) for j in range(n)]
    an = [annihilation(j, n) for j in range(n)]
    acc = [(PauliPolynomial.identity(n), constant)]
    for p in range(norb):
        for q in range(norb):
            if abs(h1[p, q]) < 1e-14:
                continue
            for s in (0, 1):
                acc.append((cr[2 * p + s] @ an[2 * q + s], h1[p, q]))
    for p in range(norb):
        for q in range(norb):
            for r in range(norb):
                for t in range(norb):
                    v = eri[p, q, r, t]  # (pq|rt)
                    if abs(v) < 1e-14:
                        continue
                    for s1 in (0, 1):
                        for s2 in (0, 1):
                            a, b = 2 * p + s1, 2 * r + s2
                            c, d = 2 * t + s2, 2 * q + s1
                            if a == b or c == d:
                                continue
                            acc.append((cr[a] @ cr[b] @ an[c] @ an[d], 0.5 * v))
    terms: dict = {}
    for poly, coeff in acc:
        for s, c in poly.items():
            terms[s] = terms.get(s, 0j) + coeff * c
    return PauliPolynomial(n, terms)


def h2(bond: float):
    mol = gto.M(atom=f"H 0 0 0; H 0 0 {bond}", basis="sto-3g", verbose=0)
    mf = scf.RHF(mol).run()
    c = mf.mo_coeff
    h1 = c.T @ mf.get_hcore() @ c
    eri = mol.ao2mo(c, aosym=1).reshape((2,) * 4)
    ham = qubit_hamiltonian(h1, eri, mol.energy_nuc())
    e_fci = fci.FCI(mf).kernel()[0]
    e_q = spectrum(ham, particle_filter=2).values[0]
    assert abs(e_fci - e_q) < 1e-8, (e_fci, e_q)
    meta = {
        "molecule": "H2",
        "basis": "sto-3g",
        "bond_length": f"{bond:.2f}",
        "units": "angstrom",
        "n_electrons": "2",
        "hartree_fock_reference": "1100",
        "convention": "jordan-wigner; qubit j = spin-orbital j; 2p alpha, 2p+1 beta",
        "generator": "pyscf RHF integrals, tools/make_fixtures.py",
        "fci_energy": f"{e_fci:.12f}",
    }
    return ham, meta


def h4():
    atoms = "; ".join(f"H {x} {y} {z}" for x, y, z in H4_TRAPEZOID)
    mol = gto.M(atom=atoms, basis="sto-6g", verbose=0)
    mf = scf.RHF(mol).run()
    cas = mcscf.CASCI(mf, 3, 2)  # one frozen core orbital, top virtual dropped
    h1, ecore = cas.get_h1eff()
    eri = ao2mo.restore(1, cas.get_h2eff(), 3)
    ham = qubit_hamiltonian(h1, eri, ecore)
    e_cas = cas.kernel()[0]
    e_q = spectrum(ham, particle_filter=2).values[0]
    assert abs(e_cas - e_q) < 1e-8, (e_cas, e_q)
    meta = {
        "molecule": "H4",
        "basis": "sto-6g",
        "geometry": "trapezoid " + " ".join(f"({x},{y},{z})" for x, y, z in H4_TRAPEZOID),
        "units": "angstrom",
        "active_space": "3 spatial orbitals, 2 electrons, 1 frozen core orbital",
        "n_electrons": "2",
        "hartree_fock_reference": "110000",
        "convention": "jordan-wigner; qubit j = active spin-orbital j; 2p alpha, 2p+1 beta",
        "generator": "pyscf RHF + CASCI effective integrals, tools/make_fixtures.py",
        "casci_energy": f"{e_cas:.12f}",
    }
    return ham, meta


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for bond in H2_BOND_LENGTHS:
        ham, meta = h2(bond)
        (OUT / f"h2_sto3g_{bond:.2f}.txt").write_text(dump_hamiltonian(ham, meta))
        print(f"H2 {bond:.2f}: {len(ham)} terms")
    ham, meta = h4()
    (OUT / "h4_sto6g_trapezoid.txt").write_text(dump_hamiltonian(ham, meta))
    print(f"H4: {len(ham)} terms")


if __name__ == "__main__":
    main()
