"""FCIDUMP parsing, Hamiltonian assembly, and FCI ground states."""

import numpy as np
import pytest

from spinadapt.fermiops import s_squared_operator, to_matrix
from spinadapt.fock import SymmetrySector, aufbau_reference, enumerate_basis
from spinadapt.hamiltonian import (
    DENSE_CAP,
    FcidumpError,
    MolecularHamiltonian,
    build_hamiltonian,
    fci_ground,
    hamiltonian_opsum,
    parse_fcidump,
)

# Full-CI ground-state energies of the bundled systems, frozen from dense
# diagonalization of the parsed integrals (hartree).
H2_FCI = -1.145921738067238
H6_FCI = -2.8740730927326648


def test_parse_h2_header(h2_fcidump):
    ham = parse_fcidump(h2_fcidump)
    assert ham.n_spatial == 2
    assert ham.n_elec == 2
    assert ham.ms2 == 0
    assert ham.orb_irreps == (0, 4)  # sigma_g, sigma_u
    assert ham.e_core > 0  # nuclear repulsion
    assert ham.h1.shape == (2, 2)
    assert ham.h2.shape == (2, 2, 2, 2)


def test_parse_h6_header(h6_fcidump):
    ham = parse_fcidump(h6_fcidump)
    assert ham.n_spatial == 6
    assert ham.n_elec == 6
    assert ham.orb_irreps == (0, 4, 0, 4, 0, 4)


def test_eightfold_symmetry_restored(h6_fcidump):
    ham = parse_fcidump(h6_fcidump)
    g = ham.h2
    assert np.allclose(g, g.transpose(1, 0, 2, 3))  # (PQ|RS) = (QP|RS)
    assert np.allclose(g, g.transpose(0, 1, 3, 2))  # (PQ|RS) = (PQ|SR)
    assert np.allclose(g, g.transpose(2, 3, 0, 1))  # (PQ|RS) = (RS|PQ)
    assert np.allclose(ham.h1, ham.h1.T)


def test_parse_errors_carry_line_numbers(tmp_path):
    bad = tmp_path / "bad.fcidump"
    bad.write_text("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n1.0 3 1 0 0\n")
    with pytest.raises(FcidumpError, match="line 3"):
        parse_fcidump(str(bad))
    bad.write_text("&FCI NORB=2,NELEC=2,MS2=0,\n&END\nnot_a_number 1 1 0 0\n")
    with pytest.raises(FcidumpError, match="line 3"):
        parse_fcidump(str(bad))
    bad.write_text("no header here\n")
    with pytest.raises(FcidumpError, match="&FCI"):
        parse_fcidump(str(bad))
    bad.write_text("&FCI NORB=2,MS2=0,\n&END\n")
    with pytest.raises(FcidumpError, match="NELEC"):
        parse_fcidump(str(bad))
    bad.write_text("&FCI NORB=2,NELEC=2,ORBSYM=1,5,7,\n&END\n")
    with pytest.raises(FcidumpError, match="ORBSYM"):
        parse_fcidump(str(bad))


def test_h1_symmetry_enforced():
    with pytest.raises(ValueError, match="symmetric"):
        MolecularHamiltonian(
            n_spatial=2,
            n_elec=2,
            ms2=0,
            e_core=0.0,
            h1=np.array([[0.0, 1.0], [0.0, 0.0]]),
            h2=np.zeros((2, 2, 2, 2)),
            orb_irreps=(0, 0),
        )


def test_hamiltonian_matrix_hermitian_and_spin_free(h2_fcidump):
    ham = parse_fcidump(h2_fcidump)
    basis = enumerate_basis(2, SymmetrySector(n=2, sz=0.0))
    H = build_hamiltonian(ham, basis)
    assert np.allclose(H, H.T, atol=1e-12)
    s2 = to_matrix(s_squared_operator(2), basis).toarray()
    assert np.linalg.norm(H @ s2 - s2 @ H) < 1e-10


def test_h2_fci_energy(h2_fcidump):
    ham = parse_fcidump(h2_fcidump)
    basis = enumerate_basis(2, SymmetrySector(n=2, sz=0.0))
    energy, vec = fci_ground(build_hamiltonian(ham, basis))
    assert abs(energy - H2_FCI) < 1e-12
    assert np.isclose(np.linalg.norm(vec), 1.0)


def test_h6_fci_energy(h6_fcidump):
    ham = parse_fcidump(h6_fcidump)
    basis = enumerate_basis(6, SymmetrySector(n=6, sz=0.0))
    energy, vec = fci_ground(build_hamiltonian(ham, basis))
    assert abs(energy - H6_FCI) < 1e-11
    # the exact ground state is a singlet
    s2 = to_matrix(s_squared_operator(6), basis).toarray()
    assert abs(vec @ s2 @ vec) < 1e-10


def test_mean_field_reference_bounds_fci(h6_fcidump):
    # The doubly occupied lowest-orbital determinant gives an energy above
    # FCI but below zero; sanity check of the operator assembly.
    ham = parse_fcidump(h6_fcidump)
    basis = enumerate_basis(6, SymmetrySector(n=6, sz=0.0))
    H = build_hamiltonian(ham, basis)
    ref = basis.index_of[aufbau_reference(6, 6)]
    e_ref = H[ref, ref]
    assert H6_FCI < e_ref < 0.0


def test_full_fock_and_sector_spectra_agree(h2_fcidump):
    # The (N=2, Sz=0) block of the full-space Hamiltonian must have the
    # same spectrum as the directly enumerated sector.
    ham = parse_fcidump(h2_fcidump)
    full = enumerate_basis(2)
    sector = enumerate_basis(2, SymmetrySector(n=2, sz=0.0))
    Hfull = build_hamiltonian(ham, full)
    Hsec = build_hamiltonian(ham, sector)
    idx = [full.index_of[d] for d in sector.dets]
    assert np.allclose(Hfull[np.ix_(idx, idx)], Hsec, atol=1e-12)


def test_opsum_includes_core_energy():
    ham = MolecularHamiltonian(
        n_spatial=1,
        n_elec=1,
        ms2=1,
        e_core=0.75,
        h1=np.array([[0.5]]),
        h2=np.zeros((1, 1, 1, 1)),
        orb_irreps=(0,),
    )
    basis = enumerate_basis(1)
    H = build_hamiltonian(ham, basis)
    # determinants: empty, up, down, both
    assert np.allclose(np.diag(H), [0.75, 1.25, 1.25, 1.75])
    assert len(hamiltonian_opsum(ham).terms) > 0


def test_dense_cap_guard():
    with pytest.raises(ValueError, match="dense cap"):
        fci_ground(np.zeros((DENSE_CAP + 1, DENSE_CAP + 1)))
