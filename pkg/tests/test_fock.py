"""Determinant enumeration, symmetry sectors, and spin-sector counting."""

import math

import numpy as np
import pytest

from spinadapt.fock import (
    FockBasis,
    SymmetrySector,
    aufbau_reference,
    determinant_irrep,
    enumerate_basis,
    n_particles,
    s2_sector_dimension,
    sz_value,
)

from oracles import spin_eigenvalue_counts

H6_IRREPS = (0, 4, 0, 4, 0, 4)


def test_full_space_size_and_order():
    basis = enumerate_basis(3)
    assert len(basis) == 64
    assert list(basis.dets) == sorted(basis.dets)
    assert basis.index_of[basis.dets[17]] == 17


@pytest.mark.parametrize("n_elec", range(7))
def test_particle_sector_sizes_are_binomials(n_elec):
    basis = enumerate_basis(3, SymmetrySector(n=n_elec))
    assert len(basis) == math.comb(6, n_elec)
    assert all(n_particles(d) == n_elec for d in basis)


def test_sz_filter_counts():
    # n up-spins and m down-spins chosen independently: C(3,n) * C(3,m).
    for n_up in range(4):
        for n_dn in range(4):
            sector = SymmetrySector(n=n_up + n_dn, sz=(n_up - n_dn) / 2.0)
            basis = enumerate_basis(3, sector)
            assert len(basis) == math.comb(3, n_up) * math.comb(3, n_dn)


def test_sz_value_convention():
    # Flat index 2*spatial + spin with spin 0 = up: det 0b01 is one up
    # electron in orbital 0, det 0b10 one down electron.
    assert sz_value(0b01) == 0.5
    assert sz_value(0b10) == -0.5
    assert sz_value(0b11) == 0.0


def test_irrep_filter_is_xor_of_occupied_labels():
    assert determinant_irrep(0, H6_IRREPS) == 0
    assert determinant_irrep(0b0011, H6_IRREPS) == 0  # both spins of orbital 0
    assert determinant_irrep(0b0100, H6_IRREPS) == 4  # one electron in orbital 1
    assert determinant_irrep(0b010100, H6_IRREPS) == 4  # orbitals 1 and 2
    assert determinant_irrep(0b1000100, H6_IRREPS) == 0  # orbitals 1 and 3 cancel
    basis = enumerate_basis(6, SymmetrySector(n=6, sz=0.0, irrep=0), H6_IRREPS)
    assert all(determinant_irrep(d, H6_IRREPS) == 0 for d in basis)


def test_h6_sector_dimensions():
    n6 = enumerate_basis(6, SymmetrySector(n=6))
    assert len(n6) == math.comb(12, 6) == 924
    sz0 = enumerate_basis(6, SymmetrySector(n=6, sz=0.0))
    assert len(sz0) == 400
    ag = enumerate_basis(6, SymmetrySector(n=6, sz=0.0, irrep=0), H6_IRREPS)
    assert len(ag) == 200
    assert s2_sector_dimension(ag, 0) == 92


def test_s2_dimension_matches_highest_weight_count():
    # Number of spin-S multiplets = dim(Sz=S) - dim(Sz=S+1); each multiplet
    # contributes one state to every smaller Sz, so the singlet count in the
    # Sz=0 sector must equal that difference.
    dim_by_sz = {}
    for sz2 in range(-4, 5, 2):
        sector = SymmetrySector(n=4, sz=sz2 / 2.0)
        dim_by_sz[sz2 // 2] = len(enumerate_basis(4, sector))
    counts = spin_eigenvalue_counts(dim_by_sz)
    sz0 = enumerate_basis(4, SymmetrySector(n=4, sz=0.0))
    for S in (0, 1, 2):
        assert s2_sector_dimension(sz0, S) == counts[S]


def test_s2_constraint_rejected_by_enumerate():
    with pytest.raises(ValueError):
        enumerate_basis(2, SymmetrySector(n=2, s2=0.0))


def test_irrep_without_labels_rejected():
    with pytest.raises(ValueError):
        enumerate_basis(2, SymmetrySector(n=2, irrep=0))


def test_duplicate_detection():
    with pytest.raises(ValueError):
        FockBasis(2, [0b0011, 0b0011])


def test_aufbau_reference():
    # Six electrons fill the three lowest spatial orbitals, both spins.
    assert aufbau_reference(6, 6) == 0b111111
    assert aufbau_reference(2, 2) == 0b11
    assert n_particles(aufbau_reference(5, 7)) == 7
    assert sz_value(aufbau_reference(5, 7)) == 0.5
