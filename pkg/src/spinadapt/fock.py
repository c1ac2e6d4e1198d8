"""Fock-space bases over spatial orbitals, filtered by symmetry sectors.

Determinants are occupation bitmasks over 2*n_spatial spinorbitals with the
interleaved convention flat = 2*spatial + spin (spin: 0 = up, 1 = down), so
bit 0 is orbital 0 up, bit 1 is orbital 0 down, and a closed-shell pair
occupies two adjacent bits.  The canonical basis order is ascending bitmask.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple, Optional, Sequence

UP = 0
DOWN = 1

# Bits 0, 2, 4, ... of a mask are up spinorbitals, bits 1, 3, 5, ... down.
_UP_BITS = int("01" * 64, 2)  # ...0101 in binary, wide enough for any basis here


class SpinOrbital(NamedTuple):
    spatial: int
    spin: int  # UP or DOWN

    @property
    def flat(self):
        return 2 * self.spatial + self.spin

    @classmethod
    def from_flat(cls, index):
        return cls(index // 2, index % 2)


def n_particles(det):
    """Particle number of a determinant bitmask."""
    return det.bit_count()


def sz_value(det):
    """Sz of a determinant bitmask, in units of hbar."""
    n_up = (det & _UP_BITS).bit_count()
    n_down = (det & (_UP_BITS << 1)).bit_count()
    return (n_up - n_down) / 2


def determinant_irrep(det, orb_irreps):
    """Irrep label of a determinant: XOR over occupied orbitals' labels.

    Both spins of a spatial orbital carry the same label, so doubly occupied
    orbitals contribute the identity.  Labels are XOR-composable integers
    (elementary Abelian 2-group irreps).
    """
    label = 0
    mask = det
    while mask:
        low = mask & -mask
        label ^= orb_irreps[(low.bit_length() - 1) // 2]  # flat // 2 == spatial
        mask ^= low
    return label


@dataclass(frozen=True)
class SymmetrySector:
    """Subset of (N, Sz, irrep, S^2) constraints; any field may be None."""

    n: Optional[int] = None
    sz: Optional[float] = None
    irrep: Optional[int] = None
    s2: Optional[float] = None  # eigenvalue S(S+1), not handled by enumerate_basis


class FockBasis:
    """Immutable ordered list of determinants with a reverse index."""

    def __init__(self, n_spatial, dets):
        self.n_spatial = n_spatial
        self.dets = tuple(dets)
        self.index_of = {d: i for i, d in enumerate(self.dets)}
        if len(self.index_of) != len(self.dets):
            raise ValueError("duplicate determinants in basis")

    def __len__(self):
        return len(self.dets)

    def __iter__(self):
        return iter(self.dets)

    def __repr__(self):
        return f"FockBasis(n_spatial={self.n_spatial}, size={len(self)})"


def enumerate_basis(n_spatial, sector=None, orb_irreps=None):
    """All determinants over n_spatial orbitals satisfying the active
    N / Sz / irrep constraints of `sector`, in ascending-bitmask order.

    An S^2 constraint cannot be imposed determinant-wise (spin eigenstates
    are linear combinations); use s2_sector_dimension for the count.
    """
    if n_spatial < 1:
        raise ValueError("n_spatial must be >= 1")
    sector = sector or SymmetrySector()
    if sector.s2 is not None:
        raise ValueError("S^2 is not a determinant filter; see s2_sector_dimension")
    if sector.irrep is not None and orb_irreps is None:
        raise ValueError("irrep filter requires per-orbital irrep labels")
    if orb_irreps is not None and len(orb_irreps) < n_spatial:
        raise ValueError("orb_irreps must cover all spatial orbitals")

    n_so = 2 * n_spatial
    if sector.n is None:
        dets = range(1 << n_so)
    else:
        # Enumerate masks of fixed popcount instead of scanning 4^n masks.
        dets = sorted(
            sum(1 << i for i in occ) for occ in combinations(range(n_so), sector.n)
        )
    out = []
    for d in dets:
        if sector.sz is not None and sz_value(d) != sector.sz:
            continue
        if sector.irrep is not None and determinant_irrep(d, orb_irreps) != sector.irrep:
            continue
        out.append(d)
    return FockBasis(n_spatial, out)


def s2_sector_dimension(basis, S, tol_eig=1e-8):
    """Multiplicity of the S^2 eigenvalue S(S+1) on the span of `basis`.

    Builds the S^2 matrix on the basis and counts eigenvalues within
    tol_eig of S(S+1).  The basis must already be closed under S^2
    (i.e. filtered by N, Sz and optionally irrep only).
    """
    import numpy as np

    from .fermiops import s_squared_operator, to_matrix

    mat = to_matrix(s_squared_operator(basis.n_spatial), basis, check_closure=True)
    evals = np.linalg.eigvalsh(mat.toarray())
    target = S * (S + 1)
    return int(np.sum(np.abs(evals - target) < tol_eig))


def aufbau_reference(n_spatial, n_elec):
    """Lowest-index filling: doubly occupy orbitals 0..n_elec/2-1 (closed
    shell for even n_elec; odd counts put the last electron spin-up)."""
    det = 0
    for k in range(n_elec):
        spatial, spin = divmod(k, 2)
        det |= 1 << (2 * spatial + spin)
    return det
