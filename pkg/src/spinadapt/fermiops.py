"""Second-quantized fermionic operators: strings, sums, and sector matrices.

A FermionString is a complex coefficient times an ordered product of
creation/annihilation factors acting on spinorbital flat indices; factors
apply right-to-left.  OperatorSums keep their strings in a canonical
normal-ordered form (creations left of annihilations, indices descending in
each block) so that equal operators have equal term lists.
"""

from typing import NamedTuple, Tuple

import numpy as np
import scipy.sparse as sp

ANNIHILATE = 0
CREATE = 1

PRUNE_TOL = 1e-14


class FermionString(NamedTuple):
    coeff: complex
    factors: Tuple[Tuple[int, int], ...]  # ((flat index, CREATE/ANNIHILATE), ...)

    def dagger(self):
        flipped = tuple((i, 1 - kind) for i, kind in reversed(self.factors))
        return FermionString(np.conjugate(self.coeff), flipped)


def apply_string(string, det):
    """Act a FermionString on a determinant bitmask.

    Returns (amplitude, new determinant) or None when the string
    annihilates the state.  The amplitude is string.coeff times the
    accumulated parity sign (-1)^(occupied orbitals below each acted index).
    """
    amp = string.coeff
    for index, kind in reversed(string.factors):
        bit = 1 << index
        occupied = det & bit
        if kind == CREATE:
            if occupied:
                return None
        else:
            if not occupied:
                return None
        if (det & (bit - 1)).bit_count() & 1:
            amp = -amp
        det ^= bit
    return amp, det


def _normal_order(coeff, factors):
    """Rewrite coeff * factors as a list of canonically ordered strings.

    Canonical order: all creations to the left of all annihilations, with
    indices strictly descending inside each block.  Swapping a_p a^q
    produces the contraction delta_pq minus the reordered string; repeated
    creations or annihilations vanish.
    """
    out = []
    work = [(coeff, list(factors))]
    while work:
        c, f = work.pop()
        i = 0
        dead = False
        while i + 1 < len(f):
            (pi, ki), (pj, kj) = f[i], f[i + 1]
            if ki == ANNIHILATE and kj == CREATE:
                # a_p a^q = delta_pq - a^q a_p
                if pi == pj:
                    work.append((c, f[:i] + f[i + 2 :]))
                f[i], f[i + 1] = f[i + 1], f[i]
                c = -c
                i = max(i - 1, 0)
            elif ki == kj and pi == pj:
                dead = True
                break
            elif ki == kj and pi < pj:
                f[i], f[i + 1] = f[i + 1], f[i]
                c = -c
                i = max(i - 1, 0)
            else:
                i += 1
        if not dead:
            out.append(FermionString(c, tuple(f)))
    return out


class OperatorSum:
    """Linear combination of FermionStrings, kept normal ordered and merged."""

    def __init__(self, strings=(), _normalized=False):
        if _normalized:
            self.terms = tuple(strings)
            return
        merged = {}
        for s in strings:
            for t in _normal_order(s.coeff, s.factors):
                merged[t.factors] = merged.get(t.factors, 0.0) + t.coeff
        self.terms = tuple(
            FermionString(c, f)
            for f, c in sorted(merged.items())
            if abs(c) > PRUNE_TOL
        )

    @classmethod
    def identity(cls, coeff=1.0):
        return cls([FermionString(coeff, ())])

    def __add__(self, other):
        return OperatorSum(self.terms + other.terms)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __rmul__(self, scalar):
        return OperatorSum(
            [FermionString(scalar * s.coeff, s.factors) for s in self.terms],
            _normalized=True,
        )

    def __mul__(self, other):
        if np.isscalar(other):
            return other * self
        products = [
            FermionString(a.coeff * b.coeff, a.factors + b.factors)
            for a in self.terms
            for b in other.terms
        ]
        return OperatorSum(products)

    def dagger(self):
        return OperatorSum([s.dagger() for s in self.terms])

    def __repr__(self):
        return f"OperatorSum({len(self.terms)} terms)"


def create(p):
    return OperatorSum([FermionString(1.0, ((p, CREATE),))])


def annihilate(p):
    return OperatorSum([FermionString(1.0, ((p, ANNIHILATE),))])


def number(p):
    return OperatorSum([FermionString(1.0, ((p, CREATE), (p, ANNIHILATE)))])


def hole(p):
    """1 - n_p."""
    return OperatorSum.identity() - number(p)


def excitation(upper, lower):
    """a_{lower}^{upper}: create the upper indices, annihilate the lower.

    For doubles, a_{pq}^{rs} = a^r a^s a_q a_p with upper=(r, s), lower=(p, q).
    """
    factors = tuple((i, CREATE) for i in upper) + tuple(
        (i, ANNIHILATE) for i in reversed(lower)
    )
    return OperatorSum([FermionString(1.0, factors)])


def anti_hermitian(op):
    """A = F - F^dagger."""
    return op - op.dagger()


def map_spatial_orbitals(op, mapping):
    """Rename spatial orbitals of every factor, preserving spins."""
    strings = [
        FermionString(
            s.coeff,
            tuple((2 * mapping[i // 2] + (i & 1), kind) for i, kind in s.factors),
        )
        for s in op.terms
    ]
    return OperatorSum(strings)


def active_orbitals(op):
    """Sorted spatial orbitals actually touched by an OperatorSum."""
    return sorted({i // 2 for s in op.terms for i, _ in s.factors})


def to_matrix(op, basis, check_closure=False):
    """Sparse matrix of an OperatorSum on a FockBasis (column-wise action).

    Images falling outside the basis are dropped; with check_closure=True a
    nonzero out-of-sector amplitude raises instead, which catches operators
    that do not preserve the sector.
    """
    rows, cols, vals = [], [], []
    index_of = basis.index_of
    for col, det in enumerate(basis.dets):
        for s in op.terms:
            hit = apply_string(s, det)
            if hit is None:
                continue
            amp, image = hit
            row = index_of.get(image)
            if row is None:
                if check_closure and abs(amp) > 1e-12:
                    raise ValueError(
                        f"operator maps determinant {det:#x} outside the basis "
                        f"(image {image:#x}, amplitude {amp})"
                    )
                continue
            rows.append(row)
            cols.append(col)
            vals.append(amp)
    n = len(basis)
    return sp.csr_matrix(
        sp.coo_matrix((vals, (rows, cols)), shape=(n, n), dtype=complex)
    )


def s_squared_operator(n_spatial):
    """S^2 = S_- S_+ + S_z (S_z + 1) over n_spatial orbitals (hbar = 1)."""
    s_plus = OperatorSum()
    for p in range(n_spatial):
        s_plus = s_plus + excitation((2 * p,), (2 * p + 1,))  # up <- down
    s_minus = s_plus.dagger()
    sz = sz_operator(n_spatial)
    return s_minus * s_plus + sz * sz + sz


def sz_operator(n_spatial):
    op = OperatorSum()
    for p in range(n_spatial):
        op = op + 0.5 * number(2 * p) - 0.5 * number(2 * p + 1)
    return op


def number_operator(n_spatial):
    op = OperatorSum()
    for p in range(2 * n_spatial):
        op = op + number(p)
    return op
