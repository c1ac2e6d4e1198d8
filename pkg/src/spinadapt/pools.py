"""Spin-adapted excitation generators and GSD/saGSD operator pools.

Spatial-orbital indices are written P, Q, R, S; the lower (annihilated) pair
of a double is (P, Q) and the upper (created) pair is (R, S).  The singlet
spin-adapted doubles couple the lower and upper spins to a common
intermediate spin S_i of 0 or 1 with hardcoded spin-1/2 Clebsch-Gordan
coefficients, normalized by 1/sqrt((1+delta_PQ)(1+delta_RS)) and by the
inverse square root of the intermediate multiplicity 2*S_i + 1.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Tuple

from .fermiops import OperatorSum, anti_hermitian, excitation

UP = 0
DOWN = 1

# <1/2 m1, 1/2 m2 | S sigma> for two spin-1/2 particles; spins as UP/DOWN.
_CG = {
    (0, UP, DOWN): 1 / math.sqrt(2),
    (0, DOWN, UP): -1 / math.sqrt(2),
    (1, UP, DOWN): 1 / math.sqrt(2),
    (1, DOWN, UP): 1 / math.sqrt(2),
    (1, UP, UP): 1.0,
    (1, DOWN, DOWN): 1.0,
}


def _sigma(m1, m2):
    """Total Sz label of two spins, for matching the intermediate sigma."""
    return (1 if m1 == UP else -1) + (1 if m2 == UP else -1)


@dataclass(frozen=True)
class SpinAdaptedGenerator:
    """A pool operator: anti-Hermitian body plus bookkeeping indices.

    kind is one of single, double_pp_qq, double_pp_qr, double_s0, double_s1,
    triplet_T for spin-adapted operators, or so_single / so_double for plain
    spinorbital GSD operators (indices then refer to spinorbital flat
    indices instead of spatial orbitals).
    """

    kind: str
    indices: Tuple[int, ...]
    body: OperatorSum = field(compare=False, repr=False)
    s_i: Optional[int] = None

    def __str__(self):
        tag = f"[{self.s_i}]" if self.s_i is not None else ""
        return f"{tag}{self.kind}{self.indices}"


def so_flat(spatial, spin):
    return 2 * spatial + spin


def spin_double(p_lo, q_lo, r_up, s_up):
    """Anti-Hermitian spinorbital double A_{p q}^{r s} (flat indices)."""
    return anti_hermitian(excitation((r_up, s_up), (p_lo, q_lo)))


def spin_single(p_lo, q_up):
    """Anti-Hermitian spinorbital single A_p^q (flat indices)."""
    return anti_hermitian(excitation((q_up,), (p_lo,)))


def singlet_single(P, Q):
    """(A_{P down}^{Q down} + A_{P up}^{Q up}) / sqrt(2)."""
    if P == Q:
        raise ValueError("singlet single with P == Q is the zero operator")
    body = (1 / math.sqrt(2)) * (
        spin_single(so_flat(P, DOWN), so_flat(Q, DOWN))
        + spin_single(so_flat(P, UP), so_flat(Q, UP))
    )
    return SpinAdaptedGenerator("single", (P, Q), body)


def _cg_body(P, Q, R, S, S_i):
    norm = 1 / math.sqrt((1 + (P == Q)) * (1 + (R == S)))
    norm /= math.sqrt(2 * S_i + 1)
    spins = (UP, DOWN)
    body = OperatorSum()
    for sP in spins:
        for sQ in spins:
            for sR in spins:
                for sS in spins:
                    if _sigma(sP, sQ) != _sigma(sR, sS):
                        continue
                    if abs(_sigma(sP, sQ)) > 2 * S_i:
                        continue
                    c1 = _CG.get((S_i, sP, sQ))
                    c2 = _CG.get((S_i, sR, sS))
                    if not c1 or not c2:
                        continue
                    body = body + (norm * c1 * c2) * spin_double(
                        so_flat(P, sP), so_flat(Q, sQ), so_flat(R, sR), so_flat(S, sS)
                    )
    return body


def singlet_double_cg(P, Q, R, S, S_i):
    """Clebsch-Gordan coupled singlet spin-adapted double excitation.

    Couples lower pair (P, Q) and upper pair (R, S) through the common
    intermediate spin S_i; reduces to the perfect-pairing and three-index
    special cases when indices repeat.
    """
    if S_i not in (0, 1):
        raise ValueError("intermediate spin must be 0 or 1")
    if S_i == 1 and (P == Q or R == S):
        raise ValueError(
            "S_i = 1 with a repeated lower or upper index is the zero operator"
        )
    if tuple(sorted((P, Q))) == tuple(sorted((R, S))):
        raise ValueError(
            "equal lower and upper index pairs give a zero (or Hermitian) operator"
        )
    body = _cg_body(P, Q, R, S, S_i)
    if not body.terms:
        raise ValueError(f"zero operator for indices {(P, Q, R, S)}, S_i={S_i}")
    if P == Q and R == S:
        kind = "double_pp_qq"
    elif P == Q or R == S:
        kind = "double_pp_qr"
    else:
        kind = "double_s0" if S_i == 0 else "double_s1"
    return SpinAdaptedGenerator(kind, (P, Q, R, S), body, s_i=S_i)


def double_cases(P, Q, R, S):
    """Applicable singlet spin-adapted doubles for an index pattern:
    the perfect-pairing or three-index generator when indices repeat, or
    both intermediate-spin variants when all pairs are distinct."""
    if tuple(sorted((P, Q))) == tuple(sorted((R, S))):
        return []
    if P == Q or R == S:
        return [singlet_double_cg(P, Q, R, S, 0)]
    return [singlet_double_cg(P, Q, R, S, 0), singlet_double_cg(P, Q, R, S, 1)]


def triplet_double_ppqr(P, Q, R):
    """T = (A_{P up P down}^{Q up R down} + A_{P up P down}^{Q down R up}) / sqrt(2),
    the triplet counterpart of the three-index singlet double."""
    if Q == R:
        raise ValueError("triplet three-index double requires Q != R")
    body = (1 / math.sqrt(2)) * (
        spin_double(so_flat(P, UP), so_flat(P, DOWN), so_flat(Q, UP), so_flat(R, DOWN))
        + spin_double(
            so_flat(P, UP), so_flat(P, DOWN), so_flat(Q, DOWN), so_flat(R, UP)
        )
    )
    return SpinAdaptedGenerator("triplet_T", (P, Q, R), body)


@dataclass(frozen=True)
class PoolSpec:
    n_spatial: int
    orb_irreps: Optional[Tuple[int, ...]] = None
    enforce: frozenset = frozenset({"N"})

    def __post_init__(self):
        unknown = set(self.enforce) - {"N", "Sz", "pointgroup", "S2"}
        if unknown:
            raise ValueError(f"unknown symmetry labels: {sorted(unknown)}")
        if "pointgroup" in self.enforce and self.orb_irreps is None:
            raise ValueError("pointgroup enforcement requires orb_irreps")


def _pair_irrep(spec, spatials):
    if "pointgroup" not in spec.enforce:
        return 0
    label = 0
    for P in spatials:
        label ^= spec.orb_irreps[P]
    return label


def build_pool(spec, adapted=None):
    """Deduplicated GSD or saGSD operator pool.

    With S2 enforcement (or adapted=True) the singlet spin-adapted
    constructors are used; otherwise plain spinorbital operators.  With
    pointgroup enforcement only operators whose spatial indices XOR to the
    identity irrep are kept.

    Deduplication conventions per symmetry level (fixed by the reference
    operator counts): spinorbital pools identify an operator with its
    adjoint, so (lower, upper) index sets are enumerated unordered; the
    N-only pool additionally restricts doubles to disjoint index pairs,
    while typed (N, Sz) pools allow shared indices.  Spin-adapted doubles
    enumerate excitation and de-excitation directions separately.
    """
    if adapted is None:
        adapted = "S2" in spec.enforce
    if "N" not in spec.enforce:
        raise ValueError("every pool conserves N; include it in enforce")
    if adapted:
        return _sa_pool(spec)
    if "Sz" in spec.enforce:
        return _typed_gsd_pool(spec)
    return _untyped_gsd_pool(spec)


def _untyped_gsd_pool(spec):
    """N-conserving pool over raw spinorbital indices: singles over index
    pairs, doubles over unordered pairs of disjoint index pairs."""
    n_so = 2 * spec.n_spatial
    ops = []
    for p, q in combinations(range(n_so), 2):
        ops.append(
            SpinAdaptedGenerator("so_single", (p, q), spin_single(p, q))
        )
    subsets = list(combinations(range(n_so), 2))
    for i, lower in enumerate(subsets):
        for upper in subsets[i + 1 :]:
            if set(lower) & set(upper):
                continue
            ops.append(
                SpinAdaptedGenerator(
                    "so_double",
                    lower + upper,
                    spin_double(lower[0], lower[1], upper[0], upper[1]),
                )
            )
    return ops


def _typed_gsd_pool(spec):
    """(N, Sz)-conserving pool enumerated by spin pattern over spatial
    orbitals, optionally restricted to totally symmetric operators."""
    n = spec.n_spatial
    ops = []
    for spin in (UP, DOWN):
        for P, Q in combinations(range(n), 2):
            if _pair_irrep(spec, (P, Q)):
                continue
            p, q = so_flat(P, spin), so_flat(Q, spin)
            ops.append(SpinAdaptedGenerator("so_single", (p, q), spin_single(p, q)))
    # Same-spin doubles: unordered pairs of distinct spatial-orbital pairs.
    pairs = list(combinations(range(n), 2))
    for spin in (UP, DOWN):
        for i, (P, Q) in enumerate(pairs):
            for R, S in pairs[i + 1 :]:
                if _pair_irrep(spec, (P, Q, R, S)):
                    continue
                ops.append(
                    SpinAdaptedGenerator(
                        "so_double",
                        (so_flat(P, spin), so_flat(Q, spin), so_flat(R, spin), so_flat(S, spin)),
                        spin_double(
                            so_flat(P, spin), so_flat(Q, spin), so_flat(R, spin), so_flat(S, spin)
                        ),
                    )
                )
    # Mixed-spin doubles: lower (P up, Q down), upper (R up, S down); the
    # adjoint swaps lower and upper, so enumerate unordered pairs.
    mixed = [(P, Q) for P in range(n) for Q in range(n)]
    for i, (P, Q) in enumerate(mixed):
        for R, S in mixed[i + 1 :]:
            if _pair_irrep(spec, (P, Q, R, S)):
                continue
            ops.append(
                SpinAdaptedGenerator(
                    "so_double",
                    (so_flat(P, UP), so_flat(Q, DOWN), so_flat(R, UP), so_flat(S, DOWN)),
                    spin_double(
                        so_flat(P, UP), so_flat(Q, DOWN), so_flat(R, UP), so_flat(S, DOWN)
                    ),
                )
            )
    return ops


def _sa_pool(spec):
    """Singlet spin-adapted pool: singles over orbital pairs plus
    Clebsch-Gordan doubles over ordered (lower, upper) pair combinations."""
    n = spec.n_spatial
    ops = []
    for P, Q in combinations(range(n), 2):
        if _pair_irrep(spec, (P, Q)):
            continue
        ops.append(singlet_single(P, Q))
    for s_i, lower_pairs in (
        (0, [(P, Q) for P in range(n) for Q in range(P, n)]),
        (1, list(combinations(range(n), 2))),
    ):
        for P, Q in lower_pairs:
            for R, S in lower_pairs:
                if (P, Q) == (R, S):
                    continue
                if _pair_irrep(spec, (P, Q, R, S)):
                    continue
                ops.append(singlet_double_cg(P, Q, R, S, s_i))
    return ops


def pool_table(ops):
    """Rows (kind, P, Q, R, S, S_i) describing a pool, for CSV dumps."""
    rows = []
    for g in ops:
        idx = list(g.indices) + [""] * (4 - len(g.indices))
        rows.append((g.kind, *idx, "" if g.s_i is None else g.s_i))
    return rows
