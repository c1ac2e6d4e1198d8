"""Trotter-Suzuki product formulas for spin-adapted doubles.

A spin-adapted double is a sum of two or three groups of mutually
commuting spinorbital operators; each group exponentiates exactly, and
the product formula approximates the full unitary.  First- and
second-order products of the three-index double admit closed forms whose
terms separate into singlet spin-adapted ("singlet") and
symmetry-breaking ("breaking") contributions; the breaking terms are the
exact measure of spin-symmetry failure.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .expm import (
    AntiHermitianEigen,
    ClosedFormSpec,
    ClosedFormTerm,
    TrigPoly,
    one,
)
from .fermiops import (
    OperatorSum,
    excitation,
    hole,
    number,
    s_squared_operator,
    to_matrix,
)
from .fock import SymmetrySector, enumerate_basis
from .pools import (
    _CG,
    DOWN,
    UP,
    SpinAdaptedGenerator,
    singlet_double_cg,
    so_flat,
    spin_double,
    triplet_double_ppqr,
)

SQ2 = math.sqrt(2)

# Fourth-order splitting constant of the triple-jump construction.
SUZUKI_S = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))


@dataclass(frozen=True)
class TrotterScheme:
    """Product formula: stages are (term index, fraction of theta), applied
    left to right as written."""

    order: int
    arity: int
    stages: tuple

    def __post_init__(self):
        for k in range(self.arity):
            total = sum(c for i, c in self.stages if i == k)
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"stage fractions for term {k} sum to {total}")


def scheme(order, arity):
    """The standard product formulas for two or three non-commuting terms:
    first order, symmetric second order, and the fourth-order triple jump
    with s = 1/(2 - 2^(1/3))."""
    s = SUZUKI_S
    if arity == 2:
        stages = {
            1: [(0, 1.0), (1, 1.0)],
            2: [(0, 0.5), (1, 1.0), (0, 0.5)],
            4: [
                (0, s / 2),
                (1, s),
                (0, (1 - s) / 2),
                (1, 1 - 2 * s),
                (0, (1 - s) / 2),
                (1, s),
                (0, s / 2),
            ],
        }
    elif arity == 3:
        stages = {
            1: [(0, 1.0), (1, 1.0), (2, 1.0)],
            2: [(0, 0.5), (1, 0.5), (2, 1.0), (1, 0.5), (0, 0.5)],
            4: [
                (0, s / 2),
                (1, s / 2),
                (2, s),
                (1, s / 2),
                (0, (1 - s) / 2),
                (1, (1 - 2 * s) / 2),
                (2, 1 - 2 * s),
                (1, (1 - 2 * s) / 2),
                (0, (1 - s) / 2),
                (1, s / 2),
                (2, s),
                (1, s / 2),
                (0, s / 2),
            ],
        }
    else:
        raise ValueError(f"unsupported arity {arity}")
    if order not in stages:
        raise ValueError(f"unsupported order {order}")
    return TrotterScheme(order, arity, tuple(stages[order]))


def term_eigensystems(terms):
    """Eigendecompose each term once; passes through precomputed systems."""
    return [
        t if isinstance(t, AntiHermitianEigen) else AntiHermitianEigen(t)
        for t in terms
    ]


def trotterize(sch, theta, terms):
    """Ordered product of exact stage exponentials."""
    eigs = term_eigensystems(terms)
    if len(eigs) != sch.arity:
        raise ValueError(f"scheme arity {sch.arity} != {len(eigs)} terms")
    U = None
    for idx, frac in sch.stages:
        stage = eigs[idx].expm(frac * theta)
        U = stage if U is None else U @ stage
    return U


def term_split(G: SpinAdaptedGenerator):
    """Split a spin-adapted double into its commuting spinorbital groups.

    The Clebsch-Gordan sum is bucketed by spin pattern: parallel-spin
    pieces, aligned mixed-spin pieces, and spin-flip mixed pieces.  Pieces
    within a bucket act on disjoint spinorbitals and therefore commute,
    which is asserted symbolically; the buckets sum back to the generator.
    """
    if G.kind == "double_pp_qq":
        raise ValueError(
            "perfect-pairing double is a single string: exponentiate directly"
        )
    if G.kind not in ("double_pp_qr", "double_s0", "double_s1"):
        raise ValueError(f"no splitting defined for kind {G.kind}")
    P, Q, R, S = G.indices
    norm = 1.0 / math.sqrt((1 + (P == Q)) * (1 + (R == S)) * (2 * G.s_i + 1))
    buckets = [{}, {}, {}]  # parallel, aligned, flip: key -> coefficient
    for sP in (UP, DOWN):
        for sQ in (UP, DOWN):
            c1 = _CG.get((G.s_i, sP, sQ))
            if not c1:
                continue
            for sR in (UP, DOWN):
                for sS in (UP, DOWN):
                    c2 = _CG.get((G.s_i, sR, sS))
                    if not c2:
                        continue
                    if (sP + sQ) != (sR + sS):
                        continue
                    # Canonicalize each index pair by sorting its flat
                    # indices (each swap flips the fermionic sign) so that
                    # relabeled pieces of a repeated pair merge before the
                    # spin-pattern classification.
                    lower = (so_flat(P, sP), so_flat(Q, sQ))
                    upper = (so_flat(R, sR), so_flat(S, sS))
                    sign = 1.0
                    if lower[0] > lower[1]:
                        lower, sign = (lower[1], lower[0]), -sign
                    if upper[0] > upper[1]:
                        upper, sign = (upper[1], upper[0]), -sign
                    lo_spins = (lower[0] & 1, lower[1] & 1)
                    up_spins = (upper[0] & 1, upper[1] & 1)
                    if lo_spins[0] == lo_spins[1]:
                        which = 0  # parallel spins
                    elif lo_spins == up_spins:
                        which = 1  # aligned mixed spins
                    else:
                        which = 2  # spin flip
                    key = lower + upper
                    buckets[which][key] = (
                        buckets[which].get(key, 0.0) + sign * norm * c1 * c2
                    )
    groups = []
    recombined = OperatorSum()
    for bucket in buckets:
        pieces = [c * spin_double(*key) for key, c in bucket.items() if c]
        pieces = [p for p in pieces if p.terms]
        if not pieces:
            continue
        for i in range(len(pieces)):
            for j in range(i + 1, len(pieces)):
                comm = pieces[i] * pieces[j] - pieces[j] * pieces[i]
                if comm.terms:
                    raise AssertionError("pieces within a split group must commute")
        group = OperatorSum()
        for p in pieces:
            group = group + p
        groups.append(group)
        recombined = recombined + group
    if (recombined - G.body).terms:
        raise AssertionError("split groups do not sum back to the generator")
    return groups


def error_curve(terms, sch, thetas):
    """Frobenius distance between the exact unitary of the summed generator
    and the product formula, over a theta grid, on an explicit basis."""
    eigs = term_eigensystems(terms)
    total = sum(np.asarray(t.toarray() if hasattr(t, "toarray") else t) for t in terms)
    exact = AntiHermitianEigen(total)
    out = np.empty(len(thetas))
    for i, t in enumerate(thetas):
        out[i] = np.linalg.norm(exact.expm(t) - trotterize(sch, t, eigs))
    return out


def spin_violation_curve(terms, sch, thetas, s2_mat):
    """Frobenius norm of [S^2, U(theta)] over a theta grid on an explicit
    basis; sch=None uses the exact exponential of the summed generator."""
    s2 = np.asarray(s2_mat.toarray() if hasattr(s2_mat, "toarray") else s2_mat)
    eigs = term_eigensystems(terms)
    if sch is None:
        total = sum(
            np.asarray(t.toarray() if hasattr(t, "toarray") else t) for t in terms
        )
        exact = AntiHermitianEigen(total)
    out = np.empty(len(thetas))
    for i, t in enumerate(thetas):
        U = exact.expm(t) if sch is None else trotterize(sch, t, eigs)
        out[i] = np.linalg.norm(s2 @ U - U @ s2)
    return out


def _relabeled(G, mapping):
    """The same generator over renamed spatial orbitals."""
    idx = tuple(mapping[i] for i in G.indices)
    if G.kind.startswith("double_"):
        return singlet_double_cg(idx[0], idx[1], idx[2], idx[3], G.s_i)
    raise ValueError(f"cannot relabel generator of kind {G.kind}")


def _sector_grid(n_spatial):
    for n in range(2 * n_spatial + 1):
        for sz2 in range(-n, n + 1, 2):
            yield SymmetrySector(n=n, sz=sz2 / 2.0)


def error_scan(G, sch, thetas, n_spatial):
    """Fock-space error curve ||exp(theta G) - Trot(theta)||_F.

    Both the exact unitary and every product stage act as the identity on
    spinorbitals of orbitals absent from the generator, so the norm on the
    n_spatial-orbital Fock space equals the active-orbital value scaled by
    sqrt(4^spectators) -- an exact factorization, not an approximation.
    """
    active = sorted(set(G.indices))
    if active[-1] >= n_spatial:
        raise ValueError(f"generator touches orbital {active[-1]} >= {n_spatial}")
    mapping = {orb: i for i, orb in enumerate(active)}
    basis = enumerate_basis(len(active))
    terms = [
        to_matrix(t, basis).toarray() for t in term_split(_relabeled(G, mapping))
    ]
    spectators = n_spatial - len(active)
    return error_curve(terms, sch, thetas) * (2.0**spectators)


def spin_violation_scan(G, sch, thetas, n_spatial):
    """Fock-space commutator curve ||[S^2, Trot(theta)]||_F.

    S^2 couples active to spectator orbitals, so no factorization applies;
    instead the curve is accumulated exactly over (N, Sz) sectors -- both
    S^2 and the product preserve them -- with each sector's product
    restricted to the support block of the split terms.  sch=None scores
    the exact exponential (identically zero for a spin-adapted generator).
    """
    terms_ops = term_split(G)
    s2op = s_squared_operator(n_spatial)
    total = np.zeros(len(thetas))
    for sector in _sector_grid(n_spatial):
        basis = enumerate_basis(n_spatial, sector)
        if len(basis) == 0:
            continue
        term_mats = [to_matrix(t, basis, check_closure=True) for t in terms_ops]
        coo = sum(term_mats).tocoo()
        support = np.union1d(np.unique(coo.row), np.unique(coo.col))
        if len(support) == 0:
            continue
        blocks = [
            np.asarray(m[np.ix_(support, support)].todense()) for m in term_mats
        ]
        eigs = [AntiHermitianEigen(b) for b in blocks]
        s2w = to_matrix(s2op, basis).tocsc()[:, support].toarray()
        m4 = s2w.conj().T @ s2w
        p = s2w[support, :]
        for i, t in enumerate(thetas):
            if sch is None:
                m = AntiHermitianEigen(sum(blocks)).expm(t)
            else:
                m = None
                for idx, frac in sch.stages:
                    stage = eigs[idx].expm(frac * t)
                    m = stage if m is None else m @ stage
            delta = m - np.eye(len(support))
            dh = delta.conj().T
            val = (
                np.trace(dh @ m4 @ delta).real
                + np.trace(dh @ delta @ m4).real
                - 2.0 * np.trace(dh @ p @ delta @ p).real
            )
            total[i] += max(val, 0.0)
    return np.sqrt(total)


# --- closed forms of the first- and second-order products ------------------


def _ppqr_parts(P, Q, R):
    Pu, Pd = so_flat(P, UP), so_flat(P, DOWN)
    Qu, Qd = so_flat(Q, UP), so_flat(Q, DOWN)
    Ru, Rd = so_flat(R, UP), so_flat(R, DOWN)
    flip = excitation((Qd, Ru), (Qu, Rd))
    d = {
        "A1": spin_double(Pu, Pd, Qu, Rd),
        "A2": spin_double(Pu, Pd, Qd, Ru),
        "flip": flip,
        "flipd": flip.dagger(),
        "n_PP": number(Pu) * number(Pd),
        "nb_PP": hole(Pu) * hole(Pd),
        "n_QuRd": number(Qu) * number(Rd),
        "n_QdRu": number(Qd) * number(Ru),
        "nb_QuRd": hole(Qu) * hole(Rd),
        "nb_QdRu": hole(Qd) * hole(Ru),
    }
    d["n_QQRR"] = d["n_QuRd"] * d["n_QdRu"]
    d["nb_QQRR"] = d["nb_QuRd"] * d["nb_QdRu"]
    return d


def trot_closed_forms(P, Q, R):
    """Closed forms of the first- and second-order product formulas for the
    three-index double, with every term tagged "singlet" (invariant under
    all spin rotations) or "breaking".

    Products of sin/cos stage factors are expanded to plain trigonometric
    sums in theta/(2 sqrt2) multiples, so each coefficient stays a lazy
    exact-constant trig polynomial.
    """
    if Q == R:
        raise ValueError("three-index double requires Q != R")
    z = _ppqr_parts(P, Q, R)
    ident = OperatorSum.identity()
    x = 1 / SQ2  # stage angle scale theta/sqrt(2)

    trot1 = ClosedFormSpec(
        "trot1_ppqr",
        "spinorbital",
        singlet_double_cg(P, P, Q, R, 0).body,
        (
            ClosedFormTerm(one(), op=ident, tag="singlet"),
            ClosedFormTerm(
                TrigPoly([(1.0, "sin", x)]), op=z["A1"] - z["A2"], tag="singlet"
            ),
            # (1/2) sin(x)(cos(x) - 1) = (1/4) sin(2x) - (1/2) sin(x)
            ClosedFormTerm(
                TrigPoly([(0.25, "sin", 2 * x), (-0.5, "sin", x)]),
                op=(z["A1"] - z["A2"])
                * (z["nb_QdRu"] + z["n_QdRu"])
                * (z["nb_QuRd"] + z["n_QuRd"]),
                tag="singlet",
            ),
            # (cos(x) - 1)^2 = 3/2 - 2 cos(x) + (1/2) cos(2x)
            ClosedFormTerm(
                TrigPoly([(1.5, "1", 0.0), (-2.0, "cos", x), (0.5, "cos", 2 * x)]),
                op=z["nb_PP"] * z["n_QQRR"] + z["nb_QQRR"] * z["n_PP"],
                tag="singlet",
            ),
            # sin^2(x) = 1/2 - (1/2) cos(2x)
            ClosedFormTerm(
                TrigPoly([(0.5, "1", 0.0), (-0.5, "cos", 2 * x)]),
                op=z["flip"] * z["n_PP"] + z["flipd"] * z["nb_PP"],
                tag="breaking",
            ),
            ClosedFormTerm(
                TrigPoly([(1.0, "cos", x), (-1.0, "1", 0.0)]),
                op=z["nb_PP"] * (z["n_QdRu"] + z["n_QuRd"])
                + (z["nb_QdRu"] + z["nb_QuRd"]) * z["n_PP"],
                tag="breaking",
            ),
            ClosedFormTerm(
                TrigPoly([(0.25, "sin", 2 * x), (-0.5, "sin", x)]),
                op=(z["A1"] + z["A2"])
                * (z["nb_QdRu"] - z["n_QdRu"])
                * (z["nb_QuRd"] - z["n_QuRd"]),
                tag="breaking",
            ),
        ),
    )

    h = 1 / (2 * SQ2)  # half-stage angle scale theta/(2 sqrt2)
    trot2 = ClosedFormSpec(
        "trot2_ppqr",
        "spinorbital",
        singlet_double_cg(P, P, Q, R, 0).body,
        (
            ClosedFormTerm(one(), op=ident, tag="singlet"),
            ClosedFormTerm(
                TrigPoly([(1.0, "sin", x)]), op=z["A1"] - z["A2"], tag="singlet"
            ),
            ClosedFormTerm(
                TrigPoly([(1.0, "cos", x), (-1.0, "1", 0.0)]),
                op=z["nb_PP"] * (z["n_QdRu"] + z["n_QuRd"])
                + (z["nb_QdRu"] + z["nb_QuRd"]) * z["n_PP"],
                tag="breaking",
            ),
            # sin^2(h)(1 - cos(2h)) = 3/4 - cos(2h) + (1/4) cos(4h)
            ClosedFormTerm(
                TrigPoly([(0.75, "1", 0.0), (-1.0, "cos", x), (0.25, "cos", 2 * x)]),
                op=z["nb_PP"] * z["n_QQRR"] + z["nb_QQRR"] * z["n_PP"],
                tag="singlet",
            ),
            # sin(h) sin(2h) = (1/2) cos(h) - (1/2) cos(3h)
            ClosedFormTerm(
                TrigPoly([(0.5, "cos", h), (-0.5, "cos", 3 * h)]),
                op=(z["flip"] + z["flipd"]) * (z["nb_PP"] + z["n_PP"]),
                tag="breaking",
            ),
            ClosedFormTerm(
                TrigPoly([(0.375, "1", 0.0), (-0.5, "cos", x), (0.125, "cos", 2 * x)]),
                op=(z["nb_PP"] + z["n_PP"])
                * (z["nb_QuRd"] * z["n_QdRu"] + z["nb_QdRu"] * z["n_QuRd"]),
                tag="breaking",
            ),
            # sin(2h)(1 - cos(h)) = sin(2h) - (1/2) sin(3h) - (1/2) sin(h)
            ClosedFormTerm(
                TrigPoly([(1.0, "sin", x), (-0.5, "sin", 3 * h), (-0.5, "sin", h)]),
                op=z["A2"] * (z["nb_QuRd"] + z["n_QuRd"]),
                tag="breaking",
            ),
            # -sin(h) cos(h)(1 - cos(2h)) = -(1/2) sin(2h) + (1/4) sin(4h)
            ClosedFormTerm(
                TrigPoly([(-0.5, "sin", x), (0.25, "sin", 2 * x)]),
                op=z["A1"] * (z["nb_QdRu"] + z["n_QdRu"]),
                tag="breaking",
            ),
            ClosedFormTerm(
                TrigPoly([(-0.375, "1", 0.0), (0.5, "cos", x), (-0.125, "cos", 2 * x)]),
                op=(z["nb_PP"] - z["n_PP"])
                * (z["nb_QuRd"] * z["n_QdRu"] - z["nb_QdRu"] * z["n_QuRd"]),
                tag="breaking",
            ),
        ),
    )
    return {"trot1": trot1, "trot2": trot2}


def trot1_st_spec(P, Q, R):
    """First-order product rewritten through the singlet generator S and
    its triplet partner T: a degree-four polynomial in products of S and T,
    showing how non-singlet tensor components enter the product formula."""
    S_op = singlet_double_cg(P, P, Q, R, 0).body
    T_op = triplet_double_ppqr(P, Q, R).body

    def word(letters):
        prod = OperatorSum.identity()
        for ch in letters:
            prod = prod * (S_op if ch == "S" else T_op)
        return prod

    def words(spec):
        total = OperatorSum()
        for sign, letters in spec:
            total = total + sign * word(letters)
        return total

    x = 1 / SQ2
    # Expansion of [I + sin A1 + (1-cos) A1^2][I - sin A2 + (1-cos) A2^2]
    # with A1 = (S + T)/sqrt2 and A2 = (T - S)/sqrt2:
    #   I + sqrt2 sin S + (1-cos + sin^2/2) S^2 + (1-cos - sin^2/2) T^2
    #     + (sin^2/2)(TS - ST)
    #     + sin(1-cos)/sqrt2 (S^3 + TS^2 - TST - S^2 T)
    #     + (1-cos)^2/4 (S^2 + ST + TS + T^2)(S^2 - ST - TS + T^2),
    # all trig functions of theta/sqrt2.
    # sin(x)(1 - cos(x))/sqrt2 = [sin(x) - (1/2) sin(2x)]/sqrt2
    cubic = TrigPoly([(1 / SQ2, "sin", x), (-0.5 / SQ2, "sin", 2 * x)])
    # (1/4)(1 - cos(x))^2 = 3/8 - (1/2) cos(x) + (1/8) cos(2x)
    quartic = TrigPoly([(0.375, "1", 0.0), (-0.5, "cos", x), (0.125, "cos", 2 * x)])
    quartic_words = [
        ((-1) ** (right in ("ST", "TS")), left + right)
        for left in ("SS", "ST", "TS", "TT")
        for right in ("SS", "ST", "TS", "TT")
    ]
    terms = (
        ClosedFormTerm(one(), op=OperatorSum.identity(), tag="singlet"),
        ClosedFormTerm(TrigPoly([(SQ2, "sin", x)]), op=S_op, tag="singlet"),
        # 1 - cos(x) + (1/2) sin^2(x) = 5/4 - cos(x) - (1/4) cos(2x)
        ClosedFormTerm(
            TrigPoly([(1.25, "1", 0.0), (-1.0, "cos", x), (-0.25, "cos", 2 * x)]),
            op=word("SS"),
            tag="singlet",
        ),
        ClosedFormTerm(cubic, op=word("SSS"), tag="singlet"),
        ClosedFormTerm(quartic, op=word("SSSS"), tag="singlet"),
        # 1 - cos(x) - (1/2) sin^2(x) = 3/4 - cos(x) + (1/4) cos(2x)
        ClosedFormTerm(
            TrigPoly([(0.75, "1", 0.0), (-1.0, "cos", x), (0.25, "cos", 2 * x)]),
            op=word("TT"),
            tag="breaking",
        ),
        # (1/2) sin^2(x) = 1/4 - (1/4) cos(2x)
        ClosedFormTerm(
            TrigPoly([(0.25, "1", 0.0), (-0.25, "cos", 2 * x)]),
            op=words([(1, "TS"), (-1, "ST")]),
            tag="breaking",
        ),
        ClosedFormTerm(
            cubic,
            op=words([(1, "TSS"), (-1, "TST"), (-1, "SST")]),
            tag="breaking",
        ),
        ClosedFormTerm(
            quartic,
            op=words([(s, w) for s, w in quartic_words if w != "SSSS"]),
            tag="breaking",
        ),
    )
    return ClosedFormSpec("trot1_st", "spin-adapted", S_op, terms)
