"""Independent reference implementations used to cross-check the package.

Everything here recomputes results through a different mechanism than the
library: signs come from explicit occupation-list permutations instead of
bitmask parities, Pauli strings are built from literal 2x2 Kronecker
factors, and exponentials come from a plain Taylor series.
"""

import math

import numpy as np

from spinadapt.fermiops import CREATE

I2 = np.eye(2, dtype=complex)
X2 = np.array([[0, 1], [1, 0]], dtype=complex)
Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
LOWER2 = np.array([[0, 1], [0, 0]], dtype=complex)  # <empty| a |occupied>


def apply_ladder_listwise(occ, index, kind):
    """Act one ladder operator on an ascending occupation list.

    The determinant is the product of creations in ascending index order
    applied to the vacuum; the sign of an insertion or removal is tracked
    by counting the explicit transpositions needed to move the operator
    into place.  Returns (sign, new list) or None.
    """
    occ = list(occ)
    if kind == CREATE:
        if index in occ:
            return None
        pos = sum(1 for q in occ if q < index)
        occ.insert(pos, index)
        return (-1) ** pos, occ
    if index not in occ:
        return None
    pos = occ.index(index)
    occ.pop(pos)
    return (-1) ** pos, occ


def string_matrix_listwise(string, basis):
    """Dense matrix of one FermionString built by the occupation-list rule."""
    dim = len(basis)
    out = np.zeros((dim, dim), dtype=complex)
    for col, det in enumerate(basis.dets):
        occ = [i for i in range(2 * basis.n_spatial) if det >> i & 1]
        amp = string.coeff
        alive = True
        for index, kind in reversed(string.factors):
            step = apply_ladder_listwise(occ, index, kind)
            if step is None:
                alive = False
                break
            sign, occ = step
            amp *= sign
        if not alive:
            continue
        new_det = sum(1 << i for i in occ)
        if new_det in basis.index_of:
            out[basis.index_of[new_det], col] += amp
    return out


def operator_matrix_listwise(op, basis):
    """Dense matrix of an OperatorSum via the occupation-list oracle."""
    dim = len(basis)
    out = np.zeros((dim, dim), dtype=complex)
    for s in op.terms:
        out += string_matrix_listwise(s, basis)
    return out


def pauli_matrix_kron(x, z, n_qubits):
    """Dense canonical Pauli string from literal Kronecker factors.

    Qubit q contributes i^(x_q z_q) X^(x_q) Z^(z_q); the full matrix is
    kron(P_{n-1}, ..., P_0) so qubit 0 indexes the least significant bit.
    """
    out = np.ones((1, 1), dtype=complex)
    for q in range(n_qubits - 1, -1, -1):
        xq, zq = x >> q & 1, z >> q & 1
        factor = np.eye(2, dtype=complex)
        if xq:
            factor = factor @ X2
        if zq:
            factor = factor @ Z2
        if xq and zq:
            factor = 1j * factor
        out = np.kron(out, factor)
    return out


def jw_ladder_kron(p, kind, n_qubits):
    """Dense ladder operator on qubits: Z chain below p, raising or
    lowering factor at p, identity above."""
    factor = LOWER2.conj().T if kind == CREATE else LOWER2
    out = np.ones((1, 1), dtype=complex)
    for q in range(n_qubits - 1, -1, -1):
        if q > p:
            out = np.kron(out, I2)
        elif q == p:
            out = np.kron(out, factor)
        else:
            out = np.kron(out, Z2)
    return out


def taylor_expm(theta, G, terms=40):
    """exp(theta G) by truncated power series."""
    G = np.asarray(G, dtype=complex)
    out = np.eye(G.shape[0], dtype=complex)
    power = np.eye(G.shape[0], dtype=complex)
    for k in range(1, terms + 1):
        power = power @ G * (theta / k)
        out = out + power
    return out


def finite_difference(fn, x, h=1e-6):
    """Central-difference gradient of a scalar function of a vector."""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(len(x)):
        step = np.zeros_like(x)
        step[i] = h
        grad[i] = (fn(x + step) - fn(x - step)) / (2 * h)
    return grad


def log_log_slope(xs, ys):
    """Least-squares slope of log(y) against log(x)."""
    lx, ly = np.log(np.asarray(xs)), np.log(np.asarray(ys))
    return float(np.polyfit(lx, ly, 1)[0])


def random_anti_hermitian(rng, dim):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (m - m.conj().T) / 2


def _mp_matrix(array):
    import mpmath as mp

    rows, cols = array.shape
    out = mp.matrix(rows, cols)
    for i in range(rows):
        for j in range(cols):
            z = complex(array[i, j])
            if z != 0:
                out[i, j] = mp.mpc(z.real, z.imag)
    return out


def _mp_taylor_expm(M, terms=40):
    import mpmath as mp

    out = mp.eye(M.rows)
    power = mp.eye(M.rows)
    for k in range(1, terms + 1):
        power = (power * M) / k
        out = out + power
    return out


def highprec_error_scan(gen, order, thetas, n_spatial, dps=40):
    """Trotter error curve in arbitrary-precision arithmetic.

    Double precision floors the order-4 error near 1e-14, hiding the
    theta^5 scaling below theta ~ 5e-3; recomputing the staged product and
    the exact exponential with mpmath Taylor series on (N, Sz) sector
    blocks of the active orbitals removes the floor.  The ambient-space
    norm uses the same exact 2^spectators factorization as the library.
    """
    import mpmath as mp

    from spinadapt.fermiops import to_matrix
    from spinadapt.fock import SymmetrySector, enumerate_basis
    from spinadapt.trotter import _relabeled, scheme, term_split

    active = sorted(set(gen.indices))
    mapping = {orb: i for i, orb in enumerate(active)}
    relabeled = _relabeled(gen, mapping)
    groups = term_split(relabeled)
    sch = scheme(order, len(groups))
    n_act = len(active)

    old_dps = mp.mp.dps
    mp.mp.dps = dps
    try:
        totals = [mp.mpf(0) for _ in thetas]
        for n_elec in range(2 * n_act + 1):
            for sz2 in range(-n_elec, n_elec + 1, 2):
                sector = SymmetrySector(n=n_elec, sz=sz2 / 2.0)
                basis = enumerate_basis(n_act, sector)
                if len(basis) == 0:
                    continue
                blocks = [
                    _mp_matrix(to_matrix(t, basis).toarray()) for t in groups
                ]
                total_block = blocks[0]
                for b in blocks[1:]:
                    total_block = total_block + b
                for i, theta in enumerate(thetas):
                    t = mp.mpf(float(theta))
                    prod = mp.eye(len(basis))
                    for idx, frac in sch.stages:
                        prod = prod * _mp_taylor_expm(blocks[idx] * (mp.mpf(frac) * t))
                    exact = _mp_taylor_expm(total_block * t)
                    diff = exact - prod
                    acc = mp.mpf(0)
                    for r in range(diff.rows):
                        for c in range(diff.cols):
                            acc += abs(diff[r, c]) ** 2
                    totals[i] += acc
        spectators = n_spatial - n_act
        return [float(mp.sqrt(v)) * 2.0**spectators for v in totals]
    finally:
        mp.mp.dps = old_dps


def spin_eigenvalue_counts(dim_by_sz):
    """Multiplicities of total-spin sectors from per-Sz dimensions.

    The number of spin-S multiplets equals dim(Sz = S) - dim(Sz = S + 1),
    a standard highest-weight count; used to cross-check S^2 sector
    dimensions without diagonalizing anything.
    """
    counts = {}
    values = sorted(dim_by_sz)
    top = max(values)
    for s in values:
        if s < 0:
            continue
        here = dim_by_sz[s]
        above = dim_by_sz.get(s + 1, 0) if s + 1 <= top else 0
        counts[s] = here - above
    return counts
