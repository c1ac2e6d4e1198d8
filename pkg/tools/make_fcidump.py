#!/usr/bin/env python3
"""Generate FCIDUMP test fixtures for linear hydrogen chains in STO-6G.

Everything is s-type Gaussians, so all integrals have closed forms; the
restricted Hartree-Fock orbitals are converged with DIIS and the MO-basis
integrals written in Molpro FCIDUMP layout.  Orbital symmetry labels come
from the inversion parity of each MO (gerade -> 1/Ag, ungerade -> 5/B1u in
the D2h ordinal convention).

Usage:
    python3 tools/make_fcidump.py h2 > tests/data/h2_sto6g.fcidump
    python3 tools/make_fcidump.py h6 > tests/data/h6_sto6g_r2.0.fcidump
"""

import math
import sys

import numpy as np
from scipy.special import erf

ANGSTROM_TO_BOHR = 1.8897259886

# STO-6G hydrogen 1s, scaled for the molecular environment (zeta = 1.24):
# exponents and contraction coefficients for normalized primitives.
STO6G_H_EXPONENTS = np.array(
    [35.52322122, 6.513143725, 1.822142904, 0.625955266, 0.243076747, 0.100112428]
)
STO6G_H_COEFFS = np.array(
    [0.00916359628, 0.04936149294, 0.16853830490, 0.37056279970, 0.41649152980, 0.13033408410]
)


def boys_f0(t):
    """F0(t) = (1/2) sqrt(pi/t) erf(sqrt(t)), with the t -> 0 limit of 1."""
    t = np.asarray(t, dtype=float)
    small = t < 1e-12
    safe = np.where(small, 1.0, t)
    out = 0.5 * np.sqrt(np.pi / safe) * erf(np.sqrt(safe))
    return np.where(small, 1.0 - t / 3.0, out)


class Contracted1s:
    def __init__(self, center, exponents, coeffs):
        self.center = np.asarray(center, dtype=float)
        self.exps = np.asarray(exponents, dtype=float)
        norms = (2.0 * self.exps / np.pi) ** 0.75
        self.coeffs = np.asarray(coeffs, dtype=float) * norms


def _pair(ga, gb):
    """Gaussian product data for every primitive pair of two shells."""
    a = ga.exps[:, None]
    b = gb.exps[None, :]
    p = a + b
    mu = a * b / p
    ab2 = float(np.dot(ga.center - gb.center, ga.center - gb.center))
    pref = np.exp(-mu * ab2)
    centers = (a[..., None] * ga.center + b[..., None] * gb.center) / p[..., None]
    cc = ga.coeffs[:, None] * gb.coeffs[None, :]
    return p, mu, ab2, pref, centers, cc


def overlap(ga, gb):
    p, mu, ab2, pref, _, cc = _pair(ga, gb)
    return float(np.sum(cc * (np.pi / p) ** 1.5 * pref))


def kinetic(ga, gb):
    p, mu, ab2, pref, _, cc = _pair(ga, gb)
    return float(np.sum(cc * mu * (3.0 - 2.0 * mu * ab2) * (np.pi / p) ** 1.5 * pref))


def nuclear(ga, gb, charges_centers):
    p, mu, ab2, pref, centers, cc = _pair(ga, gb)
    total = 0.0
    for charge, center in charges_centers:
        pc2 = np.sum((centers - np.asarray(center)) ** 2, axis=-1)
        total += -charge * float(np.sum(cc * (2.0 * np.pi / p) * pref * boys_f0(p * pc2)))
    return total


def eri(ga, gb, gc, gd):
    p, _, _, pref_ab, centers_ab, cc_ab = _pair(ga, gb)
    q, _, _, pref_cd, centers_cd, cc_cd = _pair(gc, gd)
    p4 = p[:, :, None, None]
    q4 = q[None, None, :, :]
    pq2 = np.sum(
        (centers_ab[:, :, None, None, :] - centers_cd[None, None, :, :, :]) ** 2,
        axis=-1,
    )
    pref = (
        cc_ab[:, :, None, None]
        * cc_cd[None, None, :, :]
        * pref_ab[:, :, None, None]
        * pref_cd[None, None, :, :]
    )
    kernel = (
        2.0
        * np.pi**2.5
        / (p4 * q4 * np.sqrt(p4 + q4))
        * boys_f0(p4 * q4 / (p4 + q4) * pq2)
    )
    return float(np.sum(pref * kernel))


def chain_integrals(n_atoms, spacing_angstrom):
    """AO integrals for a linear H chain centered at the origin."""
    spacing = spacing_angstrom * ANGSTROM_TO_BOHR
    zs = (np.arange(n_atoms) - (n_atoms - 1) / 2.0) * spacing
    centers = [np.array([0.0, 0.0, z]) for z in zs]
    shells = [Contracted1s(c, STO6G_H_EXPONENTS, STO6G_H_COEFFS) for c in centers]
    nuclei = [(1.0, c) for c in centers]
    n = n_atoms
    S = np.array([[overlap(shells[i], shells[j]) for j in range(n)] for i in range(n)])
    T = np.array([[kinetic(shells[i], shells[j]) for j in range(n)] for i in range(n)])
    V = np.array([[nuclear(shells[i], shells[j], nuclei) for j in range(n)] for i in range(n)])
    g = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(i + 1):
            for k in range(n):
                for l in range(k + 1):
                    if (i, j) < (k, l):
                        continue
                    val = eri(shells[i], shells[j], shells[k], shells[l])
                    for a, b in ((i, j), (j, i)):
                        for c, d in ((k, l), (l, k)):
                            g[a, b, c, d] = val
                            g[c, d, a, b] = val
    e_nuc = 0.0
    for i in range(n):
        for j in range(i):
            e_nuc += 1.0 / abs(zs[i] - zs[j])
    return S, T + V, g, e_nuc


def rhf(S, hcore, g, e_nuc, n_elec, max_cycles=200, conv=1e-11):
    """Closed-shell SCF with DIIS; returns (total energy, MO coeffs, MO energies)."""
    n = S.shape[0]
    n_occ = n_elec // 2
    s_val, s_vec = np.linalg.eigh(S)
    X = s_vec @ np.diag(s_val**-0.5) @ s_vec.T
    D = np.zeros_like(S)
    fock_history, err_history = [], []
    energy = 0.0
    for cycle in range(max_cycles):
        J = np.einsum("pqrs,rs->pq", g, D)
        K = np.einsum("prqs,rs->pq", g, D)
        F = hcore + J - 0.5 * K
        err = F @ D @ S - S @ D @ F
        fock_history.append(F)
        err_history.append(err)
        if len(fock_history) > 8:
            fock_history.pop(0)
            err_history.pop(0)
        if len(fock_history) > 1:
            m = len(fock_history)
            B = -np.ones((m + 1, m + 1))
            B[m, m] = 0.0
            for i in range(m):
                for j in range(m):
                    B[i, j] = np.sum(err_history[i] * err_history[j])
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                w = np.linalg.solve(B, rhs)[:m]
                F = sum(wi * Fi for wi, Fi in zip(w, fock_history))
            except np.linalg.LinAlgError:
                pass
        Fp = X.T @ F @ X
        mo_e, Cp = np.linalg.eigh(Fp)
        C = X @ Cp
        D_new = 2.0 * C[:, :n_occ] @ C[:, :n_occ].T
        e_new = float(np.sum((hcore + 0.5 * (np.einsum("pqrs,rs->pq", g, D_new)
                                             - 0.5 * np.einsum("prqs,rs->pq", g, D_new)))
                             * D_new)) + e_nuc
        delta = np.abs(D_new - D).max()
        D = D_new
        if delta < conv and abs(e_new - energy) < conv:
            energy = e_new
            break
        energy = e_new
    else:
        raise RuntimeError(f"SCF not converged after {max_cycles} cycles")
    return energy, C, mo_e


def mo_parity(C, S, tol=1e-6):
    """Inversion parity of each MO in a centrosymmetric chain: +1 or -1."""
    flipped = C[::-1, :]
    overlaps = C.T @ S @ flipped  # <i|inv|j> in the AO metric
    parities = []
    for i in range(C.shape[1]):
        val = overlaps[i, i]
        if abs(abs(val) - 1.0) > tol:
            raise RuntimeError(f"MO {i} is not a parity eigenstate: <i|inv|i> = {val}")
        parities.append(1 if val > 0 else -1)
    return parities


def write_fcidump(out, h1, g, e_nuc, n_elec, orbsym, threshold=1e-12):
    n = h1.shape[0]
    sym = ",".join(str(s) for s in orbsym)
    out.write(f"&FCI NORB={n},NELEC={n_elec},MS2=0,\n")
    out.write(f"  ORBSYM={sym},\n  ISYM=1,\n &END\n")

    def line(val, i, j, k, l):
        out.write(f"{val: .16E} {i:4d} {j:4d} {k:4d} {l:4d}\n")

    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                lmax = j if k == i else k
                for l in range(lmax + 1):
                    val = g[i, j, k, l]
                    if abs(val) > threshold:
                        line(val, i + 1, j + 1, k + 1, l + 1)
    for i in range(n):
        for j in range(i + 1):
            if abs(h1[i, j]) > threshold:
                line(h1[i, j], i + 1, j + 1, 0, 0)
    line(e_nuc, 0, 0, 0, 0)


def make_chain(n_atoms, spacing_angstrom, out):
    S, hcore, g, e_nuc = chain_integrals(n_atoms, spacing_angstrom)
    e_scf, C, mo_e = rhf(S, hcore, g, e_nuc, n_atoms)
    h1_mo = C.T @ hcore @ C
    g_mo = np.einsum("pqrs,pi,qj,rk,sl->ijkl", g, C, C, C, C, optimize=True)
    parities = mo_parity(C, S)
    orbsym = [1 if p > 0 else 5 for p in parities]
    print(
        f"# {n_atoms} H atoms at {spacing_angstrom} A: E(RHF) = {e_scf:.10f}, "
        f"MO energies {np.array2string(mo_e, precision=5)}, parities {parities}",
        file=sys.stderr,
    )
    write_fcidump(out, h1_mo, g_mo, e_nuc, n_atoms, orbsym)


def main():
    if len(sys.argv) != 2 or sys.argv[1] not in ("h2", "h6"):
        print(__doc__, file=sys.stderr)
        return 2
    if sys.argv[1] == "h2":
        make_chain(2, 0.7414, sys.stdout)
    else:
        make_chain(6, 2.0, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
