"""Molecular Hamiltonians: FCIDUMP ingestion and sector matrices.

Integrals are stored in chemists' notation, h2[P,Q,R,S] = (PQ|RS), with
the full 8-fold permutational symmetry restored on load.  The
second-quantized operator is

    H = e_core + sum_{PQ,s} h1[P,Q] a^{Ps} a_{Qs}
        + 1/2 sum_{PQRS,st} (PQ|RS) a^{Ps} a^{Rt} a_{St} a_{Qs}
"""

from dataclasses import dataclass

import numpy as np

from .fermiops import (
    ANNIHILATE,
    CREATE,
    FermionString,
    OperatorSum,
    to_matrix,
)
from .pools import so_flat

DENSE_CAP = 5000


@dataclass(frozen=True)
class MolecularHamiltonian:
    n_spatial: int
    n_elec: int
    ms2: int
    e_core: float
    h1: np.ndarray
    h2: np.ndarray
    orb_irreps: tuple

    def __post_init__(self):
        if not np.allclose(self.h1, self.h1.T, atol=1e-12):
            raise ValueError("one-electron integrals must be symmetric")


class FcidumpError(ValueError):
    def __init__(self, line_no, message):
        super().__init__(f"FCIDUMP line {line_no}: {message}")
        self.line_no = line_no


def _parse_header(lines):
    """Collect the &FCI namelist (possibly spanning lines) up to &END or /."""
    header_text = []
    body_start = None
    for ln, raw in lines:
        text = raw.strip()
        if body_start is None and not header_text and not text.startswith("&FCI"):
            raise FcidumpError(ln, "expected header to start with &FCI")
        stripped = text
        done = False
        for terminator in ("&END", "/"):
            if terminator in stripped:
                stripped = stripped.split(terminator)[0]
                done = True
                break
        header_text.append(stripped)
        if done:
            body_start = ln
            break
    if body_start is None:
        raise FcidumpError(lines[-1][0] if lines else 1, "header never terminated with &END or /")
    blob = " ".join(header_text).replace("&FCI", " ", 1)
    # split KEY=value fields; values may be comma-separated lists
    fields = {}
    key = None
    for token in blob.replace("=", " ").replace(",", " ").split():
        if token.upper() in ("NORB", "NELEC", "MS2", "ORBSYM", "ISYM", "IUHF"):
            key = token.upper()
            fields[key] = []
        elif key is not None:
            fields[key].append(token)
    return fields, body_start


def _header_int(fields, key, line_no):
    if key not in fields or not fields[key]:
        raise FcidumpError(line_no, f"header is missing {key}")
    try:
        return int(fields[key][0])
    except ValueError:
        raise FcidumpError(line_no, f"{key} must be an integer, got {fields[key][0]!r}")


def parse_fcidump(path):
    """Read an FCIDUMP file into a MolecularHamiltonian.

    Body lines hold `value i j k l` with 1-based indices; k = l = 0 marks a
    one-electron record and all-zero indices the core energy.
    """
    with open(path) as fh:
        lines = list(enumerate(fh.readlines(), start=1))
    fields, body_start = _parse_header(lines)
    norb = _header_int(fields, "NORB", 1)
    nelec = _header_int(fields, "NELEC", 1)
    ms2 = int(fields["MS2"][0]) if fields.get("MS2") else 0
    if norb < 1:
        raise FcidumpError(1, f"NORB must be positive, got {norb}")
    if fields.get("ORBSYM"):
        try:
            orbsym = tuple(int(s) for s in fields["ORBSYM"])
        except ValueError:
            raise FcidumpError(1, f"ORBSYM entries must be integers: {fields['ORBSYM']}")
        if len(orbsym) != norb:
            raise FcidumpError(1, f"ORBSYM lists {len(orbsym)} labels for NORB={norb}")
    else:
        orbsym = (1,) * norb

    e_core = 0.0
    h1 = np.zeros((norb, norb))
    h2 = np.zeros((norb, norb, norb, norb))
    for ln, raw in lines:
        if ln <= body_start:
            continue
        text = raw.strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != 5:
            raise FcidumpError(ln, f"expected `value i j k l`, got {text!r}")
        try:
            val = float(parts[0])
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError:
            raise FcidumpError(ln, f"could not parse numeric fields in {text!r}")
        for idx in (i, j, k, l):
            if idx < 0 or idx > norb:
                raise FcidumpError(ln, f"orbital index {idx} out of range 1..{norb}")
        if i == j == k == l == 0:
            e_core = val
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise FcidumpError(ln, f"one-electron record needs two indices: {text!r}")
            h1[i - 1, j - 1] = val
            h1[j - 1, i - 1] = val
        elif i == 0 or j == 0 or k == 0 or l == 0:
            raise FcidumpError(ln, f"two-electron record has a zero index: {text!r}")
        else:
            p, q, r, s = i - 1, j - 1, k - 1, l - 1
            for a, b, c, d in (
                (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
                (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p),
            ):
                h2[a, b, c, d] = val
    # map Molpro irrep ordinals (1-based) onto XOR-composable labels
    irreps = tuple(s - 1 for s in orbsym)
    return MolecularHamiltonian(norb, nelec, ms2, e_core, h1, h2, irreps)


def hamiltonian_opsum(H: MolecularHamiltonian, threshold=1e-12):
    """Second-quantized OperatorSum for the molecular Hamiltonian."""
    strings = []
    if abs(H.e_core) > 0:
        strings.append(FermionString(H.e_core, ()))
    n = H.n_spatial
    for p in range(n):
        for q in range(n):
            if abs(H.h1[p, q]) <= threshold:
                continue
            for s in (0, 1):
                strings.append(
                    FermionString(
                        H.h1[p, q],
                        ((so_flat(p, s), CREATE), (so_flat(q, s), ANNIHILATE)),
                    )
                )
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    v = H.h2[p, q, r, s]
                    if abs(v) <= threshold:
                        continue
                    for sa in (0, 1):
                        for sb in (0, 1):
                            strings.append(
                                FermionString(
                                    0.5 * v,
                                    (
                                        (so_flat(p, sa), CREATE),
                                        (so_flat(r, sb), CREATE),
                                        (so_flat(s, sb), ANNIHILATE),
                                        (so_flat(q, sa), ANNIHILATE),
                                    ),
                                )
                            )
    return OperatorSum(strings)


def build_hamiltonian(H: MolecularHamiltonian, basis):
    """Hermitian sector matrix of the Hamiltonian on the given basis."""
    mat = to_matrix(hamiltonian_opsum(H), basis)
    if not isinstance(mat, np.ndarray):
        mat = mat.toarray()
    herm_defect = np.abs(mat - mat.conj().T).max()
    if herm_defect > 1e-10:
        raise ValueError(f"Hamiltonian matrix not Hermitian (defect {herm_defect:.3e})")
    return np.ascontiguousarray(mat.real)


def fci_ground(Hmat):
    """Lowest eigenpair of a sector Hamiltonian by dense diagonalization."""
    dim = Hmat.shape[0]
    if dim > DENSE_CAP:
        raise ValueError(f"sector dimension {dim} exceeds dense cap {DENSE_CAP}")
    try:
        evals, evecs = np.linalg.eigh(Hmat)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver failed: {exc}")
    energy = evals[0]
    vec = np.ascontiguousarray(evecs[:, 0])
    residual = np.linalg.norm(Hmat @ vec - energy * vec)
    if residual > 1e-10 * max(1.0, abs(energy)):
        raise RuntimeError(f"eigenpair residual {residual:.3e} too large")
    return energy, vec
