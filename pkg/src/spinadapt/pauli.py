"""Qubit encoding of fermionic operators as Pauli strings.

Qubit q corresponds to spinorbital flat index q (so qubit order is
orbital 0 up / 0 down / 1 up / ..., LSB first); basis state index equals
the determinant bitmask.  A string is stored symplectically as a pair of
bitmasks (x, z) with the per-qubit letter I/X/Y/Z read off (x_q, z_q) =
(0,0)/(1,0)/(1,1)/(0,1), and stands for the canonical Hermitian product
prod_q i^{x_q z_q} X^{x_q} Z^{z_q}.
"""

import cmath
import math
from typing import Iterable

import numpy as np

from .fermiops import CREATE, OperatorSum

_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_MASKS = {v: k for k, v in _LETTERS.items()}
PRUNE_TOL = 1e-14


def _parity(v):
    v ^= v >> 32
    v ^= v >> 16
    v ^= v >> 8
    v ^= v >> 4
    v ^= v >> 2
    v ^= v >> 1
    return v & 1


def string_letters(x, z, n_qubits):
    return "".join(_LETTERS[((x >> q) & 1, (z >> q) & 1)] for q in range(n_qubits))


def _product_key(x1, z1, x2, z2):
    """Symplectic product: returns (x, z, phase) with
    P(x1,z1) P(x2,z2) = phase * P(x,z)."""
    x, z = x1 ^ x2, z1 ^ z2
    k = (
        bin(x1 & z1).count("1")
        + bin(x2 & z2).count("1")
        - bin(x & z).count("1")
        + 2 * bin(z1 & x2).count("1")
    )
    return x, z, 1j ** (k % 4)


def strings_commute(key1, key2):
    x1, z1 = key1
    x2, z2 = key2
    return _parity(x1 & z2) == _parity(x2 & z1)


class PauliSum:
    """Linear combination of Pauli strings with merged coefficients."""

    def __init__(self, n_qubits, terms=None):
        self.n_qubits = n_qubits
        self.terms = {}  # (xmask, zmask) -> complex coefficient
        if terms:
            for key, c in terms.items() if isinstance(terms, dict) else terms:
                self.terms[key] = self.terms.get(key, 0.0) + c
            self._prune()

    def _prune(self):
        self.terms = {k: c for k, c in self.terms.items() if abs(c) > PRUNE_TOL}

    @classmethod
    def identity(cls, n_qubits, coeff=1.0):
        return cls(n_qubits, {(0, 0): coeff})

    def __add__(self, other):
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit count mismatch")
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0.0) + c
        return PauliSum(self.n_qubits, out)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rmul__(self, scalar):
        return PauliSum(
            self.n_qubits, {k: scalar * c for k, c in self.terms.items()}
        )

    def __mul__(self, other):
        if not isinstance(other, PauliSum):
            return self.__rmul__(other)
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit count mismatch")
        out = {}
        for (x1, z1), c1 in self.terms.items():
            for (x2, z2), c2 in other.terms.items():
                x, z, phase = _product_key(x1, z1, x2, z2)
                out[(x, z)] = out.get((x, z), 0.0) + c1 * c2 * phase
        return PauliSum(self.n_qubits, out)

    def dagger(self):
        # every canonical string is Hermitian
        return PauliSum(self.n_qubits, {k: c.conjugate() for k, c in self.terms.items()})

    def one_norm(self):
        return sum(abs(c) for c in self.terms.values())

    def to_matrix(self):
        dim = 1 << self.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        idx = np.arange(dim)
        for (x, z), c in self.terms.items():
            ny = bin(x & z).count("1")
            par = np.zeros(dim, dtype=np.int64)
            for q in range(self.n_qubits):
                if (z >> q) & 1:
                    par ^= (idx >> q) & 1
            phases = (1j**ny) * np.where(par, -1.0, 1.0)
            out[idx ^ x, idx] += c * phases
        return out

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        parts = [
            f"({c.real:+.6g}{c.imag:+.6g}j) {string_letters(x, z, self.n_qubits)}"
            for (x, z), c in sorted(self.terms.items())
        ]
        return " + ".join(parts) if parts else "0"


def _ladder(p, kind, n_qubits):
    """Image of a single creation/annihilation operator: a Z chain on
    qubits below p times (X -+ iY)/2 at p."""
    chain = (1 << p) - 1
    sign = -0.5j if kind == CREATE else 0.5j
    return PauliSum(
        n_qubits,
        {(1 << p, chain): 0.5, (1 << p, chain | (1 << p)): sign},
    )


def jordan_wigner(op: OperatorSum, n_qubits):
    """Encode a fermionic operator sum as a PauliSum on n_qubits qubits."""
    total = PauliSum(n_qubits)
    for string in op.terms:
        acc = PauliSum.identity(n_qubits, string.coeff)
        for index, kind in string.factors:
            if index >= n_qubits:
                raise ValueError(f"spinorbital {index} exceeds qubit count {n_qubits}")
            acc = acc * _ladder(index, kind, n_qubits)
        total = total + acc
    return total


def _walsh_hadamard(v):
    v = np.array(v, dtype=complex)
    h = 1
    n = len(v)
    while h < n:
        for i in range(0, n, h * 2):
            a = v[i : i + h].copy()
            b = v[i + h : i + 2 * h].copy()
            v[i : i + h] = a + b
            v[i + h : i + 2 * h] = a - b
        h *= 2
    return v


def lcu_decompose(U, tol=1e-12):
    """Expand a matrix on the full Fock space into Pauli strings.

    Coefficients are trace inner products <P, U>/2^n; for fixed X mask the
    sum over Z masks is a Walsh-Hadamard transform, so the full expansion
    costs O(4^n * n) rather than O(8^n).
    """
    U = np.asarray(U, dtype=complex)
    dim = U.shape[0]
    n_qubits = dim.bit_length() - 1
    if 1 << n_qubits != dim or U.shape[1] != dim:
        raise ValueError(f"matrix dimension {U.shape} is not a power of two square")
    idx = np.arange(dim)
    terms = {}
    for x in range(dim):
        # w[j] = <j| P(x,z) U |j contribution>: U[j, j^x] weighted by the
        # z-dependent phase, summed via the transform
        w = U[idx, idx ^ x]
        wh = _walsh_hadamard(w)
        for z in range(dim):
            c = wh[z] / dim
            if abs(c) <= tol:
                continue
            ny = bin(x & z).count("1")
            terms[(x, z)] = c * (1j ** (ny % 4))
    return PauliSum(n_qubits, terms)


def dumps(psum: PauliSum):
    """Serialize: one `<re> <im> <letters>` line per string, qubit 0 first."""
    lines = []
    for (x, z), c in sorted(psum.terms.items()):
        lines.append(
            f"{c.real:.17g} {c.imag:.17g} {string_letters(x, z, psum.n_qubits)}"
        )
    return "\n".join(lines) + "\n"


def loads(text):
    terms = {}
    n_qubits = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {ln}: expected `re im letters`, got {raw!r}")
        re_c, im_c, letters = parts
        if n_qubits is None:
            n_qubits = len(letters)
        elif len(letters) != n_qubits:
            raise ValueError(f"line {ln}: inconsistent string width")
        x = z = 0
        for q, ch in enumerate(letters):
            if ch not in _MASKS:
                raise ValueError(f"line {ln}: invalid letter {ch!r}")
            xb, zb = _MASKS[ch]
            x |= xb << q
            z |= zb << q
        key = (x, z)
        terms[key] = terms.get(key, 0.0) + complex(float(re_c), float(im_c))
    if n_qubits is None:
        raise ValueError("no Pauli strings found")
    return PauliSum(n_qubits, terms)
