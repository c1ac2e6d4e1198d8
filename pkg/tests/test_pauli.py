"""Pauli strings in symplectic form: products, encoding, decomposition."""

import numpy as np
import pytest

from spinadapt.fermiops import (
    CREATE,
    annihilate,
    anti_hermitian,
    create,
    excitation,
    to_matrix,
)
from spinadapt.fock import enumerate_basis
from spinadapt.pauli import (
    PauliSum,
    dumps,
    jordan_wigner,
    lcu_decompose,
    loads,
    string_letters,
    strings_commute,
)
from spinadapt.pools import singlet_double_cg, spin_single

from oracles import jw_ladder_kron, pauli_matrix_kron


def single_string(n_qubits, x, z, coeff=1.0):
    return PauliSum(n_qubits, {(x, z): coeff})


def test_string_letters():
    # letters run left-to-right in ascending qubit order
    assert string_letters(0b00, 0b00, 2) == "II"
    assert string_letters(0b01, 0b00, 2) == "XI"
    assert string_letters(0b00, 0b01, 2) == "ZI"
    assert string_letters(0b01, 0b01, 2) == "YI"
    assert string_letters(0b10, 0b01, 2) == "ZX"


def test_canonical_strings_are_hermitian():
    rng = np.random.default_rng(41)
    for _ in range(20):
        x, z = int(rng.integers(0, 8)), int(rng.integers(0, 8))
        mat = single_string(3, x, z).to_matrix()
        assert np.allclose(mat, mat.conj().T), (x, z)
        assert np.allclose(mat, pauli_matrix_kron(x, z, 3))


def test_product_phases_match_kron_oracle():
    rng = np.random.default_rng(42)
    for _ in range(40):
        x1, z1 = int(rng.integers(0, 16)), int(rng.integers(0, 16))
        x2, z2 = int(rng.integers(0, 16)), int(rng.integers(0, 16))
        prod = single_string(4, x1, z1) * single_string(4, x2, z2)
        direct = pauli_matrix_kron(x1, z1, 4) @ pauli_matrix_kron(x2, z2, 4)
        assert np.allclose(prod.to_matrix(), direct, atol=1e-13)


def test_strings_commute_predicate():
    rng = np.random.default_rng(43)
    for _ in range(40):
        k1 = (int(rng.integers(0, 16)), int(rng.integers(0, 16)))
        k2 = (int(rng.integers(0, 16)), int(rng.integers(0, 16)))
        a = pauli_matrix_kron(*k1, 4)
        b = pauli_matrix_kron(*k2, 4)
        expected = np.allclose(a @ b, b @ a)
        assert strings_commute(k1, k2) == expected


def test_sum_arithmetic_and_one_norm():
    s = 2.0 * single_string(2, 0b01, 0b00) - single_string(2, 0b00, 0b10, 0.5)
    assert len(s) == 2
    assert np.isclose(s.one_norm(), 2.5)
    mat = s.to_matrix()
    direct = 2.0 * pauli_matrix_kron(1, 0, 2) - 0.5 * pauli_matrix_kron(0, 2, 2)
    assert np.allclose(mat, direct)
    assert np.allclose(s.dagger().to_matrix(), mat.conj().T)


def test_identity_and_pruning():
    ident = PauliSum.identity(2, 3.0)
    assert np.allclose(ident.to_matrix(), 3.0 * np.eye(4))
    cancel = single_string(2, 1, 0) - single_string(2, 1, 0)
    assert len(cancel) == 0


def test_jordan_wigner_ladder_matches_kron_oracle():
    for n in (1, 2, 3):
        for p in range(2 * min(n, 2)):
            if p >= 2 * n:
                continue
            a_dag = jordan_wigner(create(p), 2 * n).to_matrix()
            assert np.allclose(a_dag, jw_ladder_kron(p, CREATE, 2 * n), atol=1e-14)
            a = jordan_wigner(annihilate(p), 2 * n).to_matrix()
            assert np.allclose(a, a_dag.conj().T, atol=1e-14)


def test_jordan_wigner_preserves_anticommutation():
    n_q = 4
    mats = [jordan_wigner(annihilate(p), n_q).to_matrix() for p in range(n_q)]
    for p in range(n_q):
        for q in range(n_q):
            acomm = mats[p] @ mats[q].conj().T + mats[q].conj().T @ mats[p]
            expected = np.eye(2**n_q) if p == q else np.zeros((2**n_q,) * 2)
            assert np.allclose(acomm, expected, atol=1e-13)


def test_jordan_wigner_matches_fermionic_matrix():
    # Qubit p holds spinorbital p with the ascending-bitmask basis, so the
    # encoded matrix must equal the direct determinant-space matrix.
    for n_spatial in (1, 2, 3):
        basis = enumerate_basis(n_spatial)
        n_q = 2 * n_spatial
        ops = [anti_hermitian(excitation((0,), (1,)))] if n_q >= 2 else []
        if n_q >= 4:
            ops.append(spin_single(0, 3))
            ops.append(anti_hermitian(excitation((2, 1), (0, 3))))
        if n_spatial >= 3:
            ops.append(singlet_double_cg(0, 0, 1, 2, 0).body)
        for op in ops:
            ferm = to_matrix(op, basis).toarray()
            qubit = jordan_wigner(op, n_q).to_matrix()
            assert np.allclose(ferm, qubit, atol=1e-12)


def test_lcu_round_trip_random_unitary():
    rng = np.random.default_rng(44)
    dim = 8
    q, _ = np.linalg.qr(
        rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    )
    decomp = lcu_decompose(q)
    assert np.allclose(decomp.to_matrix(), q, atol=1e-12)
    assert decomp.one_norm() >= np.abs(np.trace(q)) / dim - 1e-12


def test_lcu_on_known_single_qubit_gates():
    y = np.array([[0, -1j], [1j, 0]])
    decomp = lcu_decompose(y)
    assert len(decomp) == 1
    ((key, coeff),) = decomp.terms.items()
    assert key == (1, 1)
    assert np.isclose(coeff, 1.0)
    hadamard = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    decomp = lcu_decompose(hadamard)
    assert np.allclose(decomp.to_matrix(), hadamard, atol=1e-14)
    assert np.isclose(decomp.one_norm(), np.sqrt(2))


def test_lcu_rejects_bad_shapes():
    with pytest.raises(ValueError):
        lcu_decompose(np.eye(3))
    with pytest.raises(ValueError):
        lcu_decompose(np.ones((2, 4)))


def test_dump_load_round_trip():
    psum = jordan_wigner(singlet_double_cg(0, 0, 1, 2, 0).body, 6)
    text = dumps(psum)
    back = loads(text)
    assert back.n_qubits == psum.n_qubits
    assert np.allclose(back.to_matrix(), psum.to_matrix(), atol=1e-15)
    # serialization is canonical: sorted keys, stable float text
    assert dumps(back) == text


def test_loads_error_messages_carry_line_numbers():
    with pytest.raises(ValueError, match="line 2"):
        loads("0 0.5 XX\nnot a line\n")
    with pytest.raises(ValueError, match="letter"):
        loads("0 0.5 XQ\n")
    with pytest.raises(ValueError, match="width"):
        loads("0 0.5 XX\n0 0.5 XXX\n")
