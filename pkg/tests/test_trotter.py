"""Product formulas: schemes, term splitting, error and spin-violation scans."""

import math

import numpy as np
import pytest
import scipy.linalg

from spinadapt.expm import exact_expm
from spinadapt.fermiops import s_squared_operator, to_matrix
from spinadapt.fock import enumerate_basis
from spinadapt.pools import singlet_double_cg
from spinadapt.trotter import (
    SUZUKI_S,
    TrotterScheme,
    error_curve,
    error_scan,
    scheme,
    spin_violation_curve,
    spin_violation_scan,
    term_split,
    trot1_st_spec,
    trot_closed_forms,
    trotterize,
)

from oracles import log_log_slope, random_anti_hermitian

PPQR = singlet_double_cg(1, 1, 3, 5, 0)  # the worked example generator


def dense_terms(gen, basis):
    return [to_matrix(t, basis).toarray() for t in term_split(gen)]


def relabel_to_active(gen):
    from spinadapt.trotter import _relabeled

    active = sorted(set(gen.indices))
    mapping = {orb: i for i, orb in enumerate(active)}
    return _relabeled(gen, mapping), enumerate_basis(len(active))


@pytest.mark.parametrize("order,arity,n_stages", [
    (1, 2, 2), (2, 2, 3), (4, 2, 7),
    (1, 3, 3), (2, 3, 5), (4, 3, 13),
])
def test_scheme_shapes(order, arity, n_stages):
    sch = scheme(order, arity)
    assert len(sch.stages) == n_stages
    for k in range(arity):
        total = sum(c for i, c in sch.stages if i == k)
        assert abs(total - 1.0) < 1e-12


def test_scheme_rejects_unknown():
    with pytest.raises(ValueError):
        scheme(3, 2)
    with pytest.raises(ValueError):
        scheme(1, 4)


def test_scheme_validates_stage_sums():
    with pytest.raises(ValueError):
        TrotterScheme(1, 1, ((0, 0.7),))


def test_suzuki_constant():
    assert math.isclose(SUZUKI_S, 1.0 / (2.0 - 2.0 ** (1.0 / 3.0)))
    # the triple-jump cancellation: s + s + (1 - 2 s) = 1 with s > 1
    assert SUZUKI_S > 1.0


@pytest.mark.parametrize("indices,s_i,n_groups", [
    ((1, 1, 3, 5), 0, 2),   # paired-hole double
    ((0, 1, 2, 3), 0, 2),   # singlet-coupled distinct double
    ((0, 1, 2, 3), 1, 3),   # triplet-intermediate distinct double
])
def test_term_split_group_count_and_sum(indices, s_i, n_groups):
    gen = singlet_double_cg(*indices, s_i)
    groups = term_split(gen)
    assert len(groups) == n_groups
    basis = enumerate_basis(max(indices) + 1)
    total = sum(to_matrix(t, basis).toarray() for t in groups)
    body = to_matrix(gen.body, basis).toarray()
    assert np.allclose(total, body, atol=1e-13)


def test_term_split_groups_commute_internally_but_not_mutually():
    basis = enumerate_basis(3)
    relabeled, _ = relabel_to_active(PPQR)
    mats = dense_terms(relabeled, basis)
    a, b = mats
    assert np.linalg.norm(a @ b - b @ a) > 1e-3  # the split is non-trivial


def test_term_split_rejects_single_string_double():
    gen = singlet_double_cg(0, 0, 1, 1, 0)
    with pytest.raises(ValueError, match="single string"):
        term_split(gen)


def test_trotterize_matches_scipy_product():
    rng = np.random.default_rng(31)
    terms = [random_anti_hermitian(rng, 6) for _ in range(2)]
    theta = 0.83
    for order in (1, 2, 4):
        sch = scheme(order, 2)
        direct = np.eye(6, dtype=complex)
        for idx, frac in sch.stages:
            direct = direct @ scipy.linalg.expm(frac * theta * terms[idx])
        assert np.allclose(trotterize(sch, theta, terms), direct, atol=1e-12)


def test_error_curve_against_direct_norms():
    rng = np.random.default_rng(32)
    terms = [random_anti_hermitian(rng, 5) for _ in range(3)]
    thetas = np.array([0.1, 0.9, 2.2])
    sch = scheme(2, 3)
    got = error_curve(terms, sch, thetas)
    for i, t in enumerate(thetas):
        exact = scipy.linalg.expm(t * sum(terms))
        prod = trotterize(sch, t, terms)
        assert abs(got[i] - np.linalg.norm(exact - prod)) < 1e-11


def test_error_scan_factorization_is_exact():
    # The ambient-space curve must equal a direct dense computation on the
    # full Fock space, not just the active-orbital shortcut it uses.
    gen = singlet_double_cg(0, 0, 1, 2, 0)
    sch = scheme(1, 2)
    thetas = np.array([0.3, 1.1, 4.0])
    got = error_scan(gen, sch, thetas, n_spatial=4)
    basis = enumerate_basis(4)
    terms = dense_terms(gen, basis)
    direct = error_curve(terms, sch, thetas)
    assert np.allclose(got, direct, atol=1e-10)


def test_spin_violation_scan_against_direct_commutator():
    gen = singlet_double_cg(0, 0, 1, 2, 0)
    sch = scheme(1, 2)
    thetas = np.array([0.0, 0.5, 2.0])
    got = spin_violation_scan(gen, sch, thetas, n_spatial=3)
    basis = enumerate_basis(3)
    terms = dense_terms(gen, basis)
    s2 = to_matrix(s_squared_operator(3), basis).toarray()
    direct = spin_violation_curve(terms, sch, thetas, s2)
    assert np.allclose(got, direct, atol=1e-10)


def test_exact_exponential_preserves_spin():
    # sch=None scores exp(theta G) itself; a spin-adapted generator cannot
    # break S^2 (up to the trace-formula cancellation floor).
    gen = singlet_double_cg(0, 0, 1, 2, 0)
    thetas = np.array([0.7, 1.9])
    got = spin_violation_scan(gen, None, thetas, n_spatial=3)
    assert np.all(got < 1e-6)


def test_trotter_breaks_spin_but_less_at_higher_order():
    gen = PPQR
    theta = np.array([0.5])
    v1 = spin_violation_scan(gen, scheme(1, 2), theta, n_spatial=6)[0]
    v2 = spin_violation_scan(gen, scheme(2, 2), theta, n_spatial=6)[0]
    v4 = spin_violation_scan(gen, scheme(4, 2), theta, n_spatial=6)[0]
    assert v1 > v2 > v4 > 1e-8


@pytest.mark.parametrize("which", ["trot1", "trot2"])
def test_trotter_closed_forms_match_staged_products(which):
    spec = trot_closed_forms(0, 1, 2)[which]
    basis = enumerate_basis(3)
    gen = singlet_double_cg(0, 0, 1, 2, 0)
    terms = dense_terms(gen, basis)
    order = 1 if which == "trot1" else 2
    sch = scheme(order, 2)
    mats = spec.materialize(basis)
    rng = np.random.default_rng(33)
    from spinadapt.expm import closed_form_eval

    for theta in rng.uniform(0, 4 * math.pi, size=12):
        prod = trotterize(sch, theta, terms)
        closed = closed_form_eval(spec, theta, basis, mats)
        assert np.linalg.norm(closed - prod) < 1e-12, theta


def test_singlet_triplet_resolution_of_first_order_product():
    # The S/T-resolved expression is an alternative form of the same
    # first-order product.
    spec = trot1_st_spec(0, 1, 2)
    basis = enumerate_basis(3)
    gen = singlet_double_cg(0, 0, 1, 2, 0)
    terms = dense_terms(gen, basis)
    sch = scheme(1, 2)
    mats = spec.materialize(basis)
    from spinadapt.expm import closed_form_eval

    for theta in (0.4, 1.7, 5.0):
        prod = trotterize(sch, theta, terms)
        closed = closed_form_eval(spec, theta, basis, mats)
        assert np.linalg.norm(closed - prod) < 1e-12, theta


@pytest.mark.parametrize("order", [1, 2, 4])
def test_error_order_scaling(order):
    # Error of an order-n formula scales as theta^(n+1) for small theta.
    # The window keeps even the order-4 values above the double-precision
    # floor of the eigendecomposition (~1e-14).
    gen = PPQR
    sch = scheme(order, 2)
    thetas = np.geomspace(6e-3, 6e-2, 8)
    errors = error_scan(gen, sch, thetas, n_spatial=6)
    slope = log_log_slope(thetas, errors)
    assert abs(slope - (order + 1)) < 0.1, slope
