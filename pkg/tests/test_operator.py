import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frozen_values import COEFFS
from qspec.errors import DomainError
from qspec.operator import (apply_symmetry, auto_half_width, coeff_a, coeff_b, coeff_b_three_term,
                            eig, exact_spectrum, norm_bound, rescaling_weights, singular_decay,
                            tridiagonal_ql, truncate)
from qspec.qcore import QParams

params_st = st.builds(QParams, q=st.floats(0.2, 0.85), alpha=st.floats(0.3, 2.0),
                      beta=st.floats(0.0, 3.0))


@pytest.mark.parametrize("l,q,alpha,beta,a_ref,b_ref", COEFFS)
def test_coefficients_match_oracle(l, q, alpha, beta, a_ref, b_ref):
    p = QParams(q, alpha, beta)
    assert abs(coeff_a(l, p) - a_ref) <= 1e-14 * max(1.0, abs(a_ref))
    assert abs(coeff_b(l, p, check=True) - b_ref) <= 1e-13 * max(1.0, abs(b_ref))


def test_coeff_b_example_value():
    # b_0 at q=1/2, alpha=1, beta=1/4: 1*(3/2)(7/8)*2/((3/2)*3) = 7/12
    assert abs(coeff_b(0, QParams(0.5, 1.0, 0.25)) - 7 / 12) < 1e-15


def test_b_vanishes_at_beta_one_over_q():
    p = QParams(0.6, 0.9, 1 / 0.6)
    assert np.max(np.abs(coeff_b(np.arange(-30, 31), p))) < 1e-15


@given(p=params_st, l=st.integers(-40, 40))
@settings(max_examples=80)
def test_coefficient_symmetries(p, l):
    inv = p.replace(alpha=1 / p.alpha)
    assert abs(coeff_a(l, p) - coeff_a(-l - 1, inv)) <= 1e-14 * max(1e-300, abs(coeff_a(l, p)))
    assert abs(coeff_b(l, p) - coeff_b(-l, inv)) <= 1e-14 * max(1e-300, abs(coeff_b(l, p)))
    assert abs(coeff_b(l, p) - coeff_b_three_term(l, p)) <= 1e-13


def test_coefficients_decay_both_ways():
    p = QParams(0.5, 1.0, 0.25)
    for l in (30, -30):
        assert abs(coeff_a(l, p)) < 1e-8 and abs(coeff_b(l, p)) < 1e-8


def test_rescaling_makes_grid_operator_symmetric():
    # L = H D H^{-1} with D the grid difference operator of the polynomials
    p = QParams(0.5, 0.8, 0.3)
    q, al, be = p.q, p.alpha, p.beta
    ls = np.arange(-6, 7)
    e2 = (al * q**ls.astype(float)) ** 2
    down = (1 + be * e2) / ((1 + e2) * (1 + e2 / q))
    up = (1 + be / e2) / ((1 + 1 / e2) * (1 + 1 / (e2 * q)))
    D = np.diag(1 - down - up) + np.diag(up[:-1], 1) + np.diag(down[1:], -1)
    h = rescaling_weights(p, ls)
    assert h[6] == 1.0
    L = np.diag(h) @ D @ np.diag(1 / h)
    T = truncate(p, 6).dense()
    assert np.max(np.abs(L - T)) < 1e-14
    with pytest.raises(DomainError):
        rescaling_weights(QParams(0.5, 1.0, 0.0), ls)


def test_auto_half_width_and_norm_bound():
    p = QParams(0.5, 1.0, 0.25)
    N = auto_half_width(p)
    T = truncate(p, N)
    assert max(abs(T.diag[0]), abs(T.diag[-1]), abs(T.offdiag[0]), abs(T.offdiag[-1])) < 1e-13 / 0.5
    s = np.abs(eig(truncate(p, N + 10), vectors=False).eigenvalues).max()
    assert s <= norm_bound(p)


def test_truncation_is_readonly_and_matvec():
    T = truncate(QParams(0.6, 0.9, 0.7), 8)
    assert T.dim == 17 and T.indices[0] == -8
    v = np.random.default_rng(1).standard_normal(T.dim)
    assert np.allclose(T.matvec(v), T.dense() @ v, atol=1e-15)
    with pytest.raises(ValueError):
        T.diag[0] = 1.0
    with pytest.raises(DomainError):
        truncate(QParams(0.6, 0.9, 0.7), 0)


@given(n=st.integers(1, 40), seed=st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_ql_matches_numpy_on_random_tridiagonal(n, seed):
    rng = np.random.default_rng(seed)
    d, e = rng.standard_normal(n), rng.standard_normal(n - 1)
    vals, vecs = tridiagonal_ql(d, e)
    T = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    assert np.allclose(np.sort(vals), np.linalg.eigvalsh(T), atol=1e-12)
    assert np.max(np.abs(T @ vecs - vecs * vals)) < 1e-12
    assert np.max(np.abs(vecs.T @ vecs - np.eye(n))) < 1e-12


def test_ql_edge_cases():
    vals, vecs = tridiagonal_ql([3.0], [])
    assert vals[0] == 3.0 and vecs[0, 0] == 1.0
    vals, _ = tridiagonal_ql([1.0, 1.0, 1.0], [0.0, 0.0], vectors=False)
    assert np.allclose(vals, 1.0)


@pytest.mark.parametrize("p", [QParams(0.5, 1.0, 0.25), QParams(0.7, 0.8, 1.0), QParams(0.5, 1.0, 0.0),
                               QParams(0.6, -1.3, 2.5)])
def test_spectrum_is_geometric(p):
    spec = eig(truncate(p, 60))
    pos_pred, neg_pred = exact_spectrum(p, 8)
    pos = np.sort(spec.eigenvalues[spec.eigenvalues > 0])[::-1][:8]
    neg = np.sort(spec.eigenvalues[spec.eigenvalues < 0])[: neg_pred.size]
    assert np.max(np.abs(pos - pos_pred)) < 1e-12
    if p.beta > 0:
        assert np.max(np.abs(neg - neg_pred)) < 1e-12
    assert np.all(np.diff(spec.eigenvalues) <= 0)
    assert np.max(spec.residuals(truncate(p, 60))) < 1e-13


def test_spectrum_runtime():
    t = time.perf_counter()
    for p in (QParams(0.5, 1.0, 0.25), QParams(0.7, 0.8, 1.0), QParams(0.5, 1.0, 0.0)):
        eig(truncate(p, 60))
    assert time.perf_counter() - t < 2.0


@pytest.mark.parametrize("which", ["U", "U2", "V"])
def test_symmetries_on_vectors(which):
    p = QParams(0.6, 0.8, 0.4)
    N = 20
    T = truncate(p, N)
    v = np.random.default_rng(3).standard_normal(2 * N + 1)
    w, p2 = apply_symmetry(which, p, v)
    lhs, _ = apply_symmetry(which, p, T.matvec(v))  # S L v
    rhs = truncate(p2, N).matvec(w)  # L' S v
    if which == "U":
        rhs = -p.q * p.beta * rhs
    assert np.max(np.abs(lhs - rhs)) < 1e-13
    with pytest.raises(DomainError):
        apply_symmetry("W", p, v)


def test_singular_decay_within_interleaving_constant():
    for p in (QParams(0.5, 1.0, 0.25), QParams(0.7, 0.8, 1.0), QParams(0.5, 1.0, 0.0)):
        r = singular_decay(p, 60)
        assert r.sup_ratio <= max(1.0, p.beta * p.q) * (1 + 1e-6)


def test_singular_decay_constant_fails_between_q_powers():
    # for q^{-1/2} < beta < q^{-3/2} the second singular value beta q exceeds q^{1/2}
    r = singular_decay(QParams(0.5, 1.0, 2.0), 60)
    assert r.singular_values[1] == pytest.approx(1.0, abs=1e-12)
    assert r.sup_ratio > 1.4
