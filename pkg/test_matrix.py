"""
Tests for characteristic polynomials, roots, matrix exponentials and Jordan parts.
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rackforge.algebra.linalg import inverse
from rackforge.algebra.scalars import ScalarMode, as_array, identity, to_float
from rackforge.exceptions import ConditioningWarning, InputError, PreconditionError
from rackforge.matrix.exponential import (
    exp_injectivity_probe,
    h_series,
    is_nilpotent,
    mat_exp,
    strip_membership,
    unipotent_log,
)
from rackforge.matrix.jordan import functional_jordan_parts, jordan_chevalley, squarefree_part
from rackforge.matrix.polynomials import ComplexMultiset, MonicPolynomial, char_poly, from_roots, root_bound, roots

N2 = as_array([[0, 1], [0, 0]], ScalarMode.RATIONAL)


def rotation_generator(theta: float) -> np.ndarray:
    return np.array([[0.0, -theta], [theta, 0.0]])


# characteristic polynomials and roots

def test_char_poly_examples():
    assert list(char_poly(as_array([[0, 0], [0, 0]], ScalarMode.RATIONAL)).coeffs) == [0, 0]
    assert list(char_poly(as_array([[1, 0], [0, 2]], ScalarMode.RATIONAL)).coeffs) == [-3, 2]
    assert list(char_poly(as_array([[0, -1], [1, 0]], ScalarMode.RATIONAL)).coeffs) == [0, 1]


def test_char_poly_is_exact_for_rationals():
    m = as_array([["1/2", 1, 0], [0, "1/3", 2], [1, 0, -1]], ScalarMode.RATIONAL)
    poly = char_poly(m)
    assert poly.exact
    # trace and determinant appear as -a_1 and (-1)^n a_n
    assert poly.coeffs[0] == -(Fraction(1, 2) + Fraction(1, 3) - 1)
    det = Fraction(1, 2) * (Fraction(1, 3) * -1 - 0) - 1 * (0 - 2) + 0
    assert poly.coeffs[2] == -det


@given(
    st.lists(st.integers(-4, 4), min_size=9, max_size=9),
    st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=5), min_size=6, max_size=6),
    st.lists(st.fractions(min_value=1, max_value=3, max_denominator=4), min_size=3, max_size=3),
)
@settings(max_examples=50, deadline=None)
def test_char_poly_is_similarity_invariant(entries, off_diagonal, diagonal):
    x = as_array(np.array(entries).reshape(3, 3), ScalarMode.RATIONAL)
    lower = as_array(np.eye(3, dtype=int), ScalarMode.RATIONAL)
    upper = as_array(np.diag(diagonal), ScalarMode.RATIONAL)
    for k, (i, j) in enumerate([(1, 0), (2, 0), (2, 1)]):
        lower[i, j] = off_diagonal[k]
        upper[j, i] = off_diagonal[k + 3]
    p = lower @ upper
    assert list(char_poly(p @ x @ inverse(p)).coeffs) == list(char_poly(x).coeffs)


def test_from_roots_examples():
    assert np.allclose(from_roots(ComplexMultiset(np.array([1, 2]))).coeffs, [-3, 2])
    assert np.allclose(from_roots(ComplexMultiset(np.array([1j, -1j]))).coeffs, [0, 1])
    assert np.allclose(from_roots(ComplexMultiset(np.zeros(3))).coeffs, [0, 0, 0])


def test_roots_examples():
    double_zero = roots(MonicPolynomial(np.array([0.0, 0.0])))
    assert np.allclose(double_zero.values, [0, 0])
    simple = roots(MonicPolynomial(np.array([-3.0, 2.0])))
    assert np.allclose(simple.values, [1, 2])


def test_root_bound_examples():
    assert root_bound(MonicPolynomial(np.array([0.0, 0.0, 0.0]))) == 1.0
    assert root_bound(MonicPolynomial(np.array([-3.0, 2.0]))) == 5.0


def test_roots_round_trip_on_random_polynomials():
    rng = np.random.default_rng(0)
    for _ in range(200):
        degree = int(rng.integers(1, 7))
        poly = MonicPolynomial(rng.uniform(-2.0, 2.0, size=degree))
        rebuilt = from_roots(roots(poly))
        assert rebuilt.same_as(poly, 1e-7)


def test_random_multisets_survive_from_roots():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n = int(rng.integers(1, 6))
        z = ComplexMultiset(rng.normal(size=n) + 1j * rng.normal(size=n))
        assert roots(from_roots(z)).distance(z) < 1e-6


@given(st.lists(st.floats(min_value=-10, max_value=10, allow_nan=False), min_size=1, max_size=6))
@settings(max_examples=100, deadline=None)
def test_roots_respect_root_bound(coefficients):
    poly = MonicPolynomial(np.array(coefficients))
    bound = root_bound(poly)
    assert all(abs(z) <= bound * (1 + 1e-9) + 1e-12 for z in roots(poly).values)


def test_multiset_distance_ignores_order():
    a = ComplexMultiset(np.array([1 + 1j, 2, -3j]))
    b = ComplexMultiset(np.array([-3j, 1 + 1j, 2]))
    assert a.distance(b) == 0.0
    with pytest.raises(InputError):
        a.distance(ComplexMultiset(np.array([1.0])))


def test_clusters_merge_repeated_roots():
    multiset = ComplexMultiset(np.array([1.0, 1.0 + 1e-9, 2.0]))
    assert [mult for _, mult in multiset.clusters()] == [2, 1]


# exponential and h-series

def test_mat_exp_examples():
    assert np.array_equal(mat_exp(as_array([[0, 0], [0, 0]], ScalarMode.RATIONAL)), identity(2, ScalarMode.RATIONAL))
    assert [list(row) for row in mat_exp(N2)] == [[1, 1], [0, 1]]
    expected = np.array([[math.cos(1), -math.sin(1)], [math.sin(1), math.cos(1)]])
    assert np.max(np.abs(mat_exp(rotation_generator(1.0)) - expected)) < 1e-12


def test_mat_exp_rejects_bad_input():
    with pytest.raises(InputError):
        mat_exp(np.zeros((2, 3)))
    with pytest.raises(InputError):
        mat_exp(np.zeros((2, 2)), tol=0.0)


def test_mat_exp_large_norm():
    x = np.diag([3.0, -2.0])
    assert np.allclose(mat_exp(x), np.diag([math.exp(3.0), math.exp(-2.0)]), rtol=1e-12)


def test_h_series_examples():
    assert np.array_equal(h_series(as_array([[0, 0], [0, 0]], ScalarMode.RATIONAL)), identity(2, ScalarMode.RATIONAL))
    assert [list(row) for row in h_series(N2)] == [[1, Fraction(-1, 2)], [0, 1]]
    assert abs(np.linalg.det(h_series(rotation_generator(1.0)))) > 0.1


def test_h_series_matches_closed_form_on_diagonal():
    mu = np.array([0.7, -1.3])
    expected = np.diag((1 - np.exp(-mu)) / mu)
    assert np.allclose(h_series(np.diag(mu)), expected, atol=1e-12)


@given(st.lists(st.floats(min_value=-1, max_value=1, allow_nan=False), min_size=16, max_size=16))
@settings(max_examples=100, deadline=None)
def test_h_series_times_x(entries):
    x = np.array(entries).reshape(4, 4)
    norm = np.linalg.norm(x, 2)
    if norm > 2.0:
        x = x * (2.0 / norm)
    assert np.max(np.abs(h_series(x) @ x - (np.eye(4) - mat_exp(-x)))) < 1e-12


def test_h_series_times_x_is_exact_for_nilpotent():
    rng = np.random.default_rng(5)
    for _ in range(20):
        x = as_array(np.triu(rng.integers(-3, 4, size=(4, 4)), k=1), ScalarMode.RATIONAL)
        assert np.array_equal(h_series(x) @ x, identity(4, ScalarMode.RATIONAL) - mat_exp(-x))


def test_h_series_invertible_in_the_strip():
    rng = np.random.default_rng(2)
    limit = 0.95 * 2 * math.pi
    for _ in range(100):
        theta = rng.uniform(-limit, limit)
        a, b = rng.uniform(-1.0, 1.0, size=2)
        block = np.zeros((3, 3))
        block[:2, :2] = [[a, -theta], [theta, a]]
        block[2, 2] = b
        q = np.eye(3) + 0.2 * rng.uniform(-1.0, 1.0, size=(3, 3))
        x = q @ block @ np.linalg.inv(q)
        assert strip_membership(x, limit + 1e-6).member
        assert abs(np.linalg.det(h_series(x))) > 1e-8


def test_unipotent_log_inverts_exp_exactly():
    rng = np.random.default_rng(3)
    for _ in range(50):
        upper = np.triu(rng.integers(-3, 4, size=(4, 4)), k=1)
        u = as_array(np.eye(4, dtype=int) + upper, ScalarMode.RATIONAL)
        log = unipotent_log(u)
        assert log.dtype == object
        assert np.array_equal(mat_exp(log), u)


def test_unipotent_log_rejects_non_unipotent():
    with pytest.raises(PreconditionError):
        unipotent_log(as_array([[2, 0], [0, 1]], ScalarMode.RATIONAL))


def test_is_nilpotent():
    assert is_nilpotent(N2)
    assert not is_nilpotent(as_array([[0, 1], [1, 0]], ScalarMode.RATIONAL))


# strips

def test_strip_membership_of_nilpotent():
    verdict = strip_membership(as_array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], ScalarMode.RATIONAL), 1.0)
    assert verdict.member
    assert verdict.margin == 1.0
    assert verdict.beta == 0.0


def test_strip_membership_of_rotations():
    assert strip_membership(rotation_generator(1.0), math.pi).member
    inside = strip_membership(rotation_generator(3.0), math.pi)
    assert inside.member and inside.margin == pytest.approx(math.pi - 3.0)
    boundary = strip_membership(rotation_generator(math.pi), math.pi)
    assert not boundary.member
    with pytest.raises(InputError):
        strip_membership(rotation_generator(1.0), 0.0)


def test_exp_injectivity_probe():
    verdict = exp_injectivity_probe(rotation_generator(0.5), rotation_generator(-0.5))
    assert not verdict.violation
    with pytest.raises(PreconditionError):
        exp_injectivity_probe(np.zeros((2, 2)), rotation_generator(2 * math.pi))


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_exp_injectivity_on_perturbed_pairs(seed):
    rng = np.random.default_rng(seed)
    theta = rng.uniform(-2.5, 2.5)
    a, b = rng.uniform(-1.0, 1.0, size=2)
    block = np.zeros((3, 3))
    block[:2, :2] = [[a, -theta], [theta, a]]
    block[2, 2] = b
    q = np.eye(3) + 0.2 * rng.uniform(-1.0, 1.0, size=(3, 3))
    x = q @ block @ np.linalg.inv(q)
    y = x + 1e-3 * rng.uniform(-1.0, 1.0, size=(3, 3))
    assert not exp_injectivity_probe(x, x).violation
    verdict = exp_injectivity_probe(x, y)
    assert not verdict.violation
    assert verdict.exp_distance > 0.0


# Jordan-Chevalley

def test_jordan_of_a_jordan_block():
    x = as_array([[2, 1], [0, 2]], ScalarMode.RATIONAL)
    pair = jordan_chevalley(x)
    assert pair.exact
    assert [list(row) for row in pair.S] == [[2, 0], [0, 2]]
    assert [list(row) for row in pair.N] == [[0, 1], [0, 0]]


def test_jordan_invariants_on_random_rational_matrices():
    rng = np.random.default_rng(4)
    for k in range(100):
        if k % 2:
            # conjugate a matrix with a repeated eigenvalue and a nontrivial block
            block = np.array([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -2]])
            q = np.eye(4, dtype=int) + np.triu(rng.integers(-2, 3, size=(4, 4)), k=1)
            q = as_array(q, ScalarMode.RATIONAL)
            x = q @ as_array(block, ScalarMode.RATIONAL) @ inverse(q)
        else:
            x = as_array(rng.integers(-3, 4, size=(4, 4)), ScalarMode.RATIONAL)
        pair = jordan_chevalley(x)
        report = pair.verify(x)
        assert report.passed, report.first_failure()
        assert pair.exact


def test_squarefree_part():
    poly = char_poly(as_array([[1, 1, 0], [0, 1, 0], [0, 0, 3]], ScalarMode.RATIONAL))
    assert list(squarefree_part(poly).coeffs) == [-4, 3]


def test_functional_jordan_parts_of_exp():
    x = as_array([[2, 1], [0, 2]], ScalarMode.RATIONAL)
    pair = functional_jordan_parts(x, "exp")
    assert np.allclose(to_float(pair.S), math.exp(2) * np.eye(2))
    assert np.allclose(to_float(pair.N), [[0, math.exp(2)], [0, 0]])
    with pytest.raises(InputError):
        functional_jordan_parts(x, "sin")


def test_float_jordan_fallback():
    q = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 2.0], [0.0, 0.0, 1.0]])
    q_inv = np.linalg.inv(q)
    x = q @ np.array([[2.0, 1.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, -1.0]]) @ q_inv
    pair = jordan_chevalley(x)
    assert not pair.exact
    report = pair.verify(x)
    assert report.passed, report.first_failure()
    assert np.allclose(pair.S, q @ np.diag([2.0, 2.0, -1.0]) @ q_inv, atol=1e-8)


def test_float_jordan_warns_on_close_eigenvalues():
    x = np.diag([1.0, 1.0 + 1e-4])
    with pytest.warns(ConditioningWarning):
        pair = jordan_chevalley(x)
    assert np.allclose(pair.S, x, atol=1e-8)
    assert np.max(np.abs(pair.N)) < 1e-8
