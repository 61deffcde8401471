"""
Tests for structure tables, the ideal chain Q(h) <= z(h) and augmentations.
"""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import VALID_FIXTURES, fixture_expected, load_algebra, load_augmentation
from rackforge.algebra.augmented import (
    AugmentedLeibnizAlgebra,
    canonical_augmentation,
    derived_algebra,
    derived_bracket,
    verify_augmented,
)
from rackforge.algebra.leibniz import (
    LeibnizAlgebra,
    adjoint_map,
    center_quotient,
    ideal_check,
    left_center,
    lie_quotient,
    quotient_by_ideal,
    squares_ideal,
    verify_leibniz,
    verify_lie,
)
from rackforge.algebra.linalg import Subspace, kernel, rank, right_inverse_columns, row_reduce, solve
from rackforge.algebra.scalars import ScalarMode, as_array, jsonable, parse_scalar, zeros
from rackforge.exceptions import ConsistencyError, InputError, PreconditionError

fractions = st.fractions(min_value=-4, max_value=4, max_denominator=12)


def rational_vector(dim):
    return st.lists(fractions, min_size=dim, max_size=dim).map(lambda v: np.array(v, dtype=object))


# scalars and linear algebra

def test_parse_scalar_modes():
    assert parse_scalar("1/2", ScalarMode.RATIONAL) == Fraction(1, 2)
    assert parse_scalar(3, ScalarMode.RATIONAL) == Fraction(3)
    assert parse_scalar("1/4", ScalarMode.FLOAT64) == 0.25
    with pytest.raises(InputError):
        parse_scalar(0.5, ScalarMode.RATIONAL)
    with pytest.raises(InputError):
        parse_scalar(True, ScalarMode.FLOAT64)
    with pytest.raises(InputError):
        parse_scalar("1/0", ScalarMode.RATIONAL)


def test_jsonable_renders_fractions_as_strings():
    data = as_array([[1, "1/2"], [-3, "2/6"]], ScalarMode.RATIONAL)
    assert jsonable(data) == [["1", "1/2"], ["-3", "1/3"]]


def test_exact_kernel_and_rank():
    m = as_array([[1, 2], [2, 4]], ScalarMode.RATIONAL)
    assert rank(m) == 1
    basis = kernel(m)
    assert basis.shape == (1, 2)
    assert list(basis[0]) == [Fraction(-2), Fraction(1)]


def test_row_reduce_pivots():
    m = as_array([[0, 1, 2], [0, 2, 4], [1, 0, 0]], ScalarMode.RATIONAL)
    reduced, pivots = row_reduce(m)
    assert pivots == [0, 1]
    assert list(reduced[0]) == [1, 0, 0]
    assert list(reduced[1]) == [0, 1, 2]


def test_exact_solve():
    a = as_array([[2, 1], [1, 1]], ScalarMode.RATIONAL)
    b = as_array([3, 2], ScalarMode.RATIONAL)
    assert list(solve(a, b)) == [Fraction(1), Fraction(1)]


def test_right_inverse_columns():
    assert right_inverse_columns(as_array([[1, 0, 0], [0, 0, 1]], ScalarMode.RATIONAL)) == [0, 2]
    assert right_inverse_columns(as_array([[1, 1], [2, 2]], ScalarMode.RATIONAL)) is None


def test_subspace_span_drops_dependent_vectors():
    vectors = [as_array(v, ScalarMode.RATIONAL) for v in ([1, 1, 0], [2, 2, 0], [0, 0, 1])]
    span = Subspace.span(vectors, 3, ScalarMode.RATIONAL)
    assert span.dim == 2
    assert span.contains_vector(as_array([3, 3, -1], ScalarMode.RATIONAL))
    assert not span.contains_vector(as_array([1, 0, 0], ScalarMode.RATIONAL))


# structure tables

def test_bad_table_shape():
    with pytest.raises(InputError):
        LeibnizAlgebra(zeros((2, 2, 3), ScalarMode.RATIONAL))


def test_bracket_rejects_wrong_length(heisenberg):
    with pytest.raises(InputError):
        heisenberg.bracket(np.zeros(2), np.zeros(3))


def test_ad_matrix(heisenberg):
    ad = heisenberg.ad(heisenberg.basis_vector(0))
    assert ad[2, 1] == 1
    assert sum(1 for v in ad.flat if v != 0) == 1


@pytest.mark.parametrize("name", VALID_FIXTURES)
def test_leibniz_identity_on_fixtures(name):
    report = verify_leibniz(load_algebra(name))
    assert report.passed
    assert report.max_defect == 0.0


def test_abelian_dim2_passes():
    assert verify_leibniz(LeibnizAlgebra.abelian(2)).passed


def test_leibniz_fails_on_broken_table():
    alg = load_algebra("not_leibniz")
    report = verify_leibniz(alg)
    assert not report.passed
    record = report.check("leibniz_identity")
    assert record.counterexample["triple"] == [2, 1, 1]
    assert record.counterexample["defect"] == ["0", "2"]
    assert record.max_defect == 2.0


def test_float_table_within_tolerance():
    table = [[[0.0, 1.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1e-12]]]
    alg = LeibnizAlgebra.from_table(table, ScalarMode.FLOAT64)
    assert not alg.exact
    assert verify_leibniz(alg).passed


def test_lie_flags():
    assert verify_lie(load_algebra("heisenberg")).passed
    assert verify_lie(load_algebra("e2_type")).passed
    report = verify_lie(load_algebra("leibniz_dim2"))
    assert not report.passed
    assert report.first_failure().name == "antisymmetry"


@given(rational_vector(3), rational_vector(3), rational_vector(3))
@settings(max_examples=50, deadline=None)
def test_heisenberg_jacobi_and_antisymmetry(x, y, z):
    alg = load_algebra("heisenberg")
    br = alg.bracket
    assert all(v == 0 for v in br(x, y) + br(y, x))
    lhs = br(x, br(y, z))
    rhs = br(br(x, y), z) + br(y, br(x, z))
    assert all(v == 0 for v in lhs - rhs)


@given(rational_vector(4), rational_vector(4), rational_vector(4))
@settings(max_examples=50, deadline=None)
def test_hemisemidirect_left_leibniz(x, y, z):
    alg = load_algebra("hemisemidirect_heisenberg")
    br = alg.bracket
    lhs = br(x, br(y, z))
    rhs = br(br(x, y), z) + br(y, br(x, z))
    assert all(v == 0 for v in lhs - rhs)


@pytest.mark.parametrize("name", VALID_FIXTURES + ["not_leibniz"])
def test_fixture_reference_values(name):
    expected = fixture_expected(name)
    alg = load_algebra(name)
    report = verify_leibniz(alg)
    assert report.passed == expected["leibniz"]
    if not expected["leibniz"]:
        assert report.check("leibniz_identity").counterexample["triple"] == expected["failing_triple"]
        return
    assert verify_lie(alg).passed == expected["lie"]
    assert squares_ideal(alg).dim == expected["squares_dim"]
    assert left_center(alg).dim == expected["left_center_dim"]
    if "fiber_dim" in expected:
        assert load_augmentation(name).kernel_of_p().dim == expected["fiber_dim"]


# ideals and quotients

@pytest.mark.parametrize("name", VALID_FIXTURES)
def test_ideal_chain(name):
    alg = load_algebra(name)
    squares = squares_ideal(alg)
    center = left_center(alg)
    assert center.contains(squares)
    quotient, projection = lie_quotient(alg)
    assert quotient.exact
    assert verify_lie(quotient).passed
    assert projection.rows == alg.dim - squares.dim


def test_squares_and_center_of_leibniz_dim2(leibniz_dim2):
    squares = squares_ideal(leibniz_dim2)
    center = left_center(leibniz_dim2)
    assert squares.dim == 1 and center.dim == 1
    assert list(squares.basis[0]) == [0, 1]
    quotient, _ = lie_quotient(leibniz_dim2)
    assert quotient.dim == 1
    assert all(v == 0 for v in quotient.structure.flat)


def test_center_quotient_of_heisenberg(heisenberg):
    center = left_center(heisenberg)
    assert center.dim == 1
    assert list(center.basis[0]) == [0, 0, 1]
    quotient, projection = center_quotient(heisenberg)
    assert quotient.dim == 2
    assert verify_lie(quotient).passed
    assert all(v == 0 for v in quotient.structure.flat)
    assert projection.cols == 3


def test_lie_algebra_has_zero_squares(e2_algebra):
    assert squares_ideal(e2_algebra).dim == 0
    quotient, projection = lie_quotient(e2_algebra)
    assert quotient.dim == 3
    assert np.array_equal(quotient.structure, e2_algebra.structure)


def test_adjoint_map_of_leibniz_dim2(leibniz_dim2):
    e1, e2 = leibniz_dim2.basis_vector(0), leibniz_dim2.basis_vector(1)
    ad = adjoint_map(leibniz_dim2, e1)
    assert list(ad(e1)) == [0, 1]
    assert list(ad(e2)) == [0, 0]
    assert not any(v != 0 for v in adjoint_map(leibniz_dim2, e2).matrix.flat)


@pytest.mark.parametrize("name", ["heisenberg", "e2_type", "hemisemidirect_affine"])
@given(x=rational_vector(3), y=rational_vector(3))
@settings(max_examples=100, deadline=None)
def test_adjoint_map_matches_table_contraction(name, x, y):
    alg = load_algebra(name)
    contraction = sum(x[i] * y[j] * alg.structure[i, j] for i in range(3) for j in range(3))
    image = adjoint_map(alg, x)(y)
    assert list(image) == list(contraction)
    assert list(image) == list(alg.bracket(x, y))


def test_ideal_check_reports_the_failing_side(heisenberg):
    assert ideal_check(heisenberg, left_center(heisenberg)).passed
    span = Subspace.span([heisenberg.basis_vector(0)], 3, ScalarMode.RATIONAL)
    report = ideal_check(heisenberg, span)
    assert not report.passed
    assert report.max_defect == 1.0


def test_quotient_by_non_ideal(heisenberg):
    span = Subspace.span([heisenberg.basis_vector(0)], 3, ScalarMode.RATIONAL)
    with pytest.raises(PreconditionError):
        quotient_by_ideal(heisenberg, span)


# augmentations

@pytest.mark.parametrize(
    "name", ["hemisemidirect_dim2", "hemisemidirect_heisenberg", "hemisemidirect_e2", "hemisemidirect_affine"]
)
def test_bundled_augmentations_verify(name):
    aug = load_augmentation(name)
    report = verify_augmented(aug)
    assert report.passed, report.first_failure()
    derived = derived_algebra(aug)
    assert np.array_equal(derived.structure, load_algebra(name).structure)


def test_derived_bracket_of_hemisemidirect():
    aug = load_augmentation("hemisemidirect_dim2")
    a = as_array([1, 0], ScalarMode.RATIONAL)
    v = as_array([0, 1], ScalarMode.RATIONAL)
    assert list(derived_bracket(aug, a, v)) == [0, 1]
    assert list(derived_bracket(aug, v, a)) == [0, 0]
    with pytest.raises(InputError):
        derived_bracket(aug, np.zeros(3), v)


def test_equivariance_failure_is_reported():
    aug = AugmentedLeibnizAlgebra.from_tables(
        [[[0]]], [[0, 1]], [[[0, 0], [0, 1]]], ScalarMode.RATIONAL, g_dim=1, h_dim=2, name="broken",
    )
    report = verify_augmented(aug)
    assert not report.passed
    assert not report.check("equivariance").passed


def test_augmentation_shape_mismatch():
    with pytest.raises(InputError):
        AugmentedLeibnizAlgebra(
            LeibnizAlgebra.abelian(1), as_array([[1, 0]], ScalarMode.RATIONAL), zeros((1, 3, 3), ScalarMode.RATIONAL)
        )


@pytest.mark.parametrize("name", VALID_FIXTURES)
def test_canonical_augmentation_recovers_bracket(name):
    alg = load_algebra(name)
    aug = canonical_augmentation(alg)
    assert verify_augmented(aug).passed
    assert np.array_equal(derived_algebra(aug).structure, alg.structure)
    assert aug.kernel_of_p().same_as(squares_ideal(alg))


def test_canonical_augmentation_of_leibniz_dim2(leibniz_dim2):
    aug = canonical_augmentation(leibniz_dim2)
    assert aug.dim_g == 1
    assert [list(row) for row in aug.p] == [[1, 0]]
    assert [list(row) for row in aug.action[0]] == [[0, 0], [1, 0]]


def test_canonical_augmentation_needs_leibniz():
    with pytest.raises(ConsistencyError):
        canonical_augmentation(load_algebra("not_leibniz"))
