from fractions import Fraction

import pytest

from perverscope.ratlin import (
    RationalMatrix,
    contains_subspace,
    preimage_basis,
    rat,
    span_basis,
    subspace_dim,
    subspace_intersection,
    subspace_sum,
)


def test_rat_parsing():
    assert rat("3/7") == Fraction(3, 7)
    assert rat(-2) == Fraction(-2)
    with pytest.raises(TypeError):
        rat(0.5)


def test_lowest_terms_positive_denominator():
    m = RationalMatrix([["2/4", Fraction(-1, -3)]])
    assert m[0, 0] == Fraction(1, 2)
    assert m[0, 1].denominator == 3 and m[0, 1] > 0


def test_matmul_and_apply():
    a = RationalMatrix([[1, 2], [3, 4]])
    b = RationalMatrix([[0, 1], [1, 0]])
    assert (a * b).data == RationalMatrix([[2, 1], [4, 3]]).data
    assert a.apply([1, 1]) == [Fraction(3), Fraction(7)]


def test_rank_kernel_rank_nullity():
    m = RationalMatrix([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert m.rank() == 2
    k = m.kernel_basis()
    assert k.cols == 1
    assert (m * k).is_zero()


def test_solve_and_inverse():
    m = RationalMatrix([[2, 1], [1, 1]])
    x = m.solve([3, 2])
    assert m.apply(x) == [Fraction(3), Fraction(2)]
    inv = m.inverse()
    assert (m * inv) == RationalMatrix.identity(2)
    singular = RationalMatrix([[1, 1], [1, 1]])
    assert singular.solve([1, 0]) is None


def test_determinant():
    m = RationalMatrix([[2, 1], [1, 1]])
    assert m.determinant() == 1
    assert RationalMatrix([[1, 2], [2, 4]]).determinant() == 0
    assert RationalMatrix([["1/2", 0], [0, 4]]).determinant() == 2


def test_subspace_operations():
    e1 = RationalMatrix.from_columns([[1, 0, 0]])
    e12 = RationalMatrix.from_columns([[1, 0, 0], [0, 1, 0]])
    e23 = RationalMatrix.from_columns([[0, 1, 0], [0, 0, 1]])
    assert subspace_dim(subspace_sum(e12, e23)) == 3
    inter = subspace_intersection(e12, e23)
    assert subspace_dim(inter) == 1
    assert contains_subspace(e12, e1)
    assert not contains_subspace(e1, e12)


def test_preimage_basis():
    f = RationalMatrix([[1, 0, 0], [0, 1, 0]])
    w = RationalMatrix.from_columns([[1, 0]])
    pre = preimage_basis(f, w)
    # preimage of the x-axis under projection = span(e1, e3)
    assert subspace_dim(pre) == 2
    assert contains_subspace(pre, RationalMatrix.from_columns([[0, 0, 1]]))


def test_span_basis_deterministic():
    m = RationalMatrix.from_columns([[1, 1], [2, 2], [0, 1]])
    b = span_basis(m)
    assert b.cols == 2
    assert b.column(0) == [Fraction(1), Fraction(1)]


def test_json_roundtrip():
    m = RationalMatrix([["1/2", -3], [0, "7/5"]])
    again = RationalMatrix.from_json(m.to_json(), expect_shape=(2, 2))
    assert again == m
    with pytest.raises(ValueError):
        RationalMatrix.from_json(m.to_json(), expect_shape=(1, 2))
