from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perverscope.complexes import GradedDims
from perverscope.localsys import (
    MonodromyError,
    MonodromyRep,
    averaging_projector,
    circle_cohomology,
    cyclic_pushforward,
    group_closure,
    invariants,
    isotypic_decomposition,
    wang,
)
from perverscope.ratlin import RationalMatrix, span_basis, subspace_dim, subspace_sum


def test_circle_cohomology_identity():
    assert circle_cohomology(RationalMatrix.identity(3)) == (3, 3)


def test_circle_cohomology_sign_and_unipotent():
    assert circle_cohomology(RationalMatrix([[-1]])) == (0, 0)
    assert circle_cohomology(RationalMatrix([[1, 1], [0, 1]])) == (1, 1)


def test_circle_cohomology_rejects_singular():
    with pytest.raises(MonodromyError):
        circle_cohomology(RationalMatrix([[1, 1], [1, 1]]))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=3, max_size=3))
def test_circle_cohomology_euler_characteristic_zero(rows):
    m = RationalMatrix(rows)
    if not m.is_invertible():
        return
    h0, h1 = circle_cohomology(m)
    assert h0 == h1


def test_invariants():
    assert invariants(MonodromyRep.trivial(4)).cols == 4
    rot = RationalMatrix([[0, -1], [1, 0]])
    assert invariants(MonodromyRep(2, (rot,))).cols == 0
    p3 = cyclic_pushforward(3, MonodromyRep.trivial(1))
    assert invariants(p3).cols == 1


def test_wang_tables():
    assert wang([1, 1], {}) == GradedDims({0: 1, 1: 2, 2: 1})
    unip = RationalMatrix([[1, 1], [0, 1]])
    assert wang([1, 2, 1], {1: unip}) == GradedDims({0: 1, 1: 2, 2: 2, 3: 1})
    assert wang([1], {}) == GradedDims({0: 1, 1: 1})


def test_wang_size_mismatch():
    with pytest.raises(MonodromyError):
        wang([1, 2, 1], {1: RationalMatrix.identity(3)})


def test_cyclic_pushforward_degree_one_is_identity():
    rep = MonodromyRep.circle(RationalMatrix([[2]]))
    out = cyclic_pushforward(1, rep)
    assert out.generators[0] == rep.generators[0]


def test_cyclic_pushforward_preserves_circle_cohomology():
    for n in (1, 2, 3, 4):
        for T in (RationalMatrix.identity(1), RationalMatrix([[-1]]),
                  RationalMatrix([[1, 1], [0, 1]])):
            rep = MonodromyRep.circle(T)
            pushed = cyclic_pushforward(n, rep)
            assert circle_cohomology(pushed.generators[0]) == circle_cohomology(T)


def test_cyclic_pushforward_of_trivial_rank1_is_permutation():
    p2 = cyclic_pushforward(2, MonodromyRep.trivial(1))
    assert p2.generators[0] == RationalMatrix([[0, 1], [1, 0]])
    assert circle_cohomology(p2.generators[0]) == (1, 1)


def test_group_closure_cap():
    # infinite order: the cap must trip
    with pytest.raises(MonodromyError, match="cap"):
        group_closure([RationalMatrix([[1, 1], [0, 1]])], cap=50)


def test_isotypic_trivial_rank3():
    pieces = isotypic_decomposition(MonodromyRep.trivial(3))
    assert [(p.simple_rank, p.multiplicity) for p in pieces] == [(1, 3)]


def test_isotypic_three_cycle():
    p3 = cyclic_pushforward(3, MonodromyRep.trivial(1))
    pieces = isotypic_decomposition(p3)
    got = sorted((p.simple_rank, p.multiplicity, p.endo_dim_of_simple) for p in pieces)
    assert got == [(1, 1, 1), (2, 1, 2)]
    assert sum(p.rank for p in pieces) == 3


def test_isotypic_swap():
    swap = MonodromyRep(2, (RationalMatrix([[0, 1], [1, 0]]),))
    pieces = isotypic_decomposition(swap)
    assert sorted((p.simple_rank, p.multiplicity) for p in pieces) == [(1, 1), (1, 1)]


def test_isotypic_projectors_partition_identity():
    p4 = cyclic_pushforward(4, MonodromyRep.trivial(1))
    pieces = isotypic_decomposition(p4)
    total = RationalMatrix.zeros(4, 4)
    for p in pieces:
        assert (p.projector * p.projector) == p.projector
        total = total + p.projector
    assert total == RationalMatrix.identity(4)


def test_averaging_projector_matches_invariants():
    for rep in (
        cyclic_pushforward(3, MonodromyRep.trivial(1)),
        MonodromyRep(2, (RationalMatrix([[0, -1], [1, 0]]),)),
        MonodromyRep(2, (RationalMatrix([[0, 1], [1, 0]]),)),
    ):
        elements = group_closure(rep.generators)
        av = averaging_projector(elements)
        inv = invariants(rep)
        assert av.rank() == inv.cols
        if inv.cols:
            assert subspace_dim(subspace_sum(span_basis(av), inv)) == inv.cols


def test_isotypic_rejects_infinite_image():
    with pytest.raises(MonodromyError):
        isotypic_decomposition(MonodromyRep(2, (RationalMatrix([[1, 1], [0, 1]]),)), cap=60)
