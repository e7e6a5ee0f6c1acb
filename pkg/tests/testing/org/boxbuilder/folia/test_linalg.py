from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from org.boxbuilder.folia.errors import AmbientMismatchError
from org.boxbuilder.folia.linalg import (
    RatMatrix,
    Subspace,
    contains,
    equal,
    intersection_dim,
    kernel_basis,
    rank,
    solve,
    span_sum,
    to_sparse,
)


@st.composite
def matrices(draw, max_size=5):
    rows = draw(st.integers(1, max_size))
    cols = draw(st.integers(1, max_size))
    entries = draw(st.lists(st.lists(st.integers(-3, 3), min_size=cols, max_size=cols), min_size=rows, max_size=rows))
    return RatMatrix.from_rows(entries, cols)


class TestRank:
    @settings(max_examples=80, deadline=None)
    @given(matrices())
    def test_rank_nullity(self, M):
        kernel = kernel_basis(M)
        assert rank(M) + kernel.dim == M.cols
        for v in kernel.basis:
            assert all(x == 0 for x in M.apply(v))

    @settings(max_examples=80, deadline=None)
    @given(matrices())
    def test_rank_of_transpose(self, M):
        assert rank(M) == rank(M.transpose())

    def test_known_rank(self):
        M = RatMatrix.from_rows([[1, 2, 3], [2, 4, 6], [0, 1, Fraction(1, 2)]])
        assert rank(M) == 2
        assert kernel_basis(M).dim == 1

    def test_zero_matrix(self):
        M = RatMatrix(3, 4)
        assert M.is_zero()
        assert rank(M) == 0
        assert kernel_basis(M) == Subspace.full(4)


class TestSolve:
    @settings(max_examples=60, deadline=None)
    @given(matrices(), st.lists(st.integers(-4, 4), min_size=5, max_size=5))
    def test_solves_consistent_systems(self, M, x0):
        b = M.apply(x0[: M.cols])
        x = solve(M, b)
        assert x is not None
        assert M.apply(x) == b

    def test_inconsistent_system(self):
        M = RatMatrix.from_rows([[1, 1], [2, 2]])
        assert solve(M, [1, 3]) is None

    def test_rational_solution(self):
        M = RatMatrix.from_rows([[2, 0], [0, 3]])
        assert solve(M, [1, 1]) == [Fraction(1, 2), Fraction(1, 3)]


class TestSubspace:
    def test_equality_is_independent_of_spanning_set(self):
        U = Subspace.span(3, [[1, 1, 0], [0, 1, 1]])
        V = Subspace.span(3, [[1, 2, 1], [1, 0, -1], [2, 2, 0]])
        assert equal(U, V)
        assert U.basis == V.basis

    def test_containment(self):
        U = Subspace.span(4, [[1, 0, 1, 0], [0, 1, 0, 1]])
        assert contains(U, [2, 3, 2, 3])
        assert not contains(U, [1, 0, 0, 0])
        assert Subspace.span(4, [[1, 1, 1, 1]]).is_subspace_of(U)
        assert not U.is_subspace_of(Subspace.span(4, [[1, 1, 1, 1]]))

    def test_sum_and_intersection(self):
        U = Subspace.span(4, [[1, 0, 0, 0], [0, 1, 0, 0]])
        V = Subspace.span(4, [[0, 1, 0, 0], [0, 0, 1, 0]])
        assert span_sum(U, V).dim == 3
        assert intersection_dim(U, V) == 1
        assert intersection_dim(U, Subspace.zero(4)) == 0

    def test_ambient_mismatch(self):
        with pytest.raises(AmbientMismatchError):
            equal(Subspace.full(2), Subspace.full(3))
        with pytest.raises(AmbientMismatchError):
            Subspace.full(2) + Subspace.zero(3)
        with pytest.raises(AmbientMismatchError):
            to_sparse([1, 2, 3], 2)
        with pytest.raises(AmbientMismatchError):
            to_sparse({5: 1}, 3)

    def test_sparse_vectors_drop_zeros(self):
        assert to_sparse([0, Fraction(2, 2), 0]) == {1: 1}
