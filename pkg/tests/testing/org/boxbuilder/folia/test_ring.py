from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from org.boxbuilder.folia.errors import (
    ArityError,
    DegreeMismatchError,
    InhomogeneousError,
    RingMismatchError,
    ZeroPolynomialError,
)
from org.boxbuilder.folia.ring import (
    Poly,
    WeightedRing,
    graded_dimension,
    normalize_rational,
    polys_equal_up_to_scalar,
    random_homogeneous,
    rational_to_string,
    substitute,
    weighted_degree,
)

RING = WeightedRing((1, 1, 2))


def polys(degree=None):
    if degree is None:
        exps = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2))
    else:
        exps = st.sampled_from(RING.monomials(degree))
    coefs = st.one_of(st.integers(-5, 5), st.fractions(min_value=-3, max_value=3, max_denominator=4))
    return st.dictionaries(exps, coefs, max_size=4).map(lambda terms: Poly(RING, terms))


class TestWeightedRing:
    def test_monomial_order(self):
        ring = WeightedRing.projective(2)
        assert ring.monomials(2) == ((2, 0, 0), (1, 1, 0), (0, 2, 0), (1, 0, 1), (0, 1, 1), (0, 0, 2))

    @pytest.mark.parametrize(
        "weights, delta, expected",
        [((1, 1, 2), 4, 9), ((1, 1, 1), 2, 6), ((1, 1, 1, 1, 1), 2, 15), ((2, 3), 1, 0), ((1, 3, 5), 0, 1)],
    )
    def test_graded_dimension(self, weights, delta, expected):
        assert graded_dimension(WeightedRing(weights), delta) == expected

    def test_negative_degree_has_no_monomials(self):
        assert RING.monomials(-1) == ()

    def test_prefix_does_not_affect_equality(self):
        assert WeightedRing((1, 1, 1), prefix="z") == WeightedRing.projective(2)
        assert hash(WeightedRing((1, 1, 1), prefix="z")) == hash(WeightedRing((1, 1, 1)))

    @pytest.mark.parametrize("weights", [(), (1, 0, 1), (1, -2)])
    def test_invalid_weights(self, weights):
        with pytest.raises(ValueError):
            WeightedRing(weights)


class TestRationals:
    def test_normalize(self):
        assert normalize_rational("6/4") == Fraction(3, 2)
        assert normalize_rational("4/2") == 2
        assert type(normalize_rational("4/2")) is int
        assert normalize_rational(Fraction(10, 5)) == 2
        assert type(normalize_rational(np.int64(3))) is int

    @pytest.mark.parametrize("value", [1.5, True, None])
    def test_inexact_values_are_rejected(self, value):
        with pytest.raises(TypeError):
            normalize_rational(value)

    def test_to_string(self):
        assert rational_to_string(3) == "3/1"
        assert rational_to_string(Fraction(-2, 6)) == "-1/3"


class TestPolyArithmetic:
    @settings(max_examples=60, deadline=None)
    @given(polys(), polys(), polys())
    def test_ring_axioms(self, a, b, c):
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a - a == RING.zero()
        assert a * RING.one() == a

    @settings(max_examples=40, deadline=None)
    @given(polys(degree=3), polys(degree=2))
    def test_degree_is_additive(self, a, b):
        if a and b:
            assert weighted_degree(a * b) == 5

    def test_weighted_degree_errors(self):
        x0, x1, x2 = RING.variables()
        with pytest.raises(ZeroPolynomialError):
            weighted_degree(RING.zero())
        with pytest.raises(InhomogeneousError):
            weighted_degree(x0 + x2)
        assert weighted_degree(x0 * x1 + x2) == 2

    def test_partial(self):
        x0, x1, x2 = RING.variables()
        p = x0 ** 3 * x2 + x1 * x2
        assert p.partial(0) == (x0 ** 2 * x2).scale(3)
        assert p.partial(2) == x0 ** 3 + x1
        with pytest.raises(IndexError):
            p.partial(3)

    def test_arity_is_checked(self):
        with pytest.raises(ArityError):
            Poly(RING, {(1, 0): 1})

    def test_mixing_rings_fails(self):
        with pytest.raises(RingMismatchError):
            RING.variable(0) + WeightedRing((1, 1, 1)).variable(0)

    def test_str(self):
        ring = WeightedRing((1, 1))
        x0, x1 = ring.variables()
        assert str(x0 ** 2 - x1) == "x0^2 - x1"
        assert str(ring.zero()) == "0"

    def test_equal_up_to_scalar(self):
        x0, x1, _ = RING.variables()
        assert polys_equal_up_to_scalar([x0.scale(3), x1.scale(6)], [x0, x1.scale(2)]) == 3
        assert polys_equal_up_to_scalar([x0, x1], [x0, x1.scale(2)]) is None


class TestSubstitute:
    @pytest.fixture
    def target(self):
        """Weighted line with weights (1, 2)."""
        return WeightedRing((1, 2))

    @pytest.fixture
    def source(self):
        return WeightedRing.projective(1)

    def test_substitute_example(self, target, source):
        x0, x1 = target.variables()
        z0, z1 = source.variables()
        a = x0 ** 2 + x1.scale(3)

        result = substitute(a, [z0 + z1, z0 * z1])

        # Verify results
        assert result == z0 ** 2 + (z0 * z1).scale(5) + z1 ** 2

    def test_degree_mismatch(self, target, source):
        x0, x1 = target.variables()
        z0, _ = source.variables()
        with pytest.raises(DegreeMismatchError):
            substitute(x0 ** 2 + x1, [z0, z0])

    def test_arity_mismatch(self, target, source):
        z0, _ = source.variables()
        with pytest.raises(ArityError):
            substitute(target.variable(0), [z0])

    def test_substitution_is_a_homomorphism(self, target, source):
        x0, x1 = target.variables()
        z0, z1 = source.variables()
        f = [z0 ** 2 - z1 ** 2, (z0 * z1) ** 2 + z0 ** 4]
        a, b = x0 ** 2 - x1, x0 ** 2 + x1.scale(Fraction(1, 2))
        assert substitute(a * b, f) == substitute(a, f) * substitute(b, f)
        assert substitute(a + b, f) == substitute(a, f) + substitute(b, f)


class TestRandomHomogeneous:
    def test_same_seed_same_polynomial(self):
        assert random_homogeneous(RING, 4, seed=7) == random_homogeneous(RING, 4, seed=7)

    def test_every_monomial_is_drawn(self):
        p = random_homogeneous(RING, 4, seed=3, coefficient_bound=2)
        assert len(p) == RING.graded_dimension(4)
        assert all(c != 0 and abs(c) <= 2 for _, c in p.terms())
        assert weighted_degree(p) == 4
