from itertools import combinations

import pytest

from org.boxbuilder.folia.errors import InhomogeneousError, RingMismatchError, ZeroFormError
from org.boxbuilder.folia.exterior import (
    DiffForm,
    VectorField,
    contract,
    descends,
    differential,
    dx,
    exterior_derivative,
    lie_bracket,
    lie_derivative,
    pullback,
    radial_field,
    sort_with_sign,
    volume_form,
    wedge,
)
from org.boxbuilder.folia.foliation import RationalMapLift
from org.boxbuilder.folia.ring import WeightedRing, make_rng, random_homogeneous

WEIGHTED = WeightedRing((1, 1, 2))
P3 = WeightedRing.projective(3)


def random_form(ring, p, delta, rng, bound=3):
    components = {}
    for indices in combinations(range(ring.nvars), p):
        degree = delta - sum(ring.weights[i] for i in indices)
        poly = random_homogeneous(ring, degree, coefficient_bound=bound, rng=rng)
        if poly:
            components[indices] = poly
    return DiffForm(ring, p, components)


def random_linear_field(ring, rng):
    entries = {(i, j): int(rng.integers(-2, 3)) for i in range(ring.nvars) for j in range(ring.nvars)}
    return VectorField.linear(ring, entries)


class TestSortWithSign:
    @pytest.mark.parametrize(
        "indices, expected",
        [((2, 0, 1), (1, (0, 1, 2))), ((1, 0), (-1, (0, 1))), ((0, 2, 0), (0, None)), ((), (1, ()))],
    )
    def test_sign(self, indices, expected):
        assert sort_with_sign(indices) == expected

    def test_components_are_stored_sorted(self):
        u = DiffForm(P3, 2, {(1, 0): P3.one()})
        assert u.items() == [((0, 1), -P3.one())]
        assert u.component((1, 0)) == P3.one()
        assert DiffForm(P3, 2, {(1, 1): P3.one()}).is_zero()


class TestIdentities:
    @pytest.fixture(params=range(100))
    def forms(self, request):
        """A 1-form and a 2-form on the weighted ring, drawn from the given seed."""
        rng = make_rng(request.param)
        return random_form(WEIGHTED, 1, 4, rng), random_form(WEIGHTED, 2, 5, rng), random_linear_field(WEIGHTED, rng)

    def test_d_squared_is_zero(self, forms):
        u, v, _ = forms
        assert exterior_derivative(exterior_derivative(u)).is_zero()
        assert exterior_derivative(exterior_derivative(v)).is_zero()

    def test_leibniz_rules(self, forms):
        u, v, X = forms
        # d(u ^ v) = du ^ v - u ^ dv for a 1-form u
        assert exterior_derivative(wedge(u, v)) == wedge(exterior_derivative(u), v) - wedge(u, exterior_derivative(v))
        # i_X(u ^ v) = i_X u ^ v - u ^ i_X v
        assert contract(X, wedge(u, v)) == wedge(contract(X, u), v) - wedge(u, contract(X, v))

    def test_odd_forms_square_to_zero(self, forms):
        u, _, _ = forms
        assert wedge(u, u).is_zero()

    def test_euler_identity(self, forms):
        u, v, _ = forms
        R = radial_field(WEIGHTED)
        for w in (u, v):
            lhs = contract(R, exterior_derivative(w)) + exterior_derivative(contract(R, w))
            assert lhs == w * w.total_degree()

    def test_lie_derivative_commutes_with_d(self, forms):
        u, _, X = forms
        assert lie_derivative(X, exterior_derivative(u)) == exterior_derivative(lie_derivative(X, u))


class TestForms:
    def test_wedge_above_the_number_of_variables(self):
        ring = WeightedRing.projective(2)
        u = DiffForm(ring, 2, {(0, 1): ring.one()})
        result = wedge(u, u)
        assert result.p == 4
        assert result.is_zero()
        assert exterior_derivative(volume_form(ring)).is_zero()

    def test_degree_of_zero_form_is_undefined(self):
        with pytest.raises(ZeroFormError):
            DiffForm.zero(P3, 1).total_degree()

    def test_inhomogeneous_total_degree(self):
        x0, x1, x2 = WEIGHTED.variables()
        u = DiffForm.one_form([x1, x0 * x1, x2])
        with pytest.raises(InhomogeneousError):
            u.total_degree()
        with pytest.raises(InhomogeneousError):
            descends(u)

    def test_descends(self):
        ring = WeightedRing.projective(2)
        x0, x1, _ = ring.variables()
        assert descends(DiffForm.one_form([x1, -x0, ring.zero()]))
        assert not descends(dx(ring, 0))
        assert descends(DiffForm.zero(ring, 1))
        assert descends(DiffForm.function(x0))

    def test_weighted_total_degree(self):
        x0, x1, x2 = WEIGHTED.variables()
        u = DiffForm.one_form([x2.scale(2), WEIGHTED.zero(), -x0])
        assert u.total_degree() == 3
        assert descends(u)

    def test_contracting_a_function_fails(self):
        with pytest.raises(ValueError):
            contract(radial_field(P3), DiffForm.function(P3.one()))

    def test_rings_must_agree(self):
        with pytest.raises(RingMismatchError):
            wedge(dx(P3, 0), dx(WEIGHTED, 0))


class TestLieBracket:
    def test_bracket_of_linear_fields(self):
        ring = WeightedRing.projective(1)
        z0, _ = ring.variables()
        X = VectorField(ring, [z0, ring.zero()])
        Y = VectorField(ring, [ring.zero(), z0])
        assert lie_bracket(X, Y) == -Y
        assert lie_bracket(Y, X) == Y
        assert lie_bracket(X, X).is_zero()

    @pytest.mark.parametrize("seed", range(10))
    def test_linear_fields_bracket_like_matrices(self, seed):
        rng = make_rng(seed)
        A = [[int(rng.integers(-2, 3)) for _ in range(4)] for _ in range(4)]
        B = [[int(rng.integers(-2, 3)) for _ in range(4)] for _ in range(4)]
        commutator = {
            (i, j): sum(A[i][k] * B[k][j] - B[i][k] * A[k][j] for k in range(4)) for i in range(4) for j in range(4)
        }
        X = VectorField.linear(P3, {(i, j): A[i][j] for i in range(4) for j in range(4)})
        Y = VectorField.linear(P3, {(i, j): B[i][j] for i in range(4) for j in range(4)})
        assert lie_bracket(X, Y) == VectorField.linear(P3, commutator)

    @pytest.mark.parametrize("seed", range(20))
    def test_bracket_against_derivations(self, seed):
        rng = make_rng(seed)
        X, Y = random_linear_field(P3, rng), random_linear_field(P3, rng)
        f = random_homogeneous(P3, 3, rng=rng)
        assert lie_bracket(X, Y).apply(f) == Y.apply(X.apply(f)) - X.apply(Y.apply(f))

    @pytest.mark.parametrize("seed", range(20))
    def test_jacobi_identity(self, seed):
        rng = make_rng(seed)
        X, Y, Z = (random_linear_field(P3, rng) for _ in range(3))
        total = (
            lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X)) + lie_bracket(Z, lie_bracket(X, Y))
        )
        assert total.is_zero()

    def test_linear_fields_commute_with_the_radial_field(self):
        X = random_linear_field(P3, make_rng(5))
        assert lie_bracket(radial_field(P3), X).is_zero()


class TestPullback:
    @pytest.fixture(params=range(50))
    def instance(self, request):
        """A degree-one lift P^3 -> P(1,1,2) with a pair of target forms."""
        rng = make_rng(1000 + request.param)
        F = RationalMapLift.random(P3, WEIGHTED, 1, rng, coefficient_bound=3)
        return F, random_form(WEIGHTED, 1, 3, rng), random_form(WEIGHTED, 1, 4, rng)

    def test_commutes_with_d(self, instance):
        F, u, _ = instance
        assert pullback(F, exterior_derivative(u)) == exterior_derivative(pullback(F, u))

    def test_respects_wedge(self, instance):
        F, u, v = instance
        assert pullback(F, wedge(u, v)) == wedge(pullback(F, u), pullback(F, v))

    def test_descending_forms_pull_back_to_descending_forms(self, instance):
        F, u, _ = instance
        alpha = contract(radial_field(WEIGHTED), wedge(u, dx(WEIGHTED, 2)))
        assert descends(alpha)
        assert descends(pullback(F, alpha))

    def test_functions_compose(self, instance):
        F, _, _ = instance
        f = random_homogeneous(WEIGHTED, 4, seed=1)
        assert pullback(F, DiffForm.function(f)) == DiffForm.function(F.compose(f))
        assert pullback(F, differential(f)) == differential(F.compose(f))

    def test_ring_must_match_target(self, instance):
        F, _, _ = instance
        with pytest.raises(RingMismatchError):
            pullback(F, dx(P3, 0))
