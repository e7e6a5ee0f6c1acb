import pytest

from org.boxbuilder.folia.config import GroebnerBudget
from org.boxbuilder.folia.errors import RingMismatchError, ResourceLimitError
from org.boxbuilder.folia.exterior import exterior_derivative
from org.boxbuilder.folia.foliation import logarithmic_form, singular_ideal
from org.boxbuilder.folia.groebner import (
    Ideal,
    buchberger,
    codimension,
    coefficient_ideal,
    cone_dimension,
    kupka_report,
    membership,
    normal_form,
)
from org.boxbuilder.folia.ring import WeightedRing, make_rng, random_homogeneous
from org.boxbuilder.folia.serialization import dump_model, poly_to_model

P2 = WeightedRing.projective(2)
P3 = WeightedRing.projective(3)


class TestBuchberger:
    @pytest.fixture
    def generic_quadrics(self):
        """Three generic quadrics on P^3."""
        return Ideal(P3, [random_homogeneous(P3, 2, seed=s) for s in range(3)])

    def test_membership(self):
        x0, x1, x2 = P2.variables()
        I = Ideal(P2, [x0 ** 2, x1])
        assert membership(x0 ** 3 + x1 * x2, I)
        assert not membership(x0, I)

    def test_normal_form_of_ideal_elements(self, generic_quadrics):
        G = buchberger(generic_quadrics)
        x0, x1, x2, x3 = P3.variables()
        f, g, _ = generic_quadrics.generators
        assert normal_form(f * x2 - g * x3, G).is_zero()
        r = normal_form(x0 ** 3 + x3 ** 3, G)
        assert normal_form(r, G) == r

    def test_basis_is_reduced_and_monic(self, generic_quadrics):
        G = buchberger(generic_quadrics)
        for g in G.basis:
            lm, lc = g.leading_term()
            assert lc == 1
            others = [h.leading_term()[0] for h in G.basis if h is not g]
            assert not any(all(a <= b for a, b in zip(o, e)) for o in others for e, _ in g.terms())

    def test_unit_ideal(self):
        assert cone_dimension(Ideal.unit(P2)) == -1
        x0, x1, _ = P2.variables()
        assert buchberger(Ideal(P2, [x0, x1 + 1, x1])).is_unit()

    @pytest.mark.parametrize("budget", [GroebnerBudget(max_pairs=1), GroebnerBudget(max_degree=2)])
    def test_budget_exhaustion(self, generic_quadrics, budget):
        with pytest.raises(ResourceLimitError):
            buchberger(generic_quadrics, budget)

    def test_rings_must_agree(self):
        with pytest.raises(RingMismatchError):
            Ideal(P2, [P3.variable(0)])

    def test_reduced_basis_example(self):
        x0, x1, x2 = P2.variables()
        G = buchberger(Ideal(P2, [x0 * x1 - x2 ** 2, x0]))
        assert G.basis == (x0, x2 ** 2)

    def test_identical_inputs_give_identical_bytes(self):
        def encoded(budget):
            ideal = Ideal(P3, [random_homogeneous(P3, 2, seed=s) for s in range(3)])
            return b"\n".join(dump_model(poly_to_model(g)) for g in buchberger(ideal, budget).basis)

        # distinct budgets bypass the basis cache
        assert encoded(GroebnerBudget(max_pairs=50_000)) == encoded(GroebnerBudget(max_pairs=50_001))


class TestMembership:
    @pytest.fixture
    def presentations(self):
        """Two generating sets of one ideal of quadrics on P^3."""
        f, g, h = (random_homogeneous(P3, 2, coefficient_bound=3, seed=20 + s) for s in range(3))
        x0 = P3.variable(0)
        first = Ideal(P3, [f, g, h])
        second = Ideal(P3, [f + g, g - h * 2, h + f, f * x0])
        return (f, g, h), first, second

    @pytest.mark.parametrize("seed", range(50))
    def test_does_not_depend_on_the_presentation(self, presentations, seed):
        (f, g, h), first, second = presentations
        rng = make_rng(seed)
        if seed % 2:
            a, b, c = (random_homogeneous(P3, 1, coefficient_bound=3, rng=rng) for _ in range(3))
            query = f * a + g * b + h * c
            assert membership(query, first)
        else:
            query = random_homogeneous(P3, 3, coefficient_bound=3, rng=rng)

        # Verify results
        assert membership(query, first) == membership(query, second)


class TestDimension:
    def test_linear_ideals(self):
        x0, x1, x2 = P2.variables()
        assert codimension(Ideal(P2, [x0, x1])) == 2
        assert codimension(Ideal(P2, [x0 + x1 + x2])) == 1
        assert cone_dimension(Ideal(P2, [])) == 3

    def test_complete_intersection(self):
        I = Ideal(P3, [random_homogeneous(P3, 2, seed=10), random_homogeneous(P3, 3, seed=11)])
        assert codimension(I) == 2

    def test_powers_keep_the_radical(self):
        x0, x1, _ = P2.variables()
        I = Ideal(P2, [x0, x1])
        assert codimension(I.power(3)) == codimension(I)
        assert codimension(I.product(Ideal(P2, [x0 - x1]))) == 1


class TestKupka:
    def test_logarithmic_form_with_distinct_residues(self):
        alpha = logarithmic_form(P2.variables(), [1, 2, -3])

        report = kupka_report(alpha)

        # Verify results
        assert codimension(singular_ideal(alpha)) == 2
        assert codimension(coefficient_ideal(exterior_derivative(alpha.omega))) == 3
        assert report.codim_sing == 2
        assert report.codim_sing_plus_domega == 3
        assert report.generically_kupka

    def test_repeated_residues_break_the_kupka_condition(self):
        alpha = logarithmic_form(P2.variables(), [1, 1, -2])
        report = kupka_report(alpha.omega)
        assert report.codim_sing == 2
        assert report.codim_sing_plus_domega == 2
        assert not report.generically_kupka
