from fractions import Fraction

import pytest

from org.boxbuilder.folia.catalog import (
    CENSUS_FAMILIES,
    LieAlgebraSpec,
    WeightVector,
    component_census,
    good_degrees,
    is_good_degree,
    kupka_degrees,
    lie_family,
    lie_foliation,
    pullback_degree,
    seeded_residues,
    validate_lie_algebra,
)
from org.boxbuilder.folia.errors import AmbientError, BracketMismatchError
from org.boxbuilder.folia.exterior import VectorField, contract, lie_bracket
from org.boxbuilder.folia.foliation import is_integrable
from org.boxbuilder.folia.ring import WeightedRing


def brute_force_good(e, delta):
    """δ is good when for every weight some other weight closes the congruence."""
    for ei in e:
        if not any((delta - sum(e) + ej) % ei == 0 for ej in e):
            return False
    return True


class TestGoodDegrees:
    @pytest.mark.parametrize("weights", [(1, 1, 1), (1, 1, 2), (1, 2, 3), (1, 3, 5), (2, 3, 5)])
    def test_matches_brute_force(self, weights):
        e = WeightVector(weights)
        hi = e.total + 2 * e.product
        expected = [d for d in range(e.total, hi + 1) if brute_force_good(weights, d)]
        assert good_degrees(e, None, hi) == expected

    @pytest.mark.parametrize("weights", [(1, 2, 3), (1, 3, 5), (2, 3, 7)])
    def test_periodic_modulo_the_product(self, weights):
        e = WeightVector(weights)
        for delta in range(e.total, e.total + e.product):
            assert is_good_degree(e, delta) == is_good_degree(e, delta + e.product)

    def test_known_values(self):
        assert good_degrees(WeightVector((1, 3, 5)), 9, 14) == [9, 11, 13, 14]
        assert good_degrees(WeightVector((1, 3, 5)), 9, 20) == [9, 11, 13, 14, 16, 18, 19]
        assert good_degrees(WeightVector((1, 1, 1)), None, 6) == [3, 4, 5, 6]
        assert good_degrees(WeightVector((1, 1, 2)), 1, 7) == [4, 5, 6, 7]

    def test_sum_of_weights_is_good(self):
        for weights in [(1, 1, 1), (2, 3, 5), (4, 6, 9)]:
            e = WeightVector(weights)
            assert good_degrees(e, None, e.total) == [e.total]

    def test_kupka_degrees(self):
        assert kupka_degrees(WeightVector((1, 1, 1)), None, 6) == [4, 5, 6]
        e = WeightVector((1, 3, 5))
        for d in kupka_degrees(e, None, 60):
            assert is_good_degree(e, d) and is_good_degree(e, d - e.product)
            assert d - e.product >= e.total

    def test_planes_only(self):
        with pytest.raises(ValueError):
            good_degrees(WeightVector((1, 1, 1, 1)), None, 10)

    def test_weight_vector(self):
        e = WeightVector.parse("2,4,6")
        assert e.reduced() == (WeightVector((1, 2, 3)), 2)
        assert str(e) == "2,4,6"
        assert e.m == 2
        with pytest.raises(ValueError):
            WeightVector((1, 0, 2))

    def test_pullback_degree(self):
        assert pullback_degree(3, 2) == 6
        with pytest.raises(ValueError):
            pullback_degree(3, 0)


class TestLieFamilies:
    def check_family(self, spec):
        fol = lie_foliation(spec)
        assert is_integrable(fol.omega)
        assert fol.delta == spec.m + 1
        assert spec.dimension == spec.m - 1
        for X in spec.fields():
            assert contract(X, fol.omega).is_zero()

    def test_affine_algebra(self):
        spec = lie_family("aff")

        # Verify results
        X, Y = spec.generators["X"], spec.generators["Y"]
        assert lie_bracket(X, Y) == Y
        assert spec.structure_constants == {("X", "Y"): {"Y": 1}}
        self.check_family(spec)

    @pytest.mark.parametrize("m", [3, 4, 5])
    def test_abelian_nilpotent_part(self, m):
        spec = lie_family("g", m)
        names = [n for n in spec.generators if n != "X"]
        for a in names:
            for b in names:
                assert lie_bracket(spec.generators[a], spec.generators[b]).is_zero()
        for r in range(1, m - 1):
            assert spec.structure_constants[("X", f"Y{r}")] == {f"Y{r}": -2 * r}
        self.check_family(spec)

    def test_grading_field_of_g(self):
        spec = lie_family("g", 4)
        X = spec.generators["X"]
        ring = spec.ring
        assert X == VectorField.linear(ring, {(j, j): 2 * j - 4 for j in range(5)})

    @pytest.mark.slow
    def test_g6(self):
        spec = lie_family("g6")
        assert spec.structure_constants[("Y1", "Y2")] == {"Y3": 1}
        assert ("Y2", "Y3") not in spec.structure_constants
        self.check_family(spec)

    @pytest.mark.slow
    def test_g7(self):
        spec = lie_family("g7")
        assert spec.structure_constants[("Y2", "Y3")] == {"Y5": Fraction(-5, 2)}
        assert spec.structure_constants[("X", "Y5")] == {"Y5": -10}
        self.check_family(spec)

    def test_wrong_table_is_rejected(self):
        ring = WeightedRing.projective(3)
        z = ring.variables()
        X = VectorField.linear(ring, {(j, j): 3 - 2 * j for j in range(4)})
        Y = VectorField(ring, [z[1], z[2], z[3], ring.zero()])
        spec = LieAlgebraSpec(name="bad", m=3, generators={"X": X, "Y": Y}, expected_brackets={("X", "Y"): {"Y": 1}})
        with pytest.raises(BracketMismatchError):
            validate_lie_algebra(spec)

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            lie_family("sl2")
        with pytest.raises(ValueError):
            lie_family("g", 2)


class TestCensus:
    def test_exceptional_component(self):
        (row,) = component_census(5, k=1, family="E")
        assert row.degree == 4
        assert row.constructed_degree == 4
        assert row.status == "ok"

    def test_degrees_scale_with_k(self):
        (row,) = component_census(5, k=2, family="E")
        assert row.degree == 8

    def test_ambient_bound(self):
        with pytest.raises(AmbientError):
            component_census(4, family="E")
        with pytest.raises(AmbientError):
            component_census(7, family="PB-g6")

    def test_all_families_that_fit(self):
        rows = component_census(5, k=1)

        # Verify results
        assert [row.family for row in rows] == ["PB", "Log", "E"]
        assert all(row.status == "ok" for row in rows)
        assert [row.degree for row in rows] == [3, 3, 4]

    def test_pullback_rejects_a_degree_that_is_not_good(self):
        (row,) = component_census(5, family="PB", weights=WeightVector((1, 3, 5)), delta=10)
        assert row.status == "degree_not_admissible"
        assert row.constructed_degree is None
        assert "10" in row.note

    def test_pullback_rejects_a_degree_below_the_weight_sum(self):
        (row,) = component_census(5, family="PB", delta=2)
        assert row.status == "degree_not_admissible"

    def test_pullback_notes_a_degree_without_kupka_guarantee(self):
        (row,) = component_census(5, family="PB", delta=3)
        assert row.status == "ok"
        assert "Kupka" in row.note

        (row,) = component_census(5, family="PB", delta=4)
        assert row.status == "ok"
        assert row.note == ""

    def test_logarithmic_row_with_weights(self):
        (row,) = component_census(5, family="Log", weights=WeightVector((1, 2, 3)))
        assert row.degree == 6
        assert row.constructed_degree == 6

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            component_census(5, family="nope")
        assert set(CENSUS_FAMILIES) == {"PB", "Log", "E", "PB-g", "PB-g6", "PB-g7"}

    def test_seeded_residues(self):
        weights = (1, 2, 3)
        residues = seeded_residues(weights, seed=4)
        assert all(r != 0 for r in residues)
        assert sum(r * e for r, e in zip(residues, weights)) == 0
        assert seeded_residues(weights, seed=4) == residues
