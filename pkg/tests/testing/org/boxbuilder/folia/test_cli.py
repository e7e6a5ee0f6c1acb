import json
from pathlib import Path

import jsonschema
import pytest
from referencing import Registry, Resource

from org.boxbuilder.folia.cli import main
from org.boxbuilder.folia.exterior import DiffForm
from org.boxbuilder.folia.foliation import RationalMapLift, logarithmic_form
from org.boxbuilder.folia.report import parse, parse_table
from org.boxbuilder.folia.ring import WeightedRing
from org.boxbuilder.folia.serialization import dump_model, foliation_to_model, form_to_model, map_to_model

P2 = WeightedRing.projective(2, prefix="x")
P3 = WeightedRing.projective(3)
SCHEMAS = Path(__file__).resolve().parents[5] / "schemas"


def load_schema(name):
    return json.loads((SCHEMAS / name).read_text())


def schema_registry():
    schemas = [load_schema(path.name) for path in sorted(SCHEMAS.glob("*.schema.json"))]
    return Registry().with_resources((schema["$id"], Resource.from_contents(schema)) for schema in schemas)


class TestCli:
    @pytest.fixture
    def log_form(self, tmp_path):
        """Logarithmic plane foliation of degree 3 written to disk."""
        path = tmp_path / "alpha.json"
        path.write_bytes(dump_model(foliation_to_model(logarithmic_form(P2.variables(), [1, 2, -3]))))
        return path

    @pytest.fixture
    def contact_form(self, tmp_path):
        """A descending but non-integrable 1-form on P^3."""
        z0, z1, z2, z3 = P3.variables()
        path = tmp_path / "contact.json"
        path.write_bytes(dump_model(form_to_model(DiffForm.one_form([-z1, z0, -z3, z2]))))
        return path

    def run(self, tmp_path, *argv):
        out = tmp_path / "out.json"
        code = main([*argv, "--out", str(out)])
        return code, (out.read_bytes() if out.exists() else b"")

    def test_good_degrees(self, tmp_path):
        code, data = self.run(tmp_path, "good-degrees", "--weights", "1,1,1", "--max", "10")

        # Verify results
        assert code == 0
        report = parse(data)
        assert report.data["good_degrees"] == list(range(3, 11))
        assert report.seed == 0
        assert report.rng == "numpy-pcg64/v1"

    def test_good_degrees_csv(self, tmp_path):
        code, data = self.run(tmp_path, "good-degrees", "--weights", "1,3,5", "--min", "9", "--max", "14", "--format", "csv")
        assert code == 0
        assert list(parse_table(data)["delta"]) == [9, 11, 13, 14]

    def test_check_passes(self, tmp_path, log_form):
        code, data = self.run(tmp_path, "check", str(log_form))
        report = parse(data)
        assert code == 0
        assert report.verdicts == {"nonzero": True, "descending": True, "integrable": True, "codim_sing_ge_2": True}
        assert report.dims["codim_sing"] == 2

    def test_check_fails_on_a_contact_form(self, tmp_path, contact_form):
        code, data = self.run(tmp_path, "check", str(contact_form))
        assert code == 1
        assert parse(data).verdicts["integrable"] is False

    def test_input_errors(self, tmp_path):
        broken = tmp_path / "broken.json"
        broken.write_text(json.dumps({"p": 1, "weights": [1, 1, 1], "components": {"0": {"weights": [1, 1, 1], "terms": [{"coef": "1.5", "exps": [1, 0, 0]}]}}}))
        assert self.run(tmp_path, "check", str(broken))[0] == 2
        assert self.run(tmp_path, "check", str(tmp_path / "missing.json"))[0] == 2
        assert self.run(tmp_path, "good-degrees", "--weights", "1,1,1,1", "--max", "5")[0] == 2

    def test_budget_exhaustion(self, tmp_path, log_form):
        code, _ = self.run(tmp_path, "check", str(log_form), "--gb-pair-budget", "1")
        assert code == 3

    def test_budget_exhaustion_while_certifying_generic_inputs(self, tmp_path):
        code, data = self.run(tmp_path, "verify-main", "--n", "4", "--m", "2", "--gb-degree-cap", "1")
        assert code == 3
        assert data == b""

    def test_ambient_violation(self, tmp_path):
        code, data = self.run(tmp_path, "verify-main", "--n", "3", "--m", "2")
        assert code == 4
        assert data == b""

    def test_pullback(self, tmp_path, log_form):
        z0, z1, z2, z3 = P3.variables()
        map_path = tmp_path / "map.json"
        map_path.write_bytes(dump_model(map_to_model(RationalMapLift.from_polys(P2, [z0, z1, z2 + z3]))))

        code, data = self.run(tmp_path, "pullback", str(map_path), str(log_form))

        # Verify results
        assert code == 0
        payload = json.loads(data)
        assert payload["metadata"] == {"k": 1, "delta": 3, "k_delta": 3}
        assert payload["delta"] == 3
        assert payload["p"] == 1

    def test_tangent_dim(self, tmp_path, log_form):
        code, data = self.run(tmp_path, "tangent-dim", str(log_form))
        report = parse(data)
        assert code == 0
        assert report.dims["descending_forms"] == 8
        assert report.dims["T_omega"] == 8

    def test_kupka(self, tmp_path, log_form):
        code, data = self.run(tmp_path, "kupka", str(log_form))
        assert code == 0
        assert parse(data).dims == {"codim_sing": 2, "codim_sing_plus_domega": 3}

    def test_census(self, tmp_path):
        code, data = self.run(tmp_path, "census", "--n", "5", "--family", "E", "--k", "2")
        report = parse(data)
        assert code == 0
        assert report.rows[0]["degree"] == 8

    @pytest.mark.parametrize(
        "argv",
        [
            ["verify-main", "--n", "4", "--m", "2"],
            ["census", "--n", "5", "--family", "E"],
            ["census", "--n", "5", "--family", "PB", "--weights", "1,3,5", "--delta", "10"],
            ["good-degrees", "--weights", "1,3,5", "--max", "20"],
        ],
    )
    def test_reports_match_the_report_schema(self, tmp_path, argv):
        code, data = self.run(tmp_path, *argv)
        assert code in (0, 1)
        jsonschema.validate(instance=json.loads(data), schema=load_schema("report.v1.schema.json"))

    def test_check_report_matches_the_report_schema(self, tmp_path, log_form, contact_form):
        schema = load_schema("report.v1.schema.json")
        for form in (log_form, contact_form):
            _, data = self.run(tmp_path, "check", str(form))
            jsonschema.validate(instance=json.loads(data), schema=schema)

    def test_pullback_output_matches_the_form_schema(self, tmp_path, log_form):
        z0, z1, z2, z3 = P3.variables()
        map_path = tmp_path / "map.json"
        map_path.write_bytes(dump_model(map_to_model(RationalMapLift.from_polys(P2, [z0, z1, z2 + z3]))))
        registry = schema_registry()
        jsonschema.validate(instance=json.loads(map_path.read_bytes()), schema=load_schema("map.v1.schema.json"), registry=registry)

        code, data = self.run(tmp_path, "pullback", str(map_path), str(log_form))
        assert code == 0
        jsonschema.validate(instance=json.loads(data), schema=load_schema("form.v1.schema.json"), registry=registry)

    @pytest.mark.parametrize(
        "argv",
        [
            ["good-degrees", "--weights", "1,2,3", "--max", "30"],
            ["census", "--n", "5", "--family", "Log", "--seed", "7"],
        ],
    )
    def test_reruns_are_byte_identical(self, tmp_path, argv):
        first = self.run(tmp_path, *argv)
        second = self.run(tmp_path, *argv)
        assert first == second

    def test_seed_changes_the_digest(self, tmp_path):
        _, first = self.run(tmp_path, "census", "--n", "5", "--family", "Log", "--seed", "1")
        _, second = self.run(tmp_path, "census", "--n", "5", "--family", "Log", "--seed", "2")
        assert parse(first).inputs_digest != parse(second).inputs_digest
