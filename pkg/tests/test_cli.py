import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from wayfarer.cli import main

FIXTURES = Path(__file__).parent / "fixtures"

ALICE_PREFS = {
    "hours_equivalent": {"walk": 3, "bike": 2, "public": 0.25, "taxi": 0.5},
    "dollars_per_hour": 20,
    "dollars_per_aux": {"crime": 0.25},
}


@pytest.fixture()
def prefs_file(tmp_path):
    path = tmp_path / "prefs.json"
    path.write_text(json.dumps(ALICE_PREFS))
    return str(path)


def run(*args):
    return CliRunner().invoke(main, list(args))


def square_plan_args(prefs_file, *extra):
    return [
        "plan",
        "--graph", str(FIXTURES / "square"),
        "--from", "A",
        "--to", "B",
        "--depart", "08:00:00",
        "--prefs", prefs_file,
        *extra,
    ]


class TestPlanCommand:
    def test_trivial_plan_exits_zero_with_geometry(self, prefs_file):
        result = run(*square_plan_args(prefs_file))
        assert result.exit_code == 0, result.output
        doc = json.loads(result.output)
        assert doc["status"] == "ok"
        assert doc["itinerary"]["legs"][0]["mode"] == "walk"
        assert doc["geometry"]["type"] == "FeatureCollection"

    def test_geojson_output_is_bare_feature_collection(self, prefs_file):
        result = run(*square_plan_args(prefs_file, "--geojson"))
        assert result.exit_code == 0
        doc = json.loads(result.output)
        assert doc["type"] == "FeatureCollection"
        assert doc["features"][0]["properties"]["mode"] == "walk"

    def test_overrestrictive_constraint_exits_three(self, prefs_file, tmp_path):
        constraint = tmp_path / "c.txt"
        constraint.write_text("G(clock <= 0)")
        result = run(*square_plan_args(prefs_file, "--constraints", str(constraint)))
        assert result.exit_code == 3
        assert json.loads(result.output)["status"] == "infeasible"

    def test_bad_constraint_exits_two(self, prefs_file, tmp_path):
        constraint = tmp_path / "c.txt"
        constraint.write_text("G(")
        result = run(*square_plan_args(prefs_file, "--constraints", str(constraint)))
        assert result.exit_code == 2

    def test_unknown_node_exits_two(self, prefs_file):
        result = run(
            "plan", "--graph", str(FIXTURES / "square"),
            "--from", "A", "--to", "ZZZ",
            "--depart", "08:00:00", "--prefs", prefs_file,
        )
        assert result.exit_code == 2

    def test_latlon_endpoints(self, prefs_file):
        result = run(
            "plan", "--graph", str(FIXTURES / "square"),
            "--from", "37.7749,-122.4194",
            "--to", "37.7767,-122.4194",
            "--depart", "28800", "--prefs", prefs_file,
        )
        assert result.exit_code == 0, result.output

    def test_aux_dataset_constraint(self, prefs_file, tmp_path):
        constraint = tmp_path / "c.txt"
        constraint.write_text("G(aux_here(crime) <= 15)")
        result = run(
            "plan", "--graph", str(FIXTURES / "bob"),
            "--from", "M0", "--to", "M3",
            "--depart", "08:00:00", "--prefs", prefs_file,
            "--constraints", str(constraint),
            "--aux", f"crime={FIXTURES / 'bob' / 'crime.csv'}:150",
            "--modes", "walk,bike",
        )
        assert result.exit_code == 0, result.output
        doc = json.loads(result.output)
        visited = {n for leg in doc["itinerary"]["legs"] for n in leg["nodes"]}
        assert not visited & {"M1", "M2"}

    def test_constraint_without_dataset_exits_two(self, prefs_file, tmp_path):
        constraint = tmp_path / "c.txt"
        constraint.write_text("G(aux_here(crime) <= 15)")
        result = run(*square_plan_args(prefs_file, "--constraints", str(constraint)))
        assert result.exit_code == 2

    def test_no_default_constraint_flag(self, prefs_file):
        result = run(*square_plan_args(prefs_file, "--no-default-constraint"))
        doc = json.loads(result.output)
        assert doc["constraint"] == "true"
        with_default = json.loads(run(*square_plan_args(prefs_file)).output)
        assert "AFTER" in with_default["constraint"]
