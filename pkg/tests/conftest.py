import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from wayfarer.auxmetrics import AuxDataset, build_overlay, parse_points_csv
from wayfarer.geodata import Mode, load_graph_dir
from wayfarer.pcf import ElicitationAnswers, derive_coefficients

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def square_graph():
    return load_graph_dir(FIXTURES / "square")


@pytest.fixture(scope="session")
def alice_graph():
    return load_graph_dir(FIXTURES / "alice")


@pytest.fixture(scope="session")
def bob_graph():
    return load_graph_dir(FIXTURES / "bob")


def alice_answers(**overrides) -> ElicitationAnswers:
    hours = {Mode.WALK: 3.0, Mode.BIKE: 2.0, Mode.PUBLIC: 0.25, Mode.TAXI: 0.5}
    hours.update(overrides.pop("hours", {}))
    return ElicitationAnswers(hours, overrides.pop("dollars_per_hour", 20.0),
                              overrides.pop("dollars_per_aux", {}))


@pytest.fixture(scope="session")
def alice_profile():
    return derive_coefficients(alice_answers())


@pytest.fixture(scope="session")
def bob_profile():
    return derive_coefficients(alice_answers(dollars_per_aux={"crime": 0.25}))


@pytest.fixture(scope="session")
def bob_crime_overlay(bob_graph):
    points = parse_points_csv((FIXTURES / "bob" / "crime.csv").read_text())
    dataset = AuxDataset("crime-fixture", "crime", points, 150.0)
    return build_overlay(bob_graph, dataset)
