import math
import random

import pytest

from oracles import bare_graph, brute_force_overlay
from wayfarer.auxmetrics import (
    AuxDataset,
    MalformedPoints,
    NonpositiveRadius,
    UnknownNode,
    build_overlay,
    node_score,
    parse_points_csv,
    point_score,
)
from wayfarer.geodata import great_circle_distance


def east_of(pos, meters):
    lat, lon = pos
    return (lat, lon + meters / (111_320.0 * math.cos(math.radians(lat))))


CENTER = (37.76, -122.43)


class TestPointScore:
    def test_coincident_point_scores_one(self):
        assert point_score(CENTER, CENTER, 100.0) == 1.0

    def test_point_at_radius_scores_zero(self):
        other = east_of(CENTER, 150.0)
        r = great_circle_distance(CENTER, other)
        assert point_score(CENTER, other, r) == 0.0

    def test_point_at_half_radius_scores_half(self):
        other = east_of(CENTER, 150.0)
        d = great_circle_distance(CENTER, other)
        assert point_score(CENTER, other, 2.0 * d) == 0.5

    def test_point_beyond_radius_scores_zero(self):
        other = east_of(CENTER, 150.0)
        d = great_circle_distance(CENTER, other)
        assert point_score(CENTER, other, d / 2.0) == 0.0

    def test_nonpositive_radius_rejected(self):
        with pytest.raises(NonpositiveRadius):
            point_score(CENTER, CENTER, 0.0)

    def test_score_stays_in_unit_interval(self):
        rng = random.Random(7)
        for _ in range(200):
            other = east_of(CENTER, rng.uniform(0, 1000))
            s = point_score(CENTER, other, rng.uniform(1, 500))
            assert 0.0 <= s <= 1.0


def small_world():
    positions = {
        "A": CENTER,
        "B": east_of(CENTER, 120),
        "C": east_of(CENTER, 400),
        "D": east_of(CENTER, 900),
        "E": east_of(CENTER, 2000),
    }
    return bare_graph(positions), positions


class TestBuildOverlay:
    def test_coincident_point(self):
        graph, pos = small_world()
        ds = AuxDataset("d", "x", (pos["A"],), 100.0)
        overlay = build_overlay(graph, ds)
        assert overlay.node_scores["A"] == 1.0

    def test_duplicate_points_sum(self):
        graph, pos = small_world()
        ds = AuxDataset("d", "x", (pos["A"], pos["A"]), 100.0)
        assert build_overlay(graph, ds).node_scores["A"] == 2.0

    def test_matches_brute_force_on_fixture(self):
        graph, pos = small_world()
        pts = (east_of(CENTER, 60), east_of(CENTER, 350), east_of(CENTER, 820))
        ds = AuxDataset("d", "x", pts, 500.0)
        overlay = build_overlay(graph, ds, 500.0)
        expected = brute_force_overlay(graph, ds, 500.0)
        assert set(overlay.node_scores) == set(graph.nodes)
        for node_id, want in expected.items():
            assert overlay.node_scores[node_id] == pytest.approx(want, abs=1e-9)

    def test_every_node_has_an_entry(self):
        graph, pos = small_world()
        ds = AuxDataset("d", "x", (pos["A"],), 50.0)
        overlay = build_overlay(graph, ds)
        assert set(overlay.node_scores) == set(graph.nodes)
        assert overlay.node_scores["E"] == 0.0

    def test_nonpositive_radius(self):
        graph, pos = small_world()
        ds = AuxDataset("d", "x", (pos["A"],), 100.0)
        with pytest.raises(NonpositiveRadius):
            build_overlay(graph, ds, -5.0)

    def test_scores_bounded_by_point_count(self):
        graph, _ = small_world()
        rng = random.Random(11)
        pts = tuple(east_of(CENTER, rng.uniform(-500, 2500)) for _ in range(40))
        overlay = build_overlay(graph, AuxDataset("d", "x", pts, 300.0))
        for s in overlay.node_scores.values():
            assert 0.0 <= s <= len(pts)

    def test_monotone_in_radius(self):
        graph, _ = small_world()
        rng = random.Random(13)
        pts = tuple(east_of(CENTER, rng.uniform(-300, 2500)) for _ in range(25))
        ds = AuxDataset("d", "x", pts, 100.0)
        small = build_overlay(graph, ds, 150.0)
        large = build_overlay(graph, ds, 600.0)
        for node_id in graph.nodes:
            assert small.node_scores[node_id] <= large.node_scores[node_id] + 1e-12

    def test_union_of_datasets_is_sum_of_overlays(self):
        graph, _ = small_world()
        rng = random.Random(17)
        pts1 = tuple(east_of(CENTER, rng.uniform(0, 1500)) for _ in range(10))
        pts2 = tuple(east_of(CENTER, rng.uniform(0, 1500)) for _ in range(7))
        o1 = build_overlay(graph, AuxDataset("1", "a", pts1, 400.0))
        o2 = build_overlay(graph, AuxDataset("2", "b", pts2, 400.0))
        both = build_overlay(graph, AuxDataset("3", "ab", pts1 + pts2, 400.0))
        for node_id in graph.nodes:
            assert both.node_scores[node_id] == pytest.approx(
                o1.node_scores[node_id] + o2.node_scores[node_id], abs=1e-9
            )

    def test_grid_equals_brute_force_randomized(self):
        rng = random.Random(23)
        for trial in range(8):
            positions = {
                f"n{i}": (
                    37.7 + rng.uniform(-0.02, 0.02),
                    -122.4 + rng.uniform(-0.03, 0.03),
                )
                for i in range(rng.randint(5, 60))
            }
            graph = bare_graph(positions)
            pts = tuple(
                (37.7 + rng.uniform(-0.02, 0.02), -122.4 + rng.uniform(-0.03, 0.03))
                for _ in range(rng.randint(1, 120))
            )
            r = rng.uniform(50, 1000)
            ds = AuxDataset("d", "x", pts, r)
            overlay = build_overlay(graph, ds, r)
            expected = brute_force_overlay(graph, ds, r)
            for node_id, want in expected.items():
                assert overlay.node_scores[node_id] == pytest.approx(want, abs=1e-9)


class TestNodeScore:
    def test_lookup_and_unknown(self):
        graph, pos = small_world()
        overlay = build_overlay(graph, AuxDataset("d", "x", (pos["A"],), 100.0))
        assert node_score(overlay, "A") == 1.0
        assert node_score(overlay, "E") == 0.0
        with pytest.raises(UnknownNode):
            node_score(overlay, "missing")


class TestParsePointsCsv:
    def test_parse_ok(self):
        pts = parse_points_csv("lat,lon\n37.0,-122.0\n37.1,-122.1\n")
        assert pts == ((37.0, -122.0), (37.1, -122.1))

    def test_empty_rejected(self):
        with pytest.raises(MalformedPoints):
            parse_points_csv("lat,lon\n")

    def test_missing_header(self):
        with pytest.raises(MalformedPoints, match="header"):
            parse_points_csv("x,y\n1,2\n")

    def test_bad_row_identifies_line(self):
        with pytest.raises(MalformedPoints, match="line 3"):
            parse_points_csv("lat,lon\n37.0,-122.0\n37.0,west\n")

    def test_out_of_range_coordinate(self):
        with pytest.raises(MalformedPoints, match="range"):
            parse_points_csv("lat,lon\n97.0,-122.0\n")

    def test_dataset_requires_points(self):
        with pytest.raises(MalformedPoints):
            AuxDataset("d", "x", (), 100.0)
