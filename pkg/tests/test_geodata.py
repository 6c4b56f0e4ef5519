import io
import math

import pytest
from hypothesis import given, strategies as st

from wayfarer.geodata import (
    DanglingReference,
    MalformedRecord,
    Mode,
    ScheduleInconsistent,
    TransitLine,
    great_circle_distance,
    load_graph,
    next_departure,
)

NODES_HEADER = "id,lat,lon,kind\n"
EDGES_HEADER = "from,to,mode,length_m,duration_s\n"


def graph_from(nodes="", edges="", transit="[]", **kwargs):
    return load_graph(
        io.StringIO(NODES_HEADER + nodes),
        io.StringIO(EDGES_HEADER + edges),
        io.StringIO(transit),
        **kwargs,
    )


TWO_NODES = "A,37.0,-122.0,street_corner\nB,37.001,-122.0,street_corner\n"


class TestLoadGraph:
    def test_empty_sources_accepted(self):
        g = graph_from()
        assert len(g.nodes) == 0 and g.edge_count() == 0 and len(g.lines) == 0

    def test_dangling_edge_rejected(self):
        with pytest.raises(DanglingReference):
            graph_from(TWO_NODES, "A,Z,walk,150,120\n")

    def test_square_fixture_counts(self, square_graph):
        assert len(square_graph.nodes) == 4
        assert square_graph.edge_count() == 4
        assert len(square_graph.lines) == 1

    def test_duplicate_node_id(self):
        with pytest.raises(MalformedRecord, match="duplicate"):
            graph_from("A,37.0,-122.0,street_corner\nA,37.1,-122.0,street_corner\n")

    def test_latitude_out_of_range(self):
        with pytest.raises(MalformedRecord, match="lat"):
            graph_from("A,91.0,-122.0,street_corner\n")

    def test_bad_mode(self):
        with pytest.raises(MalformedRecord, match="mode"):
            graph_from(TWO_NODES, "A,B,scooter,150,120\n")

    def test_self_loop_rejected(self):
        with pytest.raises(MalformedRecord, match="self-loop"):
            graph_from(TWO_NODES, "A,A,walk,150,120\n")

    def test_missing_duration_for_walk(self):
        with pytest.raises(MalformedRecord, match="duration"):
            graph_from(TWO_NODES, "A,B,walk,150,\n")

    def test_public_edge_needs_a_line(self):
        with pytest.raises(DanglingReference, match="no transit line"):
            graph_from(TWO_NODES, "A,B,public,150,\n")

    def test_edge_shorter_than_straight_line(self):
        # A-B are ~111 m apart; claiming 50 m is geometrically impossible.
        with pytest.raises(MalformedRecord, match="straight-line"):
            graph_from(TWO_NODES, "A,B,walk,50,40\n")

    def test_edge_faster_than_mode_ceiling(self):
        with pytest.raises(MalformedRecord, match="ceiling"):
            graph_from(TWO_NODES, "A,B,walk,150,10\n")

    def test_unsorted_departures(self):
        transit = (
            '[{"id":"L","stops":["A","B"],"departures_s":[7200,3600],'
            '"leg_durations_s":[120],"boarding_fare_usd":1.0}]'
        )
        with pytest.raises(ScheduleInconsistent, match="increasing"):
            graph_from(TWO_NODES, transit=transit)

    def test_leg_count_mismatch(self):
        transit = (
            '[{"id":"L","stops":["A","B"],"departures_s":[3600],'
            '"leg_durations_s":[120,60],"boarding_fare_usd":1.0}]'
        )
        with pytest.raises(ScheduleInconsistent, match="leg durations"):
            graph_from(TWO_NODES, transit=transit)

    def test_run_spanning_midnight(self):
        transit = (
            '[{"id":"L","stops":["A","B"],"departures_s":[86300],'
            '"leg_durations_s":[200],"boarding_fare_usd":1.0}]'
        )
        with pytest.raises(ScheduleInconsistent, match="service day"):
            graph_from(TWO_NODES, transit=transit)

    def test_mode_speed_ordering_enforced(self):
        with pytest.raises(MalformedRecord, match="walk <= bike <= car"):
            graph_from(mode_speeds={Mode.WALK: 10.0, Mode.BIKE: 2.0})

    def test_load_is_deterministic(self, tmp_path):
        (tmp_path / "nodes.csv").write_text(NODES_HEADER + TWO_NODES)
        (tmp_path / "edges.csv").write_text(
            EDGES_HEADER + "A,B,walk,150,120\nA,B,bike,150,40\nB,A,walk,150,120\n"
        )
        from wayfarer.geodata import load_graph_dir

        g1 = load_graph_dir(tmp_path)
        g2 = load_graph_dir(tmp_path)
        assert g1.out_edges == g2.out_edges
        assert [e.mode for e in g1.edges_from("A")] == [Mode.BIKE, Mode.WALK]


LINE = TransitLine("L", ("A", "B"), (3600,), (600,), 100)
LINE2 = TransitLine("L2", ("A", "B", "C"), (3600, 7200), (600, 300), 100)


class TestNextDeparture:
    def test_single_departure(self):
        assert next_departure(LINE, 0, 0) == 3600

    def test_past_last_departure(self):
        assert next_departure(LINE, 0, 3601) is None

    def test_picks_following_run(self):
        line = TransitLine("L", ("A", "B"), (3600, 7200), (600,), 100)
        assert next_departure(line, 0, 3700) == 7200

    def test_downstream_stop_offset(self):
        # Departure at stop 1 is first-stop departure + first leg.
        assert next_departure(LINE2, 1, 0) == 4200
        assert next_departure(LINE2, 1, 4201) == 7800

    def test_stop_index_out_of_range(self):
        with pytest.raises(ValueError):
            next_departure(LINE, 1, 0)

    @given(st.integers(0, 90000), st.integers(0, 90000))
    def test_monotone_in_query_time(self, t1, t2):
        lo, hi = sorted((t1, t2))
        d1 = next_departure(LINE2, 1, lo)
        d2 = next_departure(LINE2, 1, hi)
        if d1 is not None and d2 is not None:
            assert d1 <= d2
        if d1 is None:
            assert d2 is None

    @given(st.integers(0, 90000))
    def test_waiting_never_negative(self, at):
        dep = next_departure(LINE2, 0, at)
        if dep is not None:
            assert dep >= at


class TestGreatCircle:
    def test_identity(self):
        assert great_circle_distance((37.0, -122.0), (37.0, -122.0)) == 0.0

    def test_one_degree_of_longitude_at_equator(self):
        d = great_circle_distance((0.0, 0.0), (0.0, 1.0))
        assert d == pytest.approx(111_195, rel=0.005)

    @given(
        st.floats(-80, 80), st.floats(-179, 179),
        st.floats(-80, 80), st.floats(-179, 179),
    )
    def test_symmetry(self, lat1, lon1, lat2, lon2):
        a, b = (lat1, lon1), (lat2, lon2)
        assert great_circle_distance(a, b) == pytest.approx(
            great_circle_distance(b, a), abs=1e-9
        )

    def test_zero_only_for_identical_points(self):
        assert great_circle_distance((37.0, -122.0), (37.0, -121.999)) > 0


class TestPublicTraversalProperty:
    def test_traversal_time_at_least_leg_duration(self):
        # (next departure - t) + leg >= leg because waiting is nonnegative.
        for t in range(0, 9000, 37):
            dep = next_departure(LINE2, 0, t)
            if dep is None:
                continue
            traversal = (dep - t) + LINE2.leg_durations[0]
            assert traversal >= LINE2.leg_durations[0]
