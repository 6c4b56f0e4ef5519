"""Static map and transit data: loading, validation, and lookups.

The planner works over a directed, mode-labeled graph whose nodes are
street corners and transit stops. Street-level edges (walk/bike/car/taxi)
carry a fixed traversal duration; public-transit edges are served by
scheduled lines and their traversal time depends on the clock.
"""

from __future__ import annotations

import csv
import io
import json
import math
from bisect import bisect_left
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from wayfarer.errors import WayfarerError

EARTH_RADIUS_M = 6_371_000.0

# Conservative per-mode speed ceilings (m/s) used by the remaining-cost
# heuristic; ingestion rejects edges that imply a faster traversal.
DEFAULT_MODE_SPEEDS = {
    "walk": 1.6,
    "bike": 6.0,
    "car": 30.0,
    "public": 30.0,
    "taxi": 30.0,
}

# Slack applied when validating edge geometry/speed so that rounded
# lengths and durations from data files do not trip the checks.
_SPEED_SLACK = 1.001
_LENGTH_SLACK_M = 1.0

SECONDS_PER_DAY = 86_400


class MalformedRecord(WayfarerError):
    """An input record failed structural or range validation."""


class DanglingReference(WayfarerError):
    """A record references a node or line that does not exist."""


class ScheduleInconsistent(WayfarerError):
    """A transit line's departures or leg durations are inconsistent."""


class Mode(str, Enum):
    WALK = "walk"
    BIKE = "bike"
    CAR = "car"
    PUBLIC = "public"
    TAXI = "taxi"

    @classmethod
    def parse(cls, text: str) -> "Mode":
        try:
            return cls(text)
        except ValueError:
            raise MalformedRecord(f"unknown mode {text!r}") from None


MODES: tuple[Mode, ...] = tuple(Mode)

# Modes whose edges carry a fixed duration (everything but public).
FIXED_DURATION_MODES = frozenset(m for m in Mode if m is not Mode.PUBLIC)


class NodeKind(str, Enum):
    STREET_CORNER = "street_corner"
    TRANSIT_STOP = "transit_stop"


@dataclass(frozen=True)
class MapNode:
    id: str
    lat: float
    lon: float
    kind: NodeKind


@dataclass(frozen=True)
class MapEdge:
    """One directed traversal option.

    Exactly one of duration_s / line_id is set: fixed-duration modes carry
    duration_s, public edges carry the id of the line serving the hop.
    """

    from_id: str
    to_id: str
    mode: Mode
    length_m: float
    duration_s: int | None = None
    line_id: str | None = None


@dataclass(frozen=True)
class TransitLine:
    id: str
    stops: tuple[str, ...]
    departures: tuple[int, ...]       # clock seconds at the first stop
    leg_durations: tuple[int, ...]    # seconds between consecutive stops
    fare_cents: int                   # flat per-boarding fare

    def offset_to_stop(self, stop_index: int) -> int:
        """Seconds from first-stop departure to departure at stop_index."""
        return sum(self.leg_durations[:stop_index])

    def leg_index(self, from_id: str, to_id: str) -> int | None:
        """Index k such that the line runs stops[k] -> stops[k+1] = from -> to."""
        for k in range(len(self.stops) - 1):
            if self.stops[k] == from_id and self.stops[k + 1] == to_id:
                return k
        return None


@dataclass(frozen=True)
class MapGraph:
    nodes: dict[str, MapNode]
    out_edges: dict[str, tuple[MapEdge, ...]]
    lines: dict[str, TransitLine]
    mode_speeds: dict[Mode, float]

    def edges_from(self, node_id: str) -> tuple[MapEdge, ...]:
        return self.out_edges.get(node_id, ())

    def modes_present(self) -> frozenset[Mode]:
        return frozenset(e.mode for edges in self.out_edges.values() for e in edges)

    def edge_count(self) -> int:
        return sum(len(edges) for edges in self.out_edges.values())

    def nearest_node(self, lat: float, lon: float, max_distance_m: float) -> MapNode | None:
        """Closest node within max_distance_m of the point, or None."""
        best: MapNode | None = None
        best_d = max_distance_m
        for node in self.nodes.values():
            d = great_circle_distance((lat, lon), (node.lat, node.lon))
            if d < best_d or (best is None and d == best_d):
                best, best_d = node, d
        return best


def great_circle_distance(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Haversine distance in meters between two (lat, lon) degree pairs."""
    lat1, lon1 = a
    lat2, lon2 = b
    phi1 = math.radians(lat1)
    phi2 = math.radians(lat2)
    dphi = phi2 - phi1
    dlam = math.radians(lon2 - lon1)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def next_departure(line: TransitLine, stop_index: int, at: int) -> int | None:
    """Earliest departure from stops[stop_index] at or after `at`, or None.

    The departure at stop k of a run leaving the first stop at d is
    d + offset_to_stop(k).
    """
    if not 0 <= stop_index < len(line.stops) - 1:
        raise ValueError(f"stop_index {stop_index} out of range for line {line.id}")
    offset = line.offset_to_stop(stop_index)
    i = bisect_left(line.departures, at - offset)
    if i == len(line.departures):
        return None
    return line.departures[i] + offset


def _open_source(source, label: str):
    if isinstance(source, (str, Path)):
        return open(source, "r", newline="", encoding="utf-8")
    if hasattr(source, "read"):
        # Copy so `with` never closes a caller-owned handle.
        return io.StringIO(source.read())
    raise MalformedRecord(f"{label}: unsupported source {type(source).__name__}")


def _parse_float(raw: str, where: str, lo: float | None = None, hi: float | None = None) -> float:
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise MalformedRecord(f"{where}: not a number: {raw!r}") from None
    if not math.isfinite(value):
        raise MalformedRecord(f"{where}: not finite: {raw!r}")
    if lo is not None and value < lo or hi is not None and value > hi:
        raise MalformedRecord(f"{where}: {value} outside [{lo}, {hi}]")
    return value


def _load_nodes(source) -> dict[str, MapNode]:
    nodes: dict[str, MapNode] = {}
    with _open_source(source, "nodes") as fh:
        reader = csv.DictReader(fh)
        expected = {"id", "lat", "lon", "kind"}
        if reader.fieldnames is None or not expected.issubset(reader.fieldnames):
            raise MalformedRecord(f"nodes: header must contain {sorted(expected)}")
        for lineno, row in enumerate(reader, start=2):
            where = f"nodes line {lineno}"
            node_id = (row["id"] or "").strip()
            if not node_id:
                raise MalformedRecord(f"{where}: empty id")
            if node_id in nodes:
                raise MalformedRecord(f"{where}: duplicate node id {node_id!r}")
            lat = _parse_float(row["lat"], f"{where} field lat", -90.0, 90.0)
            lon = _parse_float(row["lon"], f"{where} field lon", -180.0, 180.0)
            try:
                kind = NodeKind((row["kind"] or "").strip())
            except ValueError:
                raise MalformedRecord(f"{where}: unknown kind {row['kind']!r}") from None
            nodes[node_id] = MapNode(node_id, lat, lon, kind)
    return nodes


def _load_lines(source, nodes: dict[str, MapNode]) -> dict[str, TransitLine]:
    if source is None:
        return {}
    if isinstance(source, (str, Path)):
        raw = Path(source).read_text(encoding="utf-8")
    else:
        raw = source.read()
    try:
        docs = json.loads(raw) if raw.strip() else []
    except json.JSONDecodeError as exc:
        raise MalformedRecord(f"transit: invalid JSON: {exc}") from None
    if not isinstance(docs, list):
        raise MalformedRecord("transit: top-level JSON value must be an array")

    lines: dict[str, TransitLine] = {}
    for i, doc in enumerate(docs):
        where = f"transit line #{i}"
        try:
            line_id = str(doc["id"])
            stops = tuple(str(s) for s in doc["stops"])
            departures = tuple(int(d) for d in doc["departures_s"])
            leg_durations = tuple(int(d) for d in doc["leg_durations_s"])
            fare_usd = float(doc.get("boarding_fare_usd", 0.0))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedRecord(f"{where}: {exc}") from None
        if line_id in lines:
            raise MalformedRecord(f"{where}: duplicate line id {line_id!r}")
        if len(stops) < 2:
            raise ScheduleInconsistent(f"{where}: needs at least 2 stops")
        for stop in stops:
            if stop not in nodes:
                raise DanglingReference(f"{where}: unknown stop {stop!r}")
        if len(leg_durations) != len(stops) - 1:
            raise ScheduleInconsistent(
                f"{where}: {len(leg_durations)} leg durations for {len(stops)} stops"
            )
        if any(d <= 0 for d in leg_durations):
            raise ScheduleInconsistent(f"{where}: leg durations must be positive")
        if any(b >= a for a, b in zip(departures[1:], departures[:-1])):
            raise ScheduleInconsistent(f"{where}: departures must be strictly increasing")
        if departures and (departures[0] < 0 or departures[-1] + sum(leg_durations) > SECONDS_PER_DAY):
            raise ScheduleInconsistent(f"{where}: runs must fit within one service day")
        if fare_usd < 0:
            raise MalformedRecord(f"{where}: negative boarding fare")
        lines[line_id] = TransitLine(
            line_id, stops, departures, leg_durations, round(fare_usd * 100)
        )
    return lines


def _load_edges(
    source,
    nodes: dict[str, MapNode],
    lines: dict[str, TransitLine],
    mode_speeds: dict[Mode, float],
) -> dict[str, list[MapEdge]]:
    out: dict[str, list[MapEdge]] = {node_id: [] for node_id in nodes}
    with _open_source(source, "edges") as fh:
        reader = csv.DictReader(fh)
        expected = {"from", "to", "mode", "length_m", "duration_s"}
        if reader.fieldnames is None or not expected.issubset(reader.fieldnames):
            raise MalformedRecord(f"edges: header must contain {sorted(expected)}")
        for lineno, row in enumerate(reader, start=2):
            where = f"edges line {lineno}"
            from_id = (row["from"] or "").strip()
            to_id = (row["to"] or "").strip()
            if from_id not in nodes:
                raise DanglingReference(f"{where}: unknown node {from_id!r}")
            if to_id not in nodes:
                raise DanglingReference(f"{where}: unknown node {to_id!r}")
            if from_id == to_id:
                raise MalformedRecord(f"{where}: self-loop on {from_id!r}")
            mode = Mode.parse((row["mode"] or "").strip())
            length = _parse_float(row["length_m"], f"{where} field length_m")
            if length <= 0:
                raise MalformedRecord(f"{where}: length must be positive")
            straight = great_circle_distance(
                (nodes[from_id].lat, nodes[from_id].lon),
                (nodes[to_id].lat, nodes[to_id].lon),
            )
            if length + _LENGTH_SLACK_M < straight:
                raise MalformedRecord(
                    f"{where}: length {length:.1f} m shorter than straight-line "
                    f"{straight:.1f} m"
                )
            duration_raw = (row["duration_s"] or "").strip()
            if mode in FIXED_DURATION_MODES:
                if not duration_raw:
                    raise MalformedRecord(f"{where}: duration_s required for mode {mode.value}")
                try:
                    duration = int(duration_raw)
                except ValueError:
                    raise MalformedRecord(f"{where}: bad duration {duration_raw!r}") from None
                if duration <= 0:
                    raise MalformedRecord(f"{where}: duration must be positive")
                if length / duration > mode_speeds[mode] * _SPEED_SLACK:
                    raise MalformedRecord(
                        f"{where}: implied speed {length / duration:.2f} m/s exceeds "
                        f"{mode.value} ceiling {mode_speeds[mode]} m/s"
                    )
                out[from_id].append(MapEdge(from_id, to_id, mode, length, duration_s=duration))
            else:
                if duration_raw:
                    raise MalformedRecord(f"{where}: duration_s must be empty for public edges")
                serving = [
                    line for line in lines.values() if line.leg_index(from_id, to_id) is not None
                ]
                if not serving:
                    raise DanglingReference(
                        f"{where}: no transit line serves {from_id!r} -> {to_id!r}"
                    )
                for line in serving:
                    k = line.leg_index(from_id, to_id)
                    leg = line.leg_durations[k]
                    if length / leg > mode_speeds[Mode.PUBLIC] * _SPEED_SLACK:
                        raise ScheduleInconsistent(
                            f"{where}: line {line.id} implies {length / leg:.2f} m/s, above "
                            f"public ceiling {mode_speeds[Mode.PUBLIC]} m/s"
                        )
                    out[from_id].append(
                        MapEdge(from_id, to_id, Mode.PUBLIC, length, line_id=line.id)
                    )
    return out


def load_graph(
    nodes_source,
    edges_source,
    transit_source=None,
    mode_speeds: dict[Mode, float] | None = None,
) -> MapGraph:
    """Load and validate a MapGraph from CSV/JSON sources.

    Sources may be file paths or open text files. Adjacency lists are
    canonically ordered by (to, mode, line) so identical inputs always
    produce identical graphs.
    """
    speeds = dict(DEFAULT_MODE_SPEEDS)
    if mode_speeds:
        speeds.update({Mode(k): float(v) for k, v in mode_speeds.items()})
    speeds = {Mode(k): float(v) for k, v in speeds.items()}
    if any(v <= 0 for v in speeds.values()):
        raise MalformedRecord("mode speeds must be strictly positive")
    if not speeds[Mode.WALK] <= speeds[Mode.BIKE] <= speeds[Mode.CAR]:
        raise MalformedRecord("mode speeds must satisfy walk <= bike <= car")

    nodes = _load_nodes(nodes_source)
    lines = _load_lines(transit_source, nodes)
    adjacency = _load_edges(edges_source, nodes, lines, speeds)
    out_edges = {
        node_id: tuple(sorted(edges, key=lambda e: (e.to_id, e.mode.value, e.line_id or "")))
        for node_id, edges in adjacency.items()
    }
    return MapGraph(nodes=nodes, out_edges=out_edges, lines=lines, mode_speeds=speeds)


def load_graph_dir(graph_dir: str | Path, mode_speeds: dict[Mode, float] | None = None) -> MapGraph:
    """Load nodes.csv / edges.csv / transit.json from a directory.

    transit.json may be absent for graphs without scheduled service.
    """
    d = Path(graph_dir)
    transit = d / "transit.json"
    return load_graph(
        d / "nodes.csv",
        d / "edges.csv",
        transit if transit.exists() else None,
        mode_speeds=mode_speeds,
    )
