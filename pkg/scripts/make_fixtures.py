"""Regenerate the committed test fixture graphs.

Coordinates are synthetic but geometrically consistent: every edge length
is at least the straight-line distance between its endpoints and implied
speeds stay under the per-mode ceilings, so the loader's validation
passes. Run from the repo root:  python3 scripts/make_fixtures.py
"""

from __future__ import annotations

import json
import math
from pathlib import Path

EARTH_RADIUS_M = 6_371_000.0
FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def gc(a, b):
    lat1, lon1 = a
    lat2, lon2 = b
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    h = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(math.sqrt(h))


def east_of(origin, meters):
    lat, lon = origin
    mpd = 111_320.0 * math.cos(math.radians(lat))
    return (lat, lon + meters / mpd)


def north_of(origin, meters):
    lat, lon = origin
    return (lat + meters / 111_320.0, lon)


def write(d: Path, nodes, edges, lines):
    d.mkdir(parents=True, exist_ok=True)
    with open(d / "nodes.csv", "w") as fh:
        fh.write("id,lat,lon,kind\n")
        for node_id, (lat, lon), kind in nodes:
            fh.write(f"{node_id},{lat:.7f},{lon:.7f},{kind}\n")
    with open(d / "edges.csv", "w") as fh:
        fh.write("from,to,mode,length_m,duration_s\n")
        for from_id, to_id, mode, length, duration in edges:
            dur = "" if duration is None else str(duration)
            fh.write(f"{from_id},{to_id},{mode},{length:.1f},{dur}\n")
    with open(d / "transit.json", "w") as fh:
        json.dump(lines, fh, indent=2)
        fh.write("\n")


def edge(coords, a, b, mode, speed=None, duration=None):
    """Edge a->b with length = straight-line + 1m; duration from speed."""
    length = gc(coords[a], coords[b]) + 1.0
    if mode == "public":
        return (a, b, mode, length, None), length, None
    if duration is None:
        duration = math.ceil(length / speed)
    return (a, b, mode, length, duration), length, duration


def make_square():
    a = (37.7749, -122.4194)
    coords = {
        "A": a,
        "B": north_of(a, 200),
        "C": east_of(a, 200),
        "D": east_of(north_of(a, 200), 200),
    }
    nodes = [
        ("A", coords["A"], "transit_stop"),
        ("B", coords["B"], "street_corner"),
        ("C", coords["C"], "transit_stop"),
        ("D", coords["D"], "street_corner"),
    ]
    edges = []
    for pair, mode, speed in [
        (("A", "B"), "walk", 1.4),
        (("B", "D"), "walk", 1.4),
        (("C", "D"), "walk", 1.4),
    ]:
        e, _, _ = edge(coords, *pair, mode, speed=speed)
        edges.append(e)
    e, length, _ = edge(coords, "A", "C", "public")
    edges.append(e)
    lines = [
        {
            "id": "L1",
            "stops": ["A", "C"],
            "departures_s": [28900, 30000, 32000],
            "leg_durations_s": [120],
            "boarding_fare_usd": 2.50,
        }
    ]
    write(FIXTURES / "square", nodes, edges, lines)


def make_alice():
    o = (37.4400, -122.1600)
    coords = {"O": o}
    coords["B1"] = east_of(o, 3000)
    coords["S1"] = east_of(o, 6300)
    coords["S2"] = east_of(o, 15300)
    coords["G"] = east_of(o, 16100)
    nodes = [
        ("O", coords["O"], "street_corner"),
        ("B1", coords["B1"], "street_corner"),
        ("S1", coords["S1"], "transit_stop"),
        ("S2", coords["S2"], "transit_stop"),
        ("G", coords["G"], "transit_stop"),
    ]
    edges = []
    for pair, mode, speed in [
        (("O", "B1"), "bike", 5.0),
        (("B1", "S1"), "bike", 5.0),
        (("O", "B1"), "walk", 1.25),
        (("B1", "S1"), "walk", 1.25),
        (("S2", "G"), "walk", 1.4),
        (("O", "G"), "car", 29.0),
    ]:
        e, _, _ = edge(coords, *pair, mode, speed=speed)
        edges.append(e)
    for pair in [("S1", "S2"), ("S2", "G")]:
        e, _, _ = edge(coords, *pair, "public")
        edges.append(e)
    lines = [
        {
            "id": "CAL",
            "stops": ["S1", "S2"],
            "departures_s": list(range(28800, 43200, 600)),
            "leg_durations_s": [900],
            "boarding_fare_usd": 2.50,
        },
        {
            "id": "CITY",
            "stops": ["S2", "G"],
            "departures_s": list(range(28800, 43200, 300)),
            "leg_durations_s": [600],
            "boarding_fare_usd": 2.00,
        },
    ]
    write(FIXTURES / "alice", nodes, edges, lines)


def make_bob():
    # 2 rows x 4 columns; middle (south) row is the fast corridor with the
    # crime cluster, north row is the detour with one walk-only hop.
    base = (37.7700, -122.4200)
    coords = {}
    for c in range(4):
        coords[f"M{c}"] = east_of(base, 250 * c)
        coords[f"N{c}"] = north_of(east_of(base, 250 * c), 222)
    nodes = [(k, coords[k], "street_corner") for k in sorted(coords)]
    edges = []

    def both(a, b, mode, speed):
        for pair in [(a, b), (b, a)]:
            e, _, _ = edge(coords, *pair, mode, speed=speed)
            edges.append(e)

    for c in range(3):
        both(f"M{c}", f"M{c+1}", "bike", 5.0)
        both(f"M{c}", f"M{c+1}", "walk", 1.25)
        if c == 1:
            both(f"N{c}", f"N{c+1}", "walk", 1.25)   # park path, no biking
        else:
            both(f"N{c}", f"N{c+1}", "bike", 5.0)
            both(f"N{c}", f"N{c+1}", "walk", 1.25)
    for c in range(4):
        both(f"M{c}", f"N{c}", "bike", 5.0)
        both(f"M{c}", f"N{c}", "walk", 1.25)

    write(FIXTURES / "bob", nodes, edges, [])

    with open(FIXTURES / "bob" / "crime.csv", "w") as fh:
        fh.write("lat,lon\n")
        for node in ("M1", "M2"):
            lat, lon = coords[node]
            for _ in range(20):
                fh.write(f"{lat:.7f},{lon:.7f}\n")


if __name__ == "__main__":
    make_square()
    make_alice()
    make_bob()
    print(f"fixtures written under {FIXTURES}")
