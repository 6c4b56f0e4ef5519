"""User-uploaded auxiliary metric datasets and per-node score overlays.

A dataset is a bag of (lat, lon) points (crime incidents, pollution
samples, ...). Each point contributes 1 - d/r to every graph node within
an effective radius r of it, and 0 beyond; a node's overlay score is the
sum of contributions over the whole dataset. Scores are precomputed per
graph so the planner can read them per node at constant cost.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from wayfarer.errors import WayfarerError
from wayfarer.geodata import MapGraph, great_circle_distance

DEFAULT_RADIUS_M = 200.0

_METERS_PER_DEG_LAT = 111_320.0


class NonpositiveRadius(WayfarerError):
    pass


class UnknownNode(WayfarerError):
    pass


class MalformedPoints(WayfarerError):
    """A point upload failed CSV or coordinate validation."""


@dataclass(frozen=True)
class AuxDataset:
    id: str
    name: str
    points: tuple[tuple[float, float], ...]
    default_radius: float = DEFAULT_RADIUS_M

    def __post_init__(self):
        if not self.points:
            raise MalformedPoints(f"dataset {self.name!r}: no points")
        if self.default_radius <= 0:
            raise NonpositiveRadius(f"dataset {self.name!r}: radius must be positive")
        for lat, lon in self.points:
            if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
                raise MalformedPoints(f"dataset {self.name!r}: bad coordinate ({lat}, {lon})")


@dataclass(frozen=True)
class AuxOverlay:
    dataset_id: str
    radius: float
    node_scores: dict[str, float] = field(repr=False)


def point_score(
    node_pos: tuple[float, float], aux_pos: tuple[float, float], radius: float
) -> float:
    """Contribution of one point to one node: 1 - d/r inside r, else 0."""
    if radius <= 0:
        raise NonpositiveRadius(f"radius must be positive, got {radius}")
    d = great_circle_distance(node_pos, aux_pos)
    if d <= radius:
        return 1.0 - d / radius
    return 0.0


class _PointGrid:
    """Uniform lat-lon bucket index with cell size >= the query radius.

    A radius query around any position is then covered by the 3x3 block
    of cells surrounding the position's own cell.
    """

    def __init__(self, points: tuple[tuple[float, float], ...], radius: float):
        self.radius = radius
        self.cell_lat = radius / _METERS_PER_DEG_LAT
        # Size lon cells for the worst (highest) latitude the query can
        # reach, so the 3x3 neighborhood always covers the radius.
        pad_deg = radius / _METERS_PER_DEG_LAT + 1e-6
        extreme_lat = min(max(abs(p[0]) for p in points) + pad_deg, 90.0)
        meters_per_deg_lon = _METERS_PER_DEG_LAT * max(math.cos(math.radians(extreme_lat)), 0.01)
        self.cell_lon = radius / meters_per_deg_lon
        self.buckets: dict[tuple[int, int], list[int]] = {}
        self.points = points
        for i, (lat, lon) in enumerate(points):
            self.buckets.setdefault(self._key(lat, lon), []).append(i)

    def _key(self, lat: float, lon: float) -> tuple[int, int]:
        return (math.floor(lat / self.cell_lat), math.floor(lon / self.cell_lon))

    def candidates(self, lat: float, lon: float) -> list[int]:
        ki, kj = self._key(lat, lon)
        found: list[int] = []
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                found.extend(self.buckets.get((ki + di, kj + dj), ()))
        # Point-index order keeps summation order identical to a plain
        # scan over the dataset, so scores match brute force bit-for-bit.
        found.sort()
        return found


def build_overlay(graph: MapGraph, dataset: AuxDataset, radius: float | None = None) -> AuxOverlay:
    """Precompute the summed score of `dataset` for every node of `graph`."""
    r = dataset.default_radius if radius is None else radius
    if r <= 0:
        raise NonpositiveRadius(f"radius must be positive, got {r}")
    grid = _PointGrid(dataset.points, r)
    scores: dict[str, float] = {}
    for node in graph.nodes.values():
        total = 0.0
        for i in grid.candidates(node.lat, node.lon):
            total += point_score((node.lat, node.lon), dataset.points[i], r)
        scores[node.id] = total
    return AuxOverlay(dataset_id=dataset.id, radius=r, node_scores=scores)


def node_score(overlay: AuxOverlay, node_id: str) -> float:
    try:
        return overlay.node_scores[node_id]
    except KeyError:
        raise UnknownNode(f"node {node_id!r} not covered by overlay {overlay.dataset_id!r}") from None


def parse_points_csv(text: str, name: str = "upload") -> tuple[tuple[float, float], ...]:
    """Parse a `lat,lon`-headed CSV into a point tuple."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or not {"lat", "lon"}.issubset(reader.fieldnames):
        raise MalformedPoints(f"{name}: header must contain lat,lon")
    points: list[tuple[float, float]] = []
    for lineno, row in enumerate(reader, start=2):
        try:
            lat = float(row["lat"])
            lon = float(row["lon"])
        except (TypeError, ValueError):
            raise MalformedPoints(f"{name} line {lineno}: bad coordinate") from None
        if not (math.isfinite(lat) and math.isfinite(lon)):
            raise MalformedPoints(f"{name} line {lineno}: non-finite coordinate")
        if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
            raise MalformedPoints(f"{name} line {lineno}: coordinate out of range")
        points.append((lat, lon))
    if not points:
        raise MalformedPoints(f"{name}: no points")
    return tuple(points)
