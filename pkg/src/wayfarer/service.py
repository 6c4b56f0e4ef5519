"""HTTP planning service.

Exposes dataset upload, preference elicitation, and trip planning over a
graph loaded at startup. Uploaded datasets and derived preference
profiles persist as plain files under a data directory with a JSON index;
overlays are rebuilt on upload and published atomically, so an in-flight
plan sees one consistent overlay set from start to finish.

The itinerary serializers here are the single source of truth for wire
output; the CLI uses the same functions, which keeps both surfaces
byte-identical for identical inputs.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
import uuid
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from wayfarer import auxmetrics, ltl, pcf
from wayfarer.auxmetrics import AuxDataset, AuxOverlay, MalformedPoints, NonpositiveRadius
from wayfarer.errors import WayfarerError
from wayfarer.geodata import MODES, MapGraph, Mode, load_graph_dir
from wayfarer.search import Itinerary, InvalidPlanRequest, PlanRequest, plan

# Attached to every plan unless the request opts out: once the trip has
# used a bike or public transit, it may not drive a car afterwards.
DEFAULT_CONSTRAINT_TEXT = "(mode=bike | mode=public) AFTER G(!(mode=car))"

ELICITATION_QUESTIONS = [
    {
        "id": "hours_equivalent",
        "text": (
            "For each mode: how many hours of driving feel equivalent to "
            "one hour of that mode?"
        ),
        "modes": [m.value for m in MODES if m is not Mode.CAR],
    },
    {
        "id": "dollars_per_hour",
        "text": "How many dollars would you pay to save one hour of travel?",
    },
    {
        "id": "dollars_per_aux",
        "text": (
            "For each uploaded dataset: how many dollars would you pay to "
            "avoid one unit of it along your route?"
        ),
        "per_dataset": True,
    },
]


# ---------------------------------------------------------------------------
# Wire serialization (shared with the CLI)
# ---------------------------------------------------------------------------


def itinerary_to_doc(itinerary: Itinerary) -> dict:
    return {
        "constraint": itinerary.constraint_text,
        "depart_s": itinerary.depart_at,
        "arrival_s": itinerary.arrival_s,
        "total_cost_usd": itinerary.total_cost_usd,
        "legs": [
            {
                "mode": leg.mode.value,
                "nodes": list(leg.nodes),
                "start_s": leg.start_s,
                "end_s": leg.end_s,
                "duration_s": leg.duration_s,
                "fare_usd": leg.fare_cents / 100.0,
                "distance_m": leg.distance_m,
            }
            for leg in itinerary.legs
        ],
        "totals": {
            "time_s_by_mode": {m.value: itinerary.totals.times.get(m, 0) for m in MODES},
            "fare_usd_by_mode": {
                m.value: itinerary.totals.fares_cents.get(m, 0) / 100.0 for m in MODES
            },
            "clock_s": itinerary.totals.clock,
            "visited_nodes": itinerary.totals.visited,
            "aux": {
                name: {"sum": t.sum, "max": t.max, "min": t.min, "avg": t.avg}
                for name, t in sorted(itinerary.totals.aux.items())
            },
        },
    }


def itinerary_geometry(itinerary: Itinerary, graph: MapGraph) -> dict:
    """One LineString feature per leg, coordinates on graph nodes."""
    features = []
    for leg in itinerary.legs:
        coords = [[graph.nodes[n].lon, graph.nodes[n].lat] for n in leg.nodes]
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": coords},
                "properties": {
                    "mode": leg.mode.value,
                    "start_s": leg.start_s,
                    "end_s": leg.end_s,
                    "duration_s": leg.duration_s,
                    "fare_usd": leg.fare_cents / 100.0,
                    "distance_m": leg.distance_m,
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}


def dumps_canonical(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def parse_depart_at(value) -> int:
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        parts = value.split(":")
        if len(parts) == 3:
            try:
                h, m, s = (int(p) for p in parts)
                return h * 3600 + m * 60 + s
            except ValueError:
                pass
        try:
            return int(value)
        except ValueError:
            pass
    raise InvalidPlanRequest(f"bad depart_at {value!r}: want seconds or HH:MM:SS")


def graph_fingerprint(graph: MapGraph) -> str:
    h = hashlib.sha256()
    for node_id in sorted(graph.nodes):
        n = graph.nodes[node_id]
        h.update(f"n|{n.id}|{n.lat!r}|{n.lon!r}|{n.kind.value}\n".encode())
    for node_id in sorted(graph.out_edges):
        for e in graph.out_edges[node_id]:
            h.update(
                f"e|{e.from_id}|{e.to_id}|{e.mode.value}|{e.length_m!r}|"
                f"{e.duration_s}|{e.line_id}\n".encode()
            )
    for line_id in sorted(graph.lines):
        h.update(repr(graph.lines[line_id]).encode())
    return h.hexdigest()[:16]


# ---------------------------------------------------------------------------
# Registry: datasets, overlays, profiles
# ---------------------------------------------------------------------------


class Registry:
    """Mutable service state with copy-on-write overlay publication."""

    def __init__(self, graph: MapGraph, data_dir: Path | None):
        self.graph = graph
        self.graph_version = graph_fingerprint(graph)
        self.data_dir = data_dir
        self.fares = pcf.FareConfig()
        self._lock = threading.Lock()
        self._overlays: dict[str, AuxOverlay] = {}
        self.dataset_records: dict[str, dict] = {}
        self.profiles: dict[str, dict] = {}
        self._counters = {"dataset": 0, "profile": 0}
        if data_dir is not None:
            data_dir.mkdir(parents=True, exist_ok=True)
            self._load_index()

    @property
    def overlays(self) -> dict[str, AuxOverlay]:
        # The dict reference is replaced wholesale on upload; callers that
        # capture it once keep a consistent snapshot.
        return self._overlays

    def _index_path(self) -> Path:
        return self.data_dir / "index.json"

    def _load_index(self):
        path = self._index_path()
        if not path.exists():
            return
        doc = json.loads(path.read_text(encoding="utf-8"))
        self._counters = doc.get("counters", self._counters)
        self.profiles = doc.get("profiles", {})
        overlays = {}
        for name, record in doc.get("datasets", {}).items():
            csv_path = self.data_dir / "points" / f"{record['id']}.csv"
            points = auxmetrics.parse_points_csv(csv_path.read_text(encoding="utf-8"), name)
            dataset = AuxDataset(record["id"], name, points, record["radius_m"])
            overlays[name] = auxmetrics.build_overlay(self.graph, dataset)
            self.dataset_records[name] = record
        self._overlays = overlays

    def _save_index(self):
        if self.data_dir is None:
            return
        doc = {
            "counters": self._counters,
            "datasets": self.dataset_records,
            "profiles": self.profiles,
        }
        tmp = self._index_path().with_suffix(".tmp")
        tmp.write_text(json.dumps(doc, indent=2, sort_keys=True), encoding="utf-8")
        tmp.replace(self._index_path())

    def upload_dataset(self, name: str, radius_m: float, csv_text: str) -> dict:
        points = auxmetrics.parse_points_csv(csv_text, name)
        with self._lock:
            self._counters["dataset"] += 1
            dataset_id = f"d-{self._counters['dataset']:04d}"
            previous = self.dataset_records.get(name)
            version = (previous["overlay_version"] + 1) if previous else 1
            dataset = AuxDataset(dataset_id, name, points, float(radius_m))
            overlay = auxmetrics.build_overlay(self.graph, dataset)
            record = {
                "id": dataset_id,
                "name": name,
                "point_count": len(points),
                "radius_m": float(radius_m),
                "uploaded_at": datetime.now(timezone.utc).isoformat(),
                "overlay_version": version,
            }
            if self.data_dir is not None:
                points_dir = self.data_dir / "points"
                points_dir.mkdir(exist_ok=True)
                (points_dir / f"{dataset_id}.csv").write_text(csv_text, encoding="utf-8")
            self.dataset_records[name] = record
            overlays = dict(self._overlays)
            overlays[name] = overlay
            self._overlays = overlays          # atomic publication
            self._save_index()
            return record

    def store_profile(self, answers: pcf.ElicitationAnswers) -> tuple[str, pcf.CoefficientProfile]:
        profile = pcf.derive_coefficients(answers)
        with self._lock:
            self._counters["profile"] += 1
            profile_id = f"p-{self._counters['profile']:04d}"
            self.profiles[profile_id] = {
                "answers": {
                    "hours_equivalent": {
                        m.value: v for m, v in answers.hours_equivalent.items()
                    },
                    "dollars_per_hour": answers.dollars_per_hour,
                    "dollars_per_aux": dict(answers.dollars_per_aux),
                },
                "alpha": {m.value: a for m, a in profile.alpha.items()},
                "beta_t_usd_per_hour": profile.beta_t_usd_per_hour,
                "beta_a_usd_per_aux": dict(profile.beta_a_usd_per_aux),
            }
            self._save_index()
            return profile_id, profile

    def profile_by_id(self, profile_id: str) -> pcf.CoefficientProfile | None:
        doc = self.profiles.get(profile_id)
        if doc is None:
            return None
        return pcf.derive_coefficients(pcf.answers_from_json(doc["answers"]))


# ---------------------------------------------------------------------------
# Request models
# ---------------------------------------------------------------------------


class EndpointDoc(BaseModel):
    node: str | None = None
    lat: float | None = None
    lon: float | None = None

    def resolve(self) -> str | tuple[float, float]:
        if self.node is not None:
            return self.node
        if self.lat is not None and self.lon is not None:
            return (self.lat, self.lon)
        raise InvalidPlanRequest("endpoint needs either node or lat+lon")


class AnswersDoc(BaseModel):
    hours_equivalent: dict[str, float]
    dollars_per_hour: float
    dollars_per_aux: dict[str, float] = Field(default_factory=dict)

    def to_answers(self) -> pcf.ElicitationAnswers:
        return pcf.answers_from_json(self.model_dump())


class PlanRequestDoc(BaseModel):
    from_: EndpointDoc = Field(alias="from")
    to: EndpointDoc
    depart_at: int | str
    constraint: str | None = None
    constraint_ast: dict | None = None
    profile_id: str | None = None
    profile: AnswersDoc | None = None
    allowed_modes: list[str] | None = None
    active_datasets: list[str] | None = None
    include_default_constraint: bool = True

    model_config = {"populate_by_name": True}


class ParseRequestDoc(BaseModel):
    text: str


# ---------------------------------------------------------------------------
# App factory
# ---------------------------------------------------------------------------


def _error_response(exc: WayfarerError) -> JSONResponse:
    detail = {"detail": str(exc)}
    if isinstance(exc, ltl.ConstraintSyntaxError):
        detail["position"] = exc.position
        return JSONResponse(detail, status_code=422)
    if isinstance(exc, ltl.UnsupportedProgression):
        return JSONResponse(detail, status_code=422)
    if isinstance(exc, (NonpositiveRadius, pcf.NonpositiveAnswer)):
        return JSONResponse(detail, status_code=422)
    if isinstance(exc, MalformedPoints):
        return JSONResponse(detail, status_code=400)
    return JSONResponse(detail, status_code=400)


def build_constraint(
    text: str | None, ast_doc: dict | None, include_default: bool
) -> ltl.Formula:
    if text is not None and ast_doc is not None:
        raise InvalidPlanRequest("give constraint or constraint_ast, not both")
    if ast_doc is not None:
        formula = ltl.from_json(ast_doc)
    elif text is not None and text.strip():
        formula = ltl.parse(text)
    else:
        formula = ltl.TRUE
    if include_default:
        formula = ltl.conj(formula, ltl.parse(DEFAULT_CONSTRAINT_TEXT))
    return formula


def create_app(
    graph_dir: str | os.PathLike | None = None,
    data_dir: str | os.PathLike | None = None,
    graph: MapGraph | None = None,
    fares: pcf.FareConfig | None = None,
) -> FastAPI:
    if graph is None:
        graph_dir = graph_dir or os.environ.get("WAYFARER_GRAPH_DIR")
        if graph_dir is None:
            raise WayfarerError("create_app needs a graph or WAYFARER_GRAPH_DIR")
        graph = load_graph_dir(graph_dir)
    if data_dir is None:
        data_dir = os.environ.get("WAYFARER_DATA_DIR")
    registry = Registry(graph, Path(data_dir) if data_dir else None)
    if fares is not None:
        registry.fares = fares

    app = FastAPI(title="wayfarer", version="0.1.0")
    app.state.registry = registry

    # The web client is served from its own origin; the API carries no
    # credentials, so a permissive CORS policy is fine.
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(WayfarerError)
    async def wayfarer_error_handler(request: Request, exc: WayfarerError):
        return _error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(request: Request, exc: RequestValidationError):
        # Malformed plan documents are a schema problem (400); elsewhere,
        # e.g. elicitation answers, report the offending fields as 422.
        detail = [
            {"field": ".".join(str(p) for p in err.get("loc", [])), "message": err.get("msg")}
            for err in exc.errors()
        ]
        status = 400 if request.url.path == "/plan" else 422
        return JSONResponse({"detail": detail}, status_code=status)

    @app.get("/health")
    def health():
        return {"status": "ok", "graph_version": registry.graph_version}

    @app.get("/elicitation/questions")
    def questions():
        return {"questions": ELICITATION_QUESTIONS}

    @app.post("/elicitation/answers")
    def answers(doc: AnswersDoc):
        profile_id, profile = registry.store_profile(doc.to_answers())
        return {
            "profile_id": profile_id,
            "alpha": {m.value: a for m, a in sorted(profile.alpha.items())},
            "beta_t_usd_per_hour": profile.beta_t_usd_per_hour,
            "beta_a_usd_per_aux": dict(sorted(profile.beta_a_usd_per_aux.items())),
        }

    @app.get("/datasets")
    def list_datasets():
        return {"datasets": sorted(registry.dataset_records.values(), key=lambda r: r["name"])}

    @app.post("/datasets")
    async def upload_dataset(
        request: Request,
        name: str = Query(...),
        radius: float = Query(default=auxmetrics.DEFAULT_RADIUS_M),
    ):
        if radius <= 0:
            raise NonpositiveRadius(f"radius must be positive, got {radius}")
        try:
            body = (await request.body()).decode("utf-8")
        except UnicodeDecodeError:
            raise MalformedPoints("CSV body is not valid UTF-8") from None
        if not body.strip():
            raise MalformedPoints("empty CSV body")
        return registry.upload_dataset(name, radius, body)

    @app.post("/constraints/parse")
    def parse_constraint(doc: ParseRequestDoc):
        formula = ltl.parse(doc.text)
        return {"ok": True, "canonical": ltl.to_text(formula)}

    @app.post("/plan")
    def plan_trip(doc: PlanRequestDoc):
        started = time.monotonic()
        constraint = build_constraint(
            doc.constraint, doc.constraint_ast, doc.include_default_constraint
        )

        if doc.profile_id is not None:
            profile = registry.profile_by_id(doc.profile_id)
            if profile is None:
                return JSONResponse(
                    {"detail": f"unknown profile {doc.profile_id!r}"}, status_code=404
                )
        elif doc.profile is not None:
            profile = pcf.derive_coefficients(doc.profile.to_answers())
        else:
            raise InvalidPlanRequest("profile_id or profile required")

        overlays = registry.overlays            # snapshot for this request
        if doc.active_datasets is not None:
            unknown = set(doc.active_datasets) - set(overlays)
            if unknown:
                return JSONResponse(
                    {"detail": f"unknown datasets {sorted(unknown)}"}, status_code=404
                )
            overlays = {name: overlays[name] for name in doc.active_datasets}
        referenced = ltl.referenced_datasets(constraint)
        missing = referenced - set(overlays)
        if missing:
            return JSONResponse(
                {"detail": f"constraint references unknown datasets {sorted(missing)}"},
                status_code=404,
            )

        if doc.allowed_modes is None:
            allowed = frozenset(MODES)
        else:
            try:
                allowed = frozenset(Mode(m) for m in doc.allowed_modes)
            except ValueError:
                raise InvalidPlanRequest(f"bad allowed_modes {doc.allowed_modes}") from None

        request_obj = PlanRequest(
            origin=doc.from_.resolve(),
            destination=doc.to.resolve(),
            depart_at=parse_depart_at(doc.depart_at),
            profile=profile,
            constraint=constraint,
            allowed_modes=allowed,
        )
        itinerary = plan(request_obj, registry.graph, overlays, registry.fares)
        elapsed_ms = int((time.monotonic() - started) * 1000)
        body = {
            "request_id": uuid.uuid4().hex,
            "graph_version": registry.graph_version,
            "constraint": ltl.to_text(constraint),
            "elapsed_ms": elapsed_ms,
        }
        if itinerary is None:
            body.update({"status": "infeasible", "itinerary": None, "geometry": None})
        else:
            body.update(
                {
                    "status": "ok",
                    "itinerary": itinerary_to_doc(itinerary),
                    "geometry": itinerary_geometry(itinerary, registry.graph),
                }
            )
        return body

    return app
