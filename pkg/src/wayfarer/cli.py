"""Command-line interface: one-shot planning and serving the HTTP API.

`wayfarer plan` mirrors POST /plan exactly (same constraint handling,
same serializers), so scripted use and the service produce identical
itinerary JSON for identical inputs. Exit codes: 0 planned, 3 infeasible,
2 bad input.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from wayfarer import ltl, pcf
from wayfarer.auxmetrics import AuxDataset, build_overlay, parse_points_csv
from wayfarer.errors import WayfarerError
from wayfarer.geodata import MODES, Mode, load_graph_dir
from wayfarer.search import PlanRequest, plan
from wayfarer.service import (
    build_constraint,
    create_app,
    dumps_canonical,
    itinerary_geometry,
    itinerary_to_doc,
    parse_depart_at,
)

EXIT_INFEASIBLE = 3
EXIT_INPUT_ERROR = 2


def _parse_endpoint(text: str):
    if "," in text:
        try:
            lat_s, lon_s = text.split(",", 1)
            return (float(lat_s), float(lon_s))
        except ValueError:
            raise WayfarerError(f"bad endpoint {text!r}: want 'lat,lon' or a node id") from None
    return text


def _parse_aux_spec(spec: str) -> tuple[str, Path, float]:
    # name=points.csv:radius_m
    try:
        name, rest = spec.split("=", 1)
        path_s, radius_s = rest.rsplit(":", 1)
        return name, Path(path_s), float(radius_s)
    except ValueError:
        raise WayfarerError(f"bad --aux {spec!r}: want name=points.csv:radius_m") from None


@click.group()
def main():
    """Multi-modal trip planning."""


@main.command("plan")
@click.option("--graph", "graph_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--from", "origin", required=True, help="lat,lon or node id")
@click.option("--to", "destination", required=True, help="lat,lon or node id")
@click.option("--depart", required=True, help="HH:MM:SS or seconds since midnight")
@click.option("--constraints", "constraints_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--prefs", "prefs_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--aux", "aux_specs", multiple=True, help="name=points.csv:radius_m")
@click.option("--fares", "fares_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--modes", help="comma-separated subset of walk,bike,car,public,taxi")
@click.option("--no-default-constraint", is_flag=True,
              help="drop the built-in no-car-after-bike/transit rule")
@click.option("--json", "output", flag_value="json", default=True)
@click.option("--geojson", "output", flag_value="geojson")
def plan_command(
    graph_dir, origin, destination, depart, constraints_file, prefs_file,
    aux_specs, fares_file, modes, no_default_constraint, output,
):
    """Plan one trip and print it as JSON (or route geometry only)."""
    try:
        graph = load_graph_dir(graph_dir)

        answers = pcf.answers_from_json(
            json.loads(Path(prefs_file).read_text(encoding="utf-8"))
        )
        profile = pcf.derive_coefficients(answers)

        constraint_text = None
        if constraints_file:
            constraint_text = Path(constraints_file).read_text(encoding="utf-8").strip()
        constraint = build_constraint(
            constraint_text, None, include_default=not no_default_constraint
        )

        overlays = {}
        for i, spec in enumerate(aux_specs, start=1):
            name, path, radius = _parse_aux_spec(spec)
            points = parse_points_csv(path.read_text(encoding="utf-8"), name)
            dataset = AuxDataset(f"cli-{i}", name, points, radius)
            overlays[name] = build_overlay(graph, dataset)

        missing = ltl.referenced_datasets(constraint) - set(overlays)
        if missing:
            raise WayfarerError(f"constraint references unknown datasets {sorted(missing)}")

        if modes:
            allowed = frozenset(Mode(m.strip()) for m in modes.split(","))
        else:
            allowed = frozenset(MODES)

        fares = pcf.FareConfig.from_json(fares_file) if fares_file else pcf.FareConfig()
        request = PlanRequest(
            origin=_parse_endpoint(origin),
            destination=_parse_endpoint(destination),
            depart_at=parse_depart_at(depart),
            profile=profile,
            constraint=constraint,
            allowed_modes=allowed,
        )
        itinerary = plan(request, graph, overlays, fares)
    except (WayfarerError, ValueError, OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT_ERROR)

    if itinerary is None:
        click.echo(
            json.dumps({"status": "infeasible", "constraint": ltl.to_text(constraint)},
                       sort_keys=True)
        )
        sys.exit(EXIT_INFEASIBLE)

    if output == "geojson":
        click.echo(dumps_canonical(itinerary_geometry(itinerary, graph)))
        return
    doc = {
        "status": "ok",
        "constraint": ltl.to_text(constraint),
        "itinerary": itinerary_to_doc(itinerary),
        "geometry": itinerary_geometry(itinerary, graph),
    }
    click.echo(dumps_canonical(doc))


@main.command("serve")
@click.option("--graph", "graph_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--data", "data_dir", type=click.Path(file_okay=False),
              envvar="WAYFARER_DATA_DIR")
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int, envvar="WAYFARER_PORT")
def serve_command(graph_dir, data_dir, host, port):
    """Run the HTTP planning service."""
    import uvicorn

    try:
        app = create_app(graph_dir=graph_dir, data_dir=data_dir)
    except WayfarerError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT_ERROR)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
