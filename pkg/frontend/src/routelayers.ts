/**
 * Pure route-layer construction: a plan response becomes one colored
 * polyline descriptor per leg. Kept free of Leaflet so it runs anywhere;
 * drawing goes through a MapAdapter, so tests can record calls. Every
 * number shown in a popup is copied from the response, never recomputed.
 */

import { Mode, PlanResponse } from "./types";

export const MODE_COLORS: Record<Mode, string> = {
  walk: "#8d6e63",
  bike: "#2e7d32",
  car: "#c62828",
  public: "#1565c0",
  taxi: "#f9a825",
};

export interface RouteLayer {
  mode: Mode;
  color: string;
  latlngs: [number, number][];
  popupHtml: string;
}

function formatDuration(seconds: number): string {
  const h = Math.floor(seconds / 3600);
  const m = Math.round((seconds % 3600) / 60);
  return h > 0 ? `${h} h ${m} min` : `${m} min`;
}

export function buildRouteLayers(response: PlanResponse): RouteLayer[] {
  if (response.status !== "ok" || !response.geometry) {
    throw new Error("buildRouteLayers needs a successful plan response");
  }
  return response.geometry.features.map((feature) => {
    const p = feature.properties;
    return {
      mode: p.mode,
      color: MODE_COLORS[p.mode],
      // GeoJSON is [lon, lat]; the map wants [lat, lon].
      latlngs: feature.geometry.coordinates.map(
        ([lon, lat]) => [lat, lon] as [number, number],
      ),
      popupHtml:
        `<b>${p.mode}</b> · ${formatDuration(p.duration_s)} · ` +
        `$${p.fare_usd.toFixed(2)} · ${Math.round(p.distance_m)} m`,
    };
  });
}

export interface MapAdapter {
  addPolyline(layer: RouteLayer): unknown;
  clearRoute(): void;
}

/** Replace the current route drawing with the response's legs. */
export function renderRoute(adapter: MapAdapter, response: PlanResponse): RouteLayer[] {
  const layers = buildRouteLayers(response);
  adapter.clearRoute();
  for (const layer of layers) adapter.addPolyline(layer);
  return layers;
}
