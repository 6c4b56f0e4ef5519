import { describe, expect, it } from "vitest";

import { MODE_COLORS, MapAdapter, RouteLayer, buildRouteLayers, renderRoute } from "../src/routelayers";
import { PlanResponseSchema } from "../src/types";

import safeDoc from "./fixtures/bob_safe.json";
import fastDoc from "./fixtures/bob_fast.json";
import infeasibleDoc from "./fixtures/bob_infeasible.json";

const safe = PlanResponseSchema.parse(safeDoc);
const fast = PlanResponseSchema.parse(fastDoc);
const infeasible = PlanResponseSchema.parse(infeasibleDoc);

class RecordingAdapter implements MapAdapter {
  added: RouteLayer[] = [];
  cleared = 0;

  addPolyline(layer: RouteLayer): unknown {
    this.added.push(layer);
    return layer;
  }

  clearRoute(): void {
    this.cleared += 1;
    this.added = [];
  }
}

describe("buildRouteLayers", () => {
  it("one leg becomes one polyline", () => {
    const layers = buildRouteLayers(fast);
    expect(layers).toHaveLength(1);
    expect(layers[0].color).toBe(MODE_COLORS[layers[0].mode]);
  });

  it("multi-leg route gets one polyline per leg with mode colors", () => {
    const layers = buildRouteLayers(safe);
    expect(layers).toHaveLength(safe.itinerary!.legs.length);
    expect(layers.length).toBeGreaterThan(1);
    const colors = new Set(layers.map((l) => l.color));
    expect(colors.size).toBeGreaterThan(1); // bike and walk legs differ
    for (const [layer, leg] of layers.map((l, i) => [l, safe.itinerary!.legs[i]] as const)) {
      expect(layer.mode).toBe(leg.mode);
      expect(layer.latlngs).toHaveLength(leg.nodes.length);
    }
  });

  it("swaps GeoJSON lon/lat into lat/lon pairs", () => {
    const layers = buildRouteLayers(fast);
    const [lon, lat] = fast.geometry!.features[0].geometry.coordinates[0];
    expect(layers[0].latlngs[0]).toEqual([lat, lon]);
  });

  it("popups carry the response's duration and fare, verbatim fields", () => {
    const layers = buildRouteLayers(safe);
    for (const [i, layer] of layers.entries()) {
      const leg = safe.itinerary!.legs[i];
      expect(layer.popupHtml).toContain(leg.mode);
      expect(layer.popupHtml).toContain(`$${leg.fare_usd.toFixed(2)}`);
    }
  });

  it("refuses an infeasible response", () => {
    expect(() => buildRouteLayers(infeasible)).toThrow();
  });
});

describe("renderRoute", () => {
  it("clears before drawing and draws every leg", () => {
    const adapter = new RecordingAdapter();
    renderRoute(adapter, fast);
    expect(adapter.added).toHaveLength(1);
    renderRoute(adapter, safe);
    expect(adapter.cleared).toBe(2);
    expect(adapter.added).toHaveLength(safe.itinerary!.legs.length);
  });
});
