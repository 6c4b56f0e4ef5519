/** Leaflet-backed MapAdapter; the pure layer logic lives in routelayers. */

import type { Map as LeafletMap, Polyline } from "leaflet";
import * as L from "leaflet";

import { MapAdapter, RouteLayer } from "./routelayers";

export class LeafletAdapter implements MapAdapter {
  private drawn: Polyline[] = [];

  constructor(private map: LeafletMap) {}

  addPolyline(layer: RouteLayer): Polyline {
    const line = L.polyline(layer.latlngs, { color: layer.color, weight: 5 });
    line.bindPopup(layer.popupHtml);
    line.addTo(this.map);
    this.drawn.push(line);
    return line;
  }

  clearRoute(): void {
    for (const line of this.drawn) line.remove();
    this.drawn = [];
  }
}
