/**
 * What-if comparison of two plan responses: per-mode time and fare, per
 * dataset exposure, and total cost, all read verbatim from the response
 * totals (delta = B - A).
 */

import { MODES, PlanResponse } from "./types";

export interface ComparisonRow {
  metric: string;
  a: number;
  b: number;
  delta: number;
}

export function compareResponses(a: PlanResponse, b: PlanResponse): ComparisonRow[] {
  if (!a.itinerary || !b.itinerary) {
    throw new Error("both compared responses must contain an itinerary");
  }
  const rows: ComparisonRow[] = [];
  const push = (metric: string, left: number, right: number) =>
    rows.push({ metric, a: left, b: right, delta: right - left });

  for (const mode of MODES) {
    const left = a.itinerary.totals.time_s_by_mode[mode] ?? 0;
    const right = b.itinerary.totals.time_s_by_mode[mode] ?? 0;
    if (left !== 0 || right !== 0) push(`time_s:${mode}`, left, right);
  }
  for (const mode of MODES) {
    const left = a.itinerary.totals.fare_usd_by_mode[mode] ?? 0;
    const right = b.itinerary.totals.fare_usd_by_mode[mode] ?? 0;
    if (left !== 0 || right !== 0) push(`fare_usd:${mode}`, left, right);
  }
  const datasets = new Set([
    ...Object.keys(a.itinerary.totals.aux),
    ...Object.keys(b.itinerary.totals.aux),
  ]);
  for (const name of [...datasets].sort()) {
    push(
      `aux_sum:${name}`,
      a.itinerary.totals.aux[name]?.sum ?? 0,
      b.itinerary.totals.aux[name]?.sum ?? 0,
    );
  }
  push("clock_s", a.itinerary.totals.clock_s, b.itinerary.totals.clock_s);
  push("total_cost_usd", a.itinerary.total_cost_usd, b.itinerary.total_cost_usd);
  return rows;
}
