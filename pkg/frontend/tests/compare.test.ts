import { describe, expect, it } from "vitest";

import { compareResponses } from "../src/compare";
import { PlanResponseSchema } from "../src/types";

import safeDoc from "./fixtures/bob_safe.json";
import fastDoc from "./fixtures/bob_fast.json";

const safe = PlanResponseSchema.parse(safeDoc);
const fast = PlanResponseSchema.parse(fastDoc);

describe("compareResponses", () => {
  it("identical responses give all-zero deltas", () => {
    for (const row of compareResponses(safe, safe)) {
      expect(row.delta).toBe(0);
    }
  });

  it("safer-vs-fastest pair shows a negative exposure delta", () => {
    // A = fastest (through the flagged corridor), B = safer detour.
    const rows = compareResponses(fast, safe);
    const aux = rows.find((r) => r.metric === "aux_sum:crime");
    expect(aux).toBeDefined();
    expect(aux!.delta).toBeLessThan(0);
    const clock = rows.find((r) => r.metric === "clock_s");
    expect(clock!.delta).toBeGreaterThan(0); // safer route is slower
  });

  it("values are copied verbatim from the responses", () => {
    const rows = compareResponses(fast, safe);
    const cost = rows.find((r) => r.metric === "total_cost_usd")!;
    expect(cost.a).toBe(fast.itinerary!.total_cost_usd);
    expect(cost.b).toBe(safe.itinerary!.total_cost_usd);
    expect(cost.delta).toBeCloseTo(cost.b - cost.a, 12);
    const bikeTime = rows.find((r) => r.metric === "time_s:bike")!;
    expect(bikeTime.a).toBe(fast.itinerary!.totals.time_s_by_mode["bike"]);
  });

  it("rejects responses without an itinerary", () => {
    const infeasible = { ...safe, itinerary: null, geometry: null };
    expect(() => compareResponses(infeasible, safe)).toThrow();
  });
});
