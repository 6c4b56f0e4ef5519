import { describe, expect, it } from "vitest";

import { Session } from "../src/session";
import { PlanResponse, PlanResponseSchema } from "../src/types";

import safeDoc from "./fixtures/bob_safe.json";
import fastDoc from "./fixtures/bob_fast.json";

const safe = PlanResponseSchema.parse(safeDoc);
const fast = PlanResponseSchema.parse(fastDoc);

function withVersion(response: PlanResponse, version: string): PlanResponse {
  return { ...response, graph_version: version };
}

describe("stale response handling", () => {
  it("applies responses for the latest request only", () => {
    const session = new Session();
    const first = session.nextRequestToken();
    const second = session.nextRequestToken();
    expect(session.applyResponse(first, safe)).toBe(false);
    expect(session.lastResponse).toBeNull();
    expect(session.applyResponse(second, fast)).toBe(true);
    expect(session.lastResponse).toBe(fast);
  });

  it("ignores a late response after a newer one was applied", () => {
    const session = new Session();
    const a = session.nextRequestToken();
    const b = session.nextRequestToken();
    expect(session.applyResponse(b, fast)).toBe(true);
    expect(session.applyResponse(a, safe)).toBe(false);
    expect(session.lastResponse).toBe(fast);
  });
});

describe("comparison slots", () => {
  it("stores the last response and pairs slots for comparison", () => {
    const session = new Session();
    session.applyResponse(session.nextRequestToken(), safe);
    expect(session.saveSlot(0)).toBe(true);
    session.applyResponse(session.nextRequestToken(), fast);
    expect(session.saveSlot(1)).toBe(true);
    const pair = session.comparablePair(0, 1);
    expect(pair).not.toBeNull();
    expect(pair![0].itinerary!.total_cost_usd).toBe(safe.itinerary!.total_cost_usd);
  });

  it("refuses to save without a plan", () => {
    const session = new Session();
    expect(session.saveSlot(0)).toBe(false);
  });

  it("evicts slots from another graph version", () => {
    const session = new Session();
    session.applyResponse(session.nextRequestToken(), withVersion(safe, "old-graph"));
    session.saveSlot(0);
    session.applyResponse(session.nextRequestToken(), withVersion(fast, "new-graph"));
    session.saveSlot(1);
    expect(session.slots[0]).toBeNull();
    expect(session.slots[1]!.graph_version).toBe("new-graph");
    expect(session.comparablePair(0, 1)).toBeNull();
  });

  it("keeps saved plans when a new profile is adopted", () => {
    const session = new Session();
    session.applyResponse(session.nextRequestToken(), safe);
    session.saveSlot(2);
    session.adoptProfile({
      profile_id: "p-0002",
      alpha: { walk: 3, bike: 2, car: 1, public: 0.25, taxi: 0.5 },
      beta_t_usd_per_hour: 20,
      beta_a_usd_per_aux: {},
    });
    expect(session.slots[2]).not.toBeNull();
    expect(session.profile!.profile_id).toBe("p-0002");
  });
});
