import { describe, expect, it } from "vitest";

import {
  emptyWizard,
  profileDisplayRows,
  submitEnabled,
  toAnswersDoc,
  validateWizard,
} from "../src/wizard";

const MODES = ["walk", "bike", "public", "taxi"];

function filledWizard() {
  const model = emptyWizard(MODES, ["crime"]);
  model.hoursEquivalent = { walk: "3", bike: "2", public: "0.25", taxi: "0.5" };
  model.dollarsPerHour = "20";
  model.dollarsPerAux = { crime: "1" };
  return model;
}

describe("wizard validation", () => {
  it("a complete form enables submit", () => {
    expect(submitEnabled(filledWizard())).toBe(true);
  });

  it("a blank field disables submit and names the field", () => {
    const model = filledWizard();
    model.hoursEquivalent["bike"] = "";
    expect(submitEnabled(model)).toBe(false);
    const errors = validateWizard(model);
    expect(errors).toHaveLength(1);
    expect(errors[0].field).toBe("hours_equivalent.bike");
  });

  it("zero hours are rejected, zero aux dollars are allowed", () => {
    const model = filledWizard();
    model.hoursEquivalent["walk"] = "0";
    expect(submitEnabled(model)).toBe(false);
    const model2 = filledWizard();
    model2.dollarsPerAux["crime"] = "0";
    expect(submitEnabled(model2)).toBe(true);
  });

  it("non-numeric input is rejected", () => {
    const model = filledWizard();
    model.dollarsPerHour = "twenty";
    expect(submitEnabled(model)).toBe(false);
  });
});

describe("answers document", () => {
  it("assembles numbers from the raw fields", () => {
    expect(toAnswersDoc(filledWizard())).toEqual({
      hours_equivalent: { walk: 3, bike: 2, public: 0.25, taxi: 0.5 },
      dollars_per_hour: 20,
      dollars_per_aux: { crime: 1 },
    });
  });

  it("refuses to assemble an invalid form", () => {
    const model = filledWizard();
    model.dollarsPerHour = "";
    expect(() => toAnswersDoc(model)).toThrow();
  });
});

describe("coefficient display", () => {
  it("mirrors the service response without recomputation", () => {
    const rows = profileDisplayRows({
      profile_id: "p-0001",
      alpha: { walk: 3, bike: 2, car: 1, public: 0.25, taxi: 0.5 },
      beta_t_usd_per_hour: 20,
      beta_a_usd_per_aux: { crime: 1 },
    });
    const byLabel = Object.fromEntries(rows.map((r) => [r.label, r.value]));
    expect(byLabel["alpha:walk"]).toBe(3);
    expect(byLabel["alpha:public"]).toBe(0.25);
    expect(byLabel["beta_t ($/hour)"]).toBe(20);
    expect(byLabel["beta_a ($/crime)"]).toBe(1);
  });
});
