/**
 * Elicitation wizard model: collects the two preference questions'
 * answers as raw text fields, validates them, and assembles the answers
 * document. The derived coefficients shown for confirmation are taken
 * from the service response, never computed client-side.
 */

import { AnswersDoc, ProfileResponse } from "./types";

export interface WizardModel {
  hoursEquivalent: Record<string, string>; // per mode except car
  dollarsPerHour: string;
  dollarsPerAux: Record<string, string>; // per uploaded dataset
}

export function emptyWizard(modes: string[], datasets: string[]): WizardModel {
  return {
    hoursEquivalent: Object.fromEntries(modes.map((m) => [m, ""])),
    dollarsPerHour: "",
    dollarsPerAux: Object.fromEntries(datasets.map((d) => [d, ""])),
  };
}

export interface FieldError {
  field: string;
  message: string;
}

export function validateWizard(model: WizardModel): FieldError[] {
  const errors: FieldError[] = [];
  const positive = (raw: string) => {
    const value = Number(raw);
    return raw.trim() !== "" && Number.isFinite(value) && value > 0;
  };
  const nonnegative = (raw: string) => {
    const value = Number(raw);
    return raw.trim() !== "" && Number.isFinite(value) && value >= 0;
  };
  for (const [mode, raw] of Object.entries(model.hoursEquivalent)) {
    if (!positive(raw)) {
      errors.push({ field: `hours_equivalent.${mode}`, message: "enter a positive number" });
    }
  }
  if (!positive(model.dollarsPerHour)) {
    errors.push({ field: "dollars_per_hour", message: "enter a positive number" });
  }
  for (const [name, raw] of Object.entries(model.dollarsPerAux)) {
    if (!nonnegative(raw)) {
      errors.push({ field: `dollars_per_aux.${name}`, message: "enter zero or more" });
    }
  }
  return errors;
}

export const submitEnabled = (model: WizardModel): boolean =>
  validateWizard(model).length === 0;

export function toAnswersDoc(model: WizardModel): AnswersDoc {
  if (!submitEnabled(model)) {
    throw new Error("wizard has invalid fields");
  }
  return {
    hours_equivalent: Object.fromEntries(
      Object.entries(model.hoursEquivalent).map(([m, v]) => [m, Number(v)]),
    ),
    dollars_per_hour: Number(model.dollarsPerHour),
    dollars_per_aux: Object.fromEntries(
      Object.entries(model.dollarsPerAux).map(([d, v]) => [d, Number(v)]),
    ),
  };
}

export interface CoefficientRow {
  label: string;
  value: number;
}

/** Confirmation rows shown after submit: verbatim service coefficients. */
export function profileDisplayRows(profile: ProfileResponse): CoefficientRow[] {
  const rows: CoefficientRow[] = Object.entries(profile.alpha)
    .sort(([a], [b]) => a.localeCompare(b))
    .map(([mode, value]) => ({ label: `alpha:${mode}`, value }));
  rows.push({ label: "beta_t ($/hour)", value: profile.beta_t_usd_per_hour });
  for (const [name, value] of Object.entries(profile.beta_a_usd_per_aux).sort()) {
    rows.push({ label: `beta_a ($/${name})`, value });
  }
  return rows;
}
