/**
 * Single-user session state: trip endpoints, constraint text, the active
 * profile, the last plan response, and up to three comparison slots.
 *
 * Slot invariant: all stored responses come from the same graph version;
 * saving a response from a newer graph evicts the stale slots. At most
 * one plan request is considered in flight: responses that arrive for a
 * superseded request token are discarded.
 */

import { PlanResponse, ProfileResponse } from "./types";

export interface LatLng {
  lat: number;
  lon: number;
}

export const SLOT_COUNT = 3;

export class Session {
  from: LatLng | null = null;
  to: LatLng | null = null;
  departTime = "08:00:00";
  constraintText = "";
  profile: ProfileResponse | null = null;
  lastResponse: PlanResponse | null = null;
  slots: (PlanResponse | null)[] = new Array(SLOT_COUNT).fill(null);

  private issuedToken = 0;
  private appliedToken = 0;

  /** Token for a new plan request; later tokens supersede earlier ones. */
  nextRequestToken(): number {
    this.issuedToken += 1;
    return this.issuedToken;
  }

  /** Apply a response unless a newer request was issued or applied. */
  applyResponse(token: number, response: PlanResponse): boolean {
    if (token < this.issuedToken || token <= this.appliedToken) {
      return false; // stale: a newer request superseded this one
    }
    this.appliedToken = token;
    this.lastResponse = response;
    return true;
  }

  /** Store the last response in a slot, evicting other-graph responses. */
  saveSlot(index: number): boolean {
    if (index < 0 || index >= SLOT_COUNT || this.lastResponse === null) {
      return false;
    }
    const version = this.lastResponse.graph_version;
    this.slots = this.slots.map((slot) =>
      slot !== null && slot.graph_version !== version ? null : slot,
    );
    this.slots[index] = this.lastResponse;
    return true;
  }

  clearSlots(): void {
    this.slots = new Array(SLOT_COUNT).fill(null);
  }

  /** New profile replaces the active one; saved plans stay comparable. */
  adoptProfile(profile: ProfileResponse): void {
    this.profile = profile;
  }

  comparablePair(a: number, b: number): [PlanResponse, PlanResponse] | null {
    const left = this.slots[a];
    const right = this.slots[b];
    if (!left || !right) return null;
    return [left, right];
  }
}
