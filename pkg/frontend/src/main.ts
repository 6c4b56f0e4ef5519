/**
 * App wiring: a Leaflet map for picking endpoints and showing routes, the
 * elicitation wizard, dataset upload, constraint editing with templates
 * and server-side syntax checking, planning, and what-if comparison.
 */

import * as L from "leaflet";
import "leaflet/dist/leaflet.css";

import { ApiClient, ApiError } from "./api";
import { compareResponses } from "./compare";
import { LeafletAdapter } from "./mapview";
import { renderRoute } from "./routelayers";
import { Session } from "./session";
import { CONSTRAINT_TEMPLATES } from "./templates";
import { PlanRequestDoc } from "./types";
import {
  WizardModel,
  emptyWizard,
  profileDisplayRows,
  submitEnabled,
  toAnswersDoc,
} from "./wizard";

interface AppConfig {
  serviceUrl: string;
  tileUrl: string;
  tileAttribution?: string;
  center: [number, number];
  zoom: number;
}

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

function toast(message: string, kind: "info" | "error" = "info"): void {
  const box = $("toast");
  box.textContent = message;
  box.className = `toast show ${kind}`;
  window.setTimeout(() => box.classList.remove("show"), 5000);
}

async function loadConfig(): Promise<AppConfig> {
  const res = await fetch("./config.json");
  const doc = await res.json();
  return {
    serviceUrl: doc.serviceUrl ?? "http://127.0.0.1:8000",
    tileUrl: doc.tileUrl ?? "",
    tileAttribution: doc.tileAttribution,
    center: doc.center ?? [37.77, -122.42],
    zoom: doc.zoom ?? 13,
  };
}

async function start(): Promise<void> {
  const config = await loadConfig();
  const api = new ApiClient(config.serviceUrl);
  const session = new Session();

  const map = L.map("map").setView(config.center, config.zoom);
  if (config.tileUrl) {
    L.tileLayer(config.tileUrl, { attribution: config.tileAttribution ?? "" }).addTo(map);
  }
  const adapter = new LeafletAdapter(map);
  let fromMarker: L.Marker | null = null;
  let toMarker: L.Marker | null = null;

  map.on("click", (event: L.LeafletMouseEvent) => {
    const { lat, lng } = event.latlng;
    if (!session.from || (session.from && session.to)) {
      session.from = { lat, lon: lng };
      session.to = null;
      fromMarker?.remove();
      toMarker?.remove();
      toMarker = null;
      fromMarker = L.marker([lat, lng]).addTo(map).bindPopup("from");
    } else {
      session.to = { lat, lon: lng };
      toMarker = L.marker([lat, lng]).addTo(map).bindPopup("to");
    }
  });

  // Constraint editing: templates plus live server-side parsing.
  const constraintBox = $<HTMLTextAreaElement>("constraint");
  const constraintStatus = $("constraint-status");
  const templatesBox = $("templates");
  for (const template of CONSTRAINT_TEMPLATES) {
    const button = document.createElement("button");
    button.type = "button";
    button.textContent = template.label;
    button.addEventListener("click", () => {
      constraintBox.value = template.text;
      void checkConstraint();
    });
    templatesBox.appendChild(button);
  }
  async function checkConstraint(): Promise<boolean> {
    const text = constraintBox.value.trim();
    session.constraintText = text;
    if (!text) {
      constraintStatus.textContent = "";
      return true;
    }
    try {
      const parsed = await api.parseConstraint(text);
      constraintStatus.textContent = `ok: ${parsed.canonical}`;
      constraintStatus.className = "ok";
      return true;
    } catch (err) {
      if (err instanceof ApiError && err.position !== undefined) {
        const mark = " ".repeat(err.position) + "^";
        constraintStatus.textContent = `${err.message}\n${text}\n${mark}`;
      } else {
        constraintStatus.textContent = String(err);
      }
      constraintStatus.className = "error";
      return false;
    }
  }
  constraintBox.addEventListener("change", () => void checkConstraint());

  // Dataset upload.
  $("upload-btn").addEventListener("click", () => {
    void (async () => {
      const name = $<HTMLInputElement>("dataset-name").value.trim();
      const radius = Number($<HTMLInputElement>("dataset-radius").value || "200");
      const file = $<HTMLInputElement>("dataset-file").files?.[0];
      if (!name || !file) {
        toast("dataset needs a name and a CSV file", "error");
        return;
      }
      try {
        const record = await api.uploadDataset(name, radius, await file.text());
        toast(`uploaded ${record.name} v${record.overlay_version} ` +
          `(${record.point_count} points)`);
        await refreshWizardDatasets();
      } catch (err) {
        toast(String(err), "error");
      }
    })();
  });

  // Elicitation wizard.
  let wizard: WizardModel = emptyWizard(["walk", "bike", "public", "taxi"], []);
  const wizardBox = $("wizard-fields");
  const wizardSubmit = $<HTMLButtonElement>("wizard-submit");
  const coefficientsBox = $("coefficients");

  function renderWizard(): void {
    wizardBox.innerHTML = "";
    const field = (label: string, value: string, onInput: (v: string) => void) => {
      const row = document.createElement("label");
      row.textContent = label;
      const input = document.createElement("input");
      input.type = "number";
      input.step = "any";
      input.value = value;
      input.addEventListener("input", () => {
        onInput(input.value);
        wizardSubmit.disabled = !submitEnabled(wizard);
      });
      row.appendChild(input);
      wizardBox.appendChild(row);
    };
    for (const mode of Object.keys(wizard.hoursEquivalent)) {
      field(`hours of driving ≈ 1 h of ${mode}`, wizard.hoursEquivalent[mode], (v) => {
        wizard.hoursEquivalent[mode] = v;
      });
    }
    field("$ to save one travel hour", wizard.dollarsPerHour, (v) => {
      wizard.dollarsPerHour = v;
    });
    for (const name of Object.keys(wizard.dollarsPerAux)) {
      field(`$ to avoid one unit of "${name}"`, wizard.dollarsPerAux[name], (v) => {
        wizard.dollarsPerAux[name] = v;
      });
    }
    wizardSubmit.disabled = !submitEnabled(wizard);
  }

  async function refreshWizardDatasets(): Promise<void> {
    const datasets = await api.listDatasets();
    const previous = wizard;
    wizard = emptyWizard(Object.keys(previous.hoursEquivalent), datasets.map((d) => d.name));
    wizard.hoursEquivalent = { ...previous.hoursEquivalent };
    wizard.dollarsPerHour = previous.dollarsPerHour;
    for (const name of Object.keys(wizard.dollarsPerAux)) {
      wizard.dollarsPerAux[name] = previous.dollarsPerAux[name] ?? "";
    }
    renderWizard();
  }

  wizardSubmit.addEventListener("click", () => {
    void (async () => {
      try {
        const profile = await api.submitAnswers(toAnswersDoc(wizard));
        session.adoptProfile(profile);
        coefficientsBox.innerHTML = "";
        for (const row of profileDisplayRows(profile)) {
          const div = document.createElement("div");
          div.textContent = `${row.label} = ${row.value}`;
          coefficientsBox.appendChild(div);
        }
        $("profile-id").textContent = profile.profile_id;
        toast(`profile ${profile.profile_id} saved`);
      } catch (err) {
        toast(String(err), "error");
      }
    })();
  });

  // Planning.
  $("plan-btn").addEventListener("click", () => {
    void (async () => {
      if (!session.from || !session.to) {
        toast("click the map to set from and to first", "error");
        return;
      }
      if (!session.profile) {
        toast("answer the preference questions first", "error");
        return;
      }
      if (!(await checkConstraint())) {
        toast("fix the constraint first", "error");
        return;
      }
      const doc: PlanRequestDoc = {
        from: { lat: session.from.lat, lon: session.from.lon },
        to: { lat: session.to.lat, lon: session.to.lon },
        depart_at: $<HTMLInputElement>("depart").value || "08:00:00",
        profile_id: session.profile.profile_id,
        include_default_constraint:
          $<HTMLInputElement>("default-constraint").checked,
      };
      if (session.constraintText) doc.constraint = session.constraintText;
      const token = session.nextRequestToken();
      try {
        const response = await api.plan(doc);
        if (!session.applyResponse(token, response)) return; // superseded
        if (response.status === "infeasible") {
          toast(`infeasible under: ${response.constraint}`, "error");
          return; // keep the previous route on the map
        }
        renderRoute(adapter, response);
        const it = response.itinerary!;
        $("summary").textContent =
          `$${it.total_cost_usd.toFixed(2)} · ` +
          `${Math.round(it.totals.clock_s / 60)} min · ${it.legs.length} legs`;
      } catch (err) {
        toast(String(err), "error");
      }
    })();
  });

  // Comparison slots.
  for (let i = 0; i < 3; i += 1) {
    $(`save-slot-${i}`).addEventListener("click", () => {
      if (session.saveSlot(i)) {
        $(`slot-label-${i}`).textContent =
          `$${session.slots[i]!.itinerary?.total_cost_usd.toFixed(2) ?? "-"}`;
      } else {
        toast("plan something first", "error");
      }
    });
  }
  $("compare-btn").addEventListener("click", () => {
    const a = Number($<HTMLSelectElement>("compare-a").value);
    const b = Number($<HTMLSelectElement>("compare-b").value);
    const pair = session.comparablePair(a, b);
    const table = $<HTMLTableElement>("compare-table");
    table.innerHTML = "<tr><th>metric</th><th>A</th><th>B</th><th>Δ</th></tr>";
    if (!pair) {
      toast("both slots must hold a plan", "error");
      return;
    }
    for (const row of compareResponses(pair[0], pair[1])) {
      const tr = document.createElement("tr");
      tr.innerHTML =
        `<td>${row.metric}</td><td>${row.a}</td><td>${row.b}</td>` +
        `<td>${row.delta.toFixed(4)}</td>`;
      table.appendChild(tr);
    }
  });

  await refreshWizardDatasets().catch(() => renderWizard());
  try {
    const health = await api.health();
    $("service-status").textContent = `service ok · graph ${health.graph_version}`;
  } catch {
    $("service-status").textContent = "service unreachable";
  }
}

void start();
