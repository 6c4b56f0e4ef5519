/** Typed client for the planning service HTTP API. */

import {
  AnswersDoc,
  DatasetRecordSchema,
  PlanRequestDoc,
  PlanResponse,
  PlanResponseSchema,
  ProfileResponse,
  ProfileResponseSchema,
  Questions,
  QuestionsSchema,
} from "./types";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly position?: number,
  ) {
    super(message);
  }
}

async function parseError(res: Response): Promise<never> {
  let detail = res.statusText;
  let position: number | undefined;
  try {
    const body = await res.json();
    detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
    if (typeof body.position === "number") position = body.position;
  } catch {
    // keep statusText
  }
  throw new ApiError(detail, res.status, position);
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async questions(): Promise<Questions> {
    const res = await fetch(this.url("/elicitation/questions"));
    if (!res.ok) await parseError(res);
    return QuestionsSchema.parse(await res.json());
  }

  async submitAnswers(answers: AnswersDoc): Promise<ProfileResponse> {
    const res = await fetch(this.url("/elicitation/answers"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(answers),
    });
    if (!res.ok) await parseError(res);
    return ProfileResponseSchema.parse(await res.json());
  }

  async listDatasets() {
    const res = await fetch(this.url("/datasets"));
    if (!res.ok) await parseError(res);
    const body = await res.json();
    return DatasetRecordSchema.array().parse(body.datasets);
  }

  async uploadDataset(name: string, radiusM: number, csv: string) {
    const query = `?name=${encodeURIComponent(name)}&radius=${radiusM}`;
    const res = await fetch(this.url("/datasets") + query, {
      method: "POST",
      headers: { "Content-Type": "text/csv" },
      body: csv,
    });
    if (!res.ok) await parseError(res);
    return DatasetRecordSchema.parse(await res.json());
  }

  async parseConstraint(text: string): Promise<{ ok: boolean; canonical: string }> {
    const res = await fetch(this.url("/constraints/parse"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
    if (!res.ok) await parseError(res);
    return (await res.json()) as { ok: boolean; canonical: string };
  }

  async plan(doc: PlanRequestDoc): Promise<PlanResponse> {
    const res = await fetch(this.url("/plan"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(doc),
    });
    if (!res.ok) await parseError(res);
    return PlanResponseSchema.parse(await res.json());
  }

  async health(): Promise<{ status: string; graph_version: string }> {
    const res = await fetch(this.url("/health"));
    if (!res.ok) await parseError(res);
    return (await res.json()) as { status: string; graph_version: string };
  }
}
