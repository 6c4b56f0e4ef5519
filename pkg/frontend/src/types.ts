/**
 * Wire types for the planning service, with zod schemas so every response
 * is validated at the boundary. The UI never derives costs or totals
 * itself; everything displayed comes straight from these documents.
 */

import { z } from "zod";

export const MODES = ["walk", "bike", "car", "public", "taxi"] as const;
export type Mode = (typeof MODES)[number];

export const LegSchema = z.object({
  mode: z.enum(MODES),
  nodes: z.array(z.string()),
  start_s: z.number(),
  end_s: z.number(),
  duration_s: z.number(),
  fare_usd: z.number(),
  distance_m: z.number(),
});
export type Leg = z.infer<typeof LegSchema>;

export const AuxTotalsSchema = z.object({
  sum: z.number(),
  max: z.number(),
  min: z.number(),
  avg: z.number(),
});

export const ItinerarySchema = z.object({
  constraint: z.string(),
  depart_s: z.number(),
  arrival_s: z.number(),
  total_cost_usd: z.number(),
  legs: z.array(LegSchema),
  totals: z.object({
    time_s_by_mode: z.record(z.string(), z.number()),
    fare_usd_by_mode: z.record(z.string(), z.number()),
    clock_s: z.number(),
    visited_nodes: z.number(),
    aux: z.record(z.string(), AuxTotalsSchema),
  }),
});
export type Itinerary = z.infer<typeof ItinerarySchema>;

export const GeometrySchema = z.object({
  type: z.literal("FeatureCollection"),
  features: z.array(
    z.object({
      type: z.literal("Feature"),
      geometry: z.object({
        type: z.literal("LineString"),
        coordinates: z.array(z.tuple([z.number(), z.number()])),
      }),
      properties: z.object({
        mode: z.enum(MODES),
        start_s: z.number(),
        end_s: z.number(),
        duration_s: z.number(),
        fare_usd: z.number(),
        distance_m: z.number(),
      }),
    }),
  ),
});
export type RouteGeometry = z.infer<typeof GeometrySchema>;

export const PlanResponseSchema = z.object({
  request_id: z.string(),
  graph_version: z.string(),
  status: z.enum(["ok", "infeasible"]),
  constraint: z.string(),
  elapsed_ms: z.number(),
  itinerary: ItinerarySchema.nullable(),
  geometry: GeometrySchema.nullable(),
});
export type PlanResponse = z.infer<typeof PlanResponseSchema>;

export const ProfileResponseSchema = z.object({
  profile_id: z.string(),
  alpha: z.record(z.string(), z.number()),
  beta_t_usd_per_hour: z.number(),
  beta_a_usd_per_aux: z.record(z.string(), z.number()),
});
export type ProfileResponse = z.infer<typeof ProfileResponseSchema>;

export const DatasetRecordSchema = z.object({
  id: z.string(),
  name: z.string(),
  point_count: z.number(),
  radius_m: z.number(),
  uploaded_at: z.string(),
  overlay_version: z.number(),
});
export type DatasetRecord = z.infer<typeof DatasetRecordSchema>;

export const QuestionsSchema = z.object({
  questions: z.array(
    z.object({
      id: z.string(),
      text: z.string(),
      modes: z.array(z.string()).optional(),
      per_dataset: z.boolean().optional(),
    }),
  ),
});
export type Questions = z.infer<typeof QuestionsSchema>;

export interface AnswersDoc {
  hours_equivalent: Record<string, number>;
  dollars_per_hour: number;
  dollars_per_aux: Record<string, number>;
}

export interface PlanRequestDoc {
  from: { node?: string; lat?: number; lon?: number };
  to: { node?: string; lat?: number; lon?: number };
  depart_at: string | number;
  constraint?: string;
  profile_id?: string;
  allowed_modes?: string[];
  active_datasets?: string[];
  include_default_constraint?: boolean;
}
