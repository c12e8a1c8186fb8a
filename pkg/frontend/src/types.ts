/** Wire types mirroring the planning service's JSON responses. */

export interface McInfo {
  replications: number;
  seed: number;
}

export interface StatePayload {
  s: number;
  r: number;
  horizon: number;
  last_maintenance: Record<string, number>;
  config_hash: string;
  mc: McInfo;
}

export interface PlanSummaryRow {
  component: number;
  month: number;
  expected_pm_cost: number;
  benefit?: number;
}

export interface PlanPayload {
  tau: number;
  set_P: number[];
  objective: number;
  assignment: Record<string, number>;
  no_pm: boolean;
  marginal: [number, number][];
  summary: PlanSummaryRow[];
  window: { s: number; r: number };
  config_hash: string;
  mc: McInfo;
}

export interface HistoryEvent {
  time: number;
  kind: "cm" | "pm";
  cm_component: number | null;
  pm_components: number[];
  setup_cost: number;
  component_cost: number;
  cost: number;
  request_id: string;
}

export interface HistoryPayload {
  events: HistoryEvent[];
}

export interface OmRecommendation {
  set_O: number[];
  objective: number;
  assignment: Record<string, number>;
  marginal: [number, number][];
}

export interface FailureResponse {
  om: OmRecommendation;
  event: HistoryEvent;
  state: StatePayload;
  plan: PlanPayload;
}

export interface MaintenanceResponse {
  event: HistoryEvent | null;
  state: StatePayload;
  plan: PlanPayload;
}

export interface WhatIfResponse {
  plan: PlanPayload;
  baseline: PlanPayload;
}

export type CalendarOverride =
  | { constant: number }
  | { pattern: number[] }
  | { values: number[] };

export interface WhatIfRequest {
  calendar?: CalendarOverride;
  lambda?: number;
}
