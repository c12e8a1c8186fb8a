/** Client-side form validation.  Only checks the server would reject anyway
 * (inline, before a round trip); the server remains the authority. */
import type { PlanPayload, StatePayload } from "./types.js";

export interface FieldError {
  field: string;
  message: string;
}

export function validateFailureForm(
  componentRaw: string,
  timeRaw: string,
  state: StatePayload,
  plan: PlanPayload,
): { component: number; time: number } | FieldError[] {
  const errors: FieldError[] = [];
  const component = Number(componentRaw);
  const knownIds = Object.keys(state.last_maintenance).map(Number);
  if (!Number.isInteger(component) || !knownIds.includes(component)) {
    errors.push({
      field: "component",
      message: `component must be one of ${knownIds.join(", ")}`,
    });
  }
  const time = Number(timeRaw);
  if (!Number.isFinite(time)) {
    errors.push({ field: "time", message: "time must be a number" });
  } else if (!(time > state.s && time <= plan.tau)) {
    errors.push({
      field: "time",
      message: `failure time must lie in (${state.s}, ${plan.tau}]`,
    });
  }
  if (errors.length > 0) return errors;
  return { component, time };
}

/** The calendar editor uses the 12-month periodic template; the server
 * expands it across the horizon. */
export function validateCalendarPattern(
  raw: string,
): { pattern: number[] } | FieldError[] {
  const parts = raw
    .split(/[,\s]+/)
    .map((p) => p.trim())
    .filter((p) => p.length > 0);
  if (parts.length !== 12) {
    return [
      {
        field: "calendar",
        message: `expected 12 monthly values, got ${parts.length}`,
      },
    ];
  }
  const pattern = parts.map(Number);
  const bad = pattern.findIndex((v) => !Number.isFinite(v) || v < 0);
  if (bad >= 0) {
    return [
      {
        field: "calendar",
        message: `month ${bad + 1}: set-up cost must be a number >= 0`,
      },
    ];
  }
  return { pattern };
}

export function validateLambda(raw: string): { lambda: number } | FieldError[] {
  const lambda = Number(raw);
  if (!Number.isFinite(lambda) || lambda <= 0) {
    return [{ field: "lambda", message: "lambda must be a number > 0" }];
  }
  return { lambda };
}

export function isErrors(value: unknown): value is FieldError[] {
  return Array.isArray(value);
}
