/** Side-by-side comparison of a what-if plan against the stored baseline.
 * Both plans come back from one POST /whatif call; the client only formats. */
import type { PlanPayload, WhatIfResponse } from "./types.js";

export interface PlanComparison {
  baseline: PlanSummary;
  alternative: PlanSummary;
  objectiveDelta: number; // alternative - baseline, per month
}

export interface PlanSummary {
  tau: number;
  setP: number[];
  objective: number;
  noPm: boolean;
}

function summarize(plan: PlanPayload): PlanSummary {
  return {
    tau: plan.tau,
    setP: [...plan.set_P],
    objective: plan.objective,
    noPm: plan.no_pm,
  };
}

export function comparePlans(response: WhatIfResponse): PlanComparison {
  return {
    baseline: summarize(response.baseline),
    alternative: summarize(response.plan),
    objectiveDelta: response.plan.objective - response.baseline.objective,
  };
}

export function renderComparison(cmp: PlanComparison): string {
  const row = (label: string, p: PlanSummary) =>
    `<tr><th>${label}</th>` +
    `<td>${p.noPm ? "&mdash;" : `m${p.tau}`}</td>` +
    `<td>{${p.setP.join(", ")}}</td>` +
    `<td>${p.objective.toFixed(4)}</td></tr>`;
  const sign = cmp.objectiveDelta >= 0 ? "+" : "";
  return (
    `<table class="whatif">` +
    `<tr><th></th><th>next PM</th><th>components</th><th>objective</th></tr>` +
    row("baseline", cmp.baseline) +
    row("what-if", cmp.alternative) +
    `</table>` +
    `<p class="delta">delta ${sign}${cmp.objectiveDelta.toFixed(4)} / month</p>`
  );
}
