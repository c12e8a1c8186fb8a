/** Plan/history view-model and its HTML rendering.
 *
 * PlanView mirrors GET /plan and GET /history exactly; the only client-side
 * arithmetic is display formatting.
 */
import type { HistoryEvent, PlanPayload, StatePayload } from "./types.js";

export type EntryKind = "planned-pm" | "past-cm" | "past-pm";

export interface TimelineEntry {
  month: number;
  components: number[];
  kind: EntryKind;
  cost: number | null; // realized cost for past events, null for planned
}

export interface PlanView {
  entries: TimelineEntry[]; // sorted by month, history before plan on ties
  currentMonth: number;
  objective: number;
  noPm: boolean;
  seed: number;
  replications: number;
}

export function buildPlanView(
  state: StatePayload,
  plan: PlanPayload,
  events: HistoryEvent[],
): PlanView {
  const entries: TimelineEntry[] = events.map((ev) => ({
    month: ev.time,
    components:
      ev.kind === "cm"
        ? [ev.cm_component as number, ...ev.pm_components]
        : [...ev.pm_components],
    kind: ev.kind === "cm" ? "past-cm" : "past-pm",
    cost: ev.cost,
  }));
  if (!plan.no_pm) {
    entries.push({
      month: plan.tau,
      components: [...plan.set_P],
      kind: "planned-pm",
      cost: null,
    });
  }
  entries.sort((a, b) => a.month - b.month || (a.cost === null ? 1 : -1));
  return {
    entries,
    currentMonth: state.s,
    objective: plan.objective,
    noPm: plan.no_pm,
    seed: plan.mc.seed,
    replications: plan.mc.replications,
  };
}

const KIND_LABEL: Record<EntryKind, string> = {
  "planned-pm": "planned PM",
  "past-cm": "CM",
  "past-pm": "PM",
};

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export function renderTimeline(view: PlanView): string {
  const rows = view.entries.map((entry) => {
    const badges = entry.components
      .map(
        (c) =>
          `<span class="badge badge-${entry.kind}" data-component="${c}">#${c}</span>`,
      )
      .join("");
    const cost =
      entry.cost === null
        ? ""
        : `<span class="cost">${entry.cost.toFixed(2)}</span>`;
    return (
      `<li class="entry ${entry.kind}" data-month="${entry.month}">` +
      `<span class="month">m${entry.month}</span>` +
      `<span class="kind">${escapeHtml(KIND_LABEL[entry.kind])}</span>` +
      `${badges}${cost}</li>`
    );
  });
  const marker =
    `<li class="now" data-month="${view.currentMonth}">` +
    `now: m${view.currentMonth}</li>`;
  const footer =
    `<p class="meta">objective ${view.objective.toFixed(4)} / month` +
    ` &middot; mc ${view.replications} reps, seed ${view.seed}` +
    (view.noPm ? " &middot; no PM within window" : "") +
    `</p>`;
  return `<ul class="timeline">${marker}${rows.join("")}</ul>${footer}`;
}
