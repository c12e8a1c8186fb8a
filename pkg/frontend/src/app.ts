/** Wires the DOM to the API client.  Optimistic UI is deliberately off:
 * nothing on screen changes until the server confirms. */
import { ApiClient, ApiError, newRequestId } from "./api.js";
import { buildPlanView, renderTimeline } from "./timeline.js";
import type { PlanPayload, StatePayload } from "./types.js";
import {
  isErrors,
  validateCalendarPattern,
  validateFailureForm,
  validateLambda,
} from "./validation.js";
import { comparePlans, renderComparison } from "./whatif.js";

const api = new ApiClient(
  new URLSearchParams(location.search).get("api") ?? "http://localhost:8000",
);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

let lastState: StatePayload | null = null;
let lastPlan: PlanPayload | null = null;

async function refresh(): Promise<void> {
  const banner = el("banner");
  try {
    const [state, plan, history] = await Promise.all([
      api.getState(),
      api.getPlan(),
      api.getHistory(),
    ]);
    lastState = state;
    lastPlan = plan;
    el("timeline").innerHTML = renderTimeline(
      buildPlanView(state, plan, history.events),
    );
    banner.hidden = true;
    el("timeline").classList.remove("stale");
  } catch (err) {
    banner.hidden = false;
    banner.textContent = `service unreachable (${String(err)}) — retrying`;
    el("timeline").classList.add("stale");
    setTimeout(refresh, 2000);
  }
}

function showErrors(target: HTMLElement, errors: { message: string }[]): void {
  target.innerHTML = errors
    .map((e) => `<p class="error">${e.message}</p>`)
    .join("");
}

function wireFailureForm(): void {
  el<HTMLFormElement>("failure-form").addEventListener(
    "submit",
    async (ev) => {
      ev.preventDefault();
      const out = el("failure-result");
      if (!lastState || !lastPlan) return;
      const parsed = validateFailureForm(
        el<HTMLInputElement>("failure-component").value,
        el<HTMLInputElement>("failure-time").value,
        lastState,
        lastPlan,
      );
      if (isErrors(parsed)) {
        showErrors(out, parsed);
        return;
      }
      try {
        const resp = await api.reportFailure(
          parsed.component,
          parsed.time,
          newRequestId(),
          lastPlan.config_hash,
        );
        out.innerHTML =
          `<p>CM of #${resp.event.cm_component} at m${resp.event.time}` +
          (resp.om.set_O.length > 0
            ? `, opportunistic PM of {${resp.om.set_O.join(", ")}}`
            : "") +
          ` — realized cost ${resp.event.cost.toFixed(2)}</p>`;
        await refresh();
      } catch (err) {
        showErrors(out, [
          { message: err instanceof ApiError ? err.detail : String(err) },
        ]);
      }
    },
  );
}

function wireWhatIfPanel(): void {
  el<HTMLFormElement>("whatif-form").addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const out = el("whatif-result");
    const calendarRaw = el<HTMLInputElement>("whatif-calendar").value.trim();
    const lambdaRaw = el<HTMLInputElement>("whatif-lambda").value.trim();
    const request: { calendar?: { pattern: number[] }; lambda?: number } = {};
    if (calendarRaw.length > 0) {
      const cal = validateCalendarPattern(calendarRaw);
      if (isErrors(cal)) {
        showErrors(out, cal);
        return;
      }
      request.calendar = cal;
    }
    if (lambdaRaw.length > 0) {
      const lam = validateLambda(lambdaRaw);
      if (isErrors(lam)) {
        showErrors(out, lam);
        return;
      }
      request.lambda = lam.lambda;
    }
    try {
      out.innerHTML = renderComparison(comparePlans(await api.whatIf(request)));
    } catch (err) {
      showErrors(out, [
        { message: err instanceof ApiError ? err.detail : String(err) },
      ]);
    }
  });
}

wireFailureForm();
wireWhatIfPanel();
void refresh();
