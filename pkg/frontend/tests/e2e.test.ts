/** End-to-end test against a real planning service instance.  Everything the
 * UI shows is taken from API responses; the assertions below check the
 * rendered output against the service's own numbers. */
import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { ApiClient } from "../src/api.js";
import { buildPlanView, renderTimeline } from "../src/timeline.js";

const PORT = 8900 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let stateDir: string;
const api = new ApiClient(BASE);

async function waitForService(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      await api.getState();
      return;
    } catch (err) {
      lastError = err;
      await new Promise((resolve) => setTimeout(resolve, 250));
    }
  }
  throw new Error(`service did not come up on ${BASE}: ${String(lastError)}`);
}

beforeAll(async () => {
  stateDir = mkdtempSync(join(tmpdir(), "nextpm-ui-e2e-"));
  server = spawn(
    "python3",
    [
      "-m",
      "nextpm.cli",
      "serve",
      "--config",
      "service_fast",
      "--port",
      String(PORT),
    ],
    {
      env: { ...process.env, NEXTPM_STATE_DIR: stateDir },
      stdio: ["ignore", "pipe", "pipe"],
    },
  );
  await waitForService(60_000);
}, 70_000);

afterAll(() => {
  server?.kill("SIGTERM");
  rmSync(stateDir, { recursive: true, force: true });
});

describe("operator UI against the live service", () => {
  it("shows the planned occasion at month 50 with four component badges", async () => {
    const [state, plan, history] = await Promise.all([
      api.getState(),
      api.getPlan(),
      api.getHistory(),
    ]);
    expect(plan.tau).toBe(50);
    expect(plan.set_P).toEqual([1, 2, 3, 4]);
    const html = renderTimeline(buildPlanView(state, plan, history.events));
    expect(html).toContain('data-month="50"');
    expect(html.match(/class="badge badge-planned-pm"/g)).toHaveLength(4);
    expect(html).toContain(`seed ${plan.mc.seed}`);
  }, 60_000);

  it("renders the server's OM recommendation and rescheduled plan after a failure", async () => {
    const resp = await api.reportFailure(3, 12.4, "e2e-failure-1");
    expect(resp.event.time).toBe(13);
    expect(resp.event.cm_component).toBe(3);
    expect(resp.state.s).toBe(13);
    expect(resp.plan.tau).toBeGreaterThan(13);
    const history = await api.getHistory();
    const html = renderTimeline(
      buildPlanView(resp.state, resp.plan, history.events),
    );
    // CM marker with the failed component plus any opportunistic riders
    expect(html).toContain('class="entry past-cm" data-month="13"');
    for (const rider of resp.om.set_O) {
      expect(html).toContain(`data-component="${rider}"`);
    }
    // rescheduled planned marker straight from the new plan
    expect(html).toContain(`class="entry planned-pm" data-month="${resp.plan.tau}"`);
  }, 120_000);

  it("double-submitting the same request id yields one history event", async () => {
    const before = (await api.getHistory()).events.length;
    const first = await api.reportMaintenance([2], 20, "e2e-maint-1");
    const replay = await api.reportMaintenance([2], 20, "e2e-maint-1");
    expect(replay).toEqual(first);
    const after = (await api.getHistory()).events.length;
    expect(after).toBe(before + 1);
  }, 120_000);

  it("surfaces server-side validation as an API error", async () => {
    await expect(api.reportFailure(9, 12.4, "e2e-bad-1")).rejects.toMatchObject(
      { status: 404 },
    );
  }, 60_000);
});
