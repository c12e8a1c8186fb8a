/** Thin fetch client for the planning service.  The UI computes nothing
 * itself: every displayed number comes out of one of these calls. */
import type {
  FailureResponse,
  HistoryPayload,
  MaintenanceResponse,
  PlanPayload,
  StatePayload,
  WhatIfRequest,
  WhatIfResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function parse<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const detail =
      typeof body?.detail === "string"
        ? body.detail
        : JSON.stringify(body?.detail ?? body);
    throw new ApiError(response.status, detail);
  }
  return body as T;
}

export function newRequestId(): string {
  return typeof globalThis.crypto?.randomUUID === "function"
    ? crypto.randomUUID()
    : `req-${Date.now()}-${Math.random().toString(36).slice(2)}`;
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  private get<T>(path: string): Promise<T> {
    return fetch(this.url(path)).then((r) => parse<T>(r));
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return fetch(this.url(path), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => parse<T>(r));
  }

  getState(): Promise<StatePayload> {
    return this.get("/state");
  }

  getPlan(): Promise<PlanPayload> {
    return this.get("/plan");
  }

  getHistory(): Promise<HistoryPayload> {
    return this.get("/history");
  }

  reportFailure(
    component: number,
    time: number,
    requestId: string,
    configHash?: string,
  ): Promise<FailureResponse> {
    return this.post("/failure", {
      component,
      time,
      request_id: requestId,
      ...(configHash ? { config_hash: configHash } : {}),
    });
  }

  reportMaintenance(
    components: number[],
    time: number,
    requestId: string,
  ): Promise<MaintenanceResponse> {
    return this.post("/maintenance", {
      components,
      time,
      request_id: requestId,
    });
  }

  whatIf(request: WhatIfRequest): Promise<WhatIfResponse> {
    return this.post("/whatif", request);
  }
}
