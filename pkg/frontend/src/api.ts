import type {
  BatchView,
  BiasReport,
  ConstraintSetIn,
  DriftReport,
  GeneratedRow,
  HistoryEntry,
  Overview,
  Prediction,
  QualityReport,
  SchemaResponse,
  Warning,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

/** Thin typed client; every displayed number originates from these calls. */
export class WorkbenchApi {
  constructor(readonly base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.base + path, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!resp.ok) {
      let code = "http_error";
      let message = `${resp.status} on ${path}`;
      try {
        const body = await resp.json();
        code = body.code ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body; keep the defaults
      }
      throw new ApiRequestError(resp.status, code, message);
    }
    return (await resp.json()) as T;
  }

  overview(): Promise<Overview> {
    return this.request("/api/overview");
  }

  schema(): Promise<SchemaResponse> {
    return this.request("/api/schema");
  }

  variables(): Promise<BiasReport> {
    return this.request("/api/variables");
  }

  quality(): Promise<QualityReport> {
    return this.request("/api/quality");
  }

  plan(constraints: ConstraintSetIn): Promise<{ warnings: Warning[]; total_requested: number }> {
    return this.request("/api/augment/plan", {
      method: "POST",
      body: JSON.stringify({ constraints }),
    });
  }

  augment(constraints: ConstraintSetIn, seed: number, requestId?: string): Promise<BatchView> {
    return this.request("/api/augment", {
      method: "POST",
      body: JSON.stringify({ constraints, seed, request_id: requestId ?? null }),
    });
  }

  generated(params?: { sort?: string; predicted?: string; max_confidence?: number }): Promise<BatchView> {
    const query = new URLSearchParams();
    if (params?.sort) query.set("sort", params.sort);
    if (params?.predicted) query.set("predicted", params.predicted);
    if (params?.max_confidence !== undefined) query.set("max_confidence", String(params.max_confidence));
    const qs = query.toString();
    return this.request(`/api/generated${qs ? "?" + qs : ""}`);
  }

  whatIf(rowId: string, variable: string, value: number | string): Promise<{ prediction: Prediction }> {
    return this.request("/api/whatif", {
      method: "POST",
      body: JSON.stringify({ row_id: rowId, variable, value }),
    });
  }

  editCell(
    rowId: string,
    variable: string,
    value: number | string,
    requestId?: string,
  ): Promise<{ row_id: string; prediction: Prediction }> {
    return this.request(`/api/generated/${encodeURIComponent(rowId)}`, {
      method: "PATCH",
      body: JSON.stringify({ variable, value, request_id: requestId ?? null }),
    });
  }

  deleteRow(rowId: string): Promise<{ deleted: string }> {
    return this.request(`/api/generated/${encodeURIComponent(rowId)}`, { method: "DELETE" });
  }

  discardBatch(): Promise<{ discarded: boolean }> {
    return this.request("/api/generated", { method: "DELETE" });
  }

  drift(): Promise<DriftReport> {
    return this.request("/api/drift");
  }

  retrain(acknowledged: boolean, requestId?: string): Promise<{ entry: HistoryEntry }> {
    return this.request("/api/retrain", {
      method: "POST",
      body: JSON.stringify({ acknowledged, request_id: requestId ?? null }),
    });
  }

  revert(index: number, requestId?: string): Promise<{ entry: HistoryEntry }> {
    return this.request("/api/revert", {
      method: "POST",
      body: JSON.stringify({ index, request_id: requestId ?? null }),
    });
  }

  history(): Promise<{ entries: HistoryEntry[] }> {
    return this.request("/api/history");
  }

  row(rowId: string): Promise<GeneratedRow> {
    return this.request(`/api/generated/${encodeURIComponent(rowId)}`);
  }
}
