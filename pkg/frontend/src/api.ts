// Thin typed client for the drcf service. The fetch implementation is
// injectable so tests can run without a server or a browser.

import type {
  ApiError,
  Attribution,
  AttributionRequest,
  Embedding,
  ExplainRequest,
  ExplanationSet,
  SessionList,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  readonly code: string;
  readonly status: number;
  readonly detail: string;

  constructor(status: number, body: ApiError) {
    super(body.message);
    this.name = "ServiceError";
    this.status = status;
    this.code = body.code;
    this.detail = body.detail;
  }
}

async function raiseFor(res: Response): Promise<never> {
  let body: ApiError = { code: "unknown", message: res.statusText, detail: "" };
  try {
    body = (await res.json()) as ApiError;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ServiceError(res.status, body);
}

export class DrcfClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn: FetchLike = (...a) => fetch(...a)) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn;
  }

  private async get<T>(path: string): Promise<T> {
    const res = await this.fetchFn(`${this.base}${path}`);
    if (!res.ok) await raiseFor(res);
    return (await res.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const res = await this.fetchFn(`${this.base}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) await raiseFor(res);
    return (await res.json()) as T;
  }

  listSessions(): Promise<SessionList> {
    return this.get("/sessions");
  }

  embedding(sessionId: string): Promise<Embedding> {
    return this.get(`/sessions/${encodeURIComponent(sessionId)}/embedding`);
  }

  explain(sessionId: string, req: ExplainRequest): Promise<ExplanationSet> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/explain`, req);
  }

  attribution(sessionId: string, req: AttributionRequest): Promise<Attribution> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/attribution`, req);
  }
}
