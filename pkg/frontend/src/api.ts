import type {
  Analysis,
  SimplifyRequestBody,
  SimplifyResponse,
  StepRequestBody,
  StepResponse,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

/** Thin typed client; all AoA knowledge comes from the service, never local. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(`${this.baseUrl}${path}`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, `network error: ${String(err)}`);
    }
    const payload = await resp.json().catch(() => ({}));
    if (!resp.ok) {
      // surface the service's message verbatim
      const detail =
        payload && typeof payload.detail === "string"
          ? payload.detail
          : payload && typeof payload.stop_reason === "string"
            ? `request failed: ${payload.stop_reason}`
            : `HTTP ${resp.status}`;
      throw new ApiError(resp.status, detail);
    }
    return payload as T;
  }

  analyze(text: string, targetAge: number): Promise<Analysis> {
    return this.post<Analysis>("/analyze", { text, target_age: targetAge });
  }

  simplify(body: SimplifyRequestBody): Promise<SimplifyResponse> {
    return this.post<SimplifyResponse>("/simplify", body);
  }

  simplifyStep(body: StepRequestBody): Promise<StepResponse> {
    return this.post<StepResponse>("/simplify/step", body);
  }
}
