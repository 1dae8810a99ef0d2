/** HTTP client for the recommendation service. The UI talks to the
 * backend exclusively through this module. */

import type { RecommendResponse } from "./types.js";

export interface RecommendRequestBody {
  bpmn_xml: string;
  task_id: string;
  user_id: string;
  k?: number;
  filtered?: boolean;
  mode?: string;
}

/** A failed call, carrying the service's machine-readable error code
 * (or a synthetic one: "network_error", "aborted", "http_<status>"). */
export class ServiceError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number | null = null,
    readonly requestId: string | null = null,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class RecommendationClient {
  private readonly fetchImpl: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchImpl?: FetchLike,
  ) {
    const impl = fetchImpl ?? globalThis.fetch;
    if (!impl) throw new Error("no fetch implementation available");
    this.fetchImpl = (input, init) => impl.call(globalThis, input, init);
  }

  async recommend(
    body: RecommendRequestBody,
    signal?: AbortSignal,
  ): Promise<RecommendResponse> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}/v1/recommendations`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
        signal,
      });
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") {
        throw new ServiceError("aborted", "request aborted");
      }
      throw new ServiceError("network_error", String(err));
    }
    if (!response.ok) {
      throw await this.errorFrom(response);
    }
    return (await response.json()) as RecommendResponse;
  }

  async health(): Promise<unknown> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}/v1/health`);
    } catch (err) {
      throw new ServiceError("network_error", String(err));
    }
    if (!response.ok) throw await this.errorFrom(response);
    return response.json();
  }

  private async errorFrom(response: Response): Promise<ServiceError> {
    try {
      const payload = (await response.json()) as {
        error?: { code?: string; message?: string };
        request_id?: string;
      };
      if (payload.error?.code) {
        return new ServiceError(
          payload.error.code,
          payload.error.message ?? payload.error.code,
          response.status,
          payload.request_id ?? null,
        );
      }
    } catch {
      // fall through: not a JSON error body
    }
    return new ServiceError(
      `http_${response.status}`,
      `unexpected HTTP ${response.status}`,
      response.status,
    );
  }
}
