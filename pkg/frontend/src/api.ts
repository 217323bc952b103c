/**
 * Thin client for the review service endpoints.
 *
 * The fetch implementation is injectable so tests can script responses;
 * in the browser the global fetch is used against the serving origin.
 */

import type { Judgment, JudgmentAck, ReportRow, ReviewTask } from "./types";

/** A non-2xx response, carrying the server's validation detail. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function errorDetail(response: Response): Promise<string> {
  // The service reports problems as {"detail": ...}; fall back to raw text.
  const text = await response.text();
  try {
    const body = JSON.parse(text);
    if (body && typeof body.detail === "string") return body.detail;
  } catch {
    // not JSON
  }
  return text || response.statusText;
}

export class ReviewApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    return (await response.json()) as T;
  }

  listTasks(lang?: string): Promise<ReviewTask[]> {
    const query = lang === undefined ? "" : `?lang=${encodeURIComponent(lang)}`;
    return this.request<ReviewTask[]>(`/api/tasks${query}`);
  }

  getTask(taskId: string): Promise<ReviewTask> {
    return this.request<ReviewTask>(`/api/tasks/${encodeURIComponent(taskId)}`);
  }

  submitJudgment(judgment: Judgment): Promise<JudgmentAck> {
    return this.request<JudgmentAck>("/api/judgments", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(judgment),
    });
  }

  getReport(lang: string): Promise<ReportRow> {
    return this.request<ReportRow>(`/api/report?lang=${encodeURIComponent(lang)}`);
  }
}
