/**
 * Thin typed client for the verification service.  Every call maps to one
 * endpoint; no state is kept here.  The base URL is empty when the console
 * is served by the service itself (same origin).
 */

export type Decision = "accept" | "reject" | "ambiguous";
export type ProposedLabel = "foreground" | "background" | "uncertain";

export interface ClientConfig {
  hotkeys: Record<Decision, string>;
  marker_colors: Record<ProposedLabel, string>;
  decisions: Decision[];
  data_root: string;
}

export interface QueueItem {
  index: number;
  frame: number;
  x: number;
  y: number;
  proposed_label: ProposedLabel;
  image_url: string | null;
}

export interface TypeTally {
  total: number;
  accept: number;
  reject: number;
  ambiguous: number;
}

export interface Progress {
  session_id: string;
  video_id: string;
  object_id: string;
  total: number;
  done: number;
  complete: boolean;
  per_type: Record<ProposedLabel, TypeTally>;
  mean_seconds_per_point: number | null;
}

export interface NextPayload {
  done: boolean;
  item?: QueueItem;
  overlay: Record<string, unknown>;
  progress: Progress;
}

export interface ExportedPoint {
  frame: number;
  x: number;
  y: number;
  label: "positive" | "negative" | "ambiguous";
  source: string;
}

export interface ExportPayload {
  video_id: string;
  object_id: string;
  label_flip: boolean;
  counts: Record<string, number>;
  points: ExportedPoint[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function parseDetail(resp: Response): Promise<string> {
  try {
    const body = (await resp.json()) as { detail?: string };
    return body.detail ?? resp.statusText;
  } catch {
    return resp.statusText;
  }
}

export class VerifyApi {
  constructor(
    readonly baseUrl: string = "",
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!resp.ok) {
      throw new ApiError(resp.status, await parseDetail(resp));
    }
    return (await resp.json()) as T;
  }

  config(): Promise<ClientConfig> {
    return this.request<ClientConfig>("/config");
  }

  openSession(
    candidates: unknown,
    sessionId?: string,
    overlay?: Record<string, unknown>,
  ): Promise<{ session_id: string; progress: Progress }> {
    return this.request("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ candidates, session_id: sessionId, overlay }),
    });
  }

  next(sessionId: string): Promise<NextPayload> {
    return this.request<NextPayload>(`/sessions/${sessionId}/next`);
  }

  postVerdict(
    sessionId: string,
    index: number,
    decision: Decision,
    duration: number,
  ): Promise<Progress> {
    return this.request<Progress>(`/sessions/${sessionId}/verdicts`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ index, decision, duration }),
    });
  }

  progress(sessionId: string): Promise<Progress> {
    return this.request<Progress>(`/sessions/${sessionId}/progress`);
  }

  exportSession(sessionId: string, labelFlip = false): Promise<ExportPayload> {
    return this.request<ExportPayload>(`/sessions/${sessionId}/export`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ label_flip: labelFlip }),
    });
  }
}
