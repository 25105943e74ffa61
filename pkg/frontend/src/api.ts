// Thin typed wrapper over the server routes. Each mutating resource carries
// a sequence counter so a stale response (superseded by a newer user action
// on the same resource) is ignored instead of clobbering fresher state.

import type {
  AnnotationDoc,
  ApiErrorBody,
  SessionPayload,
  SessionSummary,
  SettingsDoc,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly fieldPath?: string;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.status = status;
    this.code = body.code;
    this.fieldPath = body.field_path;
  }
}

/** Thrown internally when a newer request superseded this one; callers drop it. */
export class Superseded extends Error {
  constructor() {
    super("superseded by a newer request");
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  const text = await response.text();
  if (!response.ok) {
    let body: ApiErrorBody;
    try {
      body = JSON.parse(text) as ApiErrorBody;
    } catch {
      body = { code: "bad_response", message: text.slice(0, 200) };
    }
    throw new ApiError(response.status, body);
  }
  return JSON.parse(text) as T;
}

const jsonInit = (method: string, payload: unknown): RequestInit => ({
  method,
  headers: { "Content-Type": "application/json" },
  body: JSON.stringify(payload),
});

export class ApiClient {
  readonly baseUrl: string;
  private sequences = new Map<string, number>();

  constructor(baseUrl = "") {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  private async latest<T>(resource: string, work: Promise<T>): Promise<T> {
    const token = (this.sequences.get(resource) ?? 0) + 1;
    this.sequences.set(resource, token);
    const result = await work;
    if (this.sequences.get(resource) !== token) throw new Superseded();
    return result;
  }

  listSessions(): Promise<{ sessions: SessionSummary[] }> {
    return request(`${this.baseUrl}/api/sessions`);
  }

  getSession(sessionId: string): Promise<SessionPayload> {
    return request(`${this.baseUrl}/api/sessions/${sessionId}`);
  }

  simplify(body: {
    source_text: string;
    prompt_ids: string[];
    model_ids: string[];
    lambda?: number;
  }): Promise<SessionPayload> {
    return request(`${this.baseUrl}/api/simplify`, jsonInit("POST", body));
  }

  saveLambda(sessionId: string, value: number): Promise<SessionPayload> {
    return this.latest(
      `lambda:${sessionId}`,
      request(
        `${this.baseUrl}/api/sessions/${sessionId}/lambda`,
        jsonInit("PUT", { lambda: value }),
      ),
    );
  }

  putAnnotations(sessionId: string, entries: AnnotationDoc[]): Promise<SessionPayload> {
    return this.latest(
      `annotations:${sessionId}`,
      request(
        `${this.baseUrl}/api/sessions/${sessionId}/annotations`,
        jsonInit("PUT", entries),
      ),
    );
  }

  getSettings(): Promise<SettingsDoc> {
    return request(`${this.baseUrl}/api/settings`);
  }

  putSettings(settings: SettingsDoc): Promise<SettingsDoc> {
    return request(`${this.baseUrl}/api/settings`, jsonInit("PUT", settings));
  }

  exportUrl(sessionId: string, format: "json" | "csv"): string {
    return `${this.baseUrl}/api/sessions/${sessionId}/export?format=${format}`;
  }
}
