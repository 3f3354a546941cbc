/** Typed client for the experiment service HTTP API. */

export interface ConditionDetail {
  label: string;
  baseline: boolean;
  voltage: number | null;
  frequency: number | null;
}

export interface StepInfo {
  done: boolean;
  cursor: number;
  total?: number;
  needs_distinct_count?: boolean;
  condition?: Record<string, unknown>;
}

export interface SessionInfo {
  id: string;
  participant_id: string;
  seed: number;
  order: string[];
  cursor: number;
}

export interface ResponseBody {
  condition: { voltage: number | null; frequency: number | null };
  likert: Record<string, number>;
  acceptable: boolean;
  free_text: string;
  similar_fabric: number;
}

export interface TraceData {
  sample_rate: number;
  t_s: number[];
  voltage_v: number[];
  friction_n: number[];
  normal_n: number[];
  metrics: Record<string, number>;
}

export class ApiRequestError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function body<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let code = `HTTP_${resp.status}`;
    let message = resp.statusText;
    try {
      const err = await resp.json();
      if (typeof err.error === "string") code = err.error;
      if (typeof err.message === "string") message = err.message;
      else if (err.detail) message = JSON.stringify(err.detail);
    } catch {
      /* non-JSON error body */
    }
    throw new ApiRequestError(resp.status, code, message);
  }
  return resp.json() as Promise<T>;
}

export class ApiClient {
  constructor(
    private base = "",
    private fetchImpl: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async post<T>(path: string, payload: unknown): Promise<T> {
    const resp = await this.fetchImpl(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    return body<T>(resp);
  }

  private async get<T>(path: string): Promise<T> {
    return body<T>(await this.fetchImpl(this.base + path));
  }

  conditions(): Promise<ConditionDetail[]> {
    return this.get("/api/conditions");
  }

  createSession(participantId: string, seed: number): Promise<SessionInfo> {
    return this.post("/api/sessions", { participant_id: participantId, seed });
  }

  next(sessionId: string, view: "participant" | "experimenter"): Promise<StepInfo> {
    return this.get(`/api/sessions/${sessionId}/next?view=${view}`);
  }

  submitResponse(
    sessionId: string,
    payload: ResponseBody,
  ): Promise<{ cursor: number; complete: boolean }> {
    return this.post(`/api/sessions/${sessionId}/responses`, payload);
  }

  submitDistinctCount(sessionId: string, count: number): Promise<{ complete: boolean }> {
    return this.post(`/api/sessions/${sessionId}/distinct`, { count });
  }

  async exportJsonl(sessionId: string): Promise<string> {
    const resp = await this.fetchImpl(`${this.base}/api/sessions/${sessionId}/export`);
    if (!resp.ok) throw new ApiRequestError(resp.status, `HTTP_${resp.status}`, resp.statusText);
    return resp.text();
  }

  trace(v: number, f: number, ms = 50): Promise<TraceData> {
    return this.get(`/api/trace?v=${v}&f=${f}&ms=${ms}`);
  }

  deviceCommand(line: string): Promise<{ response: string }> {
    return this.post("/api/device/command", { line });
  }
}
