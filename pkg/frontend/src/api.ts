// Typed client for the rewrite service HTTP API.
//
// Every mutation names the parent revision index it was based on; the server
// answers a stale index with 409 and the current job state, which the
// ApiError carries so callers can resynchronize.

export interface UserInfo {
  id: string;
  name: string;
  role: string;
}

export interface JobSummary {
  id: string;
  original_text: string;
  status: string;
}

export interface TokenInfo {
  index: number;
  text: string;
}

export interface OpRecord {
  kind: string;
  source?: string;
  position?: number;
  token?: string;
  from_position?: number;
  to_position?: number;
  text?: string;
  target?: number;
}

export type FeedbackMap = Record<string, number | null>;

export interface RevisionRecord {
  index: number;
  op: OpRecord;
  result_text: string;
  timestamp: string;
  feedback: FeedbackMap;
  derived_script?: OpRecord[];
}

export interface SaliencePayload {
  target: string;
  scores: number[];
}

export interface JobState {
  id: string;
  task_id: string;
  sentence_index: number;
  assignee: string;
  status: string;
  original_text: string;
  current_text: string;
  current_tokens: TokenInfo[];
  parent_revision_index: number;
  revisions: RevisionRecord[];
  salience: SaliencePayload | null;
}

export interface OpResponse extends JobState {
  revision: RevisionRecord;
  feedback: FeedbackMap;
}

export interface Recommendation {
  word: string;
  score: number;
  provider: string;
}

export type RecommendKind = "similarity" | "lm";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly current: JobState | null = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly token: string,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, {
        method,
        headers: {
          Authorization: `Bearer ${this.token}`,
          ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
        },
        body: body !== undefined ? JSON.stringify(body) : undefined,
      });
    } catch (err) {
      throw new ApiError(`cannot reach ${this.baseUrl}: ${String(err)}`, 0);
    }
    let payload: Record<string, unknown> = {};
    try {
      payload = (await response.json()) as Record<string, unknown>;
    } catch {
      payload = {};
    }
    if (!response.ok) {
      const message =
        typeof payload.error === "string" ? payload.error : `HTTP ${response.status}`;
      throw new ApiError(
        message,
        response.status,
        (payload.current as JobState | undefined) ?? null,
      );
    }
    return payload as T;
  }

  whoami(): Promise<UserInfo> {
    return this.request<UserInfo>("GET", "/whoami");
  }

  async listJobs(userId: string): Promise<JobSummary[]> {
    const body = await this.request<{ jobs: JobSummary[] }>(
      "GET",
      `/jobs?user=${encodeURIComponent(userId)}`,
    );
    return body.jobs;
  }

  getJob(jobId: string): Promise<JobState> {
    return this.request<JobState>("GET", `/jobs/${encodeURIComponent(jobId)}`);
  }

  postOp(jobId: string, op: OpRecord, parentRevisionIndex: number): Promise<OpResponse> {
    return this.request<OpResponse>("POST", `/jobs/${encodeURIComponent(jobId)}/ops`, {
      op,
      parent_revision_index: parentRevisionIndex,
    });
  }

  postRevert(
    jobId: string,
    targetRevisionIndex: number,
    parentRevisionIndex: number,
  ): Promise<OpResponse> {
    return this.request<OpResponse>("POST", `/jobs/${encodeURIComponent(jobId)}/revert`, {
      target_revision_index: targetRevisionIndex,
      parent_revision_index: parentRevisionIndex,
    });
  }

  async recommend(
    jobId: string,
    position: number,
    kind: RecommendKind,
    k?: number,
  ): Promise<Recommendation[]> {
    const query = new URLSearchParams({ position: String(position), kind });
    if (k !== undefined) query.set("k", String(k));
    const body = await this.request<{ recommendations: Recommendation[] }>(
      "GET",
      `/jobs/${encodeURIComponent(jobId)}/recommend?${query.toString()}`,
    );
    return body.recommendations;
  }

  complete(jobId: string): Promise<{ id: string; status: string }> {
    return this.request("POST", `/jobs/${encodeURIComponent(jobId)}/complete`);
  }

  reopen(jobId: string): Promise<{ id: string; status: string }> {
    return this.request("POST", `/jobs/${encodeURIComponent(jobId)}/reopen`);
  }
}
