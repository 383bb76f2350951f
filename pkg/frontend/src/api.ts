// Typed client for the review analysis service. Every interface here
// mirrors a service response shape field for field; the UI never invents
// or recomputes numbers, it only displays what these carry.

export interface LabelInfo {
  key: string;
  kind: string;
  display: string;
  rationale: string;
}

export interface LabelsResponse {
  registry_version: string;
  labels: LabelInfo[];
}

export interface SentenceView {
  index: number;
  text: string;
  section: string;
}

export interface SegmentView {
  start: number;
  end: number;
  text: string;
  labels: string[];
  scores: Record<string, number>;
}

export interface FitnessView {
  sc_len: number;
  sc_temp: number;
  sc_read: number;
  pen_forb: number;
  total: number;
}

export interface FeedbackEntry {
  segment: number;
  label: string;
  text: string;
  fitness: FitnessView;
  generation: number;
  parent_ids: string[];
  tie_applied: boolean;
}

export interface PipelineResponse {
  review_id: string;
  sentences: SentenceView[];
  tags: string[];
  segments: SegmentView[];
  feedback: FeedbackEntry[];
  issue_counts: Record<string, number>;
  issue_total: number;
}

export interface StandaloneFeedbackEntry {
  label: string;
  text: string;
  fitness: FitnessView;
  generation: number;
  parent_ids: string[];
  tie_applied: boolean;
}

export interface FeedbackResponse {
  feedback: StandaloneFeedbackEntry[];
}

export interface PipelineRequest {
  detector_id: string;
  review_id?: string;
  review_text?: string;
  sections?: Record<string, string>;
  context?: Record<string, string>;
}

export interface FeedbackRequest {
  segment_text: string;
  labels: string[];
  context?: Record<string, string>;
  seed?: number;
}

interface ErrorDetail {
  stage?: string;
  error?: string;
  [key: string]: unknown;
}

export class ApiError extends Error {
  readonly status: number;
  readonly detail: ErrorDetail | string | null;

  constructor(status: number, detail: ErrorDetail | string | null) {
    const summary = typeof detail === "string" ? detail : detail?.error;
    super(summary ? `service error ${status}: ${summary}` : `service error ${status}`);
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }

  // stage that failed, when the service reported one (502/504 bodies)
  get stage(): string | null {
    if (this.detail && typeof this.detail === "object" && typeof this.detail.stage === "string") {
      return this.detail.stage;
    }
    return null;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function parseBody(response: Response): Promise<unknown> {
  try {
    return await response.json();
  } catch {
    return null;
  }
}

export class ApiClient {
  readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body = await parseBody(response);
    if (!response.ok) {
      const detail =
        body && typeof body === "object" && "detail" in body
          ? ((body as { detail: ErrorDetail | string }).detail ?? null)
          : null;
      throw new ApiError(response.status, detail);
    }
    return body as T;
  }

  labels(signal?: AbortSignal): Promise<LabelsResponse> {
    return this.request<LabelsResponse>("/v1/labels", { method: "GET", signal });
  }

  pipeline(body: PipelineRequest, signal?: AbortSignal): Promise<PipelineResponse> {
    return this.request<PipelineResponse>("/v1/pipeline", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
  }

  feedback(body: FeedbackRequest, signal?: AbortSignal): Promise<FeedbackResponse> {
    return this.request<FeedbackResponse>("/v1/feedback", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
  }
}
