/** Typed client for the labeling service's HTTP+JSON API. */

export type Algorithm = "lopart" | "opart";

export interface LabelPayload {
  start: number;
  end: number;
  changes: number;
}

export interface LabelOutcomePayload {
  label_index: number;
  start: number;
  end: number;
  changes: number;
  predicted_changes: number;
  status: string;
  is_true_positive: boolean;
}

export interface SegmentPayload {
  start: number;
  end: number;
  mean: number;
}

export interface FitPayload {
  changepoints: number[];
  segments: SegmentPayload[];
  cost: number;
  penalty: number | string;
  algorithm: Algorithm;
  label_outcomes: LabelOutcomePayload[];
  version: number;
}

export interface SequencePayload {
  values: number[];
  labels: LabelPayload[];
  version: number;
}

/** Server-reported failure; `detail` is the human-readable part. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let detail = response.statusText;
  try {
    const body = (await response.json()) as { detail?: string; error?: string };
    detail = body.detail ?? body.error ?? detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  async health(): Promise<boolean> {
    const response = await fetch(`${this.baseUrl}/api/health`);
    return response.ok;
  }

  async createSequence(values: number[]): Promise<string> {
    const response = await fetch(`${this.baseUrl}/api/sequences`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ values }),
    });
    const body = await unwrap<{ id: string }>(response);
    return body.id;
  }

  async getSequence(id: string): Promise<SequencePayload> {
    const response = await fetch(`${this.baseUrl}/api/sequences/${id}`);
    return unwrap<SequencePayload>(response);
  }

  async putLabels(id: string, labels: LabelPayload[]): Promise<number> {
    const response = await fetch(`${this.baseUrl}/api/sequences/${id}/labels`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ labels }),
    });
    const body = await unwrap<{ version: number }>(response);
    return body.version;
  }

  async getFit(
    id: string,
    penalty: string,
    algorithm: Algorithm,
    signal?: AbortSignal,
  ): Promise<FitPayload> {
    const query = `penalty=${encodeURIComponent(penalty)}&algorithm=${algorithm}`;
    const response = await fetch(
      `${this.baseUrl}/api/sequences/${id}/fit?${query}`,
      { signal },
    );
    return unwrap<FitPayload>(response);
  }
}
