/** Thin fetch client for the workbench HTTP API. */

import {
  ExportPayload,
  Progress,
  SCHEMA_VERSION,
  TaskDetail,
  TaskSummary,
  TaxonomyManifest,
  WireRecord,
} from './types.js';

export type SubmitOutcome =
  | { accepted: true }
  | { accepted: false; rejected: true; errors: { rule: string; message: string; subject: string }[] };

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

/** Surface the UI needs; implemented over HTTP by WorkbenchClient. */
export interface WorkbenchApi {
  taxonomy(): Promise<TaxonomyManifest>;
  listTasks(params?: { dataset?: string; status?: string; annotator?: string }): Promise<TaskSummary[]>;
  getTask(entryId: string, annotator?: string): Promise<TaskDetail>;
  claim(entryId: string, annotatorId: string): Promise<TaskSummary>;
  submit(entryId: string, record: WireRecord): Promise<SubmitOutcome>;
  progress(): Promise<Progress>;
  exportRecords(params?: { dataset?: string; annotator?: string }): Promise<ExportPayload | null>;
}

export class WorkbenchClient implements WorkbenchApi {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string | null = null,
    private readonly fetcher: typeof fetch = fetch,
  ) {}

  private headers(json = false): Record<string, string> {
    const headers: Record<string, string> = { 'X-Schema-Version': SCHEMA_VERSION };
    if (json) headers['Content-Type'] = 'application/json';
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    return headers;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetcher(`${this.baseUrl}${path}`, {
      ...init,
      headers: { ...this.headers(init?.body !== undefined), ...(init?.headers ?? {}) },
    });
    return response;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.request(path, init);
    if (!response.ok) {
      let detail = `${response.status}`;
      try {
        const body = await response.json();
        if (body && typeof body.detail === 'string') detail = body.detail;
      } catch {
        /* keep the status code */
      }
      throw new ApiError(detail, response.status);
    }
    return (await response.json()) as T;
  }

  async taxonomy(): Promise<TaxonomyManifest> {
    return this.json<TaxonomyManifest>('/taxonomy');
  }

  async listTasks(params: { dataset?: string; status?: string; annotator?: string } = {}): Promise<TaskSummary[]> {
    const query = new URLSearchParams();
    if (params.dataset) query.set('dataset', params.dataset);
    if (params.status) query.set('status', params.status);
    if (params.annotator) query.set('annotator', params.annotator);
    const suffix = query.toString() ? `?${query}` : '';
    const body = await this.json<{ tasks: TaskSummary[] }>(`/tasks${suffix}`);
    return body.tasks;
  }

  async getTask(entryId: string, annotator?: string): Promise<TaskDetail> {
    const suffix = annotator ? `?annotator=${encodeURIComponent(annotator)}` : '';
    return this.json<TaskDetail>(`/tasks/${encodeURIComponent(entryId)}${suffix}`);
  }

  async claim(entryId: string, annotatorId: string): Promise<TaskSummary> {
    const body = await this.json<{ task: TaskSummary }>(`/tasks/${encodeURIComponent(entryId)}/claim`, {
      method: 'POST',
      body: JSON.stringify({ annotator_id: annotatorId }),
    });
    return body.task;
  }

  async submit(entryId: string, record: WireRecord): Promise<SubmitOutcome> {
    const response = await this.request(`/tasks/${encodeURIComponent(entryId)}/annotation`, {
      method: 'PUT',
      body: JSON.stringify(record),
    });
    if (response.status === 422) {
      const body = await response.json();
      return { accepted: false, rejected: true, errors: body.validation.errors };
    }
    if (!response.ok) {
      let detail = `${response.status}`;
      try {
        const body = await response.json();
        if (body && typeof body.detail === 'string') detail = body.detail;
      } catch {
        /* keep the status code */
      }
      throw new ApiError(detail, response.status);
    }
    await response.json();
    return { accepted: true };
  }

  async progress(): Promise<Progress> {
    return this.json<Progress>('/progress');
  }

  /** Returns null when the filter matches nothing (HTTP 204). */
  async exportRecords(params: { dataset?: string; annotator?: string } = {}): Promise<ExportPayload | null> {
    const query = new URLSearchParams();
    if (params.dataset) query.set('dataset', params.dataset);
    if (params.annotator) query.set('annotator', params.annotator);
    const suffix = query.toString() ? `?${query}` : '';
    const response = await this.request(`/export${suffix}`);
    if (response.status === 204) return null;
    if (!response.ok) throw new ApiError(`${response.status}`, response.status);
    return (await response.json()) as ExportPayload;
  }
}
