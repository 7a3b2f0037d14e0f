import type {
  DatasetList,
  JobStatus,
  ResultDoc,
  ScenarioOverrides,
} from './types';

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = 'ApiError';
  }
}

/**
 * Thin typed client for the redistribution service. The base URL is the
 * only configuration; everything else mirrors the server contract.
 */
export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: typeof fetch = fetch,
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, '');
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body = await res.json().catch(() => ({}));
    if (!res.ok) {
      const detail =
        typeof body?.detail === 'string' ? body.detail : `HTTP ${res.status}`;
      throw new ApiError(res.status, detail);
    }
    return body as T;
  }

  listDatasets(): Promise<DatasetList> {
    return this.request<DatasetList>('/api/v1/datasets');
  }

  submitJob(datasetId: string, overrides: ScenarioOverrides = {}): Promise<string> {
    return this.request<{ job_id: string }>('/api/v1/jobs', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ dataset_id: datasetId, overrides }),
    }).then((doc) => doc.job_id);
  }

  jobStatus(jobId: string): Promise<JobStatus> {
    return this.request<JobStatus>(`/api/v1/jobs/${jobId}`);
  }

  jobResult(jobId: string): Promise<ResultDoc> {
    return this.request<ResultDoc>(`/api/v1/jobs/${jobId}/result`);
  }
}
