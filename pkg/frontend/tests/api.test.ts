import { describe, expect, it, vi } from 'vitest';

import { ApiClient, ApiError } from '../src/api';

function fetchStub(status: number, body: unknown) {
  return vi.fn(async () => ({
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
  })) as unknown as typeof fetch;
}

describe('ApiClient', () => {
  it('strips trailing slashes from the base URL', async () => {
    const fn = fetchStub(200, { schema_version: 1, datasets: [] });
    const client = new ApiClient('http://svc:8000///', fn);
    await client.listDatasets();
    expect(fn).toHaveBeenCalledWith('http://svc:8000/api/v1/datasets', undefined);
  });

  it('submits jobs and unwraps the job id', async () => {
    const fn = fetchStub(202, { schema_version: 1, job_id: 'j1' });
    const client = new ApiClient('http://svc', fn);
    const jobId = await client.submitJob('ds', { robust: { gamma: 2, enabled: true } });
    expect(jobId).toBe('j1');
    const [, init] = (fn as any).mock.calls[0];
    expect(JSON.parse(init.body)).toEqual({
      dataset_id: 'ds',
      overrides: { robust: { gamma: 2, enabled: true } },
    });
  });

  it('raises ApiError with the server detail', async () => {
    const fn = fetchStub(400, { detail: 'gamma: must not exceed the scenario horizon' });
    const client = new ApiClient('http://svc', fn);
    await expect(client.submitJob('ds')).rejects.toMatchObject({
      name: 'ApiError',
      status: 400,
      message: expect.stringContaining('gamma'),
    });
  });

  it('falls back to the status code when the body is not JSON', async () => {
    const fn = vi.fn(async () => ({
      ok: false,
      status: 502,
      json: async () => {
        throw new Error('not json');
      },
    })) as unknown as typeof fetch;
    const client = new ApiClient('http://svc', fn);
    await expect(client.listDatasets()).rejects.toThrow('HTTP 502');
  });

  it('passes result payloads through untouched', async () => {
    const payload = {
      schema_version: 1,
      job_id: 'j9',
      metrics: { total_overflow: 271.0593 },
      transfers: [],
      census: [],
      baseline_census: [],
    };
    const client = new ApiClient('http://svc', fetchStub(200, payload));
    expect(await client.jobResult('j9')).toEqual(payload);
  });

  it('ApiError is an Error', () => {
    expect(new ApiError(404, 'missing')).toBeInstanceOf(Error);
  });
});
