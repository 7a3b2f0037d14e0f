import { describe, expect, it, vi } from 'vitest';

import type { ApiClient } from '../src/api';
import { pollJob } from '../src/poll';
import type { JobStatus } from '../src/types';

function statusSeq(states: Array<Partial<JobStatus>>): ApiClient {
  let i = 0;
  return {
    jobStatus: vi.fn(async () => {
      const s = states[Math.min(i, states.length - 1)];
      i += 1;
      return {
        schema_version: 1,
        job_id: 'j1',
        dataset_id: 'ds',
        state: 'queued',
        note: '',
        ...s,
      } as JobStatus;
    }),
  } as unknown as ApiClient;
}

const instant = () => Promise.resolve();

describe('pollJob', () => {
  it('resolves once the job is done', async () => {
    const client = statusSeq([
      { state: 'queued' },
      { state: 'running' },
      { state: 'done' },
    ]);
    const updates: string[] = [];
    const final = await pollJob(client, 'j1', {
      sleep: instant,
      onUpdate: (s) => updates.push(s.state),
    });
    expect(final.state).toBe('done');
    expect(updates).toEqual(['queued', 'running', 'done']);
  });

  it('rejects with the job error on failure', async () => {
    const client = statusSeq([{ state: 'failed', error: 'solver blew up' }]);
    await expect(pollJob(client, 'j1', { sleep: instant })).rejects.toThrow(
      'solver blew up',
    );
  });

  it('times out while the job is still running', async () => {
    const client = statusSeq([{ state: 'running' }]);
    await expect(
      pollJob(client, 'j1', { sleep: instant, timeoutMs: -1 }),
    ).rejects.toThrow(/timed out/);
  });
});
