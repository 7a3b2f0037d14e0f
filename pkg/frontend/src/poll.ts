import type { ApiClient } from './api';
import type { JobStatus } from './types';

const DEFAULT_INTERVAL_MS = 500;

/**
 * Poll a job until it is done or failed. Resolves with the final status;
 * rejects if the job fails or the timeout elapses. `onUpdate` fires on
 * every observed status so callers can show progress.
 */
export async function pollJob(
  client: ApiClient,
  jobId: string,
  opts: {
    intervalMs?: number;
    timeoutMs?: number;
    onUpdate?: (status: JobStatus) => void;
    sleep?: (ms: number) => Promise<void>;
  } = {},
): Promise<JobStatus> {
  const interval = opts.intervalMs ?? DEFAULT_INTERVAL_MS;
  const timeout = opts.timeoutMs ?? 120_000;
  const sleep = opts.sleep ?? ((ms) => new Promise((r) => setTimeout(r, ms)));
  const deadline = Date.now() + timeout;
  for (;;) {
    const status = await client.jobStatus(jobId);
    opts.onUpdate?.(status);
    if (status.state === 'done') return status;
    if (status.state === 'failed') {
      throw new Error(status.error ?? 'job failed');
    }
    if (Date.now() >= deadline) {
      throw new Error(`job ${jobId} timed out while ${status.state}`);
    }
    await sleep(interval);
  }
}
