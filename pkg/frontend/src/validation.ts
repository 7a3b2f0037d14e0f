import type { ScenarioOverrides } from './types';

export interface FormValues {
  datasetId: string;
  startDate: string;
  endDate: string;
  objective: 'min-overflow' | 'load-balance';
  preset: boolean;
  gamma: number | null;
  sentPenalty: number | null;
  smoothingPenalty: number | null;
  totalTransferCap: number | null;
  switchWindow: number | null;
  capacityBuffer: number | null;
  integerTransfers: boolean;
}

export type FieldErrors = Partial<Record<keyof FormValues, string>>;

export function horizonDays(startDate: string, endDate: string): number {
  const start = Date.parse(`${startDate}T00:00:00Z`);
  const end = Date.parse(`${endDate}T00:00:00Z`);
  if (Number.isNaN(start) || Number.isNaN(end)) return NaN;
  return Math.round((end - start) / 86_400_000) + 1;
}

/**
 * Client-side checks mirroring the server's scenario rules, so obviously
 * invalid forms never produce a request.
 */
export function validateForm(values: FormValues): FieldErrors {
  const errors: FieldErrors = {};
  if (!values.datasetId) {
    errors.datasetId = 'choose a dataset';
  }
  const horizon = horizonDays(values.startDate, values.endDate);
  if (Number.isNaN(horizon)) {
    errors.startDate = 'dates must be valid ISO dates';
  } else if (horizon < 1) {
    errors.endDate = 'end date must not be before the start date';
  }
  if (values.gamma !== null) {
    if (values.gamma < 0) {
      errors.gamma = 'deviation budget must be non-negative';
    } else if (!Number.isNaN(horizon) && values.gamma > horizon) {
      errors.gamma = `deviation budget must not exceed the horizon (${horizon} days)`;
    }
  }
  for (const key of ['sentPenalty', 'smoothingPenalty', 'totalTransferCap'] as const) {
    const v = values[key];
    if (v !== null && v < 0) errors[key] = 'must be non-negative';
  }
  if (values.switchWindow !== null) {
    if (values.switchWindow < 0 || !Number.isInteger(values.switchWindow)) {
      errors.switchWindow = 'must be a non-negative whole number of days';
    }
  }
  if (values.capacityBuffer !== null) {
    if (values.capacityBuffer < 0 || values.capacityBuffer >= 1) {
      errors.capacityBuffer = 'must be a fraction in [0, 1)';
    }
  }
  return errors;
}

/** Translate a validated form into the overrides payload the API expects. */
export function toOverrides(values: FormValues): ScenarioOverrides {
  const overrides: ScenarioOverrides = {};
  if (values.objective !== 'min-overflow') {
    overrides.objective = { kind: values.objective };
  }
  const options: NonNullable<ScenarioOverrides['options']> = {};
  if (values.preset) {
    options.sent_penalty = 0.01;
    options.smoothing_penalty = 0.01;
    options.forbid_new_overflow = true;
    options.capacity_buffer = 0.05;
  }
  if (values.sentPenalty !== null) options.sent_penalty = values.sentPenalty;
  if (values.smoothingPenalty !== null) options.smoothing_penalty = values.smoothingPenalty;
  if (values.totalTransferCap !== null) options.total_transfer_cap = values.totalTransferCap;
  if (values.switchWindow !== null) options.switch_window = values.switchWindow;
  if (values.capacityBuffer !== null) options.capacity_buffer = values.capacityBuffer;
  if (values.integerTransfers) options.integer_transfers = true;
  if (Object.keys(options).length > 0) overrides.options = options;
  if (values.gamma !== null && values.gamma > 0) {
    overrides.robust = { gamma: values.gamma, enabled: true };
  }
  return overrides;
}
