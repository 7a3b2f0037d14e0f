import { describe, expect, it } from 'vitest';

import {
  FormValues,
  horizonDays,
  toOverrides,
  validateForm,
} from '../src/validation';

const base: FormValues = {
  datasetId: 'abc',
  startDate: '2020-04-01',
  endDate: '2020-04-14',
  objective: 'min-overflow',
  preset: false,
  gamma: null,
  sentPenalty: null,
  smoothingPenalty: null,
  totalTransferCap: null,
  switchWindow: null,
  capacityBuffer: null,
  integerTransfers: false,
};

describe('horizonDays', () => {
  it('counts both endpoints', () => {
    expect(horizonDays('2020-04-01', '2020-04-14')).toBe(14);
    expect(horizonDays('2020-04-01', '2020-04-01')).toBe(1);
  });

  it('is NaN for junk input', () => {
    expect(horizonDays('not-a-date', '2020-04-01')).toBeNaN();
  });
});

describe('validateForm', () => {
  it('accepts a plain form', () => {
    expect(validateForm(base)).toEqual({});
  });

  it('requires a dataset', () => {
    expect(validateForm({ ...base, datasetId: '' }).datasetId).toBeTruthy();
  });

  it('rejects a reversed date range with no request sent', () => {
    const errors = validateForm({ ...base, endDate: '2020-03-01' });
    expect(errors.endDate).toMatch(/before/);
  });

  it('mirrors the server gamma-vs-horizon rule', () => {
    expect(validateForm({ ...base, gamma: 14 })).toEqual({});
    expect(validateForm({ ...base, gamma: 15 }).gamma).toMatch(/horizon/);
    expect(validateForm({ ...base, gamma: -1 }).gamma).toMatch(/non-negative/);
  });

  it('rejects negative coefficients', () => {
    expect(validateForm({ ...base, sentPenalty: -0.1 }).sentPenalty).toBeTruthy();
    expect(validateForm({ ...base, smoothingPenalty: -1 }).smoothingPenalty).toBeTruthy();
    expect(validateForm({ ...base, totalTransferCap: -5 }).totalTransferCap).toBeTruthy();
  });

  it('bounds the capacity buffer to [0, 1)', () => {
    expect(validateForm({ ...base, capacityBuffer: 0.05 })).toEqual({});
    expect(validateForm({ ...base, capacityBuffer: 1 }).capacityBuffer).toBeTruthy();
    expect(validateForm({ ...base, capacityBuffer: -0.1 }).capacityBuffer).toBeTruthy();
  });

  it('requires an integer switch window', () => {
    expect(validateForm({ ...base, switchWindow: 1.5 }).switchWindow).toBeTruthy();
    expect(validateForm({ ...base, switchWindow: 2 })).toEqual({});
  });
});

describe('toOverrides', () => {
  it('is empty for the defaults', () => {
    expect(toOverrides(base)).toEqual({});
  });

  it('expands the operational preset', () => {
    expect(toOverrides({ ...base, preset: true }).options).toEqual({
      sent_penalty: 0.01,
      smoothing_penalty: 0.01,
      forbid_new_overflow: true,
      capacity_buffer: 0.05,
    });
  });

  it('explicit values win over the preset', () => {
    const overrides = toOverrides({ ...base, preset: true, sentPenalty: 0.5 });
    expect(overrides.options?.sent_penalty).toBe(0.5);
  });

  it('a positive gamma enables the robust model', () => {
    expect(toOverrides({ ...base, gamma: 2 }).robust).toEqual({
      gamma: 2,
      enabled: true,
    });
    expect(toOverrides({ ...base, gamma: 0 }).robust).toBeUndefined();
  });

  it('carries the load-balance objective', () => {
    expect(toOverrides({ ...base, objective: 'load-balance' }).objective).toEqual({
      kind: 'load-balance',
    });
  });
});
