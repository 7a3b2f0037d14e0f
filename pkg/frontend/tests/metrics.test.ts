import { describe, expect, it } from 'vitest';

import { formatMetric, metricRows } from '../src/metrics';
import type { MetricsDoc } from '../src/types';

const sample: MetricsDoc = {
  schema_version: 1,
  total_overflow: 271.05934756105983,
  baseline_overflow: 1257.5268556487466,
  overflow_reduction: 0.7844503948464345,
  median_nonzero_overflow: 17.5125,
  mean_nonzero_overflow: 19.347,
  max_nonzero_overflow: 60.5173,
  median_load: 1.0,
  mean_load: 0.9217,
  max_load: 1.7859,
  percent_node_days_with_overflow: 25.0,
  total_transferred: 247.9308,
  percent_of_patients_transferred: 0.1278,
  median_nonzero_transfer: 3.4,
  mean_nonzero_transfer: 5.76,
  max_nonzero_transfer: 22.1038,
  percent_node_days_with_transfer: 76.7857,
  system_wide_overflow: 258.8954,
};

describe('metricRows', () => {
  it('carries every API value verbatim, no recomputation', () => {
    const rows = metricRows(sample);
    expect(rows).toHaveLength(17);
    for (const row of rows) {
      expect(row.value).toBe(sample[row.key]);
    }
  });

  it('keeps a stable order with total overflow first', () => {
    const keys = metricRows(sample).map((r) => r.key);
    expect(keys[0]).toBe('total_overflow');
    expect(keys).toEqual(metricRows(sample).map((r) => r.key));
  });
});

describe('formatMetric', () => {
  it('keeps integers as-is', () => {
    expect(formatMetric(25)).toBe('25');
    expect(formatMetric(0)).toBe('0');
  });

  it('renders fractions to four places without touching the source value', () => {
    expect(formatMetric(0.7844503948464345)).toBe('0.7845');
    expect(sample.overflow_reduction).toBe(0.7844503948464345);
  });
});
