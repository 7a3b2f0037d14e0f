import type { MetricsDoc } from './types';

export interface MetricRow {
  key: keyof Omit<MetricsDoc, 'schema_version'>;
  label: string;
  /** Raw API value, untouched — the UI must never recompute metrics. */
  value: number;
}

const LABELS: [MetricRow['key'], string][] = [
  ['total_overflow', 'Total overflow (patient-days)'],
  ['baseline_overflow', 'Overflow without transfers'],
  ['overflow_reduction', 'Overflow reduction (fraction)'],
  ['median_nonzero_overflow', 'Median nonzero overflow'],
  ['mean_nonzero_overflow', 'Mean nonzero overflow'],
  ['max_nonzero_overflow', 'Max nonzero overflow'],
  ['median_load', 'Median load'],
  ['mean_load', 'Mean load'],
  ['max_load', 'Max load'],
  ['percent_node_days_with_overflow', 'Node-days with overflow (%)'],
  ['total_transferred', 'Total patients transferred'],
  ['percent_of_patients_transferred', 'Share of patients transferred'],
  ['median_nonzero_transfer', 'Median nonzero transfer'],
  ['mean_nonzero_transfer', 'Mean nonzero transfer'],
  ['max_nonzero_transfer', 'Max nonzero transfer'],
  ['percent_node_days_with_transfer', 'Node-days with a transfer (%)'],
  ['system_wide_overflow', 'System-wide overflow (lower bound)'],
];

/** Stable table rows carrying API values verbatim. */
export function metricRows(metrics: MetricsDoc): MetricRow[] {
  return LABELS.map(([key, label]) => ({ key, label, value: metrics[key] }));
}

/**
 * Display form of a metric value. This only chooses a string rendering of
 * the number; `MetricRow.value` stays the exact API value.
 */
export function formatMetric(value: number): string {
  if (Number.isInteger(value)) return String(value);
  return value.toFixed(4);
}
