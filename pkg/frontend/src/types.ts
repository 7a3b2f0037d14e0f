/** Payload shapes of the redistribution service HTTP API (v1). */

export interface DatasetInfo {
  id: string;
  name: string;
  locations: number;
  start_date: string; // ISO date
  end_date: string; // ISO date
}

export interface DatasetList {
  schema_version: number;
  datasets: DatasetInfo[];
}

export type JobState = 'queued' | 'running' | 'done' | 'failed';

export interface JobStatus {
  schema_version: number;
  job_id: string;
  dataset_id: string;
  state: JobState;
  note: string;
  error?: string;
}

export interface MetricsDoc {
  schema_version: number;
  total_overflow: number;
  baseline_overflow: number;
  overflow_reduction: number;
  median_nonzero_overflow: number;
  mean_nonzero_overflow: number;
  max_nonzero_overflow: number;
  median_load: number;
  mean_load: number;
  max_load: number;
  percent_node_days_with_overflow: number;
  total_transferred: number;
  percent_of_patients_transferred: number;
  median_nonzero_transfer: number;
  mean_nonzero_transfer: number;
  max_nonzero_transfer: number;
  percent_node_days_with_transfer: number;
  system_wide_overflow: number;
}

export interface TransferRow {
  group: string;
  from: string;
  to: string;
  date: string;
  amount: number;
}

export interface CensusRow {
  location_id: string;
  bed_type: string;
  date: string;
  active: number;
  capacity: number;
}

export interface ResultDoc {
  schema_version: number;
  job_id: string;
  metrics: MetricsDoc;
  transfers: TransferRow[];
  census: CensusRow[];
  baseline_census: CensusRow[];
}

/** Scenario overrides accepted by POST /api/v1/jobs. */
export interface ScenarioOverrides {
  objective?: { kind: string };
  options?: {
    integer_transfers?: boolean;
    forbid_new_overflow?: boolean;
    sent_penalty?: number;
    smoothing_penalty?: number;
    total_transfer_cap?: number;
    switch_window?: number;
    capacity_buffer?: number;
  };
  robust?: { gamma: number; enabled: boolean };
}
