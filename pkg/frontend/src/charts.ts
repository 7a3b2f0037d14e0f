import type { CensusRow } from './types';

export interface LocationSeries {
  locationId: string;
  bedType: string;
  dates: string[];
  active: number[];
  baseline: number[];
  capacity: number;
}

export const LOCATIONS_PER_PAGE = 12;

/**
 * Group census rows into per-(location, bed type) line series, with the
 * no-transfer series alongside for the comparison toggle.
 */
export function buildSeries(
  census: CensusRow[],
  baseline: CensusRow[],
): LocationSeries[] {
  const byKey = new Map<string, LocationSeries>();
  for (const row of census) {
    const key = `${row.location_id}|${row.bed_type}`;
    let series = byKey.get(key);
    if (!series) {
      series = {
        locationId: row.location_id,
        bedType: row.bed_type,
        dates: [],
        active: [],
        baseline: [],
        capacity: row.capacity,
      };
      byKey.set(key, series);
    }
    series.dates.push(row.date);
    series.active.push(row.active);
  }
  for (const row of baseline) {
    byKey.get(`${row.location_id}|${row.bed_type}`)?.baseline.push(row.active);
  }
  return [...byKey.values()];
}

export function pageOf<T>(items: T[], page: number, perPage = LOCATIONS_PER_PAGE): T[] {
  return items.slice(page * perPage, (page + 1) * perPage);
}

export function pageCount(total: number, perPage = LOCATIONS_PER_PAGE): number {
  return Math.max(1, Math.ceil(total / perPage));
}

/** Polyline points string for a simple SVG line chart. */
export function toPolyline(
  values: number[],
  width: number,
  height: number,
  yMax: number,
): string {
  if (values.length === 0 || yMax <= 0) return '';
  const step = values.length > 1 ? width / (values.length - 1) : 0;
  return values
    .map((v, i) => {
      const y = height - (Math.min(v, yMax) / yMax) * height;
      return `${(i * step).toFixed(1)},${y.toFixed(1)}`;
    })
    .join(' ');
}
