import type { MetricsDoc, ScenarioOverrides } from './types';

export interface RunCard {
  jobId: string;
  label: string;
  overrides: ScenarioOverrides;
  metrics: MetricsDoc;
}

/** Human label for a run: the overrides that differ from the scenario. */
export function runLabel(overrides: ScenarioOverrides): string {
  const parts: string[] = [];
  if (overrides.robust?.enabled) {
    parts.push(`Γ=${overrides.robust.gamma}`);
  }
  if (overrides.objective) parts.push(overrides.objective.kind);
  for (const [key, value] of Object.entries(overrides.options ?? {})) {
    parts.push(value === true ? key : `${key}=${value}`);
  }
  return parts.length ? parts.join(', ') : 'scenario defaults';
}

/**
 * Keep the newest runs first, capped so the comparison strip stays
 * readable; resubmitting identical parameters replaces the old card.
 */
export function addRun(cards: RunCard[], card: RunCard, limit = 4): RunCard[] {
  const keep = cards.filter((c) => c.jobId !== card.jobId);
  return [card, ...keep].slice(0, limit);
}

/**
 * Overflow of each run's worst case, ordered by deviation budget. A
 * larger budget can never look better; surfacing the pair lets the UI
 * annotate the comparison.
 */
export function budgetComparison(
  cards: RunCard[],
): { gamma: number; totalOverflow: number }[] {
  return cards
    .filter((c) => c.overrides.robust?.enabled || gammaOf(c) === 0)
    .map((c) => ({ gamma: gammaOf(c), totalOverflow: c.metrics.total_overflow }))
    .sort((a, b) => a.gamma - b.gamma);
}

function gammaOf(card: RunCard): number {
  return card.overrides.robust?.enabled ? card.overrides.robust.gamma : 0;
}
