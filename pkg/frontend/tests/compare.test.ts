import { describe, expect, it } from 'vitest';

import { addRun, budgetComparison, runLabel, RunCard } from '../src/compare';
import type { MetricsDoc } from '../src/types';

function card(jobId: string, gamma: number | null, totalOverflow: number): RunCard {
  const overrides = gamma && gamma > 0 ? { robust: { gamma, enabled: true } } : {};
  return {
    jobId,
    label: runLabel(overrides),
    overrides,
    metrics: { total_overflow: totalOverflow } as MetricsDoc,
  };
}

describe('runLabel', () => {
  it('names the defaults', () => {
    expect(runLabel({})).toBe('scenario defaults');
  });

  it('shows the deviation budget and options', () => {
    expect(runLabel({ robust: { gamma: 2, enabled: true } })).toBe('Γ=2');
    expect(
      runLabel({ options: { integer_transfers: true, sent_penalty: 0.01 } }),
    ).toBe('integer_transfers, sent_penalty=0.01');
  });
});

describe('addRun', () => {
  it('puts the newest run first and caps the strip', () => {
    let cards: RunCard[] = [];
    for (let i = 0; i < 6; i += 1) {
      cards = addRun(cards, card(`j${i}`, null, i));
    }
    expect(cards.map((c) => c.jobId)).toEqual(['j5', 'j4', 'j3', 'j2']);
  });

  it('replaces a resubmitted identical job instead of duplicating it', () => {
    let cards = [card('j1', null, 5)];
    cards = addRun(cards, card('j1', null, 5));
    expect(cards).toHaveLength(1);
  });
});

describe('budgetComparison', () => {
  it('orders runs by budget so monotonicity is visible', () => {
    const cards = [card('b', 2, 310.5), card('a', null, 271.1)];
    expect(budgetComparison(cards)).toEqual([
      { gamma: 0, totalOverflow: 271.1 },
      { gamma: 2, totalOverflow: 310.5 },
    ]);
  });

  it('a larger budget never shows a smaller worst case for service output', () => {
    // mirrors what the service guarantees; the UI only surfaces it
    const rows = budgetComparison([card('a', null, 271.1), card('b', 2, 310.5)]);
    for (let i = 1; i < rows.length; i += 1) {
      expect(rows[i].totalOverflow).toBeGreaterThanOrEqual(rows[i - 1].totalOverflow);
    }
  });
});
