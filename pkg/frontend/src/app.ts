import { ApiClient, ApiError } from './api';
import { addRun, budgetComparison, runLabel, RunCard } from './compare';
import {
  buildSeries,
  LocationSeries,
  pageCount,
  pageOf,
  toPolyline,
} from './charts';
import { formatMetric, metricRows } from './metrics';
import { pollJob } from './poll';
import type { DatasetInfo, ResultDoc } from './types';
import { FormValues, toOverrides, validateForm } from './validation';

const BASE_URL_KEY = 'surgeflow.baseUrl';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class App {
  private client: ApiClient;
  private datasets: DatasetInfo[] = [];
  private runs: RunCard[] = [];
  private chartPage = 0;
  private showBaseline = true;
  private lastResult: ResultDoc | null = null;

  constructor(private root: HTMLElement) {
    const base =
      localStorage.getItem(BASE_URL_KEY) ?? window.location.origin;
    this.client = new ApiClient(base);
  }

  async start(): Promise<void> {
    this.renderShell();
    try {
      const doc = await this.client.listDatasets();
      this.datasets = doc.datasets;
      this.renderForm();
    } catch (err) {
      this.banner(`cannot reach the service: ${message(err)}`, 'error', () =>
        this.start(),
      );
    }
  }

  private renderShell(): void {
    this.root.innerHTML = '';
    const header = el('header');
    header.append(el('h1', '', 'Surge scenario explorer'));
    const baseInput = el('input', 'base-url');
    baseInput.value = localStorage.getItem(BASE_URL_KEY) ?? window.location.origin;
    baseInput.title = 'service base URL';
    baseInput.addEventListener('change', () => {
      localStorage.setItem(BASE_URL_KEY, baseInput.value);
      this.client = new ApiClient(baseInput.value);
      void this.start();
    });
    header.append(baseInput);
    this.root.append(
      header,
      el('div', 'banner'),
      el('form', 'scenario-form'),
      el('section', 'runs'),
      el('section', 'result'),
    );
  }

  private banner(
    text: string,
    kind: 'info' | 'error' = 'info',
    retry?: () => void,
  ): void {
    const node = this.root.querySelector('.banner') as HTMLElement;
    node.innerHTML = '';
    node.dataset.kind = kind;
    node.append(el('span', '', text));
    if (retry) {
      const btn = el('button', 'retry', 'Retry');
      btn.type = 'button';
      btn.addEventListener('click', retry);
      node.append(btn);
    }
  }

  private formValues(form: HTMLFormElement): FormValues {
    const data = new FormData(form);
    const num = (name: string): number | null => {
      const raw = String(data.get(name) ?? '').trim();
      return raw === '' ? null : Number(raw);
    };
    const dataset = this.datasets.find((d) => d.id === data.get('dataset'));
    return {
      datasetId: String(data.get('dataset') ?? ''),
      startDate: String(data.get('start') ?? dataset?.start_date ?? ''),
      endDate: String(data.get('end') ?? dataset?.end_date ?? ''),
      objective: data.get('objective') === 'load-balance' ? 'load-balance' : 'min-overflow',
      preset: data.get('preset') === 'on',
      gamma: num('gamma'),
      sentPenalty: num('sent'),
      smoothingPenalty: num('smooth'),
      totalTransferCap: num('cap'),
      switchWindow: num('switch'),
      capacityBuffer: num('buffer'),
      integerTransfers: data.get('integer') === 'on',
    };
  }

  private renderForm(): void {
    const form = this.root.querySelector('.scenario-form') as HTMLFormElement;
    form.innerHTML = '';

    const select = el('select');
    select.name = 'dataset';
    for (const d of this.datasets) {
      const opt = el('option', '', `${d.name} (${d.locations} locations)`);
      opt.value = d.id;
      select.append(opt);
    }
    form.append(labeled('Dataset', select));

    const first = this.datasets[0];
    form.append(
      labeled('Start date', input('start', 'date', first?.start_date ?? '')),
      labeled('End date', input('end', 'date', first?.end_date ?? '')),
      labeled('Objective', objectiveSelect()),
      labeled('Operational preset', checkbox('preset')),
      labeled('Whole-patient transfers', checkbox('integer')),
      labeled('Deviation budget Γ', input('gamma', 'number', '', '0.5')),
      labeled('Transfer penalty', input('sent', 'number', '', '0.01')),
      labeled('Smoothing penalty', input('smooth', 'number', '', '0.01')),
      labeled('Total transfer cap', input('cap', 'number', '')),
      labeled('Switch window (days)', input('switch', 'number', '', '1')),
      labeled('Capacity buffer', input('buffer', 'number', '', '0.05')),
    );
    const submit = el('button', 'submit', 'Run scenario');
    submit.type = 'submit';
    form.append(submit);

    form.addEventListener('submit', (e) => {
      e.preventDefault();
      void this.submit(form);
    });
  }

  private showErrors(form: HTMLFormElement, errors: Record<string, string>): void {
    form.querySelectorAll('.field-error').forEach((n) => n.remove());
    const byField: Record<string, string> = {
      datasetId: 'dataset', startDate: 'start', endDate: 'end', gamma: 'gamma',
      sentPenalty: 'sent', smoothingPenalty: 'smooth', totalTransferCap: 'cap',
      switchWindow: 'switch', capacityBuffer: 'buffer',
    };
    for (const [field, msg] of Object.entries(errors)) {
      const name = byField[field] ?? field;
      const control = form.querySelector(`[name="${name}"]`);
      control?.parentElement?.append(el('span', 'field-error', msg));
    }
  }

  private async submit(form: HTMLFormElement): Promise<void> {
    const values = this.formValues(form);
    const errors = validateForm(values);
    this.showErrors(form, errors as Record<string, string>);
    if (Object.keys(errors).length > 0) return; // invalid: no request

    const overrides = toOverrides(values);
    this.banner('submitting…');
    try {
      const jobId = await this.client.submitJob(values.datasetId, overrides);
      await pollJob(this.client, jobId, {
        onUpdate: (s) => this.banner(`job ${s.job_id}: ${s.state} (${s.note})`),
      });
      const result = await this.client.jobResult(jobId);
      this.runs = addRun(this.runs, {
        jobId,
        label: runLabel(overrides),
        overrides,
        metrics: result.metrics,
      });
      this.lastResult = result;
      this.chartPage = 0;
      this.banner(`job ${jobId}: done`);
      this.renderRuns();
      this.renderResult(result);
    } catch (err) {
      if (err instanceof ApiError && err.status < 500) {
        this.showErrors(form, { datasetId: err.message });
        this.banner(`request rejected: ${err.message}`, 'error');
      } else {
        this.banner(message(err), 'error', () => void this.submit(form));
      }
    }
  }

  private renderRuns(): void {
    const section = this.root.querySelector('.runs') as HTMLElement;
    section.innerHTML = '';
    for (const run of this.runs) {
      const card = el('article', 'run-card');
      card.dataset.jobId = run.jobId;
      card.append(el('h3', '', run.label));
      card.append(
        metricLine('Total overflow', run.metrics.total_overflow),
        metricLine('Reduction', run.metrics.overflow_reduction),
        metricLine('Transferred', run.metrics.total_transferred),
      );
      section.append(card);
    }
    const budgets = budgetComparison(this.runs);
    if (budgets.length >= 2) {
      const note = budgets
        .map((b) => `Γ=${b.gamma}: ${formatMetric(b.totalOverflow)}`)
        .join('  ·  ');
      section.append(el('p', 'budget-note', `worst-case overflow by budget — ${note}`));
    }
  }

  private renderResult(result: ResultDoc): void {
    const section = this.root.querySelector('.result') as HTMLElement;
    section.innerHTML = '';

    const table = el('table', 'metrics');
    for (const row of metricRows(result.metrics)) {
      const tr = el('tr');
      tr.dataset.metric = row.key;
      tr.append(el('td', '', row.label));
      const td = el('td', 'value', formatMetric(row.value));
      td.dataset.raw = JSON.stringify(row.value); // exact API value
      tr.append(td);
      table.append(tr);
    }
    section.append(table);

    const toggle = el('button', 'baseline-toggle');
    toggle.type = 'button';
    toggle.textContent = this.showBaseline ? 'Hide no-transfer series' : 'Show no-transfer series';
    toggle.addEventListener('click', () => {
      this.showBaseline = !this.showBaseline;
      if (this.lastResult) this.renderResult(this.lastResult);
    });
    section.append(toggle);

    const series = buildSeries(result.census, result.baseline_census);
    const pages = pageCount(series.length);
    const charts = el('div', 'charts');
    for (const s of pageOf(series, this.chartPage)) {
      charts.append(this.chart(s));
    }
    section.append(charts);
    if (pages > 1) {
      const pager = el('nav', 'pager');
      for (let p = 0; p < pages; p += 1) {
        const btn = el('button', p === this.chartPage ? 'page current' : 'page');
        btn.type = 'button';
        btn.textContent = String(p + 1);
        btn.addEventListener('click', () => {
          this.chartPage = p;
          if (this.lastResult) this.renderResult(this.lastResult);
        });
        pager.append(btn);
      }
      section.append(pager);
    }

    section.append(this.flows(result));
  }

  private chart(s: LocationSeries): HTMLElement {
    const width = 320;
    const height = 120;
    const yMax = Math.max(s.capacity, ...s.active, ...s.baseline) * 1.1;
    const figure = el('figure', 'census-chart');
    figure.append(el('figcaption', '', `${s.locationId} · ${s.bedType}`));
    const svg = document.createElementNS('http://www.w3.org/2000/svg', 'svg');
    svg.setAttribute('viewBox', `0 0 ${width} ${height}`);
    const capY = height - (s.capacity / yMax) * height;
    svg.innerHTML =
      `<line class="capacity" x1="0" y1="${capY.toFixed(1)}" x2="${width}" y2="${capY.toFixed(1)}" />` +
      (this.showBaseline
        ? `<polyline class="baseline" fill="none" points="${toPolyline(s.baseline, width, height, yMax)}" />`
        : '') +
      `<polyline class="active" fill="none" points="${toPolyline(s.active, width, height, yMax)}" />`;
    figure.append(svg);
    return figure;
  }

  private flows(result: ResultDoc): HTMLElement {
    // abstract flow list: origin → destination totals, largest first
    const totals = new Map<string, number>();
    for (const t of result.transfers) {
      const key = `${t.from} → ${t.to}`;
      totals.set(key, (totals.get(key) ?? 0) + t.amount);
    }
    const list = el('ol', 'flows');
    for (const [route, amount] of [...totals.entries()].sort((a, b) => b[1] - a[1])) {
      list.append(el('li', '', `${route}: ${formatMetric(amount)} patients`));
    }
    return list;
  }
}

function labeled(text: string, control: HTMLElement): HTMLElement {
  const wrap = el('label', 'field');
  wrap.append(el('span', '', text), control);
  return wrap;
}

function input(name: string, type: string, value: string, step?: string): HTMLInputElement {
  const node = el('input');
  node.name = name;
  node.type = type;
  node.value = value;
  if (step) node.step = step;
  return node;
}

function checkbox(name: string): HTMLInputElement {
  const node = el('input');
  node.name = name;
  node.type = 'checkbox';
  return node;
}

function objectiveSelect(): HTMLSelectElement {
  const node = el('select');
  node.name = 'objective';
  for (const kind of ['min-overflow', 'load-balance']) {
    const opt = el('option', '', kind);
    opt.value = kind;
    node.append(opt);
  }
  return node;
}

function metricLine(label: string, value: number): HTMLElement {
  const p = el('p', 'metric-line');
  p.append(el('span', 'label', label), el('span', 'value', formatMetric(value)));
  return p;
}

function message(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  void new App(document.getElementById('app') as HTMLElement).start();
}
