/**
 * Charts view: frequency time series (absolute/relative toggle), topic
 * shares over time as a stacked area chart, and the co-occurrence graph
 * with a force layout. A missing resource renders a call-to-action to
 * submit the producing job instead of an empty chart.
 */

import { ApiClient, ApiError } from '../api.js';
import { forceGraph, lineChart, stackedAreaChart } from '../charts/svg.js';
import { button, clear, el } from '../dom.js';

export class ChartsView {
  readonly element: HTMLElement;
  private readonly controls: HTMLElement;
  private readonly canvas: HTMLElement;
  private kind: 'frequency' | 'topics-over-time' | 'cooc-graph' = 'frequency';
  private relative = false;

  constructor(private readonly api: ApiClient) {
    this.controls = el('div', { class: 'chart-controls' });
    this.canvas = el('div', { class: 'chart-canvas' });
    const kindPicker = el('select', { class: 'chart-kind' });
    for (const kind of ['frequency', 'topics-over-time', 'cooc-graph']) {
      kindPicker.append(el('option', { value: kind }, kind));
    }
    kindPicker.addEventListener('change', () => {
      this.kind = kindPicker.value as typeof this.kind;
      this.renderControls();
      clear(this.canvas);
    });
    this.element = el('section', { class: 'view charts-view' },
      el('div', { class: 'chart-toolbar' }, el('label', {}, 'Chart: '), kindPicker),
      this.controls, this.canvas);
    this.renderControls();
  }

  private renderControls(): void {
    clear(this.controls);
    if (this.kind === 'frequency') {
      const term = el('input', { type: 'text', placeholder: 'term', class: 'term-input' });
      const bucket = this.bucketPicker();
      const toggle = button(
        'absolute | relative', () => {
          this.relative = !this.relative;
          void this.drawFrequency(term.value, bucket.value);
        }, { class: 'mode-toggle' });
      this.controls.append(term, bucket, toggle,
        button('Draw', () => void this.drawFrequency(term.value, bucket.value),
          { class: 'draw-frequency' }));
    } else if (this.kind === 'topics-over-time') {
      const model = el('input', { type: 'text', placeholder: 'topic model name', class: 'model-input' });
      const bucket = this.bucketPicker();
      this.controls.append(model, bucket,
        button('Draw', () => void this.drawTopics(model.value, bucket.value),
          { class: 'draw-topics' }));
    } else {
      const seed = el('input', { type: 'text', placeholder: 'seed term', class: 'seed-input' });
      const measure = el('select', { class: 'measure-picker' });
      for (const m of ['loglik', 'dice', 'tanimoto', 'mi', 'count']) {
        measure.append(el('option', { value: m }, m));
      }
      this.controls.append(seed, measure,
        button('Draw', () => void this.drawCooc(seed.value, measure.value),
          { class: 'draw-cooc' }));
    }
  }

  private bucketPicker(): HTMLSelectElement {
    const bucket = el('select', { class: 'bucket-picker' });
    for (const b of ['year', 'month', 'week', 'day']) {
      bucket.append(el('option', { value: b }, b));
    }
    return bucket;
  }

  async drawFrequency(term: string, bucket: string): Promise<void> {
    if (!term.trim()) return;
    try {
      const series = await this.api.series(term.trim(), {
        bucket, mode: this.relative ? 'relative' : 'absolute',
      });
      const points = series.points.map((p) => ({
        label: p.bucket,
        value: this.relative ? p.relative : p.absolute,
      }));
      const chart = lineChart(points, this.relative ? { yMax: 1 } : {});
      chart.dataset.mode = this.relative ? 'relative' : 'absolute';
      clear(this.canvas).append(chart);
    } catch (err) {
      this.renderMissing(err, 'index the corpus first (lcm index)');
    }
  }

  async drawTopics(model: string, bucket: string): Promise<void> {
    if (!model.trim()) return;
    try {
      const topics = await this.api.topics(model.trim(), { bucket, top: 5 });
      const names = topics.topics.map(
        (t) => `topic ${t.topic}: ${t.top_words.slice(0, 3).map(([w]) => w).join(' ')}`);
      const buckets = (topics.timeline ?? []).map((p) => ({
        label: p.bucket,
        shares: p.shares,
      }));
      const chart = stackedAreaChart(buckets, names);
      const legend = el('ul', { class: 'legend' });
      names.forEach((name) => legend.append(el('li', {}, name)));
      clear(this.canvas).append(chart, legend);
    } catch (err) {
      this.renderMissing(err, 'fit a topic model first (topic-fit job)');
    }
  }

  async drawCooc(seed: string, measure: string): Promise<void> {
    if (!seed.trim()) return;
    try {
      const graph = await this.api.coocGraph([seed.trim()], { measure, topK: 10 });
      // render exactly the exported edge list; no client-side filtering
      const chart = forceGraph({
        nodes: graph.nodes.map((n) => n.id),
        edges: graph.edges,
      });
      clear(this.canvas).append(chart);
    } catch (err) {
      this.renderMissing(err, 'the term may be unknown in this collection');
    }
  }

  private renderMissing(err: unknown, hint: string): void {
    const message = err instanceof Error ? err.message : String(err);
    const cta = el('div', { class: 'missing-resource' },
      el('p', { class: 'error-banner' }, message),
      el('p', { class: 'cta' }, `Nothing to draw yet: ${hint}.`));
    if (err instanceof ApiError && err.status === 404) {
      cta.append(el('p', { class: 'cta-submit' },
        'Submit the producing job from the dashboard, then come back.'));
    }
    clear(this.canvas).append(cta);
  }
}
