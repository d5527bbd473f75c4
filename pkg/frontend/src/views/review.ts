/**
 * Review-queue view: one pending unit at a time with accept/reject
 * buttons (keyboard: a / r), live running precision per category, and a
 * retrain button that submits a classify-train job. A double-verdict
 * race resolved by the server skips to the next pending item.
 */

import { ApiClient, PrecisionInfo, QueueDetail } from '../api.js';
import { button, clear, el, fmtPercent } from '../dom.js';

export class ReviewView {
  readonly element: HTMLElement;
  private readonly picker: HTMLSelectElement;
  private readonly card: HTMLElement;
  private readonly precisionHost: HTMLElement;
  private readonly status: HTMLElement;
  private queue: QueueDetail | null = null;
  private cursor = 0;
  private loadToken = 0;

  constructor(private readonly api: ApiClient) {
    this.picker = el('select', { class: 'queue-picker' });
    this.picker.addEventListener('change', () => void this.load(this.picker.value));
    this.card = el('div', { class: 'review-card' });
    this.precisionHost = el('div', { class: 'precision-panel' });
    this.status = el('div', { class: 'review-status' });
    this.element = el('section', { class: 'view review-view' },
      el('div', { class: 'review-toolbar' },
        el('label', {}, 'Queue: '), this.picker,
        button('Reload', () => void this.refreshQueues(), { class: 'reload-queues' }),
        button('Retrain', () => void this.retrain(), { class: 'retrain' })),
      this.card, this.precisionHost, this.status);

    this.element.tabIndex = 0;
    this.element.addEventListener('keydown', (ev) => {
      if (ev.key === 'a') void this.verdict('accept');
      if (ev.key === 'r') void this.verdict('reject');
    });
  }

  async refreshQueues(): Promise<void> {
    const { queues } = await this.api.listQueues();
    clear(this.picker);
    this.picker.append(el('option', { value: '' }, '(pick a queue)'));
    for (const id of queues) this.picker.append(el('option', { value: id }, id));
    if (queues.length === 1) {
      this.picker.value = queues[0];
      await this.load(queues[0]);
    }
  }

  async load(queueId: string): Promise<void> {
    if (!queueId) return;
    const token = ++this.loadToken;
    const queue = await this.api.queue(queueId);
    if (token !== this.loadToken) return; // superseded by a newer load
    this.queue = queue;
    this.cursor = this.queue.items.findIndex((it) => it.status === 'pending');
    this.renderCard();
    this.renderPrecision(this.queue.precision);
  }

  private renderCard(): void {
    clear(this.card);
    if (!this.queue) return;
    if (this.cursor < 0 || this.cursor >= this.queue.items.length) {
      const done = this.queue.items.length - this.queue.pending;
      this.card.append(
        el('div', { class: 'queue-summary' },
          el('h3', {}, 'Queue finished'),
          el('p', {}, `${done} of ${this.queue.items.length} units reviewed.`)));
      return;
    }
    const item = this.queue.items[this.cursor];
    const posteriors = Object.entries(item.posteriors)
      .sort((a, b) => b[1] - a[1])
      .map(([c, p]) => `${c}: ${p.toFixed(3)}`)
      .join('  ');
    this.card.append(
      el('div', { class: 'review-item', 'data-item': item.item_id },
        el('div', { class: 'review-meta' },
          `${item.doc_id} · sentences ${item.first_sentence}-${item.last_sentence}`),
        el('blockquote', { class: 'unit-text' }, item.text),
        el('div', { class: 'prediction' },
          el('strong', { class: 'predicted-category' }, item.predicted),
          el('span', { class: 'certainty' },
            ` certainty ${item.certainty.toFixed(3)}`)),
        el('div', { class: 'posteriors' }, posteriors),
        el('div', { class: 'verdict-buttons' },
          button('Accept (a)', () => void this.verdict('accept'), { class: 'accept' }),
          button('Reject (r)', () => void this.verdict('reject'), { class: 'reject' }))));
  }

  private async verdict(decision: 'accept' | 'reject'): Promise<void> {
    if (!this.queue || this.cursor < 0) return;
    const item = this.queue.items[this.cursor];
    if (!item || item.status !== 'pending') return;
    try {
      const result = await this.api.verdict(this.queue.queue_id, item.item_id, decision);
      this.loadToken++; // a stale in-flight load must not clobber this
      item.status = result.item.status;
      this.renderPrecision(result.precision);
      clear(this.status);
    } catch (err) {
      // double-verdict race: server refused; skip this item
      clear(this.status).append(el('div', { class: 'error-banner' },
        err instanceof Error ? err.message : String(err)));
      item.status = 'accept';
    }
    this.advance();
  }

  private advance(): void {
    if (!this.queue) return;
    const next = this.queue.items.findIndex(
      (it, i) => i > this.cursor && it.status === 'pending');
    this.cursor = next >= 0
      ? next
      : this.queue.items.findIndex((it) => it.status === 'pending');
    if (this.cursor === -1) this.cursor = this.queue.items.length;
    this.renderCard();
  }

  private renderPrecision(precision: PrecisionInfo): void {
    clear(this.precisionHost);
    const total = precision.accepted + precision.rejected;
    const overall = precision.overall;
    this.precisionHost.append(
      el('div', { class: 'running-precision' },
        'running precision: ',
        el('strong', { class: 'precision-value' },
          overall === null ? '-' : `${precision.accepted}/${total} = ${fmtPercent(overall)}`)));
    const rows = Object.entries(precision.per_category);
    if (rows.length > 0) {
      const list = el('ul', { class: 'precision-per-category' });
      for (const [category, stats] of rows) {
        list.append(el('li', { 'data-category': category },
          `${category}: ${stats.accepted}/${stats.accepted + stats.rejected}`
          + ` = ${fmtPercent(stats.precision)}`));
      }
      this.precisionHost.append(list);
    }
  }

  private async retrain(): Promise<void> {
    if (!this.queue?.model_ref) {
      clear(this.status).append(el('div', { class: 'hint' },
        'Queue has no classifier reference.'));
      return;
    }
    const job = await this.api.submitJob('classify-train', {
      name: this.queue.model_ref,
    });
    clear(this.status).append(el('div', { class: 'retrain-note' },
      `Retraining submitted: job ${job.id} (see dashboard).`));
  }
}
