/**
 * Job dashboard: live table with progress bars and cancel buttons.
 *
 * The app polls refresh() every 2 seconds; a failed poll shows a
 * reconnect banner and keeps the last table. Cancel issues DELETE and
 * refreshes immediately, so the status cell flips without waiting for
 * the next poll tick.
 */

import { ApiClient, JobInfo } from '../api.js';
import { button, clear, el } from '../dom.js';

export class JobsDashboard {
  readonly element: HTMLElement;
  private readonly table: HTMLElement;
  private readonly banner: HTMLElement;

  constructor(private readonly api: ApiClient) {
    this.banner = el('div', { class: 'connection-banner' });
    this.table = el('div', { class: 'jobs-table' });
    this.element = el('section', { class: 'view jobs-view' },
      this.banner,
      el('div', { class: 'jobs-toolbar' },
        button('Refresh', () => void this.refresh(), { class: 'refresh-jobs' })),
      this.table);
  }

  async refresh(): Promise<void> {
    let jobs: JobInfo[];
    try {
      jobs = (await this.api.listJobs()).jobs;
      clear(this.banner);
    } catch {
      clear(this.banner).append(
        el('div', { class: 'error-banner reconnect' },
          'Server unreachable; retrying…'));
      return;
    }
    this.render(jobs);
  }

  private render(jobs: JobInfo[]): void {
    clear(this.table);
    if (jobs.length === 0) {
      this.table.append(el('p', { class: 'hint' }, 'No jobs yet.'));
      return;
    }
    const head = el('tr', {},
      el('th', {}, 'id'), el('th', {}, 'kind'), el('th', {}, 'status'),
      el('th', {}, 'progress'), el('th', {}, 'stage'), el('th', {}, 'result'),
      el('th', {}, ''));
    const body = el('tbody', {}, head);
    for (const job of jobs) {
      const bar = el('div', { class: 'progress-track' },
        el('div', { class: 'progress-bar' }));
      (bar.firstChild as HTMLElement).style.width =
        `${Math.round(job.progress * 100)}%`;
      const actions = el('td', { class: 'job-actions' });
      if (job.status === 'queued' || job.status === 'running') {
        actions.append(button('Cancel', () => void this.cancel(job.id), {
          class: 'cancel-job',
        }));
      }
      const statusCell = el('td', { class: `job-status status-${job.status}` },
        job.status);
      if (job.status === 'failed' && job.error) {
        statusCell.append(el('div', { class: 'job-error' }, job.error));
      }
      body.append(el('tr', { 'data-job': job.id },
        el('td', { class: 'job-id' }, job.id.slice(0, 8)),
        el('td', {}, job.kind),
        statusCell,
        el('td', {}, bar, ` ${(job.progress * 100).toFixed(0)}%`),
        el('td', {}, job.stage),
        el('td', {}, job.result_ref ?? ''),
        actions));
    }
    this.table.append(el('table', { class: 'jobs' }, body));
  }

  private async cancel(jobId: string): Promise<void> {
    try {
      await this.api.cancelJob(jobId);
    } catch {
      // already terminal: the refresh below shows the real state
    }
    await this.refresh();
  }
}
