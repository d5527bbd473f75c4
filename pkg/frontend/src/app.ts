/**
 * Application shell: tab navigation over the five views. All analysis
 * state lives server-side; reloading the page reconstructs every view
 * from API resources alone.
 */

import { ApiClient } from './api.js';
import { button, el } from './dom.js';
import { ChartsView } from './views/charts.js';
import { DocumentView } from './views/document.js';
import { JobsDashboard } from './views/jobs.js';
import { ReviewView } from './views/review.js';
import { SearchView } from './views/search.js';

export const JOB_POLL_INTERVAL_MS = 2000;

export class App {
  readonly element: HTMLElement;
  readonly search: SearchView;
  readonly document: DocumentView;
  readonly review: ReviewView;
  readonly charts: ChartsView;
  readonly jobs: JobsDashboard;
  private readonly panels: Record<string, HTMLElement>;

  constructor(readonly api: ApiClient) {
    this.document = new DocumentView(api);
    this.search = new SearchView(api, (docId) => {
      void this.document.open(docId);
      this.show('document');
    });
    this.review = new ReviewView(api);
    this.charts = new ChartsView(api);
    this.jobs = new JobsDashboard(api);

    this.panels = {
      search: this.search.element,
      document: this.document.element,
      review: this.review.element,
      charts: this.charts.element,
      jobs: this.jobs.element,
    };

    const nav = el('nav', { class: 'tabs' });
    for (const name of Object.keys(this.panels)) {
      nav.append(button(name, () => this.show(name), {
        class: 'tab', 'data-tab': name,
      }));
    }
    const main = el('main', { class: 'panel-host' });
    for (const panel of Object.values(this.panels)) {
      panel.hidden = true;
      main.append(panel);
    }
    this.element = el('div', { class: 'app' },
      el('header', { class: 'masthead' },
        el('h1', {}, 'corpus miner'), nav),
      main);
    this.show('search');
  }

  show(name: string): void {
    for (const [key, panel] of Object.entries(this.panels)) {
      panel.hidden = key !== name;
    }
    this.element.querySelectorAll('.tab').forEach((tab) => {
      tab.classList.toggle('active',
        (tab as HTMLElement).dataset.tab === name);
    });
    if (name === 'jobs') void this.jobs.refresh();
    if (name === 'review') void this.review.refreshQueues();
  }
}

/** Mount the app and start the dashboard poll loop. */
export function mount(root: HTMLElement, apiBase = ''): App {
  const app = new App(new ApiClient(apiBase));
  root.appendChild(app.element);
  setInterval(() => {
    if (!app.jobs.element.hidden) void app.jobs.refresh();
  }, JOB_POLL_INTERVAL_MS);
  return app;
}
