/**
 * Search view: query box, ranked hits, facet sidebar, save-as-collection.
 *
 * Facet clicks refine the query with an AND field:value clause; saving a
 * collection materializes the full hit set server-side under a name.
 * Parse errors are rendered with a caret under the offending position.
 */

import { ApiClient, ApiError, SearchHit } from '../api.js';
import { button, clear, el } from '../dom.js';

const FACET_FIELDS = ['source', 'tags'];

export class SearchView {
  readonly element: HTMLElement;
  private readonly input: HTMLInputElement;
  private readonly results: HTMLElement;
  private readonly facets: HTMLElement;
  private readonly status: HTMLElement;
  private readonly saveName: HTMLInputElement;
  private lastQuery = '';

  constructor(
    private readonly api: ApiClient,
    private readonly onOpenDocument: (docId: string) => void,
  ) {
    this.input = el('input', {
      type: 'text',
      class: 'query-input',
      placeholder: 'query, e.g. market AND growth NOT welfare',
    });
    this.results = el('div', { class: 'search-results' });
    this.facets = el('div', { class: 'facet-panel' });
    this.status = el('div', { class: 'search-status' });
    this.saveName = el('input', {
      type: 'text',
      class: 'save-name',
      placeholder: 'collection name',
    });

    const form = el('form', { class: 'search-form' });
    form.append(this.input, button('Search', () => undefined, { type: 'submit' }));
    form.addEventListener('submit', (ev) => {
      ev.preventDefault();
      void this.run(this.input.value);
    });

    const saveRow = el(
      'div',
      { class: 'save-row' },
      this.saveName,
      button('Save as collection', () => void this.saveCollection(), {
        class: 'save-collection',
      }),
    );

    this.element = el(
      'section',
      { class: 'view search-view' },
      form,
      this.status,
      el('div', { class: 'search-body' }, this.facets, this.results),
      saveRow,
    );
  }

  async run(query: string): Promise<void> {
    clear(this.status);
    if (!query.trim()) {
      this.status.append(el('div', { class: 'hint' }, 'Enter a query first.'));
      return;
    }
    this.lastQuery = query;
    try {
      const response = await this.api.search(query, {
        limit: 20,
        facets: FACET_FIELDS,
      });
      this.renderHits(response.hits, response.total);
      this.renderFacets(response.facets);
    } catch (err) {
      this.renderError(query, err);
    }
  }

  private renderError(query: string, err: unknown): void {
    clear(this.results);
    clear(this.facets);
    const message = err instanceof Error ? err.message : String(err);
    const banner = el('div', { class: 'error-banner' }, message);
    clear(this.status).appendChild(banner);
    if (err instanceof ApiError && typeof err.payload.position === 'number') {
      const pos = err.payload.position as number;
      const marker = el('pre', { class: 'parse-marker' });
      marker.textContent = `${query}\n${' '.repeat(pos)}^`;
      this.status.appendChild(marker);
    }
  }

  private renderHits(hits: SearchHit[], total: number): void {
    clear(this.status).appendChild(
      el('div', { class: 'total-hits' }, `${total} hits`),
    );
    clear(this.results);
    for (const hit of hits) {
      const row = el(
        'article',
        { class: 'hit', 'data-doc': hit.id },
        el('header', {},
          el('strong', {}, hit.title || hit.id),
          el('span', { class: 'hit-meta' },
            ` ${hit.date} · ${hit.source || '-'} · ${hit.score.toFixed(3)}`)),
        el('p', { class: 'snippet' }, hit.snippet),
      );
      row.addEventListener('click', () => this.onOpenDocument(hit.id));
      this.results.appendChild(row);
    }
  }

  private renderFacets(facets: Record<string, Record<string, number>>): void {
    clear(this.facets);
    for (const [field, counts] of Object.entries(facets)) {
      const list = el('ul', { class: 'facet-list' });
      const entries = Object.entries(counts).sort((a, b) => b[1] - a[1]);
      for (const [value, count] of entries) {
        const item = el('li', { class: 'facet-value', 'data-facet': `${field}:${value}` });
        item.append(
          button(`${value} (${count})`, () => void this.refine(field, value)),
        );
        list.appendChild(item);
      }
      this.facets.append(el('h3', {}, field), list);
    }
  }

  private async refine(field: string, value: string): Promise<void> {
    const refined = `(${this.lastQuery}) AND ${field}:${value}`;
    this.input.value = refined;
    await this.run(refined);
  }

  private async saveCollection(): Promise<void> {
    const name = this.saveName.value.trim();
    if (!name || !this.lastQuery) {
      this.status.append(el('div', { class: 'hint' }, 'Run a query and give the collection a name.'));
      return;
    }
    try {
      const created = await this.api.saveCollectionFromQuery(name, this.lastQuery);
      this.status.append(
        el('div', { class: 'saved-note' },
          `Saved ${created.name} (${created.size} documents).`),
      );
    } catch (err) {
      this.status.append(
        el('div', { class: 'error-banner' },
          err instanceof Error ? err.message : String(err)),
      );
    }
  }
}
