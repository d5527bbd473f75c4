/**
 * Document and annotation view.
 *
 * Sentences render as selectable spans: click marks the selection start,
 * clicking another sentence extends the range. Picking a category and
 * confirming POSTs the label span; existing spans render as colored
 * underlays with delete controls. The category tree is editable in place
 * (add, rename). The view keeps no annotation state client-side: it
 * re-fetches after every mutation.
 */

import { ApiClient, Category, DocumentDetail, LabelSpan } from '../api.js';
import { button, clear, el } from '../dom.js';
import { PALETTE } from '../charts/svg.js';

export class DocumentView {
  readonly element: HTMLElement;
  private readonly textHost: HTMLElement;
  private readonly spanList: HTMLElement;
  private readonly palette: HTMLElement;
  private readonly status: HTMLElement;
  private docId: string | null = null;
  private detail: DocumentDetail | null = null;
  private categories: Category[] = [];
  private selStart: number | null = null;
  private selEnd: number | null = null;
  private chosenCategory: string | null = null;

  constructor(private readonly api: ApiClient) {
    this.textHost = el('div', { class: 'doc-text' });
    this.spanList = el('div', { class: 'span-list' });
    this.palette = el('div', { class: 'category-palette' });
    this.status = el('div', { class: 'doc-status' });
    this.element = el(
      'section',
      { class: 'view document-view' },
      el('div', { class: 'doc-columns' },
        el('div', { class: 'doc-main' }, this.textHost, this.status),
        el('aside', { class: 'doc-side' },
          el('h3', {}, 'Categories'), this.palette,
          el('h3', {}, 'Label spans'), this.spanList)),
    );
    this.renderEmpty();
  }

  private renderEmpty(): void {
    clear(this.textHost).append(
      el('p', { class: 'hint' }, 'Open a document from the search view.'));
  }

  async open(docId: string): Promise<void> {
    this.docId = docId;
    this.selStart = this.selEnd = null;
    await this.refresh();
  }

  async refresh(): Promise<void> {
    if (!this.docId) return;
    try {
      [this.detail, this.categories] = await Promise.all([
        this.api.document(this.docId),
        this.api.categories().then((r) => r.categories),
      ]);
    } catch (err) {
      clear(this.status).append(el('div', { class: 'error-banner' },
        err instanceof Error ? err.message : String(err)));
      return;
    }
    const spans = (await this.api.annotations(this.docId)).spans;
    this.renderText(spans);
    this.renderPalette();
    this.renderSpanList(spans);
  }

  private categoryColor(category: string): string {
    const idx = Math.max(0, this.categories.findIndex((c) => c.id === category));
    return PALETTE[idx % PALETTE.length];
  }

  private renderText(spans: LabelSpan[]): void {
    if (!this.detail) return;
    clear(this.textHost);
    this.textHost.append(el('h2', {}, String(this.detail.metadata.title ?? this.detail.id)),
      el('div', { class: 'doc-meta' },
        `${this.detail.metadata.date} · ${this.detail.metadata.source ?? ''}`));
    const body = el('div', { class: 'sentences' });
    this.detail.sentences.forEach((sentence, i) => {
      const covering = spans.filter(
        (s) => s.first_sentence <= i && i <= s.last_sentence);
      const node = el('span', {
        class: 'sentence',
        'data-sentence': String(i),
      }, this.detail!.text.slice(sentence.begin, sentence.end) + ' ');
      if (this.selStart !== null && this.selEnd !== null
          && this.selStart <= i && i <= this.selEnd) {
        node.classList.add('selected');
      }
      if (covering.length > 0) {
        node.classList.add('labeled');
        node.style.borderBottom =
          `3px solid ${this.categoryColor(covering[0].category)}`;
        node.title = covering.map((s) => s.category).join(', ');
      }
      node.addEventListener('click', () => this.select(i));
      body.appendChild(node);
    });
    this.textHost.appendChild(body);
    const confirm = button('Annotate selection', () => void this.annotate(), {
      class: 'annotate-confirm',
    });
    this.textHost.appendChild(confirm);
  }

  private select(index: number): void {
    if (this.selStart === null || (this.selEnd !== null && this.selStart !== this.selEnd)) {
      this.selStart = this.selEnd = index;
    } else if (index < this.selStart) {
      this.selStart = index;
    } else {
      this.selEnd = index;
    }
    // repaint selection only
    this.textHost.querySelectorAll('.sentence').forEach((node, i) => {
      node.classList.toggle(
        'selected',
        this.selStart !== null && this.selEnd !== null
          && this.selStart <= i && i <= this.selEnd);
    });
  }

  private renderPalette(): void {
    clear(this.palette);
    const list = el('ul', { class: 'category-list' });
    for (const category of this.categories) {
      const radio = el('input', {
        type: 'radio',
        name: 'category',
        value: category.id,
        id: `cat-${category.id}`,
      });
      if (this.chosenCategory === category.id) radio.checked = true;
      radio.addEventListener('change', () => {
        this.chosenCategory = category.id;
      });
      const swatch = el('span', { class: 'swatch' });
      swatch.style.background = this.categoryColor(category.id);
      const label = el('label', { for: `cat-${category.id}` },
        `${category.label}${category.parent ? ` (child of ${category.parent})` : ''}`);
      const rename = button('rename', () => void this.rename(category), {
        class: 'rename-category',
      });
      list.appendChild(el('li', { 'data-category': category.id },
        radio, swatch, label, rename));
    }
    this.palette.appendChild(list);

    const input = el('input', {
      type: 'text', placeholder: 'new category', class: 'new-category-label',
    });
    const parent = el('select', { class: 'new-category-parent' });
    parent.append(el('option', { value: '' }, '(top level)'));
    for (const c of this.categories) {
      parent.append(el('option', { value: c.id }, c.label));
    }
    this.palette.append(
      el('div', { class: 'category-editor' },
        input, parent,
        button('Add', () => void this.addCategory(input, parent), {
          class: 'add-category',
        })),
    );
  }

  private async addCategory(
    input: HTMLInputElement, parent: HTMLSelectElement,
  ): Promise<void> {
    if (!input.value.trim()) return;
    await this.api.addCategory(input.value.trim(), parent.value || undefined);
    input.value = '';
    await this.refresh();
  }

  private async rename(category: Category): Promise<void> {
    const label = window.prompt?.('New label', category.label);
    if (!label) return;
    await this.api.renameCategory(category.id, label);
    await this.refresh();
  }

  private async annotate(): Promise<void> {
    if (!this.docId || this.selStart === null || this.selEnd === null) {
      clear(this.status).append(el('div', { class: 'hint' },
        'Select one or more sentences first.'));
      return;
    }
    if (!this.chosenCategory) {
      clear(this.status).append(el('div', { class: 'hint' },
        'Pick a category from the palette.'));
      return;
    }
    try {
      await this.api.annotate(
        this.docId, this.selStart, this.selEnd, this.chosenCategory);
      clear(this.status);
      this.selStart = this.selEnd = null;
      await this.refresh();
    } catch (err) {
      // selection preserved so the analyst can retry
      clear(this.status).append(el('div', { class: 'error-banner' },
        err instanceof Error ? err.message : String(err)));
    }
  }

  private renderSpanList(spans: LabelSpan[]): void {
    clear(this.spanList);
    if (spans.length === 0) {
      this.spanList.append(el('p', { class: 'hint' }, 'No label spans yet.'));
      return;
    }
    const list = el('ul', { class: 'labeled-spans' });
    for (const span of spans) {
      const remove = button('delete', () => void this.remove(span), {
        class: 'delete-span',
      });
      const item = el('li', { 'data-span': span.span_id },
        el('span', { class: 'swatch' }),
        `${span.category} · sentences ${span.first_sentence}-${span.last_sentence}`
        + ` · ${span.origin} `,
        remove);
      (item.firstChild as HTMLElement).style.background =
        this.categoryColor(span.category);
      list.appendChild(item);
    }
    this.spanList.appendChild(list);
  }

  private async remove(span: LabelSpan): Promise<void> {
    if (!this.docId) return;
    await this.api.deleteAnnotation(this.docId, span.span_id);
    await this.refresh();
  }
}
