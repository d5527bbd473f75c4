/**
 * Typed client for the corpus-mining HTTP/JSON API.
 *
 * Every analysis mutation in the UI goes through exactly one method here;
 * no state is kept client-side beyond what a view re-fetches.
 */

export interface JobInfo {
  id: string;
  kind: string;
  params: Record<string, unknown>;
  status: 'queued' | 'running' | 'done' | 'failed' | 'cancelled';
  progress: number;
  stage: string;
  result_ref: string | null;
  error: string | null;
  created_at: number;
  started_at: number | null;
  finished_at: number | null;
}

export interface SearchHit {
  id: string;
  score: number;
  title: string;
  date: string;
  source: string;
  snippet: string;
}

export interface SearchResponse {
  hits: SearchHit[];
  total: number;
  facets: Record<string, Record<string, number>>;
}

export interface CollectionInfo {
  name: string;
  size: number;
  provenance: string;
}

export interface SentenceSpan {
  begin: number;
  end: number;
}

export interface LabelSpan {
  span_id: string;
  doc_id: string;
  first_sentence: number;
  last_sentence: number;
  begin: number;
  end: number;
  category: string;
  origin: string;
  timestamp: string;
}

export interface DocumentDetail {
  id: string;
  text: string;
  metadata: Record<string, unknown>;
  sentences: SentenceSpan[];
  label_spans: Array<Record<string, unknown>>;
}

export interface Category {
  id: string;
  label: string;
  parent: string | null;
}

export interface QueueItem {
  item_id: string;
  doc_id: string;
  first_sentence: number;
  last_sentence: number;
  text: string;
  predicted: string;
  certainty: number;
  posteriors: Record<string, number>;
  status: 'pending' | 'accept' | 'reject';
  verdict_time: string | null;
}

export interface PrecisionInfo {
  accepted: number;
  rejected: number;
  overall: number | null;
  per_category: Record<
    string,
    { accepted: number; rejected: number; precision: number | null }
  >;
}

export interface QueueDetail {
  queue_id: string;
  order: string;
  model_ref: string | null;
  items: QueueItem[];
  pending: number;
  precision: PrecisionInfo;
}

export interface SeriesPoint {
  bucket: string;
  absolute: number;
  relative: number;
}

export interface SeriesResponse {
  term: string;
  bucketing: string;
  mode: string;
  points: SeriesPoint[];
}

export interface GraphEdge {
  source: string;
  target: string;
  score: number;
  count: number;
}

export interface CoocGraphResponse {
  measure: string;
  nodes: Array<{ id: string }>;
  edges: GraphEdge[];
}

export interface TopicsResponse {
  name: string;
  kind: string;
  k: number;
  topics: Array<{ topic: number; top_words: Array<[string, number]> }>;
  timeline?: Array<{ bucket: string; shares: number[] }>;
}

export interface ResourceListing {
  indexes: string[];
  dictionaries: string[];
  models: string[];
  classifiers: string[];
  queues: string[];
  reports: string[];
}

/** Error carrying the server's status code and message payload. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
    public readonly payload: Record<string, unknown> = {},
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(private readonly base: string = '') {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const resp = await fetch(this.base + path, {
      method,
      headers: body !== undefined ? { 'Content-Type': 'application/json' } : {},
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    const payload = (await resp.json()) as Record<string, unknown>;
    if (!resp.ok) {
      throw new ApiError(
        resp.status,
        String(payload.error ?? resp.statusText),
        payload,
      );
    }
    return payload as T;
  }

  // jobs ----------------------------------------------------------------

  listJobs(filter?: { status?: string; kind?: string }): Promise<{ jobs: JobInfo[] }> {
    const params = new URLSearchParams();
    if (filter?.status) params.set('status', filter.status);
    if (filter?.kind) params.set('kind', filter.kind);
    const suffix = params.toString() ? `?${params}` : '';
    return this.request('GET', `/api/jobs${suffix}`);
  }

  submitJob(kind: string, params: Record<string, unknown>): Promise<JobInfo> {
    return this.request('POST', '/api/jobs', { kind, params });
  }

  pollJob(id: string): Promise<JobInfo> {
    return this.request('GET', `/api/jobs/${id}`);
  }

  cancelJob(id: string): Promise<JobInfo> {
    return this.request('DELETE', `/api/jobs/${id}`);
  }

  // search and collections ----------------------------------------------

  search(
    query: string,
    opts: { limit?: number; offset?: number; facets?: string[] } = {},
  ): Promise<SearchResponse> {
    const params = new URLSearchParams({ q: query });
    if (opts.limit !== undefined) params.set('limit', String(opts.limit));
    if (opts.offset !== undefined) params.set('offset', String(opts.offset));
    for (const f of opts.facets ?? []) params.append('facet', f);
    return this.request('GET', `/api/search?${params}`);
  }

  listCollections(): Promise<{ collections: CollectionInfo[] }> {
    return this.request('GET', '/api/collections');
  }

  saveCollectionFromQuery(name: string, query: string): Promise<CollectionInfo> {
    return this.request('POST', '/api/collections', { name, query });
  }

  collection(name: string): Promise<{ name: string; doc_ids: string[]; provenance: string }> {
    return this.request('GET', `/api/collections/${encodeURIComponent(name)}`);
  }

  document(id: string): Promise<DocumentDetail> {
    return this.request('GET', `/api/documents/${encodeURIComponent(id)}`);
  }

  // categories and annotations --------------------------------------------

  categories(): Promise<{ categories: Category[] }> {
    return this.request('GET', '/api/categories');
  }

  addCategory(label: string, parent?: string): Promise<Category> {
    return this.request('POST', '/api/categories', { label, parent });
  }

  renameCategory(id: string, label: string): Promise<Category> {
    return this.request('POST', `/api/categories/${encodeURIComponent(id)}`, { label });
  }

  annotations(docId: string): Promise<{ spans: LabelSpan[] }> {
    return this.request('GET', `/api/annotations?doc=${encodeURIComponent(docId)}`);
  }

  annotate(
    docId: string,
    firstSentence: number,
    lastSentence: number,
    category: string,
  ): Promise<LabelSpan> {
    return this.request('POST', '/api/annotations', {
      doc: docId,
      first_sentence: firstSentence,
      last_sentence: lastSentence,
      category,
    });
  }

  deleteAnnotation(docId: string, spanId: string): Promise<{ deleted: string }> {
    return this.request(
      'DELETE',
      `/api/annotations/${encodeURIComponent(spanId)}?doc=${encodeURIComponent(docId)}`,
    );
  }

  // review queues ---------------------------------------------------------

  listQueues(): Promise<{ queues: string[] }> {
    return this.request('GET', '/api/queues');
  }

  queue(id: string): Promise<QueueDetail> {
    return this.request('GET', `/api/queue/${encodeURIComponent(id)}`);
  }

  verdict(
    queueId: string,
    itemId: string,
    verdict: 'accept' | 'reject',
  ): Promise<{ item: QueueItem; precision: PrecisionInfo }> {
    return this.request('POST', `/api/queue/${encodeURIComponent(queueId)}/verdict`, {
      item: itemId,
      verdict,
    });
  }

  // charts ------------------------------------------------------------------

  series(
    term: string,
    opts: { collection?: string; bucket?: string; mode?: string } = {},
  ): Promise<SeriesResponse> {
    const params = new URLSearchParams({ term });
    if (opts.collection) params.set('collection', opts.collection);
    if (opts.bucket) params.set('bucket', opts.bucket);
    if (opts.mode) params.set('mode', opts.mode);
    return this.request('GET', `/api/series?${params}`);
  }

  coocGraph(
    seeds: string[],
    opts: { collection?: string; measure?: string; topK?: number; minCount?: number } = {},
  ): Promise<CoocGraphResponse> {
    const params = new URLSearchParams();
    for (const s of seeds) params.append('seed', s);
    if (opts.collection) params.set('collection', opts.collection);
    if (opts.measure) params.set('measure', opts.measure);
    if (opts.topK !== undefined) params.set('top_k', String(opts.topK));
    if (opts.minCount !== undefined) params.set('min_count', String(opts.minCount));
    return this.request('GET', `/api/cooc-graph?${params}`);
  }

  topics(model: string, opts: { bucket?: string; top?: number } = {}): Promise<TopicsResponse> {
    const params = new URLSearchParams();
    if (opts.bucket) params.set('bucket', opts.bucket);
    if (opts.top !== undefined) params.set('top', String(opts.top));
    const suffix = params.toString() ? `?${params}` : '';
    return this.request('GET', `/api/topics/${encodeURIComponent(model)}${suffix}`);
  }

  resources(): Promise<ResourceListing> {
    return this.request('GET', '/api/resources');
  }
}
