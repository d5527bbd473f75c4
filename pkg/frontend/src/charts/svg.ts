/**
 * Hand-rolled SVG chart builders: time-series lines, stacked topic-share
 * areas, and a force-layout co-occurrence graph. No chart library; the
 * outputs are plain SVG elements that tests can inspect.
 */

const SVG_NS = 'http://www.w3.org/2000/svg';

export const PALETTE = [
  '#4269d0', '#efb118', '#ff725c', '#6cc5b0', '#3ca951',
  '#ff8ab7', '#a463f2', '#97bbf5', '#9c6b4e', '#9498a0',
];

function svgElement<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el;
}

function frame(width: number, height: number): SVGSVGElement {
  return svgElement('svg', {
    width,
    height,
    viewBox: `0 0 ${width} ${height}`,
  });
}

export interface LinePoint {
  label: string;
  value: number;
}

/** Time-series line chart; yMax forces the axis (1 for relative mode). */
export function lineChart(
  points: LinePoint[],
  opts: { width?: number; height?: number; yMax?: number } = {},
): SVGSVGElement {
  const width = opts.width ?? 640;
  const height = opts.height ?? 240;
  const pad = 32;
  const svg = frame(width, height);
  svg.dataset.chart = 'line';
  if (points.length === 0) return svg;

  const yMax = opts.yMax ?? Math.max(...points.map((p) => p.value), 1e-12);
  const xStep = (width - 2 * pad) / Math.max(points.length - 1, 1);
  const y = (v: number) => height - pad - (v / yMax) * (height - 2 * pad);

  const coords = points.map(
    (p, i) => [pad + i * xStep, y(p.value)] as const,
  );
  const path = svgElement('path', {
    d: coords
      .map(([px, py], i) => `${i === 0 ? 'M' : 'L'}${px.toFixed(1)},${py.toFixed(1)}`)
      .join(' '),
    fill: 'none',
    stroke: PALETTE[0],
    'stroke-width': 2,
  });
  svg.appendChild(path);

  for (const [i, [px, py]] of coords.entries()) {
    const dot = svgElement('circle', { cx: px, cy: py, r: 2.5, fill: PALETTE[0] });
    dot.dataset.label = points[i].label;
    dot.dataset.value = String(points[i].value);
    svg.appendChild(dot);
  }

  // axis labels: first, middle, last
  for (const i of [0, Math.floor(points.length / 2), points.length - 1]) {
    const text = svgElement('text', {
      x: pad + i * xStep,
      y: height - 8,
      'text-anchor': 'middle',
      'font-size': 10,
    });
    text.textContent = points[i].label;
    svg.appendChild(text);
  }
  const yLabel = svgElement('text', { x: 4, y: pad, 'font-size': 10 });
  yLabel.textContent = yMax.toPrecision(3);
  svg.appendChild(yLabel);
  return svg;
}

export interface StackedBucket {
  label: string;
  shares: number[];
}

/** Stacked area chart of per-bucket shares (each bucket sums to 1, so the
 * stack always fills the full plot height). */
export function stackedAreaChart(
  buckets: StackedBucket[],
  seriesNames: string[],
  opts: { width?: number; height?: number } = {},
): SVGSVGElement {
  const width = opts.width ?? 640;
  const height = opts.height ?? 240;
  const pad = 32;
  const svg = frame(width, height);
  svg.dataset.chart = 'stacked-area';
  if (buckets.length === 0 || seriesNames.length === 0) return svg;

  const xStep = (width - 2 * pad) / Math.max(buckets.length - 1, 1);
  const x = (i: number) => pad + i * xStep;
  const y = (v: number) => height - pad - v * (height - 2 * pad);

  // cumulative share boundaries per bucket
  const cumulative = buckets.map((b) => {
    const bounds = [0];
    let run = 0;
    for (const share of b.shares) {
      run += share;
      bounds.push(run);
    }
    return bounds;
  });

  for (let s = 0; s < seriesNames.length; s++) {
    const top = cumulative.map((c, i) => `${x(i).toFixed(1)},${y(c[s + 1]).toFixed(1)}`);
    const bottom = cumulative
      .map((c, i) => `${x(i).toFixed(1)},${y(c[s]).toFixed(1)}`)
      .reverse();
    const area = svgElement('polygon', {
      points: [...top, ...bottom].join(' '),
      fill: PALETTE[s % PALETTE.length],
      'fill-opacity': 0.8,
      stroke: 'none',
    });
    area.dataset.series = seriesNames[s];
    svg.appendChild(area);
  }

  for (const i of [0, buckets.length - 1]) {
    const text = svgElement('text', {
      x: x(i),
      y: height - 8,
      'text-anchor': 'middle',
      'font-size': 10,
    });
    text.textContent = buckets[i].label;
    svg.appendChild(text);
  }
  return svg;
}

export interface ForceGraphInput {
  nodes: string[];
  edges: Array<{ source: string; target: string; score: number }>;
}

/** Deterministic force layout: seeded circular start, fixed-step spring
 * relaxation. Renders exactly the given edge list, one line per edge. */
export function forceGraph(
  graph: ForceGraphInput,
  opts: { width?: number; height?: number; iterations?: number } = {},
): SVGSVGElement {
  const width = opts.width ?? 520;
  const height = opts.height ?? 400;
  const iterations = opts.iterations ?? 120;
  const svg = frame(width, height);
  svg.dataset.chart = 'force-graph';
  const n = graph.nodes.length;
  if (n === 0) return svg;

  const index = new Map(graph.nodes.map((id, i) => [id, i]));
  const cx = width / 2;
  const cy = height / 2;
  const radius = Math.min(width, height) / 2 - 40;
  const xs = graph.nodes.map((_, i) => cx + radius * Math.cos((2 * Math.PI * i) / n));
  const ys = graph.nodes.map((_, i) => cy + radius * Math.sin((2 * Math.PI * i) / n));

  const springLength = radius * 0.8;
  for (let it = 0; it < iterations; it++) {
    const fx = new Array(n).fill(0);
    const fy = new Array(n).fill(0);
    // pairwise repulsion
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        const dx = xs[i] - xs[j];
        const dy = ys[i] - ys[j];
        const d2 = Math.max(dx * dx + dy * dy, 1);
        const f = 2000 / d2;
        const d = Math.sqrt(d2);
        fx[i] += (f * dx) / d;
        fy[i] += (f * dy) / d;
        fx[j] -= (f * dx) / d;
        fy[j] -= (f * dy) / d;
      }
    }
    // spring attraction along edges
    for (const edge of graph.edges) {
      const i = index.get(edge.source);
      const j = index.get(edge.target);
      if (i === undefined || j === undefined || i === j) continue;
      const dx = xs[j] - xs[i];
      const dy = ys[j] - ys[i];
      const d = Math.max(Math.sqrt(dx * dx + dy * dy), 1);
      const f = 0.02 * (d - springLength);
      fx[i] += (f * dx) / d;
      fy[i] += (f * dy) / d;
      fx[j] -= (f * dx) / d;
      fy[j] -= (f * dy) / d;
    }
    const step = 0.85 * (1 - it / iterations) + 0.05;
    for (let i = 0; i < n; i++) {
      xs[i] = Math.min(width - 20, Math.max(20, xs[i] + step * fx[i]));
      ys[i] = Math.min(height - 16, Math.max(16, ys[i] + step * fy[i]));
    }
  }

  const maxScore = Math.max(...graph.edges.map((e) => Math.abs(e.score)), 1e-12);
  for (const edge of graph.edges) {
    const i = index.get(edge.source);
    const j = index.get(edge.target);
    if (i === undefined || j === undefined) continue;
    const line = svgElement('line', {
      x1: xs[i],
      y1: ys[i],
      x2: xs[j],
      y2: ys[j],
      stroke: '#8884',
      'stroke-width': 0.5 + 2.5 * (Math.abs(edge.score) / maxScore),
    });
    line.dataset.source = edge.source;
    line.dataset.target = edge.target;
    line.dataset.score = String(edge.score);
    svg.appendChild(line);
  }
  for (const [id, i] of index) {
    const dot = svgElement('circle', { cx: xs[i], cy: ys[i], r: 4, fill: PALETTE[0] });
    dot.dataset.node = id;
    svg.appendChild(dot);
    const text = svgElement('text', {
      x: xs[i] + 6,
      y: ys[i] + 3,
      'font-size': 10,
    });
    text.textContent = id;
    svg.appendChild(text);
  }
  return svg;
}
