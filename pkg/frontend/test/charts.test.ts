import { describe, expect, it } from 'vitest';

import { forceGraph, lineChart, stackedAreaChart } from '../src/charts/svg.js';

describe('lineChart', () => {
  const points = [
    { label: '2001', value: 3 },
    { label: '2002', value: 0 },
    { label: '2003', value: 5 },
  ];

  it('renders one dot per point plus the path', () => {
    const svg = lineChart(points);
    expect(svg.querySelectorAll('circle')).toHaveLength(3);
    expect(svg.querySelector('path')?.getAttribute('d')).toMatch(/^M/);
  });

  it('relative mode pins the y axis to 1', () => {
    const svg = lineChart(
      points.map((p) => ({ ...p, value: p.value / 10 })),
      { yMax: 1 },
    );
    // the y-axis label shows the forced maximum
    const labels = Array.from(svg.querySelectorAll('text')).map(
      (t) => t.textContent,
    );
    expect(labels).toContain('1.00');
  });

  it('handles an empty series', () => {
    const svg = lineChart([]);
    expect(svg.querySelectorAll('circle')).toHaveLength(0);
  });
});

describe('stackedAreaChart', () => {
  it('draws one polygon per series', () => {
    const svg = stackedAreaChart(
      [
        { label: 'a', shares: [0.2, 0.8] },
        { label: 'b', shares: [0.6, 0.4] },
      ],
      ['t0', 't1'],
    );
    const polys = svg.querySelectorAll('polygon');
    expect(polys).toHaveLength(2);
    expect((polys[0] as SVGElement).dataset.series).toBe('t0');
  });

  it('full-height stack: outer boundary spans the whole plot area', () => {
    const svg = stackedAreaChart(
      [{ label: 'a', shares: [0.5, 0.5] }, { label: 'b', shares: [0.1, 0.9] }],
      ['t0', 't1'],
      { height: 240 },
    );
    const last = svg.querySelectorAll('polygon')[1];
    const ys = (last.getAttribute('points') ?? '')
      .split(' ')
      .map((pair) => Number(pair.split(',')[1]));
    // top boundary of the last series sits at the top padding (32)
    expect(Math.min(...ys)).toBeCloseTo(32, 0);
  });
});

describe('forceGraph', () => {
  const graph = {
    nodes: ['a', 'b', 'c'],
    edges: [
      { source: 'a', target: 'b', score: 2.0 },
      { source: 'a', target: 'c', score: 0.5 },
    ],
  };

  it('renders exactly the exported edge list, no filtering', () => {
    const svg = forceGraph(graph);
    const lines = Array.from(svg.querySelectorAll('line'));
    expect(lines).toHaveLength(2);
    expect(lines.map((l) => (l as SVGElement).dataset.target).sort()).toEqual(
      ['b', 'c'],
    );
    expect(svg.querySelectorAll('circle')).toHaveLength(3);
  });

  it('is deterministic for the same input', () => {
    const a = forceGraph(graph).outerHTML;
    const b = forceGraph(graph).outerHTML;
    expect(a).toBe(b);
  });

  it('keeps nodes inside the frame', () => {
    const svg = forceGraph(graph, { width: 300, height: 200 });
    for (const dot of svg.querySelectorAll('circle')) {
      const x = Number(dot.getAttribute('cx'));
      const y = Number(dot.getAttribute('cy'));
      expect(x).toBeGreaterThanOrEqual(0);
      expect(x).toBeLessThanOrEqual(300);
      expect(y).toBeGreaterThanOrEqual(0);
      expect(y).toBeLessThanOrEqual(200);
    }
  });
});
