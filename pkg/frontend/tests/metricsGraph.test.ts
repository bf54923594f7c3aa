import { describe, expect, it, vi } from 'vitest';

import { renderMetricGraph } from '../src/panels/metricsGraph.js';
import type { GraphView } from '../src/types.js';

const FIXTURE: GraphView = {
  nodes: [
    { metric: 'trust', usage_count: 5 },
    { metric: 'engagement', usage_count: 4 },
    { metric: 'goal attainment', usage_count: 3 },
    { metric: 'adherence', usage_count: 2 },
  ],
  edges: [
    { metric_a: 'engagement', metric_b: 'trust', cooccurrence_count: 2 },
    { metric_a: 'adherence', metric_b: 'goal attainment', cooccurrence_count: 1 },
  ],
};

function radiusOf(root: HTMLElement, metric: string): number {
  const circle = root.querySelector<SVGCircleElement>(
    `g[data-metric="${metric}"] circle`,
  );
  expect(circle).not.toBeNull();
  return Number(circle!.getAttribute('r'));
}

describe('renderMetricGraph', () => {
  it('node radius is strictly monotone in the API usage counts', () => {
    const root = renderMetricGraph(FIXTURE, [], { onToggleCart: () => {} });
    const ordered = [...FIXTURE.nodes].sort((a, b) => b.usage_count - a.usage_count);
    for (let i = 0; i + 1 < ordered.length; i++) {
      expect(radiusOf(root, ordered[i].metric)).toBeGreaterThan(
        radiusOf(root, ordered[i + 1].metric),
      );
    }
  });

  it('edge stroke width is strictly monotone in co-occurrence counts', () => {
    const root = renderMetricGraph(FIXTURE, [], { onToggleCart: () => {} });
    const widths = new Map(
      [...root.querySelectorAll<SVGLineElement>('line.graph-edge')].map((line) => [
        Number(line.dataset.cooccurrence),
        Number(line.getAttribute('stroke-width')),
      ]),
    );
    expect(widths.get(2)!).toBeGreaterThan(widths.get(1)!);
  });

  it('clicking a node round-trips the cart through the handler', () => {
    const onToggleCart = vi.fn();
    const root = renderMetricGraph(FIXTURE, [], { onToggleCart });
    root
      .querySelector<SVGGElement>('g[data-metric="trust"]')!
      .dispatchEvent(new MouseEvent('click', { bubbles: true }));
    expect(onToggleCart).toHaveBeenCalledWith('trust');
  });

  it('cart membership is reflected as a class, not recomputed locally', () => {
    const root = renderMetricGraph(FIXTURE, ['engagement'], { onToggleCart: () => {} });
    expect(
      root.querySelector('g[data-metric="engagement"]')!.getAttribute('class'),
    ).toContain('in-cart');
    expect(
      root.querySelector('g[data-metric="trust"]')!.getAttribute('class'),
    ).not.toContain('in-cart');
  });

  it('renders an explicit empty state for an empty view', () => {
    const root = renderMetricGraph({ nodes: [], edges: [] }, [], { onToggleCart: () => {} });
    expect(root.querySelector('.empty-state')).not.toBeNull();
    expect(root.querySelector('svg')).toBeNull();
  });
});
