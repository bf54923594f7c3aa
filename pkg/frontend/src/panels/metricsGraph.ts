/** Force-directed metric graph. Node radius is monotone in usage_count,
 * stroke width monotone in cooccurrence_count (scales.ts); clicking a node
 * round-trips the cart through the API before any visual change. */

import { layout } from '../force.js';
import { radiusFor, strokeWidthFor } from '../scales.js';
import type { GraphView } from '../types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

export interface MetricGraphHandlers {
  onToggleCart(metric: string): void;
}

export function renderMetricGraph(
  view: GraphView,
  cart: string[],
  handlers: MetricGraphHandlers,
  width = 640,
  height = 480,
): HTMLElement {
  const wrap = document.createElement('div');
  wrap.className = 'metric-graph';

  if (view.nodes.length === 0) {
    const empty = document.createElement('p');
    empty.className = 'empty-state';
    empty.textContent = 'No metrics recommended yet. Generate or regenerate first.';
    wrap.append(empty);
    return wrap;
  }

  const svg = document.createElementNS(SVG_NS, 'svg');
  svg.setAttribute('viewBox', `0 0 ${width} ${height}`);
  svg.setAttribute('role', 'img');

  const positions = new Map(
    layout(
      view.nodes.map((n) => n.metric),
      view.edges.map((e) => ({ source: e.metric_a, target: e.metric_b })),
      width,
      height,
    ).map((n) => [n.id, n]),
  );

  for (const edge of view.edges) {
    const a = positions.get(edge.metric_a)!;
    const b = positions.get(edge.metric_b)!;
    const line = document.createElementNS(SVG_NS, 'line');
    line.setAttribute('x1', a.x.toFixed(1));
    line.setAttribute('y1', a.y.toFixed(1));
    line.setAttribute('x2', b.x.toFixed(1));
    line.setAttribute('y2', b.y.toFixed(1));
    line.setAttribute('stroke-width', String(strokeWidthFor(edge.cooccurrence_count)));
    line.setAttribute('class', 'graph-edge');
    line.dataset.cooccurrence = String(edge.cooccurrence_count);
    const title = document.createElementNS(SVG_NS, 'title');
    title.textContent = `${edge.metric_a} and ${edge.metric_b} measured together in ` +
      `${edge.cooccurrence_count} paper(s)`;
    line.append(title);
    svg.append(line);
  }

  for (const node of view.nodes) {
    const pos = positions.get(node.metric)!;
    const group = document.createElementNS(SVG_NS, 'g');
    group.setAttribute('class', cart.includes(node.metric) ? 'graph-node in-cart' : 'graph-node');
    group.dataset.metric = node.metric;

    const circle = document.createElementNS(SVG_NS, 'circle');
    circle.setAttribute('cx', pos.x.toFixed(1));
    circle.setAttribute('cy', pos.y.toFixed(1));
    circle.setAttribute('r', String(radiusFor(node.usage_count)));
    circle.dataset.usage = String(node.usage_count);
    const title = document.createElementNS(SVG_NS, 'title');
    title.textContent = `${node.metric}: used by ${node.usage_count} paper(s)`;
    circle.append(title);

    const label = document.createElementNS(SVG_NS, 'text');
    label.setAttribute('x', pos.x.toFixed(1));
    label.setAttribute('y', (pos.y + radiusFor(node.usage_count) + 12).toFixed(1));
    label.setAttribute('text-anchor', 'middle');
    label.textContent = node.metric;

    group.addEventListener('click', () => handlers.onToggleCart(node.metric));
    group.append(circle, label);
    svg.append(group);
  }

  wrap.append(svg);
  return wrap;
}
