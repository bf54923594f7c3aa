/** Metric list rows: definition, collection-method badges, a per-paper
 * usage drill-down, and the cart toggle. */

import type { MetricInfo } from '../types.js';

export interface MetricListHandlers {
  onToggleCart(metric: string): void;
}

export function renderMetricRow(
  metric: MetricInfo,
  inCart: boolean,
  handlers: MetricListHandlers,
): HTMLElement {
  const row = document.createElement('article');
  row.className = 'metric-row';
  row.dataset.metric = metric.name;

  const header = document.createElement('header');
  const title = document.createElement('h3');
  title.textContent = metric.name;
  header.append(title);

  for (const method of metric.methods) {
    const badge = document.createElement('span');
    badge.className = `badge badge-method badge-${method.toLowerCase()}`;
    badge.textContent = method;
    header.append(badge);
  }

  const cartButton = document.createElement('button');
  cartButton.className = 'cart-toggle';
  cartButton.textContent = inCart ? 'Remove from cart' : 'Add to cart';
  cartButton.addEventListener('click', () => handlers.onToggleCart(metric.name));
  header.append(cartButton);
  row.append(header);

  const definition = document.createElement('p');
  definition.className = 'definition';
  definition.textContent = metric.definition;
  row.append(definition);

  const drilldown = document.createElement('details');
  drilldown.className = 'usage-drilldown';
  const summary = document.createElement('summary');
  summary.textContent = `Used in ${metric.usages.length} paper(s)`;
  drilldown.append(summary);
  const list = document.createElement('ul');
  for (const usage of metric.usages) {
    const item = document.createElement('li');
    const paper = document.createElement('strong');
    paper.textContent = `${usage.paper_title} (${usage.paper_id})`;
    const text = document.createElement('p');
    text.textContent = usage.metric_usage;
    const outcome = document.createElement('p');
    outcome.className = 'outcome';
    outcome.textContent = usage.outcome_achieved;
    item.append(paper, text, outcome);
    list.append(item);
  }
  drilldown.append(list);
  row.append(drilldown);
  return row;
}

export function renderMetricList(
  metrics: MetricInfo[],
  cart: string[],
  handlers: MetricListHandlers,
): HTMLElement {
  const panel = document.createElement('section');
  panel.className = 'panel panel-metrics';
  if (metrics.length === 0) {
    const empty = document.createElement('p');
    empty.className = 'empty-state';
    empty.textContent = 'No recommendation yet.';
    panel.append(empty);
    return panel;
  }
  for (const metric of metrics) {
    panel.append(renderMetricRow(metric, cart.includes(metric.name), handlers));
  }
  return panel;
}
