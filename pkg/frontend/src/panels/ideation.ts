/** Project Ideation panel: checkbox groups for the ten index categories,
 * Regenerate, and the Compare Metrics diff view. Suggested-but-unchecked
 * values render visually distinct from user-added ones. */

import { INDEX_CATEGORIES, type IndexValues, type MetricDiff } from '../types.js';

export interface IdeationHandlers {
  onToggle(category: string, value: string, checked: boolean): void;
  onAddValue(category: string, value: string): void;
  onRegenerate(): void;
}

export interface IdeationView {
  current: IndexValues;
  suggestions: IndexValues;
  lastDiff: MetricDiff | null;
  pending: boolean;
}

function checkboxRow(
  category: string,
  value: string,
  checked: boolean,
  suggested: boolean,
  handlers: IdeationHandlers,
): HTMLLabelElement {
  const label = document.createElement('label');
  label.className = suggested && !checked ? 'index-value suggested' : 'index-value';
  const box = document.createElement('input');
  box.type = 'checkbox';
  box.checked = checked;
  box.dataset.category = category;
  box.dataset.value = value;
  box.addEventListener('change', () => handlers.onToggle(category, value, box.checked));
  label.append(box, document.createTextNode(value));
  if (suggested && !checked) {
    const badge = document.createElement('span');
    badge.className = 'badge badge-suggested';
    badge.textContent = 'suggested';
    label.append(badge);
  }
  return label;
}

export function renderDiffView(diff: MetricDiff): HTMLElement {
  const wrap = document.createElement('div');
  wrap.className = 'metric-diff';
  const groups: Array<[keyof MetricDiff, string]> = [
    ['added', 'Added'],
    ['retained', 'Retained'],
    ['removed', 'Removed'],
  ];
  for (const [key, title] of groups) {
    const group = document.createElement('div');
    group.className = `diff-group diff-${key}`;
    const heading = document.createElement('h4');
    heading.textContent = title;
    group.append(heading);
    const list = document.createElement('ul');
    for (const name of diff[key]) {
      const item = document.createElement('li');
      item.textContent = name;
      list.append(item);
    }
    group.append(list);
    wrap.append(group);
  }
  return wrap;
}

export function renderIndexPanel(view: IdeationView, handlers: IdeationHandlers): HTMLElement {
  const panel = document.createElement('section');
  panel.className = 'panel panel-ideation';

  for (const category of INDEX_CATEGORIES) {
    const group = document.createElement('fieldset');
    group.className = 'index-category';
    group.dataset.category = category;
    const legend = document.createElement('legend');
    legend.textContent = category.replaceAll('_', ' ');
    group.append(legend);

    const checked = view.current[category] ?? [];
    for (const value of checked) {
      group.append(checkboxRow(category, value, true, false, handlers));
    }
    for (const value of view.suggestions[category] ?? []) {
      if (checked.includes(value)) continue;
      group.append(checkboxRow(category, value, false, true, handlers));
    }

    const addForm = document.createElement('form');
    const input = document.createElement('input');
    input.type = 'text';
    input.placeholder = 'add value';
    addForm.append(input);
    addForm.addEventListener('submit', (event) => {
      event.preventDefault();
      if (input.value.trim()) handlers.onAddValue(category, input.value.trim());
    });
    group.append(addForm);
    panel.append(group);
  }

  const regenerate = document.createElement('button');
  regenerate.className = 'regenerate';
  regenerate.textContent = 'Regenerate';
  regenerate.disabled = view.pending;
  regenerate.addEventListener('click', () => handlers.onRegenerate());
  panel.append(regenerate);

  if (view.lastDiff) {
    const compare = document.createElement('details');
    compare.className = 'compare-metrics';
    const summary = document.createElement('summary');
    summary.textContent = 'Compare Metrics';
    compare.append(summary, renderDiffView(view.lastDiff));
    panel.append(compare);
  }
  return panel;
}
