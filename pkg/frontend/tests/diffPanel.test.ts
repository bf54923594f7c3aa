import { describe, expect, it, vi } from 'vitest';

import { renderDiffView, renderIndexPanel } from '../src/panels/ideation.js';
import { INDEX_CATEGORIES, type MetricDiff } from '../src/types.js';

const DIFF: MetricDiff = {
  added: ['adherence', 'goal attainment'],
  retained: ['engagement', 'trust'],
  removed: ['perceived usability'],
};

function members(root: HTMLElement, group: string): string[] {
  return [...root.querySelectorAll(`.diff-${group} li`)].map((li) => li.textContent ?? '');
}

describe('renderDiffView', () => {
  it('diff group membership equals the API MetricDiff exactly', () => {
    const root = renderDiffView(DIFF);
    expect(members(root, 'added')).toEqual(DIFF.added);
    expect(members(root, 'retained')).toEqual(DIFF.retained);
    expect(members(root, 'removed')).toEqual(DIFF.removed);
  });

  it('renders all three groups even when empty', () => {
    const root = renderDiffView({ added: [], retained: [], removed: [] });
    expect(root.querySelectorAll('.diff-group')).toHaveLength(3);
    expect(members(root, 'added')).toEqual([]);
  });
});

describe('renderIndexPanel', () => {
  const view = {
    current: {
      application_domain: ['Mental Health'],
      stakeholders: ['Primary Users'],
    },
    suggestions: {
      application_domain: ['Addiction Recovery', 'Telehealth'],
    },
    lastDiff: DIFF,
    pending: false,
  };

  it('renders a checkbox group per category', () => {
    const root = renderIndexPanel(view, {
      onToggle: () => {},
      onAddValue: () => {},
      onRegenerate: () => {},
    });
    const groups = root.querySelectorAll('fieldset.index-category');
    expect(groups).toHaveLength(INDEX_CATEGORIES.length);
  });

  it('suggested unchecked values are visually distinct from selected ones', () => {
    const root = renderIndexPanel(view, {
      onToggle: () => {},
      onAddValue: () => {},
      onRegenerate: () => {},
    });
    const selected = root.querySelector(
      'input[data-category="application_domain"][data-value="Mental Health"]',
    )!.parentElement!;
    const suggested = root.querySelector(
      'input[data-category="application_domain"][data-value="Addiction Recovery"]',
    )!.parentElement!;
    expect(selected.className).toBe('index-value');
    expect(suggested.className).toContain('suggested');
    expect(suggested.querySelector('.badge-suggested')).not.toBeNull();
    expect((suggested.querySelector('input') as HTMLInputElement).checked).toBe(false);
  });

  it('toggling a suggested value reports it checked', () => {
    const onToggle = vi.fn();
    const root = renderIndexPanel(view, {
      onToggle,
      onAddValue: () => {},
      onRegenerate: () => {},
    });
    const box = root.querySelector<HTMLInputElement>(
      'input[data-category="application_domain"][data-value="Addiction Recovery"]',
    )!;
    box.checked = true;
    box.dispatchEvent(new Event('change'));
    expect(onToggle).toHaveBeenCalledWith('application_domain', 'Addiction Recovery', true);
  });

  it('regenerate is disabled while a mutation is pending', () => {
    const root = renderIndexPanel({ ...view, pending: true }, {
      onToggle: () => {},
      onAddValue: () => {},
      onRegenerate: () => {},
    });
    expect(root.querySelector<HTMLButtonElement>('button.regenerate')!.disabled).toBe(true);
  });
});
