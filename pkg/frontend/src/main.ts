/** Application shell: left-to-right panels (Ideation, Metrics Explorer,
 * Outcomes & Risks, Export) over a single session. The session id lives in
 * the URL (#/<id>) so state is recoverable. */

import { ApiClient } from './api.js';
import { renderIndexPanel } from './panels/ideation.js';
import { downloadBlob, renderExportPanel } from './panels/exportPanel.js';
import { renderMetricGraph } from './panels/metricsGraph.js';
import { renderMetricList } from './panels/metricsList.js';
import { renderOutcomesRisks } from './panels/outcomesRisks.js';
import { Store } from './state.js';
import type { GraphView, IndexValues, MetricDiff, OutcomeItem, RiskItem } from './types.js';

const api = new ApiClient();
const store = new Store();

let suggestions: IndexValues = {};
let graphView: GraphView = { nodes: [], edges: [] };
let outcomes: OutcomeItem[] = [];
let risks: RiskItem[] = [];
let lastDiff: MetricDiff | null = null;

async function refreshDerived(id: string): Promise<void> {
  [graphView, suggestions] = [
    await api.graphView(id),
    (await api.suggestions(id)).suggestions,
  ];
  outcomes = (await api.outcomes(id)).outcomes;
  risks = (await api.risks(id)).risks;
}

async function reload(id: string): Promise<void> {
  const session = await api.getProject(id);
  await refreshDerived(id);
  const diffs = session.diff_history;
  lastDiff = diffs.length ? diffs[diffs.length - 1] : null;
  store.applySession(session);
}

function landingPanel(root: HTMLElement): void {
  root.replaceChildren();
  const form = document.createElement('form');
  form.className = 'panel panel-landing';
  form.innerHTML = `
    <label>Project name <input name="name" required></label>
    <fieldset><legend>Status</legend>
      ${['brainstorming', 'designing the study', 'implementing', 'evaluating']
        .map((s) => `<label><input type="checkbox" name="status" value="${s}">${s}</label>`)
        .join('')}
    </fieldset>
    <label>What are the main objectives of your project?
      <textarea name="description" required></textarea></label>
    <label>How do you plan to evaluate the UX of your project?
      <textarea name="initial_plan"></textarea></label>
    <label>What outcomes do you expect from this evaluation?
      <textarea name="initial_outcome"></textarea></label>
    <button type="submit">Generate</button>
  `;
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    const data = new FormData(form);
    void store.mutate(async () => {
      const session = await api.createProject({
        name: String(data.get('name') ?? ''),
        statuses: data.getAll('status').map(String),
        description: String(data.get('description') ?? ''),
        initial_plan: String(data.get('initial_plan') ?? ''),
        initial_outcome: String(data.get('initial_outcome') ?? ''),
      });
      window.location.hash = `#/${session.id}`;
      await reload(session.id);
      store.setPanel('Ideation');
    });
  });
  root.append(form);
}

function render(root: HTMLElement): void {
  const { session, pending, error } = store.get();
  if (!session) {
    landingPanel(root);
    return;
  }
  root.replaceChildren();

  const header = document.createElement('header');
  header.innerHTML = `<h1>${session.name}</h1>
    <span class="revision">revision ${session.revision}</span>`;
  if (error) {
    const banner = document.createElement('p');
    banner.className = 'error-banner';
    banner.textContent = error;
    header.append(banner);
  }
  root.append(header);

  const columns = document.createElement('main');
  columns.className = 'columns';

  const id = session.id;
  const mutateAndReload = (fn: () => Promise<unknown>) =>
    void store.mutate(async () => {
      await fn();
      await reload(id);
    });

  columns.append(
    renderIndexPanel(
      { current: session.current_indexes, suggestions, lastDiff, pending },
      {
        onToggle: (category, value, checked) => {
          const edited = { ...session.current_indexes };
          const values = new Set(edited[category] ?? []);
          if (checked) values.add(value);
          else values.delete(value);
          edited[category] = [...values];
          mutateAndReload(() => api.putIndexes(id, edited));
        },
        onAddValue: (category, value) => {
          const edited = { ...session.current_indexes };
          edited[category] = [...(edited[category] ?? []), value];
          mutateAndReload(() => api.putIndexes(id, edited));
        },
        onRegenerate: () => mutateAndReload(() => api.regenerate(id)),
      },
    ),
  );

  const toggleCart = (metric: string) =>
    mutateAndReload(() =>
      session.cart.includes(metric) ? api.cartRemove(id, metric) : api.cartAdd(id, metric),
    );

  const explorer = document.createElement('section');
  explorer.className = 'panel panel-explorer';
  explorer.append(
    renderMetricGraph(graphView, session.cart, { onToggleCart: toggleCart }),
    renderMetricList(session.current_recommendation?.metrics ?? [], session.cart, {
      onToggleCart: toggleCart,
    }),
  );
  columns.append(explorer);

  columns.append(
    renderOutcomesRisks(outcomes, session.selected_outcomes, risks, session.accepted_risks, {
      onSelectOutcome: (ref) => mutateAndReload(() => api.selectOutcomes(id, [ref])),
      onAcceptRisk: (ref) => mutateAndReload(() => api.acceptRisks(id, [ref])),
    }),
  );

  const tail = document.createElement('section');
  tail.className = 'panel panel-generate';
  const generate = document.createElement('button');
  generate.textContent = 'Generate plan and outcome';
  generate.disabled = pending || session.cart.length === 0;
  generate.addEventListener('click', () => mutateAndReload(() => api.generate(id)));
  tail.append(generate);
  if (session.generated_plan) {
    const plan = document.createElement('pre');
    plan.textContent = session.generated_plan;
    tail.append(plan);
    tail.append(
      renderExportPanel({
        fetchMarkdown: () => api.exportRaw(id, 'markdown'),
        fetchJson: () => api.exportRaw(id, 'json'),
        triggerDownload: downloadBlob,
      }),
    );
  }
  columns.append(tail);
  root.append(columns);
}

export function boot(): void {
  const root = document.getElementById('app');
  if (!root) throw new Error('missing #app mount point');
  store.subscribe(() => render(root));
  const match = window.location.hash.match(/^#\/(\w+)/);
  if (match) {
    void reload(match[1]).catch((err) => store.setError(String(err)));
  } else {
    render(root);
  }
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  boot();
}
