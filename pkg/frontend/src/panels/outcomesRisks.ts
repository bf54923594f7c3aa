/** Outcomes and Risks panel: prior-work outcomes selectable into the plan,
 * and incident-grounded risks whose source links always render as working
 * anchors. */

import type { OutcomeItem, RiskItem } from '../types.js';

export interface OutcomesRisksHandlers {
  onSelectOutcome(ref: string): void;
  onAcceptRisk(ref: string): void;
}

export function renderOutcomeRow(
  outcome: OutcomeItem,
  selected: boolean,
  handlers: OutcomesRisksHandlers,
): HTMLElement {
  const row = document.createElement('article');
  row.className = selected ? 'outcome-row selected' : 'outcome-row';
  row.dataset.ref = outcome.ref;

  const text = document.createElement('p');
  text.textContent = outcome.outcome_achieved;
  const source = document.createElement('footer');
  source.textContent = `${outcome.paper_title} (${outcome.paper_id}); metrics: ` +
    outcome.associated_metrics.join(', ');

  const pick = document.createElement('button');
  pick.textContent = selected ? 'Selected' : 'Select';
  pick.disabled = selected;
  pick.addEventListener('click', () => handlers.onSelectOutcome(outcome.ref));

  row.append(text, source, pick);
  return row;
}

export function renderRiskRow(
  risk: RiskItem,
  accepted: boolean,
  handlers: OutcomesRisksHandlers,
): HTMLElement {
  const row = document.createElement('article');
  row.className = accepted ? 'risk-row accepted' : 'risk-row';
  row.dataset.ref = risk.ref;

  const text = document.createElement('p');
  text.textContent = risk.risk;
  const rationale = document.createElement('p');
  rationale.className = 'rationale';
  rationale.textContent = risk.rationale;

  const link = document.createElement('a');
  link.href = risk.source_url;
  link.target = '_blank';
  link.rel = 'noopener';
  link.textContent = `incident ${risk.incident_id}`;

  const accept = document.createElement('button');
  accept.textContent = accepted ? 'Accepted' : 'Accept';
  accept.disabled = accepted;
  accept.addEventListener('click', () => handlers.onAcceptRisk(risk.ref));

  row.append(text, rationale, link, accept);
  return row;
}

export function renderOutcomesRisks(
  outcomes: OutcomeItem[],
  selectedRefs: string[],
  risks: RiskItem[],
  acceptedRefs: string[],
  handlers: OutcomesRisksHandlers,
): HTMLElement {
  const panel = document.createElement('section');
  panel.className = 'panel panel-outcomes-risks';

  const outcomesHeading = document.createElement('h2');
  outcomesHeading.textContent = 'Outcomes from prior work';
  panel.append(outcomesHeading);
  if (outcomes.length === 0) {
    const empty = document.createElement('p');
    empty.className = 'empty-state';
    empty.textContent = 'Add metrics to the cart to see matching outcomes.';
    panel.append(empty);
  }
  for (const outcome of outcomes) {
    panel.append(renderOutcomeRow(outcome, selectedRefs.includes(outcome.ref), handlers));
  }

  const risksHeading = document.createElement('h2');
  risksHeading.textContent = 'Risks from real incidents';
  panel.append(risksHeading);
  if (risks.length === 0) {
    const empty = document.createElement('p');
    empty.className = 'empty-state';
    empty.textContent = 'No sufficiently similar incidents on record.';
    panel.append(empty);
  }
  for (const risk of risks) {
    panel.append(renderRiskRow(risk, acceptedRefs.includes(risk.ref), handlers));
  }
  return panel;
}
