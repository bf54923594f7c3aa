/** Mirrors of the /api/v1 payload shapes. The UI keeps no business logic:
 * diffs, counts, and orderings all arrive precomputed from the server. */

export const INDEX_CATEGORIES = [
  'paradigms',
  'application_domain',
  'modality',
  'system_features',
  'design_novelty',
  'design_methods',
  'human_ai_relationship_types',
  'stakeholders',
  'social_scale',
  'theoretical_frameworks',
] as const;

export type IndexCategory = (typeof INDEX_CATEGORIES)[number];

export type IndexValues = Record<string, string[]>;

export interface MetricUsage {
  paper_id: string;
  paper_title: string;
  metric_usage: string;
  outcome_achieved: string;
  citation_reason: string;
  metric_challenges: string;
}

export interface MetricInfo {
  name: string;
  definition: string;
  methods: string[];
  usages: MetricUsage[];
}

export interface Recommendation {
  source_paper: string;
  source_community: number;
  metrics: MetricInfo[];
}

export interface MetricDiff {
  added: string[];
  retained: string[];
  removed: string[];
}

export interface GraphViewNode {
  metric: string;
  usage_count: number;
}

export interface GraphViewEdge {
  metric_a: string;
  metric_b: string;
  cooccurrence_count: number;
}

export interface GraphView {
  nodes: GraphViewNode[];
  edges: GraphViewEdge[];
}

export interface OutcomeItem {
  ref: string;
  outcome_achieved: string;
  paper_id: string;
  paper_title: string;
  associated_metrics: string[];
}

export interface RiskItem {
  ref: string;
  risk: string;
  rationale: string;
  source_url: string;
  incident_id: string;
}

export interface SessionSnapshot {
  id: string;
  name: string;
  statuses: string[];
  description: string;
  initial_plan: string;
  initial_outcome: string;
  current_indexes: IndexValues;
  current_recommendation: Recommendation | null;
  cart: string[];
  selected_outcomes: string[];
  accepted_risks: string[];
  generated_plan: string | null;
  generated_plan_warnings: string[];
  generated_ux_outcome: { text: string; provenance: Record<string, string[]> } | null;
  diff_history: MetricDiff[];
  revision: number;
}

export type Panel = 'Landing' | 'Ideation' | 'MetricsExplorer' | 'OutcomesRisks' | 'Export';

export interface ApiError {
  code: string;
  message: string;
  stage?: string;
}
