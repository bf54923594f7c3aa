"""The end-to-end recommendation pipeline.

Given a project description and its index classification: embed, find the
nearest paper, take that paper's community, collect the community's
metrics, narrow them with the LLM filter, then attach collection methods
and prior usages. Outcomes, risks, the metric co-usage view, and the
final plan/outcome generation all hang off that recommendation.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from . import llm
from .corpus import Corpus, IndexSet
from .embed import EmbeddingProvider, VectorIndex
from .errors import StageFailed, UxrecError
from .graph import KnowledgeGraph, community_metrics

RISK_DISTANCE_THRESHOLD = 0.5
RISK_TOP_K = 3

EXPORT_SCHEMA = 1


@dataclass
class MetricInfo:
    name: str
    definition: str
    methods: list[str]
    usages: list[dict]


@dataclass
class MetricRecommendation:
    metrics: list[MetricInfo]
    source_community: int
    source_paper: str

    @property
    def names(self) -> list[str]:
        return [m.name for m in self.metrics]


@dataclass(frozen=True)
class MetricDiff:
    added: frozenset[str]
    retained: frozenset[str]
    removed: frozenset[str]

    def to_dict(self) -> dict:
        return {"added": sorted(self.added), "retained": sorted(self.retained),
                "removed": sorted(self.removed)}


@dataclass
class OutcomeItem:
    outcome_achieved: str
    paper_id: str
    paper_title: str
    associated_metrics: list[str]

    @property
    def ref(self) -> str:
        digest = hashlib.sha256(self.outcome_achieved.encode("utf-8")).hexdigest()[:12]
        return f"{self.paper_id}:{digest}"

    def to_dict(self) -> dict:
        return {"ref": self.ref, "outcome_achieved": self.outcome_achieved,
                "paper_id": self.paper_id, "paper_title": self.paper_title,
                "associated_metrics": list(self.associated_metrics)}


@dataclass
class MetricGraphView:
    nodes: list[dict]
    edges: list[dict]

    def to_dict(self) -> dict:
        return {"nodes": list(self.nodes), "edges": list(self.edges)}


def query_text(description: str, indexes: IndexSet) -> str:
    """Retrieval text: description concatenated with the canonical index
    serialization. One embedding, no fusion."""
    return description + "\n" + indexes.to_text()


def paper_text(paper) -> str:
    return paper.narrative + "\n" + paper.indexes.to_text()


def build_paper_index(graph: KnowledgeGraph, provider: EmbeddingProvider) -> VectorIndex:
    index = VectorIndex(provider.dim)
    for pid in sorted(graph.papers):
        index.add(pid, provider.embed(paper_text(graph.papers[pid])))
    return index


def build_incident_index(incidents, provider: EmbeddingProvider) -> VectorIndex:
    index = VectorIndex(provider.dim)
    for inc in sorted(incidents, key=lambda i: i.id):
        index.add(inc.id, provider.embed(inc.system_description))
    return index


def metric_infos(names: list[str], graph: KnowledgeGraph) -> list[MetricInfo]:
    """Attach definition, distinct collection methods, and per-paper
    usages from the graph's outcome nodes, preserving the given order."""
    infos = []
    for name in names:
        nodes = graph.outcomes_of_metric(name)
        methods = sorted({n.outcome.metric_method for n in nodes})
        usages = [
            {
                "paper_id": n.paper_id,
                "paper_title": graph.papers[n.paper_id].title,
                "metric_usage": n.outcome.metric_usage,
                "outcome_achieved": n.outcome.outcome_achieved,
                "citation_reason": n.outcome.citation_reason,
                "metric_challenges": n.outcome.metric_challenges,
            }
            for n in sorted(nodes, key=lambda n: (n.paper_id, n.outcome.outcome_achieved))
        ]
        infos.append(MetricInfo(
            name=name,
            definition=graph.metric_nodes[name].definition,
            methods=methods,
            usages=usages,
        ))
    return infos


def recommend_metrics(description: str, indexes: IndexSet, graph: KnowledgeGraph,
                      paper_index: VectorIndex, provider: EmbeddingProvider,
                      client, repo, prompt_dir=None) -> MetricRecommendation:
    """Pipeline: embed -> nearest paper -> its community -> community
    metric union -> LLM filter -> attach methods and usages."""
    if graph.communities is None:
        raise ValueError("graph has no community assignment")
    query = provider.embed(query_text(description, indexes))
    nearest = paper_index.nearest(query, k=1)[0]
    source_paper = nearest.key
    source_community = graph.communities.community_of[source_paper]
    candidates = community_metrics(graph, graph.communities, source_community)
    kept = llm.filter_metrics(candidates, description, indexes, client, repo,
                              override_dir=prompt_dir)
    return MetricRecommendation(metrics=metric_infos(kept, graph),
                                source_community=source_community,
                                source_paper=source_paper)


def diff_metrics(old: set[str], new: set[str]) -> MetricDiff:
    old, new = set(old), set(new)
    return MetricDiff(added=frozenset(new - old), retained=frozenset(new & old),
                      removed=frozenset(old - new))


def outcomes_for(selected_metrics: set[str], graph: KnowledgeGraph) -> list[OutcomeItem]:
    """Every outcome of every paper measuring at least one selected
    metric, deduplicated per (paper, outcome text), most cross-cutting
    papers first."""
    selected = set(selected_metrics)
    items: dict[tuple[str, str], OutcomeItem] = {}
    for pid in sorted(graph.papers):
        paper = graph.papers[pid]
        associated = sorted(selected & paper.metrics)
        if not associated:
            continue
        for outcome in paper.outcomes:
            key = (pid, outcome.outcome_achieved)
            if key not in items:
                items[key] = OutcomeItem(
                    outcome_achieved=outcome.outcome_achieved,
                    paper_id=pid,
                    paper_title=paper.title,
                    associated_metrics=associated,
                )
    ordered = sorted(items.values(),
                     key=lambda it: (-len(it.associated_metrics), it.paper_id,
                                     it.outcome_achieved))
    return ordered


def risks_for(description: str, incident_index: VectorIndex, incidents, client,
              provider: EmbeddingProvider, threshold: float = RISK_DISTANCE_THRESHOLD,
              top_k: int = RISK_TOP_K, prompt_dir=None) -> list[dict]:
    """Incidents within the distance gate contribute their risks; the LLM
    keeps the relevant ones. No incident in range means no LLM call."""
    by_id = {inc.id: inc for inc in incidents}
    query = provider.embed(description)
    hits = incident_index.within_distance(query, threshold, top_k)
    candidates = []
    for hit in hits:
        inc = by_id[hit.key]
        for j, risk in enumerate(inc.risks):
            candidates.append({
                "ref": f"{inc.id}#{j}",
                "risk": risk,
                "source_url": inc.source_url,
                "incident_id": inc.id,
            })
    return llm.filter_risks(candidates, description, client, override_dir=prompt_dir)


def build_metric_graph_view(metrics: set[str], graph: KnowledgeGraph) -> MetricGraphView:
    """Co-usage view over the whole corpus: node size is how many papers
    measure a metric, edge weight is how many measure both."""
    names = sorted(metrics)
    measuring = {name: set(graph.papers_measuring(name)) for name in names}
    nodes = [{"metric": name, "usage_count": len(measuring[name])} for name in names]
    edges = []
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            both = len(measuring[a] & measuring[b])
            if both >= 1:
                edges.append({"metric_a": a, "metric_b": b, "cooccurrence_count": both})
    return MetricGraphView(nodes=nodes, edges=edges)


# full pipeline ---------------------------------------------------------------

@dataclass
class PipelineComponents:
    corpus: Corpus
    graph: KnowledgeGraph
    provider: EmbeddingProvider
    paper_index: VectorIndex
    incident_index: VectorIndex
    client: object
    risk_threshold: float = RISK_DISTANCE_THRESHOLD
    risk_top_k: int = RISK_TOP_K
    prompt_dir: str | None = None


@dataclass
class PipelineResult:
    indexes: IndexSet
    recommendation: MetricRecommendation
    outcomes: list[OutcomeItem]
    risks: list[dict]
    plan: llm.PlanResult | None
    ux_outcome: llm.UxOutcome | None
    diff_history: list[MetricDiff] = field(default_factory=list)


def _staged(stage: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except UxrecError as exc:
        raise StageFailed(stage, exc) from exc


def run_pipeline(description: str, initial_plan: str, components: PipelineComponents,
                 edited_indexes: IndexSet | None = None,
                 prior_metrics: set[str] | None = None) -> PipelineResult:
    """Compose the stages in order: indexes, recommendation, outcomes,
    risks, then plan and outcome generation over the recommended set.

    With edited_indexes the index stage is skipped and the diff against
    prior_metrics is recorded.
    """
    c = components
    if edited_indexes is None:
        indexes = _staged("GenerateIndexes", llm.generate_indexes, description, c.client,
                          c.prompt_dir)
    else:
        indexes = edited_indexes
    recommendation = _staged(
        "FilterMetrics", recommend_metrics, description, indexes, c.graph,
        c.paper_index, c.provider, c.client, c.corpus.repo, c.prompt_dir)
    selected = set(recommendation.names)
    outcomes = outcomes_for(selected, c.graph)
    risks = _staged("FilterRisks", risks_for, description, c.incident_index,
                    c.corpus.incidents, c.client, c.provider, c.risk_threshold,
                    c.risk_top_k, c.prompt_dir)
    plan = None
    ux_outcome = None
    if recommendation.metrics:
        plan = _staged("GeneratePlan", llm.generate_plan, description, [
            {"name": m.name, "methods": m.methods, "usages": m.usages}
            for m in recommendation.metrics
        ], initial_plan, c.client, c.prompt_dir)
        ux_outcome = _staged(
            "GenerateUxOutcome", llm.generate_ux_outcome, description,
            recommendation.names, [o.to_dict() for o in outcomes[:5]], risks,
            c.client, c.prompt_dir)
    diffs = []
    if prior_metrics is not None:
        diffs.append(diff_metrics(prior_metrics, selected))
    return PipelineResult(indexes=indexes, recommendation=recommendation,
                          outcomes=outcomes, risks=risks, plan=plan,
                          ux_outcome=ux_outcome, diff_history=diffs)


# export artifact ---------------------------------------------------------------

def export_document(project: dict, indexes: IndexSet, selected_metrics: list[MetricInfo],
                    selected_outcomes: list[dict], risks: list[dict],
                    plan: str | None, ux_outcome: dict | None,
                    diff_history: list[MetricDiff], versions: dict) -> dict:
    """The single JSON export artifact; deterministic for fixed inputs."""
    return {
        "schema": EXPORT_SCHEMA,
        "component_versions": dict(sorted(versions.items())),
        "project": {
            "name": project.get("name", ""),
            "statuses": sorted(project.get("statuses", [])),
            "description": project.get("description", ""),
            "initial_plan": project.get("initial_plan", ""),
            "initial_outcome": project.get("initial_outcome", ""),
        },
        "indexes": indexes.to_dict(),
        "selected_metrics": [
            {"name": m.name, "definition": m.definition, "methods": list(m.methods),
             "usages": list(m.usages)}
            for m in selected_metrics
        ],
        "selected_outcomes": list(selected_outcomes),
        "risks": list(risks),
        "plan": plan or "",
        "ux_outcome": ux_outcome or {"text": "", "provenance": {}},
        "diff_history": [d.to_dict() for d in diff_history],
    }


def export_json(document: dict) -> str:
    return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def export_markdown(document: dict) -> str:
    p = document["project"]
    lines = [f"# {p['name'] or 'Untitled project'}", ""]
    if p["statuses"]:
        lines.append(f"*Status:* {', '.join(p['statuses'])}")
        lines.append("")
    lines += ["## Project description", "", p["description"], ""]
    if p["initial_plan"]:
        lines += ["## Initial evaluation plan", "", p["initial_plan"], ""]
    if p["initial_outcome"]:
        lines += ["## Initially expected outcomes", "", p["initial_outcome"], ""]

    lines += ["## Indexes", ""]
    for category, values in document["indexes"].items():
        lines.append(f"- **{category}**: {', '.join(values) if values else '(none)'}")
    lines.append("")

    lines += ["## Selected metrics", ""]
    for m in document["selected_metrics"]:
        lines.append(f"### {m['name']}")
        lines.append("")
        lines.append(m["definition"])
        lines.append("")
        lines.append(f"*Collection methods:* {', '.join(m['methods'])}")
        lines.append("")
        for usage in m["usages"]:
            lines.append(f"- {usage['paper_title']} ({usage['paper_id']}): "
                         f"{usage['metric_usage']}")
        lines.append("")

    if document["selected_outcomes"]:
        lines += ["## Selected outcomes from prior work", ""]
        for o in document["selected_outcomes"]:
            lines.append(f"- {o['outcome_achieved']} ({o['paper_title']}, "
                         f"{o['paper_id']}; metrics: {', '.join(o['associated_metrics'])})")
        lines.append("")

    if document["risks"]:
        lines += ["## Risks", ""]
        for r in document["risks"]:
            lines.append(f"- {r['risk']}")
            lines.append(f"  - rationale: {r['rationale']}")
            lines.append(f"  - incident: {r['incident_id']} ({r['source_url']})")
        lines.append("")

    if document["plan"]:
        lines += ["## Evaluation plan", "", document["plan"], ""]
    if document["ux_outcome"]["text"]:
        lines += ["## Expected UX outcome", "", document["ux_outcome"]["text"], ""]
        prov = document["ux_outcome"].get("provenance", {})
        if prov.get("outcomes") or prov.get("risks"):
            lines.append(f"*Derived from outcomes:* {', '.join(prov.get('outcomes', [])) or '(none)'}; "
                         f"*risks:* {', '.join(prov.get('risks', [])) or '(none)'}")
            lines.append("")

    if document["diff_history"]:
        lines += ["## Recommendation history", ""]
        for i, d in enumerate(document["diff_history"], 1):
            lines.append(f"{i}. added: {', '.join(d['added']) or '(none)'}; "
                         f"retained: {', '.join(d['retained']) or '(none)'}; "
                         f"removed: {', '.join(d['removed']) or '(none)'}")
        lines.append("")

    return "\n".join(lines)
