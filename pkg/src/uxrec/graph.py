"""Weighted knowledge graph over papers, metrics, and outcomes.

Paper-paper edges come in three kinds: SHARED_METRIC between any two
papers measuring a common metric, and CITES/CITED_BY mirroring each
in-corpus citation at a configurable weight premium. Structural edges
(paper->metric, metric->outcome per paper) are unweighted. Communities
are found with Louvain over the folded undirected paper-paper weights.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

from .corpus import CATEGORIES, Corpus, IndexSet, MetricRecord, OutcomeRecord, PaperRecord
from .embed import EmbeddingProvider, cosine_similarity
from .errors import MissingCategorySimilarity, PartitionMismatch, UnknownCommunity


class EdgeKind(str, Enum):
    SHARED_METRIC = "SHARED_METRIC"
    CITES = "CITES"
    CITED_BY = "CITED_BY"


@dataclass
class EdgeWeightConfig:
    citation_multiplier: float = 2.0
    shared_metric_base: float = 1.0
    category_weights: dict[str, float] = field(
        default_factory=lambda: {c: 1.0 for c in CATEGORIES})

    def __post_init__(self):
        if not (math.isfinite(self.citation_multiplier) and self.citation_multiplier > 1.0):
            raise ValueError("citation_multiplier must be finite and > 1")
        if not (math.isfinite(self.shared_metric_base) and self.shared_metric_base > 0.0):
            raise ValueError("shared_metric_base must be finite and > 0")
        missing = set(CATEGORIES) - set(self.category_weights)
        if missing:
            raise ValueError(f"category_weights missing {sorted(missing)}")
        for c, w in self.category_weights.items():
            if not (math.isfinite(w) and w >= 0.0):
                raise ValueError(f"category weight for {c} must be finite and >= 0")

    @classmethod
    def from_dict(cls, raw: dict) -> "EdgeWeightConfig":
        kwargs = {}
        if "citation_multiplier" in raw:
            kwargs["citation_multiplier"] = float(raw["citation_multiplier"])
        if "shared_metric_base" in raw:
            kwargs["shared_metric_base"] = float(raw["shared_metric_base"])
        if "category_weights" in raw:
            weights = {c: 1.0 for c in CATEGORIES}
            weights.update({k: float(v) for k, v in raw["category_weights"].items()})
            kwargs["category_weights"] = weights
        return cls(**kwargs)


@dataclass(frozen=True)
class PaperEdge:
    a: str
    b: str
    kind: EdgeKind
    weight: float


@dataclass(frozen=True)
class OutcomeNode:
    paper_id: str
    metric: str
    outcome: OutcomeRecord


@dataclass
class CommunityAssignment:
    community_of: dict[str, int]
    modularity: float


@dataclass
class KnowledgeGraph:
    papers: dict[str, PaperRecord]
    metric_nodes: dict[str, MetricRecord]
    outcome_nodes: list[OutcomeNode]
    paper_edges: list[PaperEdge]
    communities: CommunityAssignment | None = None

    def metrics_of(self, paper_id: str) -> set[str]:
        return set(self.papers[paper_id].metrics)

    def papers_measuring(self, metric: str) -> list[str]:
        return sorted(pid for pid, p in self.papers.items() if metric in p.metrics)

    def outcomes_of_metric(self, metric: str) -> list[OutcomeNode]:
        return [n for n in self.outcome_nodes if n.metric == metric]

    def folded_weights(self) -> dict[tuple[str, str], float]:
        """Undirected paper-pair weights: all edge kinds summed per pair."""
        folded: dict[tuple[str, str], float] = {}
        for e in self.paper_edges:
            pair = (e.a, e.b) if e.a < e.b else (e.b, e.a)
            folded[pair] = folded.get(pair, 0.0) + e.weight
        return folded


# edge weights ------------------------------------------------------------

def shared_metrics(a: PaperRecord, b: PaperRecord) -> set[str]:
    return a.metrics & b.metrics


def index_similarity(a: IndexSet, b: IndexSet, provider: EmbeddingProvider,
                     cache: dict | None = None) -> dict[str, float]:
    """Per-category similarity: cosine of value embeddings averaged over
    the cross product of values; 0.0 when either side is empty."""
    cache = {} if cache is None else cache

    def vec(value: str):
        if value not in cache:
            cache[value] = provider.embed(value)
        return cache[value]

    sims = {}
    for category in CATEGORIES:
        left = a.values(category)
        right = b.values(category)
        if not left or not right:
            sims[category] = 0.0
            continue
        total = 0.0
        for u in left:
            for v in right:
                total += cosine_similarity(vec(u), vec(v))
        sims[category] = total / (len(left) * len(right))
    return sims


def compute_edge_weight(a: PaperRecord, b: PaperRecord, kind: EdgeKind,
                        cfg: EdgeWeightConfig, index_sim: dict[str, float]) -> float:
    """base = shared_metric_base * |shared metrics| + sum of weighted
    per-category index similarities; citation edges scale base by the
    citation multiplier."""
    missing = set(CATEGORIES) - set(index_sim)
    if missing:
        raise MissingCategorySimilarity(f"missing similarities for {sorted(missing)}")
    base = cfg.shared_metric_base * len(shared_metrics(a, b))
    for category in CATEGORIES:
        base += cfg.category_weights[category] * index_sim[category]
    if kind is EdgeKind.SHARED_METRIC:
        return base
    return base * cfg.citation_multiplier


def build_graph(corpus: Corpus, cfg: EdgeWeightConfig,
                provider: EmbeddingProvider) -> KnowledgeGraph:
    """Construct the full graph. Deterministic for a fixed corpus, config
    and provider; papers are processed in id order."""
    papers = {p.id: p for p in sorted(corpus.papers, key=lambda p: p.id)}
    metric_nodes = {
        name: corpus.repo.get(name)
        for name in sorted(set().union(*[p.metrics for p in corpus.papers]) if corpus.papers else set())
    }
    outcome_nodes = [
        OutcomeNode(paper_id=p.id, metric=o.metric, outcome=o)
        for pid, p in papers.items()
        for o in p.outcomes
    ]

    ids = sorted(papers)
    edges: list[PaperEdge] = []
    embed_cache: dict = {}
    sim_cache: dict[tuple[str, str], dict[str, float]] = {}

    def sims_for(x: str, y: str) -> dict[str, float]:
        pair = (x, y) if x < y else (y, x)
        if pair not in sim_cache:
            sim_cache[pair] = index_similarity(
                papers[pair[0]].indexes, papers[pair[1]].indexes, provider, embed_cache)
        return sim_cache[pair]

    for i, aid in enumerate(ids):
        for bid in ids[i + 1:]:
            a, b = papers[aid], papers[bid]
            if shared_metrics(a, b):
                weight = compute_edge_weight(a, b, EdgeKind.SHARED_METRIC, cfg,
                                             sims_for(aid, bid))
                if weight != 0.0:
                    edges.append(PaperEdge(aid, bid, EdgeKind.SHARED_METRIC, weight))

    for aid in ids:
        for bid in sorted(papers[aid].cites):
            if bid not in papers:
                continue  # dangling citations are flagged at load, not edges
            weight = compute_edge_weight(papers[aid], papers[bid], EdgeKind.CITES, cfg,
                                         sims_for(aid, bid))
            edges.append(PaperEdge(aid, bid, EdgeKind.CITES, weight))
            edges.append(PaperEdge(bid, aid, EdgeKind.CITED_BY, weight))

    return KnowledgeGraph(papers=papers, metric_nodes=metric_nodes,
                          outcome_nodes=outcome_nodes, paper_edges=edges)


# modularity and Louvain ----------------------------------------------------

def _modularity_from_parts(weights: dict[tuple[str, str], float],
                           degrees: dict[str, float], m2: float,
                           community_of: dict[str, int]) -> float:
    if m2 == 0.0:
        return 0.0
    intra: dict[int, float] = {}
    total: dict[int, float] = {}
    for (a, b), w in weights.items():
        ca, cb = community_of[a], community_of[b]
        if ca == cb:
            intra[ca] = intra.get(ca, 0.0) + 2.0 * w
    for node, k in degrees.items():
        c = community_of[node]
        total[c] = total.get(c, 0.0) + k
    q = 0.0
    for c, tot in total.items():
        q += intra.get(c, 0.0) / m2 - (tot / m2) ** 2
    return q


def modularity(g: KnowledgeGraph, partition: CommunityAssignment | dict[str, int]) -> float:
    """Weighted Newman-Girvan modularity of a paper partition over the
    folded undirected paper-paper weights."""
    community_of = partition.community_of if isinstance(partition, CommunityAssignment) else partition
    missing = set(g.papers) - set(community_of)
    if missing:
        raise PartitionMismatch(f"partition does not cover papers {sorted(missing)}")
    weights = g.folded_weights()
    degrees = {pid: 0.0 for pid in g.papers}
    for (a, b), w in weights.items():
        degrees[a] += w
        degrees[b] += w
    m2 = sum(degrees.values())
    return _modularity_from_parts(weights, degrees, m2, community_of)


class _LouvainLevel:
    """One working level of the Louvain hierarchy on integer nodes."""

    def __init__(self, n: int, adj: list[dict[int, float]], loops: list[float]):
        self.n = n
        self.adj = adj
        self.loops = loops
        self.degree = [sum(adj[i].values()) + 2.0 * loops[i] for i in range(n)]
        self.m2 = sum(self.degree)
        self.community = list(range(n))
        self.tot = list(self.degree)

    def local_move(self) -> bool:
        """Sweep nodes in ascending index until no move improves; ties in
        gain break toward the lowest community id."""
        moved_any = False
        while True:
            moved = False
            for node in range(self.n):
                current = self.community[node]
                k = self.degree[node]
                self.tot[current] -= k
                links: dict[int, float] = {}
                for nb, w in self.adj[node].items():
                    links[self.community[nb]] = links.get(self.community[nb], 0.0) + w
                best_c, best_gain = current, links.get(current, 0.0) - self.tot[current] * k / self.m2
                for c in sorted(links):
                    gain = links[c] - self.tot[c] * k / self.m2
                    if gain > best_gain + 1e-12 or (abs(gain - best_gain) <= 1e-12 and c < best_c):
                        best_c, best_gain = c, gain
                self.tot[best_c] += k
                if best_c != current:
                    self.community[node] = best_c
                    moved = True
                    moved_any = True
            if not moved:
                return moved_any

    def partition(self) -> list[int]:
        """Relabel communities contiguously by lowest member index."""
        order: dict[int, int] = {}
        for node in range(self.n):
            c = self.community[node]
            if c not in order:
                order[c] = len(order)
        return [order[self.community[node]] for node in range(self.n)]

    def aggregate(self, labels: list[int]) -> "_LouvainLevel":
        k = max(labels) + 1
        loops = [0.0] * k
        adj: list[dict[int, float]] = [dict() for _ in range(k)]
        for i in range(self.n):
            loops[labels[i]] += self.loops[i]
            for j, w in self.adj[i].items():
                if j < i:
                    continue
                ci, cj = labels[i], labels[j]
                if ci == cj:
                    loops[ci] += w
                else:
                    adj[ci][cj] = adj[ci].get(cj, 0.0) + w
                    adj[cj][ci] = adj[cj].get(ci, 0.0) + w
        return _LouvainLevel(k, adj, loops)

    def q(self) -> float:
        if self.m2 == 0.0:
            return 0.0
        intra: dict[int, float] = {}
        total: dict[int, float] = {}
        for i in range(self.n):
            c = self.community[i]
            intra[c] = intra.get(c, 0.0) + 2.0 * self.loops[i]
            total[c] = total.get(c, 0.0) + self.degree[i]
            for j, w in self.adj[i].items():
                if self.community[j] == c:
                    intra[c] = intra.get(c, 0.0) + w
        return sum(intra.get(c, 0.0) / self.m2 - (t / self.m2) ** 2
                   for c, t in total.items())


def detect_communities(g: KnowledgeGraph, epsilon: float = 1e-7) -> CommunityAssignment:
    """Louvain community detection on the paper graph.

    Deterministic: nodes are visited in ascending paper-id order and gain
    ties break toward the lowest community id. The result never scores
    below the all-singletons or the all-in-one partition.
    """
    ids = sorted(g.papers)
    if not ids:
        raise ValueError("graph has no paper nodes")
    pos = {pid: i for i, pid in enumerate(ids)}
    weights = g.folded_weights()

    n = len(ids)
    adj: list[dict[int, float]] = [dict() for _ in range(n)]
    for (a, b), w in weights.items():
        i, j = pos[a], pos[b]
        adj[i][j] = adj[i].get(j, 0.0) + w
        adj[j][i] = adj[j].get(i, 0.0) + w

    if not weights:
        assignment = {pid: i for i, pid in enumerate(ids)}
        return CommunityAssignment(community_of=assignment, modularity=0.0)

    level = _LouvainLevel(n, adj, [0.0] * n)
    node_to_comm = list(range(n))
    q_prev = level.q()
    while True:
        moved = level.local_move()
        labels = level.partition()
        q_now = level.q()
        node_to_comm = [labels[node_to_comm[i]] for i in range(n)]
        if not moved or q_now - q_prev <= epsilon or max(labels) + 1 == level.n:
            break
        q_prev = q_now
        level = level.aggregate(labels)

    community_of = {pid: node_to_comm[pos[pid]] for pid in ids}
    # contiguous ids ordered by lowest paper id in each community
    relabel: dict[int, int] = {}
    for pid in ids:
        c = community_of[pid]
        if c not in relabel:
            relabel[c] = len(relabel)
    community_of = {pid: relabel[c] for pid, c in community_of.items()}

    q = modularity(g, community_of)
    if q < 0.0:
        # all-in-one scores exactly 0; never return anything worse
        community_of = {pid: 0 for pid in ids}
        q = 0.0
    return CommunityAssignment(community_of=community_of, modularity=q)


def community_metrics(g: KnowledgeGraph, assignment: CommunityAssignment,
                      community_id: int) -> list[str]:
    """Union of metrics over the community's papers, canonically sorted."""
    members = [pid for pid, c in assignment.community_of.items() if c == community_id]
    if not members:
        raise UnknownCommunity(f"no community {community_id}")
    names: set[str] = set()
    for pid in members:
        names |= g.papers[pid].metrics
    return sorted(names)


# export --------------------------------------------------------------------

def graph_to_json(g: KnowledgeGraph) -> dict:
    communities = g.communities.community_of if g.communities else {}
    return {
        "schema": 1,
        "paper_nodes": [
            {"id": pid, "title": g.papers[pid].title,
             "metrics": sorted(g.papers[pid].metrics),
             "community": communities.get(pid)}
            for pid in sorted(g.papers)
        ],
        "metric_nodes": [
            {"name": name, "category": rec.category}
            for name, rec in sorted(g.metric_nodes.items())
        ],
        "outcome_nodes": [
            {"paper_id": n.paper_id, "metric": n.metric,
             "outcome_achieved": n.outcome.outcome_achieved,
             "metric_method": n.outcome.metric_method}
            for n in sorted(g.outcome_nodes, key=lambda n: (n.paper_id, n.metric,
                                                            n.outcome.outcome_achieved))
        ],
        "paper_edges": [
            {"a": e.a, "b": e.b, "kind": e.kind.value, "weight": e.weight}
            for e in sorted(g.paper_edges, key=lambda e: (e.a, e.b, e.kind.value))
        ],
        "modularity": g.communities.modularity if g.communities else None,
    }


def graph_to_dot(g: KnowledgeGraph) -> str:
    communities = g.communities.community_of if g.communities else {}
    lines = ["graph knowledge {"]
    for pid in sorted(g.papers):
        label = f"{pid}\\nc{communities.get(pid, '?')}"
        lines.append(f'  "{pid}" [shape=box, label="{label}"];')
    for (a, b), w in sorted(g.folded_weights().items()):
        lines.append(f'  "{a}" -- "{b}" [label="{w:.3f}"];')
    lines.append("}")
    return "\n".join(lines)


def save_graph(g: KnowledgeGraph, json_path, dot_path=None) -> None:
    from pathlib import Path

    Path(json_path).write_text(
        json.dumps(graph_to_json(g), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if dot_path is not None:
        Path(dot_path).write_text(graph_to_dot(g) + "\n", encoding="utf-8")
