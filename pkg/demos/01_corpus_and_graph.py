"""Walk through the data layer: load the bundled synthetic corpus, build
the weighted knowledge graph, and look at its communities.

    python3 demos/01_corpus_and_graph.py
"""

from pathlib import Path

from uxrec.corpus import load_corpus
from uxrec.embed import FallbackEmbedder
from uxrec.graph import (
    EdgeWeightConfig,
    build_graph,
    community_metrics,
    detect_communities,
    graph_to_dot,
    modularity,
)

CORPUS = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "corpus"

corpus = load_corpus(CORPUS / "papers.json", CORPUS / "metrics.json",
                     CORPUS / "incidents.json")
print(f"loaded {len(corpus.papers)} papers, {len(corpus.repo)} metrics, "
      f"{len(corpus.incidents)} incidents")
if corpus.report.dangling_citations:
    print(f"citations pointing outside the corpus (kept, flagged): "
          f"{corpus.report.dangling_citations}")

# Edge weights combine shared-metric counts with per-category index
# similarity; citations get a configurable premium.
provider = FallbackEmbedder(dim=256)
graph = build_graph(corpus, EdgeWeightConfig(citation_multiplier=2.0), provider)
print(f"\nbuilt graph: {len(graph.paper_edges)} paper-paper edges, "
      f"{len(graph.metric_nodes)} metric nodes, "
      f"{len(graph.outcome_nodes)} outcome nodes")

heaviest = max(graph.folded_weights().items(), key=lambda kv: kv[1])
print(f"heaviest paper pair: {heaviest[0]} with folded weight {heaviest[1]:.2f}")

# Louvain over the folded undirected weights.
graph.communities = detect_communities(graph)
print(f"\nLouvain found {max(graph.communities.community_of.values()) + 1} "
      f"communities, modularity Q = {graph.communities.modularity:.4f}")
assert abs(graph.communities.modularity - modularity(graph, graph.communities)) < 1e-12

for cid in sorted(set(graph.communities.community_of.values())):
    members = sorted(p for p, c in graph.communities.community_of.items() if c == cid)
    metrics = community_metrics(graph, graph.communities, cid)
    print(f"\ncommunity {cid}: {', '.join(members)}")
    print(f"  metric pool ({len(metrics)}): {', '.join(metrics)}")

print("\nDOT export preview (paste into graphviz):")
print("\n".join(graph_to_dot(graph).splitlines()[:8]) + "\n  ...")
