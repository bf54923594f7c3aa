"""The full recommendation pipeline, offline: a scripted mock stands in
for the hosted model, so every step below is deterministic.

    python3 demos/02_recommendation_flow.py
"""

import json
from pathlib import Path

from uxrec.corpus import IndexSet, load_corpus
from uxrec.embed import FallbackEmbedder
from uxrec.graph import EdgeWeightConfig, build_graph, detect_communities
from uxrec.llm import MockChatClient
from uxrec.recommend import (
    PipelineComponents,
    build_incident_index,
    build_paper_index,
    diff_metrics,
    run_pipeline,
)

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"

DESCRIPTION = (
    "The system provides counseling for individuals who are experienced with "
    "substance addiction. A conversational chatbot guides mindful drinking and "
    "recovery goals with personalized support available online at any time."
)
INITIAL_PLAN = ("The chatbot will be evaluated based on the intention ratings "
                "of users after four weeks of use.")

corpus = load_corpus(FIXTURES / "corpus" / "papers.json",
                     FIXTURES / "corpus" / "metrics.json",
                     FIXTURES / "corpus" / "incidents.json")
provider = FallbackEmbedder(dim=256)
graph = build_graph(corpus, EdgeWeightConfig(), provider)
graph.communities = detect_communities(graph)

components = PipelineComponents(
    corpus=corpus,
    graph=graph,
    provider=provider,
    paper_index=build_paper_index(graph, provider),
    incident_index=build_incident_index(corpus.incidents, provider),
    client=MockChatClient.from_file(FIXTURES / "mock_scripts" / "pipeline.json"),
)

print("1) indexes -> nearest paper -> community -> filtered metrics")
result = run_pipeline(DESCRIPTION, INITIAL_PLAN, components)
rec = result.recommendation
print(f"   nearest paper: {rec.source_paper} (community {rec.source_community})")
print(f"   recommended: {rec.names}")
for m in rec.metrics[:2]:
    print(f"   - {m.name}: methods {m.methods}, {len(m.usages)} prior usages")

print(f"\n2) outcomes retrieved for the recommended set: {len(result.outcomes)}")
print(f"   first: {result.outcomes[0].outcome_achieved!r} "
      f"({result.outcomes[0].paper_id})")

print(f"\n3) risks within the 0.5 distance gate: {len(result.risks)}")
for risk in result.risks:
    print(f"   - {risk['risk'][:70]}... [{risk['source_url']}]")

print("\n4) generated plan:")
print("   " + result.plan.text.replace("\n", "\n   "))

print("\nregenerate with edited indexes and compare:")
edited = IndexSet.from_dict(json.loads(json.dumps({
    **result.indexes.to_dict(),
    "application_domain": ["Mental Health", "Addiction Recovery"],
    "stakeholders": ["Primary Users", "Family Members"],
})))
again = run_pipeline(DESCRIPTION, INITIAL_PLAN, components, edited_indexes=edited,
                     prior_metrics=set(rec.names))
diff = again.diff_history[0]
print(f"   added: {sorted(diff.added)}")
print(f"   retained: {sorted(diff.retained)}")
print(f"   removed: {sorted(diff.removed)}")

check = diff_metrics(set(rec.names), set(again.recommendation.names))
assert check == diff
