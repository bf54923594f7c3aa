import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sarah_flow import SARAH_DESCRIPTION, VC_DESCRIPTION, VC_EXPECTED_METRICS
from uxrec.corpus import IndexSet, load_corpus
from uxrec.embed import FallbackEmbedder, VectorIndex
from uxrec.graph import EdgeWeightConfig, build_graph, detect_communities
from uxrec.llm import MockChatClient, stage_key
from uxrec.recommend import (
    build_incident_index,
    build_metric_graph_view,
    build_paper_index,
    community_metrics,
    diff_metrics,
    metric_infos,
    outcomes_for,
    query_text,
    recommend_metrics,
    risks_for,
)

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="module")
def provider():
    return FallbackEmbedder(dim=256)


@pytest.fixture(scope="module")
def corpus():
    d = FIXTURES / "corpus"
    return load_corpus(d / "papers.json", d / "metrics.json", d / "incidents.json")


@pytest.fixture(scope="module")
def graph(corpus, provider):
    g = build_graph(corpus, EdgeWeightConfig(), provider)
    g.communities = detect_communities(g)
    return g


@pytest.fixture(scope="module")
def paper_index(graph, provider):
    return build_paper_index(graph, provider)


def filter_script(description, indexes, candidates, reply):
    payload = {"description": description, "indexes": indexes.to_dict(),
               "candidates": sorted(candidates)}
    return {stage_key("FilterMetrics", payload): json.dumps({"metrics": reply})}


class TestRecommendMetrics:
    def test_retrieval_identity(self, corpus, graph, paper_index, provider):
        # query equal to a stored paper vector retrieves that paper and its
        # community's metric union as candidates
        target = "p02"
        paper = graph.papers[target]
        description = paper.narrative
        indexes = paper.indexes
        assert query_text(description, indexes) \
            == paper.narrative + "\n" + paper.indexes.to_text()
        community = graph.communities.community_of[target]
        candidates = community_metrics(graph, graph.communities, community)
        client = MockChatClient(filter_script(description, indexes, candidates,
                                              list(candidates)))
        rec = recommend_metrics(description, indexes, graph, paper_index, provider,
                                client, corpus.repo)
        assert rec.source_paper == target
        assert rec.source_community == community
        assert rec.names == candidates

    def test_candidates_equal_union_oracle(self, corpus, graph):
        for cid in sorted(set(graph.communities.community_of.values())):
            members = [p for p, c in graph.communities.community_of.items() if c == cid]
            oracle = set()
            for pid in members:
                oracle |= graph.papers[pid].metrics
            assert community_metrics(graph, graph.communities, cid) == sorted(oracle)

    def test_version_control_anecdote(self, corpus, graph, paper_index, provider):
        indexes = IndexSet()
        query = provider.embed(query_text(VC_DESCRIPTION, indexes))
        top = paper_index.nearest(query, k=1)[0].key
        community = graph.communities.community_of[top]
        candidates = community_metrics(graph, graph.communities, community)
        client = MockChatClient(filter_script(VC_DESCRIPTION, indexes, candidates,
                                              VC_EXPECTED_METRICS))
        rec = recommend_metrics(VC_DESCRIPTION, indexes, graph, paper_index, provider,
                                client, corpus.repo)
        assert rec.names == VC_EXPECTED_METRICS

    def test_methods_and_usages_attached(self, corpus, graph, paper_index, provider):
        target = "p02"
        paper = graph.papers[target]
        community = graph.communities.community_of[target]
        candidates = community_metrics(graph, graph.communities, community)
        client = MockChatClient(filter_script(paper.narrative, paper.indexes,
                                              candidates, ["trust"]))
        rec = recommend_metrics(paper.narrative, paper.indexes, graph, paper_index,
                                provider, client, corpus.repo)
        (info,) = rec.metrics
        trust_papers = {pid for pid, p in graph.papers.items() if "trust" in p.metrics}
        assert {u["paper_id"] for u in info.usages} == trust_papers
        expected_methods = sorted({
            o.metric_method for pid in trust_papers
            for o in graph.papers[pid].outcomes if o.metric == "trust"})
        assert info.methods == expected_methods
        assert info.definition == corpus.repo.get("trust").definition


class TestMetricInfos:
    def test_nonempty_usage_implies_methods(self, graph, corpus):
        for info in metric_infos(sorted(graph.metric_nodes), graph):
            if info.usages:
                assert info.methods
            for usage in info.usages:
                assert usage["paper_id"] in graph.papers


class TestDiffMetrics:
    def test_spec_example(self):
        d = diff_metrics({"A", "B", "C"}, {"B", "C", "D"})
        assert (set(d.added), set(d.retained), set(d.removed)) \
            == ({"D"}, {"B", "C"}, {"A"})

    def test_identical_sets(self):
        d = diff_metrics({"A"}, {"A"})
        assert not d.added and not d.removed and d.retained == {"A"}

    def test_empty_old(self):
        d = diff_metrics(set(), {"X", "Y"})
        assert d.added == {"X", "Y"} and not d.retained and not d.removed

    @given(st.sets(st.sampled_from("abcdefgh")), st.sets(st.sampled_from("abcdefgh")))
    def test_partition_laws(self, old, new):
        d = diff_metrics(old, new)
        assert d.added | d.retained == frozenset(new)
        assert d.retained | d.removed == frozenset(old)
        assert not d.added & d.retained
        assert not d.added & d.removed
        assert not d.retained & d.removed


class TestOutcomesFor:
    def test_empty_selection(self, graph):
        assert outcomes_for(set(), graph) == []

    def test_metric_in_exactly_two_papers(self, graph):
        items = outcomes_for({"self-disclosure"}, graph)
        assert {i.paper_id for i in items} == {"p02", "p09"}
        # every outcome of a qualifying paper is surfaced
        expected = sum(len(graph.papers[p].outcomes) for p in ("p02", "p09"))
        assert len(items) == expected

    def test_matches_brute_force_filter(self, graph):
        selected = {"trust", "goal attainment"}
        items = outcomes_for(selected, graph)
        expected = set()
        for pid, paper in graph.papers.items():
            if paper.metrics & selected:
                for o in paper.outcomes:
                    expected.add((pid, o.outcome_achieved))
        assert {(i.paper_id, i.outcome_achieved) for i in items} == expected
        for item in items:
            assert item.associated_metrics == sorted(selected & graph.papers[item.paper_id].metrics)

    def test_sorted_by_cross_cutting_then_id(self, graph):
        items = outcomes_for({"trust", "goal attainment"}, graph)
        keys = [(-len(i.associated_metrics), i.paper_id, i.outcome_achieved) for i in items]
        assert keys == sorted(keys)
        assert items[0].paper_id == "p10"  # measures both

    def test_pure_recomputation(self, graph):
        a = outcomes_for({"trust"}, graph)
        b = outcomes_for({"trust"}, graph)
        assert [i.to_dict() for i in a] == [i.to_dict() for i in b]

    def test_refs_are_stable_and_unique(self, graph):
        items = outcomes_for({"trust", "engagement", "adherence"}, graph)
        refs = [i.ref for i in items]
        assert len(refs) == len(set(refs))
        assert all(ref.split(":")[0] == i.paper_id for ref, i in zip(refs, items))


class _StubProvider:
    """Returns preset vectors per text; lets tests pin exact distances."""

    def __init__(self, table, dim):
        self.table = {k: np.asarray(v, dtype=np.float64) for k, v in table.items()}
        self.dim = dim

    def embed(self, text):
        return self.table[text]


class _Incident:
    def __init__(self, id, system_description, risks, source_url):
        self.id = id
        self.system_description = system_description
        self.risks = risks
        self.source_url = source_url


class TestRisksFor:
    def make(self, distances):
        """Incidents at the given exact distances from the query."""
        table = {"query": [0.0, 0.0]}
        incidents = []
        for i, d in enumerate(distances):
            text = f"incident {i}"
            table[text] = [d, 0.0]
            incidents.append(_Incident(f"i{i}", text, [f"risk {i}"],
                                       f"https://x/{i}"))
        provider = _StubProvider(table, dim=2)
        index = build_incident_index(incidents, provider)
        return provider, index, incidents

    def test_empty_gate_no_client_call(self):
        provider, index, incidents = self.make([0.6, 0.9])
        client = MockChatClient({})
        assert risks_for("query", index, incidents, client, provider) == []
        assert client.calls == []

    def test_gate_strictness(self):
        provider, index, incidents = self.make([0.45, 0.5, 0.55])
        payload = {"description": "query",
                   "candidates": [{"ref": "i0#0", "risk": "risk 0"}]}
        client = MockChatClient({stage_key("FilterRisks", payload): json.dumps(
            {"risks": [{"ref": "i0#0", "rationale": "near"}]})})
        got = risks_for("query", index, incidents, client, provider)
        assert [r["ref"] for r in got] == ["i0#0"]

    def test_four_in_range_closest_three_used(self):
        provider, index, incidents = self.make([0.1, 0.2, 0.3, 0.4])
        payload = {"description": "query", "candidates": [
            {"ref": "i0#0", "risk": "risk 0"},
            {"ref": "i1#0", "risk": "risk 1"},
            {"ref": "i2#0", "risk": "risk 2"},
        ]}
        client = MockChatClient({stage_key("FilterRisks", payload): json.dumps(
            {"risks": [{"ref": "i1#0", "rationale": "r"}]})})
        got = risks_for("query", index, incidents, client, provider)
        assert [r["incident_id"] for r in got] == ["i1"]

    def test_fixture_near_duplicate_appears_with_url(self, corpus, provider):
        index = build_incident_index(corpus.incidents, provider)
        script = json.loads((FIXTURES / "mock_scripts" / "sarah.json").read_text())
        client = MockChatClient(script)
        got = risks_for(SARAH_DESCRIPTION, index, corpus.incidents, client, provider)
        assert got, "planted near-duplicate incident must pass the gate"
        assert {r["incident_id"] for r in got} == {"inc-001"}
        assert all(r["source_url"] == "https://example.org/incidents/inc-001"
                   for r in got)


class TestMetricGraphView:
    def small_graph(self):
        from test_graph import make_corpus, make_paper  # reuse helpers

        corpus = make_corpus(
            [make_paper("q1", {"X"}), make_paper("q2", {"X", "Y"}),
             make_paper("q3", {"X", "Y"})],
            ["X", "Y"])
        g = build_graph(corpus, EdgeWeightConfig(), FallbackEmbedder(dim=16))
        return g

    def test_counting_oracle(self):
        view = build_metric_graph_view({"X", "Y"}, self.small_graph())
        counts = {n["metric"]: n["usage_count"] for n in view.nodes}
        assert counts == {"X": 3, "Y": 2}
        (edge,) = view.edges
        assert edge["cooccurrence_count"] == 2

    def test_disjoint_metrics_no_edge(self, graph):
        view = build_metric_graph_view({"self-disclosure", "error rate"}, graph)
        assert view.edges == []

    def test_cooccurrence_bounded_by_usage(self, graph):
        view = build_metric_graph_view(set(graph.metric_nodes), graph)
        counts = {n["metric"]: n["usage_count"] for n in view.nodes}
        assert view.edges, "fixture corpus has co-measured metrics"
        for e in view.edges:
            assert 1 <= e["cooccurrence_count"] \
                <= min(counts[e["metric_a"]], counts[e["metric_b"]])

    def test_usage_counts_match_brute_force(self, graph):
        view = build_metric_graph_view(set(graph.metric_nodes), graph)
        for node in view.nodes:
            expected = sum(1 for p in graph.papers.values()
                           if node["metric"] in p.metrics)
            assert node["usage_count"] == expected


class TestIndexes:
    def test_paper_index_covers_corpus(self, graph, paper_index):
        assert sorted(paper_index.keys) == sorted(graph.papers)

    def test_incident_index_covers_incidents(self, corpus, provider):
        index = build_incident_index(corpus.incidents, provider)
        assert sorted(index.keys) == sorted(i.id for i in corpus.incidents)


class TestRunPipeline:
    @pytest.fixture
    def components(self, corpus, graph, paper_index, provider):
        from uxrec.recommend import PipelineComponents

        script = json.loads((FIXTURES / "mock_scripts" / "pipeline.json").read_text())
        return PipelineComponents(
            corpus=corpus, graph=graph, provider=provider, paper_index=paper_index,
            incident_index=build_incident_index(corpus.incidents, provider),
            client=MockChatClient(script))

    def test_composes_all_stages(self, components):
        from sarah_flow import SARAH_PROJECT
        from uxrec.recommend import run_pipeline

        result = run_pipeline(SARAH_DESCRIPTION, SARAH_PROJECT["initial_plan"],
                              components)
        assert result.recommendation.names
        assert result.outcomes
        assert result.risks and all(r["source_url"] for r in result.risks)
        for name in result.recommendation.names:
            assert name in result.plan.text
        assert result.ux_outcome.provenance["risks"]
        assert result.diff_history == []

    def test_edited_indexes_produce_diff(self, components):
        from sarah_flow import INDEX_EDIT, SARAH_PROJECT
        from uxrec.recommend import run_pipeline

        first = run_pipeline(SARAH_DESCRIPTION, SARAH_PROJECT["initial_plan"],
                             components)
        second = run_pipeline(SARAH_DESCRIPTION, SARAH_PROJECT["initial_plan"],
                              components,
                              edited_indexes=IndexSet.from_dict(INDEX_EDIT),
                              prior_metrics=set(first.recommendation.names))
        (diff,) = second.diff_history
        assert diff.added | diff.retained == frozenset(second.recommendation.names)
        assert diff.retained | diff.removed == frozenset(first.recommendation.names)

    def test_stage_errors_carry_stage_name(self, components):
        import dataclasses

        from uxrec.errors import StageFailed
        from uxrec.recommend import run_pipeline

        broken = dataclasses.replace(components, client=MockChatClient({}))
        with pytest.raises(StageFailed) as err:
            run_pipeline(SARAH_DESCRIPTION, "", broken)
        assert err.value.stage == "GenerateIndexes"
