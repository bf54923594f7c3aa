"""Acceptance gate: one test per criterion, each printing a pass line
with its runtime. Tolerances are pinned here and nowhere else.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.
"""

import json
import random
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

import sarah_flow
from test_graph import (
    brute_force_edges,
    load_fixture_corpus,
    make_corpus,
    make_paper,
    max_modularity_partition,
    planted_two_cliques_corpus,
    random_corpus,
)
from uxrec.corpus import (
    AuditReason,
    IndexSet,
    MetricRecord,
    MetricRepository,
    annotate_paper,
)
from uxrec.embed import FallbackEmbedder, VectorIndex, cosine_similarity
from uxrec.errors import MockScriptMiss
from uxrec.evalharness import EvalSample, ScoreTriple, paired_t_test, run_benchmark, score
from uxrec.graph import EdgeKind, EdgeWeightConfig, build_graph, detect_communities, modularity
from uxrec.llm import MockChatClient, filter_metrics, stage_key
from uxrec.recommend import build_incident_index, risks_for

FIXTURES = Path(__file__).parent / "fixtures"

# frozen output of tests/oracles/ttest_oracle.py (mpmath, 50 digits)
PAIRED_A = [72.0, 68.0, 75.0, 80.0, 66.0, 77.0, 71.0, 69.0, 74.0, 78.0]
PAIRED_B = [70.0, 65.0, 76.0, 78.0, 64.0, 75.0, 70.0, 68.0, 71.0, 75.0]
PAIRED_T = 4.6304617988477386092
PAIRED_P = 0.0012358639645822780569


class _timer:
    def __init__(self, name, budget):
        self.name = name
        self.budget = budget

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        status = "PASS" if exc_type is None else "FAIL"
        print(f"[{status}] {self.name} ({elapsed:.2f}s, budget {self.budget:.0f}s)")
        if exc_type is None:
            assert elapsed < self.budget, \
                f"{self.name} exceeded runtime budget: {elapsed:.2f}s"


def test_louvain_correctness():
    with _timer("louvain-correctness", 5.0):
        g = build_graph(planted_two_cliques_corpus(), EdgeWeightConfig(),
                        FallbackEmbedder(dim=16))
        result = detect_communities(g)
        planted = {pid: 0 if pid.startswith("c") else 1 for pid in g.papers}
        assert result.community_of == planted, "planted split not recovered"

        best_q, _ = max_modularity_partition(sorted(g.papers), g.folded_weights())
        assert abs(result.modularity - best_q) < 1e-9, \
            "detected modularity differs from the exhaustive all-partitions optimum"

        all_in_one = {pid: 0 for pid in g.papers}
        assert modularity(g, all_in_one) == 0.0, "all-in-one partition must score exactly 0"


def test_graph_construction():
    with _timer("graph-construction", 10.0):
        corpus = load_fixture_corpus()
        cfg = EdgeWeightConfig()
        provider = FallbackEmbedder(dim=64)
        g = build_graph(corpus, cfg, provider)
        got = {(e.a, e.b, e.kind.value): e.weight for e in g.paper_edges}
        expected = brute_force_edges(corpus, cfg, provider)
        assert got == expected, "edge multiset differs from brute-force reference"

        prop_provider = FallbackEmbedder(dim=16)
        for seed in range(100):
            rng = random.Random(seed)
            rc = random_corpus(rng, n_papers=rng.randint(3, 5))
            rg = build_graph(rc, cfg, prop_provider)
            papers = {p.id: p for p in rc.papers}
            cites = {(e.a, e.b): e.weight for e in rg.paper_edges
                     if e.kind is EdgeKind.CITES}
            cited_by = {(e.a, e.b): e.weight for e in rg.paper_edges
                        if e.kind is EdgeKind.CITED_BY}
            assert set(cited_by) == {(b, a) for a, b in cites}
            for (a, b), w in cites.items():
                assert cited_by[(b, a)] == w
            shared = {(e.a, e.b) for e in rg.paper_edges
                      if e.kind is EdgeKind.SHARED_METRIC}
            expected_shared = {
                tuple(sorted((x, y))) for x in papers for y in papers
                if x < y and papers[x].metrics & papers[y].metrics}
            assert shared == expected_shared


def test_retrieval_gates():
    with _timer("retrieval-gates", 1.0):
        # nearest-self cosine is exactly 1.0
        provider = FallbackEmbedder(dim=64)
        index = VectorIndex(64)
        stored = provider.embed("a counseling chatbot for recovery")
        index.add("self", stored)
        index.add("other", provider.embed("a spreadsheet tutor"))
        hit = index.nearest(stored, k=1)[0]
        assert hit.key == "self" and hit.score == 1.0

        # the distance gate: 0.45 in, 0.50 and 0.55 out, at most 3 results
        class Stub:
            dim = 2

            def __init__(self, table):
                self.table = table

            def embed(self, text):
                import numpy as np

                return np.asarray(self.table[text], dtype=float)

        table = {"q": [0.0, 0.0], "a": [0.45, 0.0], "b": [0.5, 0.0],
                 "c": [0.55, 0.0], "d": [0.1, 0.0], "e": [0.2, 0.0],
                 "f": [0.3, 0.0]}
        gate_index = VectorIndex(2)
        stub = Stub(table)
        for key in "abcdef":
            gate_index.add(key, stub.embed(key))
        hits = gate_index.within_distance(stub.embed("q"), threshold=0.5, k=3)
        assert [h.key for h in hits] == ["d", "e", "f"], \
            "gate must keep the three closest strictly inside 0.5"
        assert all(h.score < 0.5 for h in hits)
        in_range = gate_index.within_distance(stub.embed("q"), threshold=0.5, k=6)
        assert {h.key for h in in_range} == {"a", "d", "e", "f"}  # 0.45 in, 0.5/0.55 out

        # zero model calls when the gate is empty
        class FarIncident:
            def __init__(self, iid):
                self.id = iid
                self.system_description = iid
                self.risks = ["r"]
                self.source_url = "https://x"

        far_table = {"query": [0.0, 0.0], "i0": [0.9, 0.0], "i1": [1.5, 0.0]}
        far_stub = Stub(far_table)
        incidents = [FarIncident("i0"), FarIncident("i1")]
        incident_index = build_incident_index(incidents, far_stub)
        client = MockChatClient({})
        assert risks_for("query", incident_index, incidents, client, far_stub) == []
        assert client.calls == [], "empty gate must not reach the model"


def test_hallucination_guard():
    with _timer("hallucination-guard", 10.0):
        repo = MetricRepository([
            MetricRecord(f"metric {i}", "cat", "def",
                         aliases=(f"metric-{i} alias",)) for i in range(10)
        ])
        rng = random.Random(2024)
        all_names = [f"metric {i}" for i in range(10)]
        invented = ["transparency", "vibe quality", "metric 99", "made up"]
        for trial in range(50):
            candidates = sorted(rng.sample(all_names, rng.randint(2, 8)))
            reply = []
            for name in candidates:
                if rng.random() < 0.5:
                    reply.append(name if rng.random() < 0.5
                                 else name.replace("metric ", "metric-") + " alias")
            reply += rng.sample(invented, rng.randint(1, 3))
            out_of_cand = [n for n in all_names if n not in candidates]
            if out_of_cand:
                reply.append(rng.choice(out_of_cand))
            rng.shuffle(reply)
            payload = {"description": "d", "indexes": IndexSet().to_dict(),
                       "candidates": candidates}
            client = MockChatClient({stage_key("FilterMetrics", payload):
                                     json.dumps({"metrics": reply})})
            kept = filter_metrics(candidates, "d", IndexSet(), client, repo)
            assert set(kept) <= set(candidates), \
                f"guard leaked out-of-candidate names in trial {trial}"

        # seeded 15-paper audit fixture: taxonomy counts match exactly
        seeded_not_measured = 0
        seeded_out_of_list = 0
        got_not_measured = 0
        got_out_of_list = 0
        for i in range(15):
            text = f"paper body {i}"
            entries = [{"metric": f"metric {i % 10}", "method": "Survey",
                        "aspect": "a", "technology": "t", "finding": "f",
                        "measured": True}]
            if i % 3 == 0:  # 5 papers with a not-measured inference
                entries.append({"metric": f"metric {(i + 1) % 10}", "method": "Survey",
                                "aspect": "a", "technology": "t", "finding": "f",
                                "measured": False,
                                "not_measured_case": "InferredFromDescription"})
                seeded_not_measured += 1
            if i % 5 == 0:  # 3 papers with an out-of-list invention
                entries.append({"metric": f"invented {i}", "method": "Survey",
                                "aspect": "a", "technology": "t", "finding": "f",
                                "measured": True})
                seeded_out_of_list += 1
            script = {stage_key("AnnotatePaper", {"fulltext": text}): json.dumps({
                "narrative": "n", "challenges": "c", "indexes": {},
                "metrics": entries})}
            result = annotate_paper(text, repo, MockChatClient(script))
            for entry in result.audit:
                if entry.reason is AuditReason.NOT_MEASURED:
                    got_not_measured += 1
                else:
                    got_out_of_list += 1
            for extracted in result.extracted:
                assert extracted.metric in repo.names
        assert got_not_measured == seeded_not_measured == 5
        assert got_out_of_list == seeded_out_of_list == 3


def test_scoring_oracle():
    with _timer("scoring-oracle", 5.0):
        repo = MetricRepository([
            MetricRecord(n, "c", "d", aliases=(f"{n} alias",))
            for n in ("a", "b", "c", "d", "e")
        ])
        triple = score({"a", "b", "c", "d"}, {"a", "b", "e"}, repo)
        assert triple.precision == 0.5
        assert triple.recall == 2 / 3
        assert triple.f1 == 4 / 7

        # alias substitution leaves the triple unchanged
        assert score({"a alias", "b", "c alias", "d"}, {"a", "b alias", "e"}, repo) \
            == triple

        samples = [
            EvalSample("s1", "d", IndexSet(), {"a", "b", "e"}),
            EvalSample("s2", "d", IndexSet(), {"c"}),
        ]

        def recommender(sample):
            return {"s1": ["a", "b", "c", "d"], "s2": ["c"]}[sample.id]

        result = run_benchmark(samples, recommender, runs=3, repo=repo)
        s1 = score({"a", "b", "c", "d"}, {"a", "b", "e"}, repo)
        s2 = ScoreTriple(1.0, 1.0, 1.0)
        for component in ("precision", "recall", "f1"):
            hand = (getattr(s1, component) * 3 + getattr(s2, component) * 3) / 6
            assert abs(getattr(result.mean, component) - hand) < 1e-12

        ttest = paired_t_test(PAIRED_A, PAIRED_B)
        assert abs(ttest.t - PAIRED_T) < 1e-6
        assert abs(ttest.p - PAIRED_P) < 1e-6
        assert ttest.df == 9
        reverse = paired_t_test(PAIRED_B, PAIRED_A)
        assert ttest.t == pytest.approx(-reverse.t, rel=1e-12)


def _fresh_app(sessions_dir, script):
    from uxrec.llm import MockChatClient
    from uxrec.service import create_app, load_components, load_config

    config = load_config(FIXTURES / "service_config.json", environ={
        "UXREC_SESSIONS_DIR": json.dumps(str(sessions_dir))})
    components = load_components(config, client=MockChatClient(script))
    return create_app(components), components


def test_end_to_end_golden_run(tmp_path):
    with _timer("end-to-end-golden-run", 30.0):
        script = json.loads((FIXTURES / "mock_scripts" / "sarah.json").read_text())
        golden_json = (FIXTURES / "golden" / "export.json").read_bytes()
        golden_md = (FIXTURES / "golden" / "export.md").read_text()

        exports = []
        for run in range(2):
            app, _ = _fresh_app(tmp_path / f"run{run}", dict(script))
            with TestClient(app) as api:
                sid, export_json, export_md, diff = sarah_flow.drive(api)
            assert set(diff["added"]) == {"adherence", "goal attainment"}
            exports.append((sid, export_json, export_md))
            assert export_json == golden_json, f"run {run} diverged from golden export"
            assert export_md == golden_md

        # process-restart equivalence: a brand new app over the same session
        # store must serve the byte-identical artifact
        sid, _, _ = exports[0]
        app, _ = _fresh_app(tmp_path / "run0", dict(script))
        with TestClient(app) as api:
            r = api.get(f"/api/v1/projects/{sid}/export", params={"format": "json"})
        assert r.content == golden_json, "export changed across process restart"


def test_service_atomicity(tmp_path):
    with _timer("service-atomicity", 30.0):
        script = json.loads((FIXTURES / "mock_scripts" / "sarah.json").read_text())
        # fault injection: drop exactly the regenerate-time filter entry
        broken = dict(script)
        for key in list(broken):
            if key.startswith("FilterMetrics:"):
                if "goal attainment" in json.loads(broken[key])["metrics"]:
                    del broken[key]
        app, components = _fresh_app(tmp_path / "broken", broken)
        with TestClient(app) as api:
            r = api.post("/api/v1/projects", json=sarah_flow.SARAH_PROJECT)
            sid = r.json()["id"]
            api.put(f"/api/v1/projects/{sid}/indexes",
                    json={"indexes": sarah_flow.INDEX_EDIT})
            before = components.store.load(sid).to_dict()
            r = api.post(f"/api/v1/projects/{sid}/regenerate")
            assert r.status_code == 502
            after = components.store.load(sid).to_dict()
            assert after == before, "failed regenerate must not move the session"

        # concurrent mutations serialize with a contiguous revision block
        app, components = _fresh_app(tmp_path / "concurrent", dict(script))
        with TestClient(app) as api:
            r = api.post("/api/v1/projects", json=sarah_flow.SARAH_PROJECT)
            sid = r.json()["id"]
        metrics = ["trust", "engagement", "adherence", "accuracy", "learnability",
                   "error rate", "task success", "cognitive load", "self-disclosure",
                   "emotional support", "emotion awareness", "perceived usability",
                   "overall satisfaction", "goal attainment", "interaction experience",
                   "task completion time"]

        def add(metric):
            with TestClient(app) as local:
                resp = local.post(f"/api/v1/projects/{sid}/cart/{metric}")
                assert resp.status_code == 200, resp.text
                return resp.json()["revision"]

        with ThreadPoolExecutor(max_workers=8) as pool:
            revisions = list(pool.map(add, metrics))
        assert sorted(revisions) == list(range(2, 2 + len(metrics))), \
            "revisions must form a contiguous block with no skips or repeats"
        final = components.store.load(sid)
        assert final.revision == 1 + len(metrics)
