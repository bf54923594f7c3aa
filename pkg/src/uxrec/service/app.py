"""Session-oriented HTTP API over the recommendation pipeline.

All state lives in the file-backed session store; corpus, graph, and
vector indexes are immutable shared components. Mutating handlers follow
one pattern: lock the session, re-read it from disk, do all fallible work,
then bump the revision and persist. A failure at any point leaves the
stored session exactly as it was.
"""

from __future__ import annotations

import hashlib
import threading
import uuid
from dataclasses import dataclass, field as dataclass_field

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from .. import __version__, llm, recommend
from ..corpus import Corpus, IndexSet, load_corpus
from ..embed import VectorIndex, provider_from_config
from ..errors import (
    EmptyCart,
    LlmUnavailable,
    NotFound,
    SchemaError,
    StageFailed,
    UnknownMetric,
    UnparseableLlmOutput,
    UxrecError,
    ValidationError,
)
from ..graph import EdgeWeightConfig, KnowledgeGraph, build_graph, detect_communities
from ..llm import PROMPTS_VERSION, ThrottledClient, client_from_config
from .config import AppConfig
from .sessions import ProjectSession
from .store import SessionStore

_STATUS_BY_CODE = {
    "validation_error": 400,
    "unknown_metric": 400,
    "not_found": 404,
    "empty_cart": 409,
    "llm_unavailable": 502,
    "mock_script_miss": 502,
    "unparseable_llm_output": 502,
    "stage_failed": 502,
}


@dataclass
class AppComponents:
    config: AppConfig
    corpus: Corpus
    graph: KnowledgeGraph
    provider: object
    paper_index: VectorIndex
    incident_index: VectorIndex
    client: object
    store: SessionStore
    risk_cache: dict = dataclass_field(default_factory=dict)
    risk_cache_lock: threading.Lock = dataclass_field(default_factory=threading.Lock)

    @property
    def versions(self) -> dict:
        return {"uxrec": __version__, "prompts": PROMPTS_VERSION,
                "export_schema": str(recommend.EXPORT_SCHEMA)}


def load_components(config: AppConfig, client=None) -> AppComponents:
    """Load the corpus and build every shared read-only component."""
    corpus = load_corpus(
        config.path(config.corpus["papers"]),
        config.path(config.corpus["metrics"]),
        config.path(config.corpus["incidents"]),
    )
    provider = provider_from_config(config.embedding)
    graph = build_graph(corpus, EdgeWeightConfig.from_dict(config.edge_weights), provider)
    graph.communities = detect_communities(graph)
    paper_index = recommend.build_paper_index(graph, provider)
    incident_index = recommend.build_incident_index(corpus.incidents, provider)
    if client is None:
        llm_cfg = dict(config.llm)
        if llm_cfg.get("kind") == "mock" and "script" in llm_cfg:
            llm_cfg["script"] = str(config.path(llm_cfg["script"]))
        client = client_from_config(llm_cfg)
    client = ThrottledClient(client, config.max_inflight_llm)
    store = SessionStore(config.path(config.sessions["dir"]))
    return AppComponents(config=config, corpus=corpus, graph=graph, provider=provider,
                         paper_index=paper_index, incident_index=incident_index,
                         client=client, store=store)


class CreateProject(BaseModel):
    name: str = ""
    statuses: list[str] = Field(default_factory=list)
    description: str = ""
    initial_plan: str = ""
    initial_outcome: str = ""


class UpdateIndexes(BaseModel):
    indexes: dict


class SelectOutcomes(BaseModel):
    refs: list[str]
    replace: bool = False


class AcceptRisks(BaseModel):
    refs: list[str]
    replace: bool = False


def create_app(components: AppComponents) -> FastAPI:
    app = FastAPI(title="uxrec", version=__version__)
    c = components

    static_dir = c.config.server.get("static_dir")
    if static_dir and c.config.path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/app", StaticFiles(directory=c.config.path(static_dir), html=True),
                  name="frontend")

    @app.exception_handler(UxrecError)
    async def uxrec_error_handler(request: Request, exc: UxrecError):
        body = {"code": exc.code, "message": str(exc)}
        if isinstance(exc, StageFailed):
            body["stage"] = exc.stage
            body["code"] = getattr(exc.cause, "code", exc.code)
        status = _STATUS_BY_CODE.get(body["code"], 500)
        return JSONResponse(status_code=status, content=body)

    def _recommend(session: ProjectSession) -> dict:
        rec = recommend.recommend_metrics(
            session.description, session.current_indexes, c.graph, c.paper_index,
            c.provider, c.client, c.corpus.repo, c.config.prompt_dir)
        return {
            "source_paper": rec.source_paper,
            "source_community": rec.source_community,
            "metrics": [
                {"name": m.name, "definition": m.definition, "methods": m.methods,
                 "usages": m.usages}
                for m in rec.metrics
            ],
        }

    def _risks(session: ProjectSession) -> list[dict]:
        key = hashlib.sha256(session.description.encode("utf-8")).hexdigest()
        with c.risk_cache_lock:
            if key in c.risk_cache:
                return c.risk_cache[key]
        risks = recommend.risks_for(
            session.description, c.incident_index, c.corpus.incidents, c.client,
            c.provider, float(c.config.risk["threshold"]), int(c.config.risk["top_k"]),
            c.config.prompt_dir)
        with c.risk_cache_lock:
            c.risk_cache[key] = risks
        return risks

    def _outcomes(session: ProjectSession) -> list[recommend.OutcomeItem]:
        return recommend.outcomes_for(set(session.cart), c.graph)

    def _cart_infos(session: ProjectSession) -> list[recommend.MetricInfo]:
        return recommend.metric_infos(sorted(session.cart), c.graph)

    # -- projects ---------------------------------------------------------

    @app.post("/api/v1/projects", status_code=201)
    def create_project(body: CreateProject):
        if not body.description.strip():
            raise ValidationError("description must be non-empty")
        session_id = uuid.uuid4().hex[:12]
        session = ProjectSession(
            id=session_id, name=body.name, statuses=body.statuses,
            description=body.description, initial_plan=body.initial_plan,
            initial_outcome=body.initial_outcome,
        )
        try:
            session.current_indexes = llm.generate_indexes(
                session.description, c.client, c.config.prompt_dir)
            session.current_recommendation = _recommend(session)
        except UxrecError as exc:
            raise StageFailed("create", exc) from exc
        session.revision = 1
        with c.store.lock(session_id):
            c.store.save(session)
        return session.to_dict()

    @app.get("/api/v1/projects")
    def list_projects():
        return {"projects": c.store.list_ids()}

    @app.get("/api/v1/projects/{session_id}")
    def get_project(session_id: str):
        return c.store.load(session_id).to_dict()

    # -- indexes and regeneration ------------------------------------------

    @app.get("/api/v1/projects/{session_id}/indexes/suggestions")
    def index_suggestions(session_id: str):
        session = c.store.load(session_id)
        suggestions = llm.suggest_index_values(
            session.current_indexes, session.description, c.client,
            c.config.prompt_dir)
        return {"suggestions": suggestions.to_dict()}

    @app.put("/api/v1/projects/{session_id}/indexes")
    def put_indexes(session_id: str, body: UpdateIndexes):
        try:
            edited = IndexSet.from_dict(body.indexes)
        except SchemaError as exc:
            raise ValidationError(str(exc)) from exc
        with c.store.lock(session_id):
            session = c.store.load(session_id)
            session.current_indexes = edited
            session.revision += 1
            c.store.save(session)
            return session.to_dict()

    @app.post("/api/v1/projects/{session_id}/regenerate")
    def regenerate(session_id: str):
        with c.store.lock(session_id):
            session = c.store.load(session_id)
            old = set(session.recommended_names())
            try:
                session.current_recommendation = _recommend(session)
            except UxrecError as exc:
                raise StageFailed("FilterMetrics", exc) from exc
            new = set(session.recommended_names())
            diff = recommend.diff_metrics(old, new)
            session.diff_history.append(diff.to_dict())
            session.revision += 1
            c.store.save(session)
            return {"recommendation": session.current_recommendation,
                    "diff": diff.to_dict(), "revision": session.revision}

    # -- metrics and cart ----------------------------------------------------

    @app.get("/api/v1/projects/{session_id}/metrics")
    def get_metrics(session_id: str):
        session = c.store.load(session_id)
        return {"recommendation": session.current_recommendation,
                "cart": sorted(session.cart)}

    @app.get("/api/v1/projects/{session_id}/metrics/graphview")
    def get_graphview(session_id: str):
        session = c.store.load(session_id)
        view = recommend.build_metric_graph_view(set(session.recommended_names()), c.graph)
        return view.to_dict()

    def _resolve_cart_metric(session: ProjectSession, metric: str) -> str:
        canonical = c.corpus.repo.canonicalize(metric)
        if canonical is None:
            raise UnknownMetric(f"unknown metric {metric!r}")
        if c.config.cart_scope == "recommendation":
            if canonical not in session.recommended_names():
                raise UnknownMetric(f"metric {canonical!r} is not in the current "
                                    "recommendation")
        elif canonical not in c.graph.metric_nodes:
            raise UnknownMetric(f"metric {canonical!r} is not measured by any corpus paper")
        return canonical

    @app.post("/api/v1/projects/{session_id}/cart/{metric}")
    def cart_add(session_id: str, metric: str):
        with c.store.lock(session_id):
            session = c.store.load(session_id)
            canonical = _resolve_cart_metric(session, metric)
            if canonical not in session.cart:
                session.cart.append(canonical)
            session.revision += 1
            c.store.save(session)
            return {"cart": sorted(session.cart), "revision": session.revision}

    @app.delete("/api/v1/projects/{session_id}/cart/{metric}")
    def cart_remove(session_id: str, metric: str):
        with c.store.lock(session_id):
            session = c.store.load(session_id)
            canonical = c.corpus.repo.canonicalize(metric) or metric
            session.cart = [m for m in session.cart if m != canonical]
            session.revision += 1
            c.store.save(session)
            return {"cart": sorted(session.cart), "revision": session.revision}

    # -- outcomes and risks ---------------------------------------------------

    @app.get("/api/v1/projects/{session_id}/outcomes")
    def get_outcomes(session_id: str):
        session = c.store.load(session_id)
        return {"outcomes": [o.to_dict() for o in _outcomes(session)],
                "selected": list(session.selected_outcomes)}

    @app.post("/api/v1/projects/{session_id}/outcomes/select")
    def select_outcomes(session_id: str, body: SelectOutcomes):
        with c.store.lock(session_id):
            session = c.store.load(session_id)
            served = {o.ref for o in _outcomes(session)}
            unknown = [r for r in body.refs if r not in served]
            if unknown:
                raise ValidationError(f"outcome refs not in the current outcome list: "
                                      f"{unknown}")
            if body.replace:
                session.selected_outcomes = list(dict.fromkeys(body.refs))
            else:
                for ref in body.refs:
                    if ref not in session.selected_outcomes:
                        session.selected_outcomes.append(ref)
            session.revision += 1
            c.store.save(session)
            return {"selected": list(session.selected_outcomes),
                    "revision": session.revision}

    @app.get("/api/v1/projects/{session_id}/risks")
    def get_risks(session_id: str):
        session = c.store.load(session_id)
        return {"risks": _risks(session), "accepted": list(session.accepted_risks)}

    @app.post("/api/v1/projects/{session_id}/risks/accept")
    def accept_risks(session_id: str, body: AcceptRisks):
        with c.store.lock(session_id):
            session = c.store.load(session_id)
            known = {r["ref"] for r in _risks(session)}
            unknown = [r for r in body.refs if r not in known]
            if unknown:
                raise ValidationError(f"risk refs not in the current risk list: {unknown}")
            if body.replace:
                session.accepted_risks = list(dict.fromkeys(body.refs))
            else:
                for ref in body.refs:
                    if ref not in session.accepted_risks:
                        session.accepted_risks.append(ref)
            session.revision += 1
            c.store.save(session)
            return {"accepted": list(session.accepted_risks),
                    "revision": session.revision}

    # -- generation and export -------------------------------------------------

    @app.post("/api/v1/projects/{session_id}/generate")
    def generate(session_id: str):
        with c.store.lock(session_id):
            session = c.store.load(session_id)
            if not session.cart:
                raise EmptyCart("the metric cart is empty")
            infos = _cart_infos(session)
            selected_outcomes = [o.to_dict() for o in _outcomes(session)
                                 if o.ref in set(session.selected_outcomes)]
            accepted = [r for r in _risks(session)
                        if r["ref"] in set(session.accepted_risks)]
            try:
                plan = llm.generate_plan(
                    session.description,
                    [{"name": m.name, "methods": m.methods, "usages": m.usages}
                     for m in infos],
                    session.initial_plan, c.client, c.config.prompt_dir)
                outcome = llm.generate_ux_outcome(
                    session.description, [m.name for m in infos], selected_outcomes,
                    accepted, c.client, c.config.prompt_dir)
            except UxrecError as exc:
                raise StageFailed("Generate", exc) from exc
            session.generated_plan = plan.text
            session.generated_plan_warnings = plan.warnings
            session.generated_ux_outcome = {"text": outcome.text,
                                            "provenance": outcome.provenance}
            session.revision += 1
            c.store.save(session)
            return {"plan": plan.text, "plan_warnings": plan.warnings,
                    "ux_outcome": session.generated_ux_outcome,
                    "revision": session.revision}

    @app.get("/api/v1/projects/{session_id}/export")
    def export(session_id: str, format: str = "json"):
        if format not in ("json", "markdown"):
            raise ValidationError(f"format must be json or markdown, got {format!r}")
        session = c.store.load(session_id)
        selected_outcomes = [o.to_dict() for o in _outcomes(session)
                             if o.ref in set(session.selected_outcomes)]
        accepted = [r for r in _risks(session) if r["ref"] in set(session.accepted_risks)]
        document = recommend.export_document(
            project={"name": session.name, "statuses": session.statuses,
                     "description": session.description,
                     "initial_plan": session.initial_plan,
                     "initial_outcome": session.initial_outcome},
            indexes=session.current_indexes,
            selected_metrics=_cart_infos(session),
            selected_outcomes=selected_outcomes,
            risks=accepted,
            plan=session.generated_plan,
            ux_outcome=session.generated_ux_outcome,
            diff_history=[recommend.MetricDiff(frozenset(d["added"]),
                                               frozenset(d["retained"]),
                                               frozenset(d["removed"]))
                          for d in session.diff_history],
            versions=c.versions,
        )
        if format == "json":
            return Response(content=recommend.export_json(document),
                            media_type="application/json")
        return PlainTextResponse(content=recommend.export_markdown(document),
                                 media_type="text/markdown")

    return app
