"""Prompt-stage orchestration over a pluggable chat-completion client.

Stages render a named template, dispatch it, and parse structured JSON
output with a single reformat retry. Every filtering stage guards its
output against the candidate input: a model cannot introduce items, only
select from what it was given.

The mock client replays a script keyed by ``<stage>:<sha256 of canonical
input>`` and fails loudly on unknown keys, which keeps every pipeline run
bit-deterministic in tests.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Protocol

import httpx

from .corpus import IndexSet, MetricRepository
from .errors import (
    LlmUnavailable,
    MockScriptMiss,
    UnparseableLlmOutput,
    ValidationError,
)

log = logging.getLogger(__name__)

STAGES = (
    "GenerateIndexes",
    "SuggestIndexValues",
    "FilterMetrics",
    "FilterRisks",
    "GeneratePlan",
    "GenerateUxOutcome",
    "AnnotatePaper",
)

PROMPTS_VERSION = "1"

DEFAULT_TEMPERATURE = 0.7

_REFORMAT_PROMPT = (
    "Your previous reply could not be parsed as JSON. Reply again with only "
    "a valid JSON document, no prose, no code fences.\n\nPrevious reply:\n{raw}"
)


def canonical_payload(payload: dict) -> str:
    """Stable serialization of a stage input; the digest of this string
    keys mock scripts."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def stage_key(stage: str, payload: dict) -> str:
    digest = hashlib.sha256(canonical_payload(payload).encode("utf-8")).hexdigest()
    return f"{stage}:{digest}"


class ChatClient(Protocol):
    def complete(self, stage: str, payload: dict, prompt: str) -> str: ...


@dataclass
class CallRecord:
    stage: str
    key: str


class MockChatClient:
    """Deterministic scripted client for tests and offline runs."""

    def __init__(self, script: dict[str, str]):
        self.script = dict(script)
        self.calls: list[CallRecord] = []

    @classmethod
    def from_file(cls, path: str | Path) -> "MockChatClient":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    def complete(self, stage: str, payload: dict, prompt: str) -> str:
        key = stage_key(stage, payload)
        self.calls.append(CallRecord(stage, key))
        if key not in self.script:
            raise MockScriptMiss(key, self.script)
        return self.script[key]


class FailingChatClient:
    """Always raises; used for fault-injection tests."""

    def __init__(self, exc: Exception | None = None):
        self.exc = exc or LlmUnavailable("injected failure")
        self.calls: list[CallRecord] = []

    def complete(self, stage: str, payload: dict, prompt: str) -> str:
        self.calls.append(CallRecord(stage, stage_key(stage, payload)))
        raise self.exc


class HttpChatClient:
    """Chat-completions-style JSON POST client."""

    def __init__(self, endpoint: str, model: str, temperature: float = DEFAULT_TEMPERATURE,
                 api_key: str | None = None, max_retries: int = 2, timeout: float = 60.0,
                 transport: httpx.BaseTransport | None = None):
        self.endpoint = endpoint
        self.model = model
        self.temperature = temperature
        self.max_retries = max_retries
        self.calls: list[CallRecord] = []
        self._headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def complete(self, stage: str, payload: dict, prompt: str) -> str:
        self.calls.append(CallRecord(stage, stage_key(stage, payload)))
        body = {
            "model": self.model,
            "temperature": self.temperature,
            "messages": [{"role": "user", "content": prompt}],
        }
        try:
            resp = self._client.post(self.endpoint, json=body, headers=self._headers)
            resp.raise_for_status()
            return resp.json()["choices"][0]["message"]["content"]
        except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
            raise LlmUnavailable(f"chat request failed: {exc}") from exc


class ThrottledClient:
    """Bounds concurrent outbound calls with a shared semaphore."""

    def __init__(self, inner, max_inflight: int):
        self._inner = inner
        self._sem = threading.Semaphore(max_inflight)

    @property
    def calls(self):
        return self._inner.calls

    def complete(self, stage: str, payload: dict, prompt: str) -> str:
        with self._sem:
            return self._inner.complete(stage, payload, prompt)


def client_from_config(cfg: dict, environ: dict | None = None):
    import os

    environ = os.environ if environ is None else environ
    kind = cfg.get("kind", "mock")
    if kind == "mock":
        return MockChatClient.from_file(cfg["script"])
    if kind == "http":
        api_key = environ.get(cfg["api_key_env"]) if cfg.get("api_key_env") else None
        return HttpChatClient(
            endpoint=cfg["endpoint"],
            model=cfg.get("model", ""),
            temperature=float(cfg.get("temperature", DEFAULT_TEMPERATURE)),
            api_key=api_key,
            max_retries=int(cfg.get("max_retries", 2)),
            timeout=float(cfg.get("timeout", 60.0)),
        )
    raise ValueError(f"unknown chat client kind {kind!r}")


# templates ---------------------------------------------------------------

def load_template(stage: str, override_dir: str | Path | None = None) -> str:
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}")
    if override_dir is not None:
        candidate = Path(override_dir) / f"{stage}.txt"
        if candidate.exists():
            return candidate.read_text(encoding="utf-8")
    return resources.files("uxrec.prompts").joinpath(f"{stage}.txt").read_text(encoding="utf-8")


def _display(value) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value, indent=2, sort_keys=True, ensure_ascii=False)


def render_prompt(stage: str, payload: dict, override_dir=None) -> str:
    template = load_template(stage, override_dir)
    try:
        return template.format(**{k: _display(v) for k, v in payload.items()})
    except KeyError as exc:
        raise ValueError(f"template for {stage} references unfilled placeholder {exc}")


def _extract_json(raw: str):
    text = raw.strip()
    if text.startswith("```"):
        text = text.strip("`")
        if text.startswith("json"):
            text = text[4:]
        text = text.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    # last resort: widest braces/brackets span
    for opener, closer in (("{", "}"), ("[", "]")):
        start = text.find(opener)
        end = text.rfind(closer)
        if start != -1 and end > start:
            try:
                return json.loads(text[start:end + 1])
            except json.JSONDecodeError:
                continue
    raise UnparseableLlmOutput(f"model output is not JSON: {raw[:200]!r}")


def run_stage(client, stage: str, payload: dict, override_dir=None, max_retries: int = 2):
    """Dispatch one prompt stage and return parsed JSON output.

    One reformat retry on parse failure; transient transport failures
    retry up to max_retries total extra calls. Mock script misses are
    deterministic and never retried.
    """
    prompt = render_prompt(stage, payload, override_dir)
    budget = 1 + max(0, max_retries)
    attempt_payload, attempt_prompt = payload, prompt
    reformatted = False
    last_exc: Exception | None = None
    for _ in range(budget):
        try:
            raw = client.complete(stage, attempt_payload, attempt_prompt)
        except MockScriptMiss:
            raise
        except LlmUnavailable as exc:
            last_exc = exc
            continue
        try:
            return _extract_json(raw)
        except UnparseableLlmOutput as exc:
            if reformatted:
                raise
            reformatted = True
            last_exc = exc
            attempt_payload = {"reformat_of": stage_key(stage, payload), "raw": raw}
            attempt_prompt = _REFORMAT_PROMPT.format(raw=raw)
    if isinstance(last_exc, UnparseableLlmOutput):
        raise last_exc
    raise LlmUnavailable(f"stage {stage} failed after {budget} attempts") from last_exc


# stages ------------------------------------------------------------------

def generate_indexes(description: str, client, override_dir=None) -> IndexSet:
    """Map a project description onto the ten index categories."""
    if not description.strip():
        raise ValidationError("description must be non-empty")
    raw = run_stage(client, "GenerateIndexes", {"description": description}, override_dir)
    if not isinstance(raw, dict):
        raise UnparseableLlmOutput("index output must be a JSON object")
    return IndexSet.from_dict(raw, strict=False)


def suggest_index_values(current: IndexSet, description: str, client,
                         override_dir=None) -> IndexSet:
    """Up to three additional values per category, none duplicating the
    current selection (case-insensitive)."""
    payload = {"description": description, "current": current.to_dict()}
    raw = run_stage(client, "SuggestIndexValues", payload, override_dir)
    if not isinstance(raw, dict):
        raise UnparseableLlmOutput("suggestion output must be a JSON object")
    parsed = IndexSet.from_dict(raw, strict=False)
    out = {}
    for category in current.to_dict():
        have = {v.lower() for v in current.values(category)}
        fresh = []
        for value in parsed.values(category):
            if value.lower() in have:
                continue
            have.add(value.lower())
            fresh.append(value)
            if len(fresh) == 3:
                break
        out[category] = fresh
    return IndexSet.from_dict(out)


def filter_metrics(candidates, description: str, indexes: IndexSet, client,
                   repo: MetricRepository, override_dir=None) -> list[str]:
    """LLM-side narrowing of the candidate metrics.

    Hallucination guard: any returned name that does not canonicalize into
    the candidate set is dropped and logged. An empty result is a value.
    """
    candidates = sorted(candidates)
    if not candidates:
        raise ValidationError("candidates must be non-empty")
    payload = {
        "description": description,
        "indexes": indexes.to_dict(),
        "candidates": candidates,
    }
    raw = run_stage(client, "FilterMetrics", payload, override_dir)
    names = raw.get("metrics") if isinstance(raw, dict) else raw
    if not isinstance(names, list):
        raise UnparseableLlmOutput("metric filter output must be a list of names")
    candidate_set = set(candidates)
    kept: list[str] = []
    for name in names:
        canonical = repo.canonicalize(str(name))
        if canonical is None or canonical not in candidate_set:
            log.warning("guard dropped out-of-candidate metric %r", name)
            continue
        if canonical not in kept:
            kept.append(canonical)
    return kept


def filter_risks(candidate_risks: list[dict], description: str, client,
                 override_dir=None) -> list[dict]:
    """Keep the risks relevant to the description, each with a one-line
    rationale. Candidates carry {ref, risk, source_url, incident_id};
    unknown refs in the reply are dropped by the guard."""
    if not candidate_risks:
        return []
    payload = {
        "description": description,
        "candidates": [{"ref": c["ref"], "risk": c["risk"]} for c in candidate_risks],
    }
    raw = run_stage(client, "FilterRisks", payload, override_dir)
    entries = raw.get("risks") if isinstance(raw, dict) else raw
    if not isinstance(entries, list):
        raise UnparseableLlmOutput("risk filter output must be a list")
    by_ref = {c["ref"]: c for c in candidate_risks}
    kept = []
    seen = set()
    for entry in entries:
        ref = entry.get("ref") if isinstance(entry, dict) else None
        if ref not in by_ref or ref in seen:
            log.warning("guard dropped unknown risk ref %r", ref)
            continue
        seen.add(ref)
        cand = by_ref[ref]
        kept.append({
            "ref": ref,
            "risk": cand["risk"],
            "rationale": str(entry.get("rationale", "")),
            "source_url": cand["source_url"],
            "incident_id": cand["incident_id"],
        })
    return kept


@dataclass
class PlanResult:
    text: str
    warnings: list[str] = field(default_factory=list)


def generate_plan(description: str, selected_metrics: list[dict], initial_plan: str,
                  client, override_dir=None) -> PlanResult:
    """Produce the evaluation plan text.

    Postcondition check: every selected metric name appears verbatim in
    the plan. One corrective re-prompt; a persistent omission becomes a
    structured warning, not a failure.
    """
    if not selected_metrics:
        raise ValidationError("at least one selected metric is required")
    payload = {
        "description": description,
        "initial_plan": initial_plan,
        "metrics": selected_metrics,
    }
    raw = run_stage(client, "GeneratePlan", payload, override_dir)
    plan = raw.get("plan") if isinstance(raw, dict) else None
    if not isinstance(plan, str) or not plan.strip():
        raise UnparseableLlmOutput("plan output must carry a non-empty 'plan' string")

    names = [m["name"] for m in selected_metrics]
    missing = [n for n in names if n not in plan]
    warnings: list[str] = []
    if missing:
        retry_payload = dict(payload)
        retry_payload["missing"] = missing
        retry_payload["previous_plan"] = plan
        raw = run_stage(client, "GeneratePlan", retry_payload, override_dir)
        retry_plan = raw.get("plan") if isinstance(raw, dict) else None
        if isinstance(retry_plan, str) and retry_plan.strip():
            plan = retry_plan
        missing = [n for n in names if n not in plan]
        if missing:
            warnings.append(f"plan_missing_metrics: {', '.join(missing)}")
            log.warning("generated plan still omits metrics %r", missing)
    return PlanResult(text=plan, warnings=warnings)


@dataclass
class UxOutcome:
    text: str
    provenance: dict = field(default_factory=dict)


def generate_ux_outcome(description: str, selected_metrics: list[str],
                        selected_outcomes: list[dict], risks: list[dict], client,
                        override_dir=None) -> UxOutcome:
    """Write the expected-UX-outcome statement; the provenance block lists
    exactly which outcomes and risks informed it."""
    if not selected_metrics:
        raise ValidationError("at least one selected metric is required")
    payload = {
        "description": description,
        "metrics": sorted(selected_metrics),
        "outcomes": selected_outcomes,
        "risks": [r["risk"] for r in risks],
    }
    raw = run_stage(client, "GenerateUxOutcome", payload, override_dir)
    text = raw.get("ux_outcome") if isinstance(raw, dict) else None
    if not isinstance(text, str) or not text.strip():
        raise UnparseableLlmOutput("outcome output must carry a non-empty 'ux_outcome' string")
    return UxOutcome(
        text=text,
        provenance={
            "outcomes": [o.get("ref", "") for o in selected_outcomes],
            "risks": [r.get("incident_id", "") for r in risks],
        },
    )
