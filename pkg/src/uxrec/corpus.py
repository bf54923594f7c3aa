"""Corpus data model: papers, metrics, outcomes, incidents, indexes.

The corpus is file based. Three JSON files (papers, metrics, incidents)
are loaded into immutable-after-load records with all cross references
resolved against the metric repository. Citations pointing outside the
corpus are kept but flagged in the load report.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field, asdict
from enum import Enum
from pathlib import Path

from .errors import DanglingMetric, EmptyField, SchemaError, UnparseableLlmOutput

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

CATEGORIES = (
    "paradigms",
    "application_domain",
    "modality",
    "system_features",
    "design_novelty",
    "design_methods",
    "human_ai_relationship_types",
    "stakeholders",
    "social_scale",
    "theoretical_frameworks",
)

PARADIGM_VALUES = frozenset({"Dyadic", "Polyadic"})

METRIC_METHODS = ("Survey", "Interview", "SystemLog")


@dataclass
class IndexSet:
    """Values for the ten descriptive index categories.

    All ten categories are always present; a category may be empty.
    Paradigm values are restricted to the two interaction paradigms.
    """

    paradigms: list[str] = field(default_factory=list)
    application_domain: list[str] = field(default_factory=list)
    modality: list[str] = field(default_factory=list)
    system_features: list[str] = field(default_factory=list)
    design_novelty: list[str] = field(default_factory=list)
    design_methods: list[str] = field(default_factory=list)
    human_ai_relationship_types: list[str] = field(default_factory=list)
    stakeholders: list[str] = field(default_factory=list)
    social_scale: list[str] = field(default_factory=list)
    theoretical_frameworks: list[str] = field(default_factory=list)

    def __post_init__(self):
        bad = [v for v in self.paradigms if v not in PARADIGM_VALUES]
        if bad:
            raise SchemaError(f"invalid paradigm values {bad!r}", field="paradigms")

    @classmethod
    def from_dict(cls, raw: dict, strict: bool = True) -> "IndexSet":
        """Build from a category->values mapping.

        With strict=True unknown categories raise; otherwise they are
        dropped with a warning (the LLM-output path).
        """
        vals = {}
        for key, values in raw.items():
            if key not in CATEGORIES:
                if strict:
                    raise SchemaError(f"unknown index category {key!r}", field=key)
                log.warning("dropping unknown index category %r", key)
                continue
            if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
                raise SchemaError(f"category {key!r} must be a list of strings", field=key)
            vals[key] = list(values)
        if not strict:
            bad = [v for v in vals.get("paradigms", []) if v not in PARADIGM_VALUES]
            if bad:
                log.warning("dropping invalid paradigm values %r", bad)
                vals["paradigms"] = [v for v in vals["paradigms"] if v in PARADIGM_VALUES]
        return cls(**vals)

    def to_dict(self) -> dict:
        return {c: list(getattr(self, c)) for c in CATEGORIES}

    def values(self, category: str) -> list[str]:
        return list(getattr(self, category))

    def to_text(self) -> str:
        """Canonical one-line-per-category serialization used for embedding."""
        return "\n".join(f"{c}: {', '.join(getattr(self, c))}" for c in CATEGORIES)


@dataclass(frozen=True)
class MetricRecord:
    name: str
    category: str
    definition: str
    aliases: tuple[str, ...] = ()


def _norm_name(name: str) -> str:
    return " ".join(name.lower().split())


class MetricRepository:
    """Case/whitespace-insensitive lookup of canonical metric names.

    Aliases are explicit and human curated; each alias resolves to exactly
    one record. No fuzzy matching.
    """

    def __init__(self, records: list[MetricRecord]):
        self._by_norm: dict[str, MetricRecord] = {}
        self._alias_to_name: dict[str, str] = {}
        for rec in records:
            key = _norm_name(rec.name)
            if not key:
                raise SchemaError("metric name is empty", field="name")
            if key in self._by_norm:
                raise SchemaError(f"duplicate metric name {rec.name!r}", field="name")
            self._by_norm[key] = rec
        for rec in records:
            for alias in rec.aliases:
                akey = _norm_name(alias)
                if akey in self._by_norm:
                    raise SchemaError(
                        f"alias {alias!r} of {rec.name!r} collides with a metric name",
                        field="aliases",
                    )
                if akey in self._alias_to_name and self._alias_to_name[akey] != rec.name:
                    raise SchemaError(
                        f"alias {alias!r} maps to more than one metric", field="aliases"
                    )
                self._alias_to_name[akey] = rec.name

    def canonicalize(self, name: str) -> str | None:
        """Exact name match, else alias match; None when unknown."""
        key = _norm_name(name)
        rec = self._by_norm.get(key)
        if rec is not None:
            return rec.name
        return self._alias_to_name.get(key)

    def get(self, name: str) -> MetricRecord:
        canonical = self.canonicalize(name)
        if canonical is None:
            raise KeyError(name)
        return self._by_norm[_norm_name(canonical)]

    def __contains__(self, name: str) -> bool:
        return self.canonicalize(name) is not None

    def __len__(self) -> int:
        return len(self._by_norm)

    @property
    def names(self) -> list[str]:
        return sorted(rec.name for rec in self._by_norm.values())

    @property
    def records(self) -> list[MetricRecord]:
        return [self._by_norm[k] for k in sorted(self._by_norm)]


@dataclass
class OutcomeRecord:
    outcome_achieved: str
    paper_id: str
    citation_reason: str
    metric_method: str
    metric_usage: str
    metric_challenges: str
    # Derived at load time from metric_usage; not serialized.
    metric: str = ""

    def __post_init__(self):
        if self.metric_method not in METRIC_METHODS:
            raise SchemaError(
                f"metric_method must be one of {METRIC_METHODS}, got {self.metric_method!r}",
                field="metric_method",
            )


@dataclass
class PaperMetadata:
    authors: list[str] = field(default_factory=list)
    abstract: str = ""
    publication_date: str = ""
    cited_by: list[str] = field(default_factory=list)
    keywords: list[str] = field(default_factory=list)
    venue: str = ""
    publisher: str = ""
    affiliations: list[str] = field(default_factory=list)


@dataclass
class PaperRecord:
    id: str
    title: str
    narrative: str
    indexes: IndexSet
    metrics: set[str]
    outcomes: list[OutcomeRecord]
    cites: set[str]
    metadata: PaperMetadata = field(default_factory=PaperMetadata)

    def __post_init__(self):
        if self.id in self.cites:
            raise SchemaError(f"paper {self.id!r} cites itself", field="cites")


@dataclass
class IncidentRecord:
    id: str
    system_description: str
    risks: list[str]
    source_url: str

    def __post_init__(self):
        if not self.source_url:
            raise SchemaError(f"incident {self.id!r} has empty source_url", field="source_url")


@dataclass
class LoadReport:
    """Soft findings from a corpus load; hard violations raise instead."""

    dangling_citations: dict[str, list[str]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"dangling_citations": {k: list(v) for k, v in sorted(self.dangling_citations.items())}}


@dataclass
class Corpus:
    papers: list[PaperRecord]
    repo: MetricRepository
    incidents: list[IncidentRecord]
    report: LoadReport

    def paper(self, paper_id: str) -> PaperRecord:
        for p in self.papers:
            if p.id == paper_id:
                return p
        raise KeyError(paper_id)


def canonicalize_metric(name: str, repo: MetricRepository) -> str | None:
    """Resolve a metric name or alias to its canonical form; None when
    neither matches."""
    return repo.canonicalize(name)


# metric usage template -------------------------------------------------

_USAGE_TEMPLATE = (
    "This paper uses the {metric} metric to evaluate users' {aspect} "
    "towards {technology}. It was found that {finding}."
)

_USAGE_RE = re.compile(
    r"^This paper uses the (?P<metric>.+?) metric to evaluate users' "
    r"(?P<aspect>.+?) towards (?P<technology>.+?)\. "
    r"It was found that (?P<finding>.+)\.$",
    re.DOTALL,
)


def format_metric_usage(metric: str, aspect: str, technology: str, finding: str) -> str:
    """Render the fixed usage sentence pair from its four slots."""
    for label, value in (("metric", metric), ("aspect", aspect),
                         ("technology", technology), ("finding", finding)):
        if not value or not value.strip():
            raise EmptyField(f"usage field {label!r} is empty")
    return _USAGE_TEMPLATE.format(
        metric=metric, aspect=aspect, technology=technology, finding=finding
    )


def parse_metric_usage(usage: str) -> dict:
    """Invert format_metric_usage. Splits on the template markers, so a
    finding may itself contain periods."""
    m = _USAGE_RE.match(usage)
    if m is None:
        raise SchemaError("usage string does not match the usage template", field="metric_usage")
    return m.groupdict()


def _outcome_metric(paper_id: str, outcome: OutcomeRecord, paper_metrics: set[str],
                    repo: MetricRepository) -> str:
    """Resolve which of the paper's metrics an outcome belongs to.

    Template-formatted usages carry the metric in their first slot;
    otherwise fall back to scanning the usage text for one of the paper's
    metric names or aliases.
    """
    try:
        parsed = parse_metric_usage(outcome.metric_usage)
    except SchemaError:
        parsed = None
    if parsed is not None:
        canonical = repo.canonicalize(parsed["metric"])
        if canonical is not None and canonical in paper_metrics:
            return canonical
    text = _norm_name(outcome.metric_usage)
    for name in sorted(paper_metrics):
        rec = repo.get(name)
        for candidate in (rec.name, *rec.aliases):
            if _norm_name(candidate) in text:
                return name
    raise SchemaError(
        f"outcome of paper {paper_id!r} does not reference any of the paper's metrics",
        field="metric_usage",
    )


# loading / saving -------------------------------------------------------

def _read_json(path: str | Path, top_key: str) -> list:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise SchemaError("file not found", path=str(path))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}", path=str(path))
    if not isinstance(raw, dict) or raw.get("schema") != SCHEMA_VERSION:
        raise SchemaError(f'expected top-level {{"schema": {SCHEMA_VERSION}}}', path=str(path))
    body = raw.get(top_key)
    if not isinstance(body, list):
        raise SchemaError(f"expected a {top_key!r} array", path=str(path), field=top_key)
    return body


def _require(obj: dict, key: str, typ, path: str, where: str):
    if key not in obj:
        raise SchemaError(f"{where}: missing field {key!r}", path=path, field=key)
    value = obj[key]
    if not isinstance(value, typ):
        raise SchemaError(f"{where}: field {key!r} has wrong type", path=path, field=key)
    return value


def load_metrics(path: str | Path) -> MetricRepository:
    records = []
    for i, obj in enumerate(_read_json(path, "metrics")):
        where = f"metrics[{i}]"
        records.append(MetricRecord(
            name=_require(obj, "name", str, str(path), where),
            category=_require(obj, "category", str, str(path), where),
            definition=_require(obj, "definition", str, str(path), where),
            aliases=tuple(_require(obj, "aliases", list, str(path), where)) if "aliases" in obj else (),
        ))
    return MetricRepository(records)


def load_incidents(path: str | Path) -> list[IncidentRecord]:
    incidents = []
    seen = set()
    for i, obj in enumerate(_read_json(path, "incidents")):
        where = f"incidents[{i}]"
        rec = IncidentRecord(
            id=_require(obj, "id", str, str(path), where),
            system_description=_require(obj, "system_description", str, str(path), where),
            risks=list(_require(obj, "risks", list, str(path), where)),
            source_url=_require(obj, "source_url", str, str(path), where),
        )
        if rec.id in seen:
            raise SchemaError(f"duplicate incident id {rec.id!r}", path=str(path))
        seen.add(rec.id)
        incidents.append(rec)
    return incidents


def load_corpus(papers_path: str | Path, metrics_path: str | Path,
                incidents_path: str | Path) -> Corpus:
    """Load and cross-validate the three corpus files.

    Raises SchemaError / DanglingMetric on hard violations. Citations to
    ids outside the corpus are retained and flagged in the report.
    """
    repo = load_metrics(metrics_path)
    incidents = load_incidents(incidents_path)

    papers: list[PaperRecord] = []
    seen_ids: set[str] = set()
    for i, obj in enumerate(_read_json(papers_path, "papers")):
        where = f"papers[{i}]"
        pid = _require(obj, "id", str, str(papers_path), where)
        if pid in seen_ids:
            raise SchemaError(f"duplicate paper id {pid!r}", path=str(papers_path))
        seen_ids.add(pid)

        metric_names = _require(obj, "metrics", list, str(papers_path), where)
        canonical: set[str] = set()
        for name in metric_names:
            resolved = repo.canonicalize(name)
            if resolved is None:
                raise DanglingMetric(pid, name)
            canonical.add(resolved)

        outcomes = []
        for j, raw in enumerate(_require(obj, "outcomes", list, str(papers_path), where)):
            try:
                out = OutcomeRecord(
                    outcome_achieved=raw["outcome_achieved"],
                    paper_id=pid,
                    citation_reason=raw["citation_reason"],
                    metric_method=raw["metric_method"],
                    metric_usage=raw["metric_usage"],
                    metric_challenges=raw["metric_challenges"],
                )
            except KeyError as exc:
                raise SchemaError(f"{where}.outcomes[{j}]: missing field {exc}",
                                  path=str(papers_path))
            out.metric = _outcome_metric(pid, out, canonical, repo)
            outcomes.append(out)

        meta_raw = obj.get("metadata", {})
        metadata = PaperMetadata(
            authors=list(meta_raw.get("authors", [])),
            abstract=meta_raw.get("abstract", ""),
            publication_date=meta_raw.get("publication_date", ""),
            cited_by=list(meta_raw.get("cited_by", [])),
            keywords=list(meta_raw.get("keywords", [])),
            venue=meta_raw.get("venue", ""),
            publisher=meta_raw.get("publisher", ""),
            affiliations=list(meta_raw.get("affiliations", [])),
        )
        papers.append(PaperRecord(
            id=pid,
            title=_require(obj, "title", str, str(papers_path), where),
            narrative=_require(obj, "narrative", str, str(papers_path), where),
            indexes=IndexSet.from_dict(_require(obj, "indexes", dict, str(papers_path), where)),
            metrics=canonical,
            outcomes=outcomes,
            cites=set(_require(obj, "cites", list, str(papers_path), where)),
            metadata=metadata,
        ))

    report = LoadReport()
    known = {p.id for p in papers}
    for p in papers:
        dangling = sorted(set(p.cites) - known)
        dangling += sorted(set(p.metadata.cited_by) - known)
        if dangling:
            report.dangling_citations[p.id] = dangling

    return Corpus(papers=papers, repo=repo, incidents=incidents, report=report)


def _paper_to_dict(p: PaperRecord) -> dict:
    out = {
        "id": p.id,
        "title": p.title,
        "narrative": p.narrative,
        "indexes": p.indexes.to_dict(),
        "metrics": sorted(p.metrics),
        "outcomes": [
            {
                "outcome_achieved": o.outcome_achieved,
                "citation_reason": o.citation_reason,
                "metric_method": o.metric_method,
                "metric_usage": o.metric_usage,
                "metric_challenges": o.metric_challenges,
            }
            for o in p.outcomes
        ],
        "cites": sorted(p.cites),
        "metadata": asdict(p.metadata),
    }
    return out


def save_corpus(corpus: Corpus, out_dir: str | Path) -> dict[str, Path]:
    """Write papers/metrics/incidents files; load_corpus of the result
    reproduces the corpus (key order normalized)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "papers": out_dir / "papers.json",
        "metrics": out_dir / "metrics.json",
        "incidents": out_dir / "incidents.json",
    }
    docs = {
        "papers": {"schema": SCHEMA_VERSION,
                   "papers": [_paper_to_dict(p) for p in corpus.papers]},
        "metrics": {"schema": SCHEMA_VERSION,
                    "metrics": [
                        {"name": r.name, "category": r.category,
                         "definition": r.definition, "aliases": list(r.aliases)}
                        for r in corpus.repo.records
                    ]},
        "incidents": {"schema": SCHEMA_VERSION,
                      "incidents": [
                          {"id": r.id, "system_description": r.system_description,
                           "risks": list(r.risks), "source_url": r.source_url}
                          for r in corpus.incidents
                      ]},
    }
    for key, path in paths.items():
        path.write_text(json.dumps(docs[key], indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return paths


# LLM-assisted annotation ------------------------------------------------

class AuditReason(str, Enum):
    NOT_MEASURED = "NotMeasured"
    OUT_OF_CANDIDATE_LIST = "OutOfCandidateList"


class NotMeasuredCase(str, Enum):
    INFERRED_FROM_DESCRIPTION = "InferredFromDescription"
    SYNTHESIZED_FROM_RESULTS = "SynthesizedFromResults"
    RECOMMENDED_NOT_USED = "RecommendedNotUsed"


@dataclass(frozen=True)
class AuditEntry:
    metric: str
    reason: AuditReason
    not_measured_case: NotMeasuredCase | None = None


@dataclass(frozen=True)
class ExtractedMetric:
    metric: str
    method: str
    usage: str


@dataclass
class AnnotationResult:
    narrative: str
    challenges: str
    indexes: IndexSet
    extracted: list[ExtractedMetric]
    audit: list[AuditEntry]


def annotate_paper(fulltext: str, repo: MetricRepository, client) -> AnnotationResult:
    """Extract narrative, challenges, indexes and metric usages from a raw
    paper text via the chat client.

    Every extracted metric canonicalizes into the repository; entries that
    fail a check are dropped and recorded in the audit. An entry can fail
    both the measured check and the candidate-list check, yielding two
    audit entries.
    """
    from .llm import run_stage  # local import: llm depends on corpus types

    raw = run_stage(client, "AnnotatePaper", {"fulltext": fulltext})
    if not isinstance(raw, dict):
        raise UnparseableLlmOutput("annotation output must be a JSON object")

    indexes = IndexSet.from_dict(raw.get("indexes", {}), strict=False)
    extracted: list[ExtractedMetric] = []
    audit: list[AuditEntry] = []
    for entry in raw.get("metrics", []):
        name = entry.get("metric", "")
        keep = True
        if not entry.get("measured", True):
            case_raw = entry.get("not_measured_case")
            case = NotMeasuredCase(case_raw) if case_raw else None
            audit.append(AuditEntry(name, AuditReason.NOT_MEASURED, case))
            keep = False
        canonical = repo.canonicalize(name)
        if canonical is None:
            audit.append(AuditEntry(name, AuditReason.OUT_OF_CANDIDATE_LIST))
            keep = False
        if not keep:
            continue
        method = entry.get("method", "")
        if method not in METRIC_METHODS:
            log.warning("dropping extracted metric %r with invalid method %r", name, method)
            continue
        try:
            usage = format_metric_usage(
                canonical, entry.get("aspect", ""), entry.get("technology", ""),
                entry.get("finding", ""),
            )
        except EmptyField:
            log.warning("dropping extracted metric %r with incomplete usage slots", name)
            continue
        extracted.append(ExtractedMetric(metric=canonical, method=method, usage=usage))

    return AnnotationResult(
        narrative=raw.get("narrative", ""),
        challenges=raw.get("challenges", ""),
        indexes=indexes,
        extracted=extracted,
        audit=audit,
    )
