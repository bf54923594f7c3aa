"""Benchmark harness: per-sample precision/recall/F1 with alias
generalization, repeated runs with mean aggregation, and a paired t-test
between two recommenders."""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .corpus import IndexSet, MetricRepository
from .errors import (
    DegenerateSample,
    DegenerateVariance,
    EmptyTruth,
    LengthMismatch,
    SchemaError,
)
from .stats import student_t_two_sided_p

# Reference results from an earlier hosted-model benchmark run (40-sample
# private ground truth); rendered in reports for comparison, never
# asserted by tests.
REFERENCE_RESULTS = {
    "llm_baseline": (0.096, 0.203, 0.121),
    "graph_pipeline": (0.156, 0.304, 0.195),
}


@dataclass(frozen=True)
class ScoreTriple:
    precision: float
    recall: float
    f1: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.precision, self.recall, self.f1)


@dataclass
class EvalSample:
    id: str
    description: str
    indexes: IndexSet
    truth_metrics: set[str]

    def __post_init__(self):
        if not self.truth_metrics:
            raise EmptyTruth(f"sample {self.id!r} has no truth metrics")


def load_samples(path: str | Path, repo: MetricRepository) -> list[EvalSample]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict) or raw.get("schema") != 1:
        raise SchemaError('expected top-level {"schema": 1}', path=str(path))
    samples = []
    for obj in raw["samples"]:
        truth = set()
        for name in obj["truth_metrics"]:
            canonical = repo.canonicalize(name)
            if canonical is None:
                raise SchemaError(f"truth metric {name!r} not in repository",
                                  path=str(path), field="truth_metrics")
            truth.add(canonical)
        samples.append(EvalSample(
            id=obj["id"],
            description=obj["description"],
            indexes=IndexSet.from_dict(obj.get("indexes", {})),
            truth_metrics=truth,
        ))
    return samples


def _canonical_set(names: Iterable[str], repo: MetricRepository) -> set[str]:
    out = set()
    for name in names:
        canonical = repo.canonicalize(name)
        out.add(canonical if canonical is not None else name)
    return out


def score(predicted: Iterable[str], truth: Iterable[str],
          repo: MetricRepository) -> ScoreTriple:
    """Precision/recall/F1 after canonicalizing both sides.

    Empty predictions score precision 0 by convention. F1 is computed as
    2*hits/(|P|+|T|), the integer form of the harmonic mean, which is
    exact for hand-checked fixtures.
    """
    p = _canonical_set(predicted, repo)
    t = _canonical_set(truth, repo)
    if not t:
        raise EmptyTruth("truth set must be non-empty")
    hits = len(p & t)
    precision = hits / len(p) if p else 0.0
    recall = hits / len(t)
    f1 = 2.0 * hits / (len(p) + len(t))
    return ScoreTriple(precision=precision, recall=recall, f1=f1)


@dataclass
class RunScore:
    sample_id: str
    run: int
    triple: ScoreTriple


@dataclass
class BenchmarkResult:
    per_run: list[RunScore]
    mean: ScoreTriple
    errors: dict[str, str] = field(default_factory=dict)
    runs: int = 1

    def per_sample_means(self, component: str = "f1") -> dict[str, float]:
        """Mean of one score component per sample over its runs; the
        per-sample series feeding the paired t-test."""
        sums: dict[str, list[float]] = {}
        for rs in self.per_run:
            sums.setdefault(rs.sample_id, []).append(getattr(rs.triple, component))
        return {sid: sum(v) / len(v) for sid, v in sums.items()}


Recommender = Callable[[EvalSample], Iterable[str]]


def run_benchmark(samples: list[EvalSample], recommender: Recommender,
                  runs: int, repo: MetricRepository) -> BenchmarkResult:
    """Score every sample ``runs`` times and aggregate the unweighted mean
    over all retained sample-run pairs. Recommender errors exclude the
    sample and are reported, not raised."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    per_run: list[RunScore] = []
    errors: dict[str, str] = {}
    for sample in samples:
        for run in range(runs):
            if sample.id in errors:
                continue
            try:
                predicted = list(recommender(sample))
            except Exception as exc:  # recorded, sample excluded
                errors[sample.id] = f"{type(exc).__name__}: {exc}"
                per_run = [rs for rs in per_run if rs.sample_id != sample.id]
                continue
            per_run.append(RunScore(sample.id, run, score(predicted, sample.truth_metrics, repo)))
    if per_run:
        n = len(per_run)
        mean = ScoreTriple(
            precision=sum(rs.triple.precision for rs in per_run) / n,
            recall=sum(rs.triple.recall for rs in per_run) / n,
            f1=sum(rs.triple.f1 for rs in per_run) / n,
        )
    else:
        mean = ScoreTriple(0.0, 0.0, 0.0)
    return BenchmarkResult(per_run=per_run, mean=mean, errors=errors, runs=runs)


@dataclass(frozen=True)
class TTestResult:
    t: float
    p: float
    df: int


def paired_t_test(a: list[float], b: list[float]) -> TTestResult:
    """Two-sided paired t-test on elementwise differences.

    Raises DegenerateSample when all differences are zero and
    DegenerateVariance when the differences are equal but nonzero (the t
    statistic would be infinite).
    """
    if len(a) != len(b):
        raise LengthMismatch(f"series lengths differ: {len(a)} vs {len(b)}")
    n = len(a)
    if n < 2:
        raise LengthMismatch("paired t-test needs at least 2 pairs")
    diffs = [x - y for x, y in zip(a, b)]
    if all(d == 0.0 for d in diffs):
        raise DegenerateSample("all paired differences are zero")
    mean = sum(diffs) / n
    var = statistics.variance(diffs)  # sample variance, ddof=1
    if var == 0.0:
        raise DegenerateVariance("paired differences have zero variance")
    t = mean / math.sqrt(var / n)
    return TTestResult(t=t, p=student_t_two_sided_p(t, n - 1), df=n - 1)


# report rendering -----------------------------------------------------------

def render_report_json(results: dict[str, BenchmarkResult],
                       ttest: TTestResult | None = None) -> dict:
    doc = {
        "schema": 1,
        "reference": {name: {"precision": p, "recall": r, "f1": f}
                      for name, (p, r, f) in REFERENCE_RESULTS.items()},
        "results": {},
    }
    for name, res in sorted(results.items()):
        doc["results"][name] = {
            "runs": res.runs,
            "samples_scored": len({rs.sample_id for rs in res.per_run}),
            "mean": {"precision": res.mean.precision, "recall": res.mean.recall,
                     "f1": res.mean.f1},
            "errors": dict(sorted(res.errors.items())),
        }
    if ttest is not None:
        doc["paired_t_test"] = {"t": ttest.t, "p_two_sided": ttest.p, "df": ttest.df}
    return doc


def render_report_markdown(results: dict[str, BenchmarkResult],
                           ttest: TTestResult | None = None) -> str:
    lines = [
        "| Model | Mean Precision | Mean Recall | Mean F-1 Score |",
        "|---|---|---|---|",
    ]
    for name, res in sorted(results.items()):
        lines.append(f"| {name} | {res.mean.precision:.3f} | {res.mean.recall:.3f} "
                     f"| {res.mean.f1:.3f} |")
    for name, (p, r, f) in REFERENCE_RESULTS.items():
        lines.append(f"| {name} (reference) | {p:.3f} | {r:.3f} | {f:.3f} |")
    if ttest is not None:
        lines.append("")
        lines.append(f"Paired t-test (two-sided): t = {ttest.t:.4f}, "
                     f"p = {ttest.p:.4g}, df = {ttest.df}")
    lines.append("")
    lines.append("Reference rows report a prior hosted-model run on a private "
                 "ground-truth set; they are not reproducible offline.")
    return "\n".join(lines) + "\n"
