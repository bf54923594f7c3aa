"""Score two scripted recommenders on the bundled eval samples and compare
them with a paired t-test, mirroring the bench CLI.

    python3 demos/03_benchmark_and_ttest.py
"""

import json
from pathlib import Path

from uxrec.corpus import load_metrics
from uxrec.evalharness import (
    load_samples,
    paired_t_test,
    render_report_markdown,
    run_benchmark,
)

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

repo = load_metrics(FIXTURES / "corpus" / "metrics.json")
samples = load_samples(FIXTURES / "eval" / "samples.json", repo)
table = json.loads((FIXTURES / "eval" / "mock_recommender.json").read_text())

# a deliberately weaker comparison recommender
baseline_table = {"s1": ["trust"], "s2": [], "s3": ["learnability"], "s4": []}

results = {
    "scripted": run_benchmark(samples, lambda s: table[s.id], runs=3, repo=repo),
    "weak-baseline": run_benchmark(samples, lambda s: baseline_table[s.id], runs=3,
                                   repo=repo),
}
for name, res in results.items():
    print(f"{name:14s} precision {res.mean.precision:.3f}  "
          f"recall {res.mean.recall:.3f}  f1 {res.mean.f1:.3f}")

a = results["scripted"].per_sample_means("f1")
b = results["weak-baseline"].per_sample_means("f1")
shared = sorted(set(a) & set(b))
ttest = paired_t_test([a[s] for s in shared], [b[s] for s in shared])
print(f"\npaired t-test on per-sample mean F1: t = {ttest.t:.4f}, "
      f"p = {ttest.p:.4f}, df = {ttest.df}")

print("\nreport table:\n")
print(render_report_markdown(results, ttest))
