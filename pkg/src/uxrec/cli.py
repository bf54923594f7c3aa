"""Command line entry points: ingest, annotate, bench, serve."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__
from .corpus import annotate_paper, load_corpus, load_metrics
from .errors import UxrecError
from .evalharness import (
    load_samples,
    paired_t_test,
    render_report_json,
    render_report_markdown,
    run_benchmark,
)
from .graph import EdgeWeightConfig, build_graph, detect_communities, save_graph
from .llm import MockChatClient, client_from_config


@click.group()
@click.version_option(version=__version__)
def main():
    """Metric recommendation toolkit."""


@main.command()
@click.option("--papers", required=True, type=click.Path(exists=True))
@click.option("--metrics", required=True, type=click.Path(exists=True))
@click.option("--incidents", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--edge-config", type=click.Path(exists=True),
              help="JSON edge-weight config; defaults apply when omitted.")
def ingest(papers, metrics, incidents, out, edge_config):
    """Validate a corpus, build the knowledge graph, and write both plus
    the load report to OUT."""
    try:
        corpus = load_corpus(papers, metrics, incidents)
    except UxrecError as exc:
        raise click.ClickException(str(exc))
    cfg = EdgeWeightConfig.from_dict(
        json.loads(Path(edge_config).read_text()) if edge_config else {})
    from .embed import FallbackEmbedder

    provider = FallbackEmbedder()
    g = build_graph(corpus, cfg, provider)
    g.communities = detect_communities(g)

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    from .corpus import save_corpus

    save_corpus(corpus, out_dir)
    save_graph(g, out_dir / "graph.json", out_dir / "graph.dot")
    (out_dir / "load_report.json").write_text(
        json.dumps(corpus.report.to_dict(), indent=2, sort_keys=True) + "\n")
    click.echo(f"{len(corpus.papers)} papers, {len(corpus.repo)} metrics, "
               f"{len(corpus.incidents)} incidents")
    click.echo(f"graph: {len(g.paper_edges)} paper edges, "
               f"modularity {g.communities.modularity:.4f}")
    if corpus.report.dangling_citations:
        click.echo(f"dangling citations flagged for "
                   f"{len(corpus.report.dangling_citations)} papers "
                   f"(see load_report.json)")


def _client_from_spec(spec: str):
    if spec.startswith("mock:"):
        return MockChatClient.from_file(spec[len("mock:"):])
    raise click.ClickException(f"unsupported --llm spec {spec!r} "
                               "(use mock:<script.json> or a config file for http)")


@main.command()
@click.option("--fulltext", required=True, type=click.Path(exists=True))
@click.option("--metrics", required=True, type=click.Path(exists=True))
@click.option("--llm", "llm_spec", required=True, help="mock:<script.json>")
def annotate(fulltext, metrics, llm_spec):
    """Annotate one raw paper text into a structured record."""
    repo = load_metrics(metrics)
    client = _client_from_spec(llm_spec)
    try:
        result = annotate_paper(Path(fulltext).read_text(encoding="utf-8"), repo, client)
    except UxrecError as exc:
        raise click.ClickException(str(exc))
    click.echo(json.dumps({
        "narrative": result.narrative,
        "challenges": result.challenges,
        "indexes": result.indexes.to_dict(),
        "extracted": [{"metric": e.metric, "method": e.method, "usage": e.usage}
                      for e in result.extracted],
        "audit": [
            {"metric": a.metric, "reason": a.reason.value,
             "not_measured_case": a.not_measured_case.value if a.not_measured_case else None}
            for a in result.audit
        ],
    }, indent=2, sort_keys=True))


def _build_recommender(spec: str, config_path: str | None):
    """A recommender is sample -> predicted metric names."""
    if spec.startswith("mock:"):
        table = json.loads(Path(spec[len("mock:"):]).read_text(encoding="utf-8"))

        def scripted(sample):
            if sample.id not in table:
                raise KeyError(f"mock recommender has no entry for sample {sample.id!r}")
            return table[sample.id]

        return scripted, None
    if spec == "pipeline":
        if not config_path:
            raise click.ClickException("--recommender pipeline requires --config")
        from .recommend import recommend_metrics
        from .service import load_components, load_config

        components = load_components(load_config(config_path))

        def pipeline(sample):
            rec = recommend_metrics(
                sample.description, sample.indexes, components.graph,
                components.paper_index, components.provider, components.client,
                components.corpus.repo, components.config.prompt_dir)
            return rec.names

        return pipeline, components
    raise click.ClickException(f"unknown recommender spec {spec!r}")


@main.command()
@click.option("--samples", required=True, type=click.Path(exists=True))
@click.option("--metrics", "metrics_path", type=click.Path(exists=True),
              help="Metric repository for canonicalization; required with mock recommenders.")
@click.option("--recommender", "recommenders", multiple=True, required=True,
              help="pipeline or mock:<table.json>; twice to compare two recommenders.")
@click.option("--runs", default=3, show_default=True, type=int)
@click.option("--report", "report_path", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True))
def bench(samples, metrics_path, recommenders, runs, report_path, config_path):
    """Score recommenders on a sample file; with two recommenders a paired
    t-test over per-sample mean F1 is appended."""
    if len(recommenders) > 2:
        raise click.ClickException("at most two --recommender specs")
    repo = None
    results = {}
    built = [(spec, *_build_recommender(spec, config_path)) for spec in recommenders]
    for spec, _, components in built:
        if components is not None:
            repo = components.corpus.repo
    if repo is None:
        if not metrics_path:
            raise click.ClickException("--metrics is required when no pipeline "
                                       "recommender supplies a repository")
        repo = load_metrics(metrics_path)
    sample_list = load_samples(samples, repo)
    for spec, fn, _ in built:
        results[spec] = run_benchmark(sample_list, fn, runs, repo)

    ttest = None
    if len(built) == 2:
        a_means = results[built[0][0]].per_sample_means("f1")
        b_means = results[built[1][0]].per_sample_means("f1")
        shared = sorted(set(a_means) & set(b_means))
        try:
            ttest = paired_t_test([a_means[s] for s in shared],
                                  [b_means[s] for s in shared])
        except UxrecError as exc:
            click.echo(f"paired t-test skipped: {exc}", err=True)

    report = render_report_json(results, ttest)
    out = Path(report_path)
    out.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    out.with_suffix(".md").write_text(render_report_markdown(results, ttest))
    for spec, res in results.items():
        click.echo(f"{spec}: precision {res.mean.precision:.3f} "
                   f"recall {res.mean.recall:.3f} f1 {res.mean.f1:.3f} "
                   f"({len(res.errors)} errored samples)")
    if ttest is not None:
        click.echo(f"paired t-test: t={ttest.t:.4f} p={ttest.p:.4g} df={ttest.df}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def serve(config_path):
    """Run the HTTP API."""
    import uvicorn

    from .service import create_app, load_components, load_config

    config = load_config(config_path)
    app = create_app(load_components(config))
    uvicorn.run(app, host=config.server["host"], port=int(config.server["port"]))


if __name__ == "__main__":
    sys.exit(main())
