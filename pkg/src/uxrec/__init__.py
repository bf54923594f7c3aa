"""Knowledge-graph-backed recommendation of UX evaluation metrics.

The package turns an annotated corpus of research papers into a weighted
knowledge graph with Louvain communities, retrieves the community of the
paper nearest to a described project, narrows that community's metrics
with an LLM filter, and surfaces prior outcomes plus incident-grounded
risks on the way to a generated evaluation plan.
"""

__version__ = "0.1.0"

from . import corpus, embed, evalharness, graph, llm, recommend, stats  # noqa: F401
from .corpus import (  # noqa: F401
    Corpus,
    IndexSet,
    MetricRecord,
    MetricRepository,
    PaperRecord,
    canonicalize_metric,
    format_metric_usage,
    load_corpus,
    parse_metric_usage,
    save_corpus,
)
from .embed import FallbackEmbedder, VectorIndex, cosine_similarity, euclidean_distance  # noqa: F401
from .graph import (  # noqa: F401
    CommunityAssignment,
    EdgeKind,
    EdgeWeightConfig,
    KnowledgeGraph,
    build_graph,
    community_metrics,
    compute_edge_weight,
    detect_communities,
    modularity,
)
from .llm import MockChatClient, stage_key  # noqa: F401
from .recommend import diff_metrics, outcomes_for, recommend_metrics, risks_for  # noqa: F401
