"""Batch analytics for activity-thresholded subgraphs of a follower network.

The package turns a raw tweet stream plus a follower edge list into directed
subgraphs of the users active above a threshold, computes structural and
per-node metrics on them, fits heavy-tailed distributions to activity and
degree samples, and regresses per-node activity on network position
(including a left-censored tobit).  See the `crisisnet` CLI for the batch
pipeline; everything is importable for programmatic use.
"""

__version__ = "0.1.0"

from .errors import (
    ConvergenceError,
    CrisisnetError,
    DegenerateSampleError,
    DisconnectedGraphError,
    EmptyGraphError,
    FitError,
    InputFormatError,
    InsufficientTailError,
    SingularDesignError,
    UndefinedMetricError,
)
from .graph import (
    DirectedGraph,
    UndirectedGraph,
    build_subgraph,
    largest_cc,
    load_graph,
    prepare_edges,
    save_graph,
    to_undirected,
    weak_components,
)
from .heavytail import TailSample, compare, fit_report, select_xmin
from .ingest import (
    ActivityTable,
    FilterSpec,
    compute_activity,
    filter_relevant,
    parse_edges,
    parse_tweets,
)
from .metrics import compute_node_metrics, summarize, threshold_sweep
from .regress import fit_polynomial, fit_tobit, prediction_band, select_model

__all__ = [
    "__version__",
    "ActivityTable",
    "ConvergenceError",
    "CrisisnetError",
    "DegenerateSampleError",
    "DirectedGraph",
    "DisconnectedGraphError",
    "EmptyGraphError",
    "FilterSpec",
    "FitError",
    "InputFormatError",
    "InsufficientTailError",
    "SingularDesignError",
    "TailSample",
    "UndefinedMetricError",
    "UndirectedGraph",
    "build_subgraph",
    "compare",
    "compute_activity",
    "compute_node_metrics",
    "filter_relevant",
    "fit_polynomial",
    "fit_report",
    "fit_tobit",
    "largest_cc",
    "load_graph",
    "parse_edges",
    "parse_tweets",
    "prediction_band",
    "prepare_edges",
    "save_graph",
    "select_model",
    "select_xmin",
    "summarize",
    "threshold_sweep",
    "to_undirected",
    "weak_components",
]
