"""Node-level and graph-level structure metrics, plus the threshold sweep.

Distance-based metrics (eccentricity, closeness, betweenness, eigenvector
centrality) are defined on a connected undirected graph; the pipeline passes
the undirected largest connected component.  Cheap metrics work on anything.

All floating-point outputs are identical across thread counts: per-source
work is partitioned deterministically in the kernels and reduced in fixed
order here (see _kernels).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from . import _kernels
from .errors import DisconnectedGraphError, EmptyGraphError, UndefinedMetricError
from .graph import (
    DirectedGraph,
    EdgeIndex,
    UndirectedGraph,
    induced_subgraph,
    isolates,
    to_undirected,
    weak_components,
)
from .graph import build_subgraph
from .ingest import ActivityTable

#: exact betweenness is the default up to this many nodes; larger graphs
#: fall back to pivot sampling unless the caller forces a mode.
EXACT_BC_LIMIT = 20_000
DEFAULT_BC_PIVOTS = 256

METRICS_COLUMNS = "user_id,af,deg,in_deg,out_deg,znd,cc,ecc,bc,cc_close,ec,dc"
SWEEP_COLUMNS = (
    "threshold,n,m_directed,m_undirected,n_lcc,m_lcc,n_components,n_isolates,"
    "density_directed,density_undirected,avg_degree,avg_clustering,"
    "transitivity,assortativity,radius,diameter"
)


def density(g: DirectedGraph | UndirectedGraph) -> float:
    """Edge count over the maximum possible; directed and undirected differ by 2."""
    n = g.n
    if n < 2:
        raise UndefinedMetricError("density needs at least 2 nodes")
    if isinstance(g, UndirectedGraph):
        return 2.0 * g.m / (n * (n - 1))
    return g.m / (n * (n - 1))


def avg_neighbor_degree(g: UndirectedGraph) -> np.ndarray:
    """Mean degree over each node's neighborhood; 0 for isolated nodes."""
    deg = g.degree().astype(np.float64)
    sums = _kernels.csr_matvec(g.indptr, g.indices, deg, np.empty(g.n))
    out = np.zeros(g.n)
    np.divide(sums, deg, out=out, where=deg > 0)
    return out


def local_clustering(g: UndirectedGraph) -> np.ndarray:
    deg = g.degree().astype(np.int64)
    tri = _kernels.triangle_counts(g.indptr, g.indices)
    out = np.zeros(g.n)
    denom = deg * (deg - 1)
    np.divide(2.0 * tri, denom, out=out, where=denom > 0)
    return out


def avg_clustering(g: UndirectedGraph) -> float:
    if g.n == 0:
        return 0.0
    return float(np.mean(local_clustering(g)))


def transitivity(g: UndirectedGraph) -> float:
    """3 * triangles / connected triples (0 when there are no triples)."""
    deg = g.degree().astype(np.int64)
    triples = int(np.sum(deg * (deg - 1)) // 2)
    if triples == 0:
        return 0.0
    # sum of per-node triangle counts equals 3 * (number of triangles)
    tri_through = int(np.sum(_kernels.triangle_counts(g.indptr, g.indices)))
    return tri_through / triples


def degree_assortativity(g: UndirectedGraph) -> float:
    """Pearson correlation of end degrees over both orientations of each edge.

    Returns NaN — a deliberate not-a-value marker, never silently 0 — when the
    correlation is undefined (no edges, or zero degree variance as in a
    regular graph).
    """
    if g.m == 0:
        return math.nan
    deg = g.degree().astype(np.float64)
    xs = np.repeat(deg, np.diff(g.indptr))
    ys = deg[g.indices]
    vx = xs - xs.mean()
    vy = ys - ys.mean()
    sx = math.sqrt(float(vx @ vx))
    sy = math.sqrt(float(vy @ vy))
    if sx == 0.0 or sy == 0.0:
        return math.nan
    return float((vx @ vy) / (sx * sy))


def _bfs_all(g: UndirectedGraph, sources: np.ndarray | None = None):
    if sources is None:
        sources = np.arange(g.n, dtype=np.int64)
    return _kernels.bfs_sweep(g.indptr, g.indices, sources, _kernels.CTZ_TABLE)


def _require_connected(g: UndirectedGraph, reached: np.ndarray, what: str) -> None:
    if g.n and int(reached.min()) < g.n:
        raise DisconnectedGraphError(f"{what} requires a connected graph")


def eccentricity_all(g: UndirectedGraph) -> np.ndarray:
    """Max geodesic distance per node; errors on disconnected input."""
    ecc, _, reached = _bfs_all(g)
    _require_connected(g, reached, "eccentricity")
    return ecc.astype(np.int64)


def radius(g: UndirectedGraph) -> int:
    return int(eccentricity_all(g).min())


def diameter(g: UndirectedGraph) -> int:
    return int(eccentricity_all(g).max())


def closeness(g: UndirectedGraph) -> np.ndarray:
    """(n-1) / sum of distances to every other node."""
    _, dist_sum, reached = _bfs_all(g)
    _require_connected(g, reached, "closeness")
    if g.n < 2:
        return np.zeros(g.n)
    return (g.n - 1) / dist_sum.astype(np.float64)


def betweenness(
    g: UndirectedGraph,
    pivots: int | None = None,
    seed: int = 0,
    normalized: bool = True,
) -> np.ndarray:
    """Shortest-path betweenness, endpoints excluded.

    Exact over all sources by default; with `pivots` = K, dependencies are
    accumulated from K uniformly sampled sources and rescaled by n/K, an
    unbiased estimator of the exact value.  Normalization divides by the
    (n-1)(n-2)/2 unordered pairs; `normalized=False` returns the raw
    unordered-pair dependency sums.
    """
    n = g.n
    if n < 3:
        return np.zeros(n)
    if pivots is None or pivots >= n:
        sources = np.arange(n, dtype=np.int64)
        scale = 1.0
    else:
        if pivots < 1:
            raise ValueError("pivots must be >= 1")
        rng = np.random.default_rng(seed)
        sources = np.sort(rng.choice(n, size=pivots, replace=False)).astype(np.int64)
        scale = n / pivots
    nblocks = min(256, len(sources))
    partial = _kernels.brandes_partials(g.indptr, g.indices, sources, nblocks)
    dep = partial.sum(axis=0) * scale  # ordered-pair sums
    if normalized:
        return dep / ((n - 1) * (n - 2))
    return dep / 2.0


@dataclass(eq=False)
class EigenResult:
    vector: np.ndarray
    eigenvalue: float
    n_iter: int
    converged: bool


def eigenvector_centrality(
    g: UndirectedGraph, tol: float = 1e-10, max_iter: int = 1000
) -> EigenResult:
    """Principal eigenvector by damped power iteration, L2-normalized.

    The update blends the previous iterate with A x (x <- x + Ax/||Ax||,
    renormalized), which shifts the spectrum away from -lambda and so
    converges on bipartite graphs where plain power iteration oscillates.
    """
    n = g.n
    if n < 2:
        raise UndefinedMetricError("eigenvector centrality needs at least 2 nodes")
    if g.m == 0:
        raise UndefinedMetricError("eigenvector centrality needs at least one edge")
    x = np.full(n, 1.0 / math.sqrt(n))
    buf = np.empty(n)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        y = _kernels.csr_matvec(g.indptr, g.indices, x, buf)
        ny = float(np.linalg.norm(y))
        if ny == 0.0:
            raise UndefinedMetricError("power iteration hit the zero vector")
        z = x + y / ny
        z /= float(np.linalg.norm(z))
        diff = float(np.max(np.abs(z - x)))
        x = z.copy()
        if diff < tol:
            converged = True
            break
    lam = float(x @ _kernels.csr_matvec(g.indptr, g.indices, x, buf))
    if not converged:
        warnings.warn(
            f"eigenvector centrality did not converge in {max_iter} iterations",
            RuntimeWarning,
            stacklevel=2,
        )
    return EigenResult(vector=x, eigenvalue=lam, n_iter=it, converged=converged)


def degree_centrality(g: UndirectedGraph) -> np.ndarray:
    if g.n < 2:
        raise UndefinedMetricError("degree centrality needs at least 2 nodes")
    return g.degree() / (g.n - 1)


# ---------------------------------------------------------------------------
# Per-node bundle (computed on the undirected LCC)
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class NodeMetrics:
    """One row per node of the undirected LCC, aligned arrays."""

    ids: np.ndarray
    af: np.ndarray
    deg: np.ndarray
    in_deg: np.ndarray
    out_deg: np.ndarray
    znd: np.ndarray
    cc: np.ndarray
    ecc: np.ndarray
    bc: np.ndarray
    cc_close: np.ndarray
    ec: np.ndarray
    dc: np.ndarray
    eigenvalue: float = math.nan
    eigen_converged: bool = True
    bc_pivots: int | None = None

    @property
    def n(self) -> int:
        return len(self.ids)

    def columns(self) -> dict[str, np.ndarray]:
        return {
            "user_id": self.ids,
            "af": self.af,
            "deg": self.deg,
            "in_deg": self.in_deg,
            "out_deg": self.out_deg,
            "znd": self.znd,
            "cc": self.cc,
            "ecc": self.ecc,
            "bc": self.bc,
            "cc_close": self.cc_close,
            "ec": self.ec,
            "dc": self.dc,
        }


def compute_node_metrics(
    g: DirectedGraph,
    bc_pivots: int | None = None,
    bc_exact: bool = False,
    seed: int = 0,
    bc_normalized: bool = True,
) -> NodeMetrics:
    """All per-node metrics on the undirected largest connected component.

    Directed degrees come from the directed subgraph induced on the LCC.
    Betweenness is exact when the LCC is small (<= EXACT_BC_LIMIT nodes),
    `bc_exact` forces exactness, and otherwise falls back to sampled pivots.
    """
    gu_full = to_undirected(g)
    comp = weak_components(gu_full)
    lcc_nodes = comp.members(comp.largest) if comp.n_components > 1 else np.arange(g.n)
    gd = induced_subgraph(g, lcc_nodes) if comp.n_components > 1 else g
    gu = induced_subgraph(gu_full, lcc_nodes) if comp.n_components > 1 else gu_full
    n = gu.n

    deg = gu.degree().astype(np.int64)
    znd = avg_neighbor_degree(gu)
    cc = local_clustering(gu)
    if n >= 2:
        ecc_arr, dist_sum, reached = _bfs_all(gu)
        _require_connected(gu, reached, "eccentricity")
        ecc = ecc_arr.astype(np.int64)
        close = (n - 1) / dist_sum.astype(np.float64)
        dc = deg / (n - 1)
        eig = eigenvector_centrality(gu)
        ec, lam, eig_ok = eig.vector, eig.eigenvalue, eig.converged
    else:
        ecc = np.zeros(n, dtype=np.int64)
        close = np.zeros(n)
        dc = np.zeros(n)
        ec, lam, eig_ok = np.ones(n), 0.0, True

    if bc_exact:
        pivots = None
    elif bc_pivots is not None:
        pivots = bc_pivots
    elif n > EXACT_BC_LIMIT:
        pivots = DEFAULT_BC_PIVOTS
        warnings.warn(
            f"graph has {n} nodes; using {pivots} betweenness pivots "
            "(pass bc_exact=True to force the exact computation)",
            RuntimeWarning,
            stacklevel=2,
        )
    else:
        pivots = None
    bc = betweenness(gu, pivots=pivots, seed=seed, normalized=bc_normalized)

    return NodeMetrics(
        ids=gu.ids,
        af=gu.activity.astype(np.int64),
        deg=deg,
        in_deg=gd.in_degree().astype(np.int64),
        out_deg=gd.out_degree().astype(np.int64),
        znd=znd,
        cc=cc,
        ecc=ecc,
        bc=bc,
        cc_close=close,
        ec=ec,
        dc=dc,
        eigenvalue=lam,
        eigen_converged=eig_ok,
        bc_pivots=pivots,
    )


# ---------------------------------------------------------------------------
# Graph summary and the threshold sweep
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class GraphSummary:
    threshold: int
    n: int = 0
    m_directed: int = 0
    m_undirected: int = 0
    n_lcc: int = 0
    m_lcc: int = 0
    n_components: int = 0
    n_isolates: int = 0
    density_directed: float = math.nan
    density_undirected: float = math.nan
    avg_degree: float = math.nan
    avg_clustering: float = math.nan
    transitivity: float = math.nan
    assortativity: float = math.nan
    radius: int = 0
    diameter: int = 0

    @property
    def is_empty(self) -> bool:
        return self.n == 0


def summarize(g: DirectedGraph, threshold: int) -> GraphSummary:
    gu = to_undirected(g)
    comp = weak_components(gu)
    lcc = induced_subgraph(gu, comp.members(comp.largest))
    n = g.n
    out = GraphSummary(
        threshold=threshold,
        n=n,
        m_directed=g.m,
        m_undirected=gu.m,
        n_lcc=lcc.n,
        m_lcc=lcc.m,
        n_components=comp.n_components,
        n_isolates=len(isolates(gu)),
        avg_clustering=avg_clustering(gu),
        transitivity=transitivity(gu),
        assortativity=degree_assortativity(gu),
    )
    if n >= 2:
        out.density_directed = density(g)
        out.density_undirected = density(gu)
        out.avg_degree = 2.0 * gu.m / n
    elif n == 1:
        out.avg_degree = 0.0
    if lcc.n >= 2:
        ecc, _, reached = _bfs_all(lcc)
        _require_connected(lcc, reached, "eccentricity")
        out.radius = int(ecc.min())
        out.diameter = int(ecc.max())
    return out


def threshold_sweep(
    edges: EdgeIndex | Iterable,
    activity: ActivityTable | None,
    thresholds: list[int],
) -> list[GraphSummary]:
    """One GraphSummary per threshold; empty subgraphs yield an n=0 row.

    Thresholds must be ascending and positive.  Expensive per-node metrics
    are not part of the sweep; radius/diameter are computed on the LCC only.
    """
    if not thresholds:
        raise ValueError("no thresholds given")
    if any(t < 1 for t in thresholds) or any(
        b <= a for a, b in zip(thresholds, thresholds[1:])
    ):
        raise ValueError("thresholds must be ascending positive integers")
    if not isinstance(edges, EdgeIndex):
        if activity is None:
            raise ValueError("activity table required when edges are raw records")
        from .graph import prepare_edges

        edges = prepare_edges(edges, activity)
    rows = []
    for t in thresholds:
        try:
            g = build_subgraph(edges, threshold=t)
        except EmptyGraphError:
            rows.append(GraphSummary(threshold=t))
            continue
        rows.append(summarize(g, t))
    return rows


# ---------------------------------------------------------------------------
# Delimited output (UTF-8, LF, fixed column order, repr floats)
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_metrics_csv(nm: NodeMetrics, path: str | Path) -> None:
    cols = nm.columns()
    names = METRICS_COLUMNS.split(",")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(METRICS_COLUMNS + "\n")
        for i in range(nm.n):
            fh.write(
                ",".join(
                    str(cols[name][i]) if name == "user_id" else _fmt(cols[name][i])
                    for name in names
                )
                + "\n"
            )


def read_metrics_csv(path: str | Path) -> dict[str, np.ndarray]:
    """Load a metrics CSV back into typed column arrays."""
    int_cols = {"af", "deg", "in_deg", "out_deg", "ecc"}
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\r\n")
        if header != METRICS_COLUMNS:
            raise ValueError(f"{path}: unexpected metrics header {header!r}")
        names = header.split(",")
        raw: list[list[str]] = [[] for _ in names]
        for line in fh:
            line = line.rstrip("\r\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(names):
                raise ValueError(f"{path}: bad row {line!r}")
            for acc, val in zip(raw, parts):
                acc.append(val)
    out: dict[str, np.ndarray] = {}
    for name, vals in zip(names, raw):
        if name == "user_id":
            out[name] = np.array(vals, dtype=str)
        elif name in int_cols:
            out[name] = np.array(vals, dtype=np.int64)
        else:
            out[name] = np.array(vals, dtype=np.float64)
    return out


def write_sweep_csv(rows: list[GraphSummary], path: str | Path) -> None:
    names = SWEEP_COLUMNS.split(",")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SWEEP_COLUMNS + "\n")
        for row in rows:
            fh.write(",".join(_fmt(getattr(row, name)) for name in names) + "\n")
