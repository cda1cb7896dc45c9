"""Activity-thresholded follow graphs in compressed sparse row form.

Edge direction throughout is followee -> follower (the direction content
travels).  Dense node indices are assigned in ascending external-id order, so
identical inputs always produce identical arrays, and the binary cache of a
graph is byte-for-byte reproducible.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import EmptyGraphError, InputFormatError
from .ingest import ActivityTable, EdgeRecord

_MAGIC = b"CNG1"
_VERSION = 1


@dataclass(eq=False)
class DirectedGraph:
    """Immutable directed graph: forward and reverse CSR over dense indices."""

    ids: np.ndarray        # external ids, ascending; dense index = position
    activity: np.ndarray   # AF per node, int64
    fwd_indptr: np.ndarray
    fwd_indices: np.ndarray
    rev_indptr: np.ndarray
    rev_indices: np.ndarray

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def m(self) -> int:
        return len(self.fwd_indices)

    def out_degree(self) -> np.ndarray:
        return np.diff(self.fwd_indptr)

    def in_degree(self) -> np.ndarray:
        return np.diff(self.rev_indptr)

    def index_of(self, external_id: str) -> int:
        i = int(np.searchsorted(self.ids, external_id))
        if i >= self.n or self.ids[i] != external_id:
            raise KeyError(external_id)
        return i

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(src, dst) dense-index arrays in forward CSR order."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.fwd_indptr))
        return src, self.fwd_indices.astype(np.int64)

    def __repr__(self) -> str:
        return f"DirectedGraph(n={self.n}, m={self.m})"


@dataclass(eq=False)
class UndirectedGraph:
    """Symmetric CSR view; reciprocal directed pairs collapse to one edge."""

    ids: np.ndarray
    activity: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def __repr__(self) -> str:
        return f"UndirectedGraph(n={self.n}, m={self.m})"


@dataclass(eq=False)
class ComponentLabeling:
    """Weak-component partition; labels are the smallest dense index per part."""

    labels: np.ndarray   # representative per node
    reps: np.ndarray     # sorted representatives, one per component
    sizes: np.ndarray    # aligned with reps
    largest: int         # representative of the largest component

    @property
    def n_components(self) -> int:
        return len(self.reps)

    def members(self, rep: int) -> np.ndarray:
        return np.flatnonzero(self.labels == rep)


@dataclass(eq=False)
class EdgeIndex:
    """Deduplicated edge set over the full user table, reusable across thresholds.

    src/dst index into `users`; src is the followee.  Self-edges, duplicate
    rows, and edges touching users absent from the activity table are already
    gone, and (src, dst) pairs are in ascending lexicographic order.
    """

    users: np.ndarray
    af: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    n_self_edges: int = 0
    n_unknown_endpoint: int = 0
    n_duplicates: int = 0


def prepare_edges(edges: Iterable[EdgeRecord], activity: ActivityTable) -> EdgeIndex:
    """Intern edge records against the activity table and deduplicate."""
    users = np.array(sorted(activity.entries), dtype=str)
    af = np.array([activity.entries[u] for u in users], dtype=np.int64)
    lookup = {u: i for i, u in enumerate(users)}
    src_list: list[int] = []
    dst_list: list[int] = []
    n_self = 0
    n_unknown = 0
    for rec in edges:
        s = lookup.get(rec.followee)
        d = lookup.get(rec.follower)
        if s is None or d is None:
            n_unknown += 1
            continue
        if s == d:
            n_self += 1
            continue
        src_list.append(s)
        dst_list.append(d)
    src = np.array(src_list, dtype=np.int64)
    dst = np.array(dst_list, dtype=np.int64)
    n = len(users)
    keys = np.unique(src * n + dst) if len(src) else np.empty(0, dtype=np.int64)
    n_dup = len(src) - len(keys)
    return EdgeIndex(users, af, keys // n, keys % n, n_self, n_unknown, n_dup)


def _csr_from_pairs(src: np.ndarray, dst: np.ndarray, n: int):
    """Build (indptr, indices) with rows sorted; input pairs must be unique."""
    order = np.lexsort((dst, src))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, dst[order].astype(np.int32)


def build_subgraph(
    edges: Iterable[EdgeRecord] | EdgeIndex,
    activity: ActivityTable | None = None,
    threshold: int = 1,
) -> DirectedGraph:
    """Induced directed graph on users with AF >= threshold.

    An edge survives only when both endpoints survive.  Raises EmptyGraphError
    when the threshold excludes every user.
    """
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    if not isinstance(edges, EdgeIndex):
        if activity is None:
            raise ValueError("activity table required when edges are raw records")
        edges = prepare_edges(edges, activity)
    keep = edges.af >= threshold
    n_new = int(keep.sum())
    if n_new == 0:
        raise EmptyGraphError(f"threshold {threshold} excludes all users")
    remap = np.full(len(edges.users), -1, dtype=np.int64)
    remap[keep] = np.arange(n_new)
    emask = keep[edges.src] & keep[edges.dst]
    src = remap[edges.src[emask]]
    dst = remap[edges.dst[emask]]
    fwd_indptr, fwd_indices = _csr_from_pairs(src, dst, n_new)
    rev_indptr, rev_indices = _csr_from_pairs(dst, src, n_new)
    return DirectedGraph(
        ids=edges.users[keep],
        activity=edges.af[keep],
        fwd_indptr=fwd_indptr,
        fwd_indices=fwd_indices,
        rev_indptr=rev_indptr,
        rev_indices=rev_indices,
    )


def to_undirected(g: DirectedGraph) -> UndirectedGraph:
    """Collapse edge directions; {u,v} present iff u->v or v->u."""
    src, dst = g.edge_arrays()
    u = np.concatenate([src, dst])
    v = np.concatenate([dst, src])
    keys = np.unique(u * g.n + v)
    indptr, indices = _csr_from_pairs(keys // g.n, keys % g.n, g.n)
    return UndirectedGraph(g.ids, g.activity, indptr, indices)


def _sym_csr(g: DirectedGraph | UndirectedGraph) -> csr_matrix:
    if isinstance(g, UndirectedGraph):
        indptr, indices = g.indptr, g.indices
    else:
        indptr, indices = g.fwd_indptr, g.fwd_indices
    data = np.ones(len(indices), dtype=np.int8)
    return csr_matrix((data, indices, indptr), shape=(g.n, g.n))


def weak_components(g: DirectedGraph | UndirectedGraph) -> ComponentLabeling:
    """Connected components of the undirected view, deterministically labeled."""
    n = g.n
    if n == 0:
        return ComponentLabeling(
            labels=np.empty(0, dtype=np.int64),
            reps=np.empty(0, dtype=np.int64),
            sizes=np.empty(0, dtype=np.int64),
            largest=-1,
        )
    ncomp, raw = connected_components(_sym_csr(g), directed=False)
    raw = raw.astype(np.int64)
    first = np.full(ncomp, n, dtype=np.int64)
    np.minimum.at(first, raw, np.arange(n, dtype=np.int64))
    labels = first[raw]
    order = np.argsort(first)
    reps = first[order]
    sizes = np.bincount(raw, minlength=ncomp)[order]
    largest = int(reps[int(np.argmax(sizes))])  # argmax takes the smallest rep on ties
    return ComponentLabeling(labels, reps, sizes, largest)


def isolates(g: DirectedGraph | UndirectedGraph) -> np.ndarray:
    """Dense indices of nodes with no edges in the undirected view."""
    if isinstance(g, UndirectedGraph):
        deg = g.degree()
    else:
        deg = g.out_degree() + g.in_degree()
    return np.flatnonzero(deg == 0)


def induced_subgraph(g, nodes: np.ndarray):
    """Subgraph on the given dense indices; same type as the input graph."""
    nodes = np.asarray(nodes, dtype=np.int64)
    keep = np.zeros(g.n, dtype=bool)
    keep[nodes] = True
    n_new = int(keep.sum())
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[keep] = np.arange(n_new)
    if isinstance(g, UndirectedGraph):
        src = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.indptr))
        dst = g.indices.astype(np.int64)
        emask = keep[src] & keep[dst]
        indptr, indices = _csr_from_pairs(remap[src[emask]], remap[dst[emask]], n_new)
        return UndirectedGraph(g.ids[keep], g.activity[keep], indptr, indices)
    src, dst = g.edge_arrays()
    emask = keep[src] & keep[dst]
    s, d = remap[src[emask]], remap[dst[emask]]
    fwd_indptr, fwd_indices = _csr_from_pairs(s, d, n_new)
    rev_indptr, rev_indices = _csr_from_pairs(d, s, n_new)
    return DirectedGraph(
        g.ids[keep], g.activity[keep], fwd_indptr, fwd_indices, rev_indptr, rev_indices
    )


def largest_cc(g):
    """Induced subgraph on the largest weak component (ties: smallest min id)."""
    comp = weak_components(g)
    if comp.n_components <= 1:
        return g
    return induced_subgraph(g, comp.members(comp.largest))


# ---------------------------------------------------------------------------
# Binary cache
#
# Layout (little-endian):
#   magic "CNG1" | u32 version | u64 n | u64 m | u64 id_blob_len
#   id_blob: "\n".join(ids) utf-8
#   activity  int64[n]
#   fwd_indptr int64[n+1] | fwd_indices int32[m]
#   rev_indptr int64[n+1] | rev_indices int32[m]
# ---------------------------------------------------------------------------

def save_graph(g: DirectedGraph, path: str | Path) -> None:
    id_blob = "\n".join(g.ids.tolist()).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IQQQ", _VERSION, g.n, g.m, len(id_blob)))
        fh.write(id_blob)
        fh.write(np.ascontiguousarray(g.activity, dtype=np.int64).tobytes())
        fh.write(np.ascontiguousarray(g.fwd_indptr, dtype=np.int64).tobytes())
        fh.write(np.ascontiguousarray(g.fwd_indices, dtype=np.int32).tobytes())
        fh.write(np.ascontiguousarray(g.rev_indptr, dtype=np.int64).tobytes())
        fh.write(np.ascontiguousarray(g.rev_indices, dtype=np.int32).tobytes())


def load_graph(path: str | Path) -> DirectedGraph:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise InputFormatError(f"{path}: not a graph cache file")
        version, n, m, blob_len = struct.unpack("<IQQQ", fh.read(28))
        if version != _VERSION:
            raise InputFormatError(f"{path}: unsupported cache version {version}")
        ids = np.array(fh.read(blob_len).decode("utf-8").split("\n") if blob_len else [], dtype=str)
        if len(ids) != n:
            raise InputFormatError(f"{path}: id table has {len(ids)} entries, expected {n}")
        activity = np.frombuffer(fh.read(8 * n), dtype=np.int64).copy()
        fwd_indptr = np.frombuffer(fh.read(8 * (n + 1)), dtype=np.int64).copy()
        fwd_indices = np.frombuffer(fh.read(4 * m), dtype=np.int32).copy()
        rev_indptr = np.frombuffer(fh.read(8 * (n + 1)), dtype=np.int64).copy()
        rev_indices = np.frombuffer(fh.read(4 * m), dtype=np.int32).copy()
    return DirectedGraph(ids, activity, fwd_indptr, fwd_indices, rev_indptr, rev_indices)


def export_edges_csv(g: DirectedGraph, path: str | Path) -> None:
    """Attributed edge list `src,dst,src_af,dst_af` in forward CSR order."""
    src, dst = g.edge_arrays()
    ids = g.ids
    af = g.activity
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("src,dst,src_af,dst_af\n")
        for s, d in zip(src.tolist(), dst.tolist()):
            fh.write(f"{ids[s]},{ids[d]},{af[s]},{af[d]}\n")
