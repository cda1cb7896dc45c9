"""Brute-force reference implementations used only to check the real ones.

Everything here favours obviousness over speed: dense matrices, nested
loops, and textbook formulas, independent of the CSR/numba code paths.
"""

import numpy as np


def adjacency(gu) -> np.ndarray:
    """Dense 0/1 adjacency matrix of an UndirectedGraph."""
    a = np.zeros((gu.n, gu.n), dtype=np.int64)
    for u in range(gu.n):
        for v in gu.indices[gu.indptr[u]:gu.indptr[u + 1]]:
            a[u, v] = 1
    return a


def union_find_labels(n: int, pairs) -> np.ndarray:
    """Component label per node; label = smallest node index in the component."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in pairs:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    roots = [find(i) for i in range(n)]
    # normalize: every member points at the smallest index in its component
    smallest: dict[int, int] = {}
    for i, r in enumerate(roots):
        smallest.setdefault(r, i)
    return np.array([smallest[r] for r in roots], dtype=np.int64)


def floyd_warshall(a: np.ndarray) -> np.ndarray:
    n = len(a)
    dist = np.where(a > 0, 1.0, np.inf)
    np.fill_diagonal(dist, 0.0)
    for k in range(n):
        dist = np.minimum(dist, dist[:, k:k + 1] + dist[k:k + 1, :])
    return dist


def geodesic_counts(a: np.ndarray, dist: np.ndarray) -> np.ndarray:
    """sigma[s, t] = number of shortest s-t paths, by dynamic programming:
    sum sigma[s, v] over predecessors v of t (neighbors one step closer to s).
    """
    n = len(a)
    sigma = np.zeros((n, n), dtype=np.float64)
    for s in range(n):
        sigma[s, s] = 1.0
        order = np.argsort(dist[s])
        for t in order:
            if t == s or not np.isfinite(dist[s, t]):
                continue
            preds = (a[:, t] > 0) & (dist[s] == dist[s, t] - 1)
            sigma[s, t] = float(sigma[s, preds].sum())
    return sigma


def betweenness_by_enumeration(a: np.ndarray, normalized: bool = True) -> np.ndarray:
    """BC via the pair-counting identity sigma_st(v) = sigma_sv * sigma_vt
    whenever d(s,v) + d(v,t) = d(s,t); independent of Brandes accumulation.
    """
    n = len(a)
    dist = floyd_warshall(a)
    sigma = geodesic_counts(a, dist)
    bc = np.zeros(n)
    for v in range(n):
        on_path = dist[:, v][:, None] + dist[v, :][None, :] == dist
        valid = np.isfinite(dist) & (sigma > 0) & on_path
        valid[v, :] = valid[:, v] = False
        np.fill_diagonal(valid, False)
        contrib = np.where(
            valid, np.outer(sigma[:, v], sigma[v, :]) / np.where(sigma > 0, sigma, 1.0), 0.0
        )
        bc[v] = float(contrib.sum())
    if n > 2:
        bc /= (n - 1.0) * (n - 2.0) if normalized else 2.0
    return bc


def closeness_from_dist(dist: np.ndarray) -> np.ndarray:
    n = len(dist)
    return (n - 1.0) / dist.sum(axis=1)


def eccentricity_from_dist(dist: np.ndarray) -> np.ndarray:
    return dist.max(axis=1)


def clustering_by_loops(a: np.ndarray) -> np.ndarray:
    n = len(a)
    cc = np.zeros(n)
    for u in range(n):
        nbrs = np.flatnonzero(a[u])
        d = len(nbrs)
        if d < 2:
            continue
        links = 0
        for i in range(d):
            for j in range(i + 1, d):
                links += a[nbrs[i], nbrs[j]]
        cc[u] = 2.0 * links / (d * (d - 1))
    return cc


def transitivity_by_loops(a: np.ndarray) -> float:
    n = len(a)
    triangles = 0
    triples = 0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if i < j < k:
                    if a[i, j] and a[j, k] and a[i, k]:
                        triangles += 1
        d = a[i].sum()
        triples += d * (d - 1) // 2
    if triples == 0:
        return 0.0
    return 3.0 * triangles / triples


def assortativity_by_pairs(a: np.ndarray) -> float:
    deg = a.sum(axis=1)
    xs, ys = [], []
    for u in range(len(a)):
        for v in np.flatnonzero(a[u]):
            xs.append(deg[u])
            ys.append(deg[v])
    x = np.array(xs, dtype=np.float64)
    y = np.array(ys, dtype=np.float64)
    if x.std() == 0 or y.std() == 0:
        return float("nan")
    return float(np.corrcoef(x, y)[0, 1])


def neighbor_degree_by_loops(a: np.ndarray) -> np.ndarray:
    deg = a.sum(axis=1)
    out = np.zeros(len(a))
    for u in range(len(a)):
        nbrs = np.flatnonzero(a[u])
        if len(nbrs):
            out[u] = deg[nbrs].mean()
    return out
