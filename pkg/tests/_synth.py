"""Synthetic fixtures: graphs from edge pairs, heavy-tailed samples, corpora."""

import json

import numpy as np

from crisisnet.graph import build_subgraph, to_undirected
from crisisnet.ingest import ActivityTable, EdgeRecord


def _ids(n: int) -> list[str]:
    # zero-padded so lexicographic id order equals numeric order equals
    # dense index order
    return [f"{i:06d}" for i in range(n)]


def graph_from_pairs(n: int, pairs, activity=None):
    """DirectedGraph on nodes 0..n-1 with edges src->dst for (src, dst) pairs."""
    ids = _ids(n)
    table = ActivityTable(
        {ids[i]: (activity[i] if activity is not None else 1) for i in range(n)}
    )
    records = [
        EdgeRecord(follower=ids[dst], followee=ids[src]) for src, dst in pairs
    ]
    g = build_subgraph(records, table, threshold=1)
    assert g.n == n and list(g.ids) == ids
    return g


def undirected_from_pairs(n: int, pairs):
    return to_undirected(graph_from_pairs(n, pairs))


def er_pairs(n: int, p: float, seed: int):
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < p
    src, dst = np.nonzero(np.triu(mask, 1))
    return list(zip(src.tolist(), dst.tolist()))


def connected_pairs(n: int, extra: int, seed: int):
    """Random spanning tree plus `extra` random chords: always connected."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    pairs = set()
    for i in range(1, n):
        u = int(order[i])
        v = int(order[rng.integers(0, i)])
        pairs.add((min(u, v), max(u, v)))
    while len(pairs) < n - 1 + extra:
        u, v = rng.integers(0, n, size=2)
        if u != v:
            pairs.add((min(int(u), int(v)), max(int(u), int(v))))
    return sorted(pairs)


def complete_pairs(n: int):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def path_pairs(n: int):
    return [(i, i + 1) for i in range(n - 1)]


def star_pairs(n_leaves: int):
    return [(0, i) for i in range(1, n_leaves + 1)]


# ---------------------------------------------------------------------------
# heavy-tailed samples
# ---------------------------------------------------------------------------

def powerlaw_sample(gamma: float, x_min: float, n: int, seed: int,
                    discrete: bool = False) -> np.ndarray:
    """Continuous: inverse-CDF draw x = x_min * u^(-1/(gamma-1)).
    Discrete: exact zeta (Zipf) draw; only supported from x_min = 1.
    """
    rng = np.random.default_rng(seed)
    if discrete:
        if x_min != 1.0:
            raise ValueError("discrete power-law sampler assumes x_min = 1")
        from scipy import stats

        return stats.zipf(gamma).rvs(size=n, random_state=rng).astype(np.float64)
    u = rng.random(n)
    return x_min * u ** (-1.0 / (gamma - 1.0))


def lognormal_sample(mu: float, sigma: float, n: int, seed: int,
                     discrete: bool = False) -> np.ndarray:
    rng = np.random.default_rng(seed)
    x = rng.lognormal(mu, sigma, n)
    if discrete:
        x = np.maximum(1.0, np.floor(x))
    return x


def exponential_sample(rate: float, x_min: float, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return x_min + rng.exponential(1.0 / rate, n)


# ---------------------------------------------------------------------------
# corpus on disk
# ---------------------------------------------------------------------------

def make_corpus(directory, n_users: int = 400, n_edges: int = 3000, seed: int = 0,
                keyword: str = "sandy", mean_noise: float = 0.1):
    """Write tweets.jsonl + edges.csv; activity ~ discrete power law and the
    edge endpoints are biased towards active users so that density rises
    with the threshold.  Returns (tweets_path, edges_path).
    """
    rng = np.random.default_rng(seed)
    ids = _ids(n_users)
    counts = powerlaw_sample(2.3, 1.0, n_users, seed + 1, discrete=True)
    counts = np.minimum(counts, 500).astype(int)
    tweets = directory / "tweets.jsonl"
    with open(tweets, "w", encoding="utf-8", newline="\n") as fh:
        for i, uid in enumerate(ids):
            for j in range(counts[i]):
                text = f"{keyword} report {j}" if rng.random() > mean_noise else f"coffee {j}"
                doc = {
                    "id": int(rng.integers(10**12, 10**13)),
                    "user_id": uid,
                    "text": text,
                    "lang": "en" if rng.random() < 0.97 else "fr",
                    "created_at": "2012-10-29T01:02:03Z",
                }
                fh.write(json.dumps(doc) + "\n")
    # endpoint sampling weight grows with activity
    w = counts.astype(np.float64) + 1.0
    w /= w.sum()
    edges = directory / "edges.csv"
    seen = set()
    with open(edges, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("follower_id,followee_id\n")
        draws = rng.choice(n_users, size=(n_edges * 2, 2), p=w)
        for a, b in draws:
            if a == b or (a, b) in seen:
                continue
            seen.add((int(a), int(b)))
            fh.write(f"{ids[a]},{ids[b]}\n")
            if len(seen) >= n_edges:
                break
    return tweets, edges
