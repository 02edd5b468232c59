"""Exact structural metrics on generated graphs and weighted trees.

Distances are always measured on the underlying undirected simple graph:
self-loops and edge multiplicities never change shortest paths, so they
are collapsed before any search.  Trees (d=1) get O(n) fast paths; for
general graphs the diameter comes from an exact eccentricity-bounding
search seeded by a double sweep, cross-checked in the tests against
brute-force all-pairs oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import dijkstra

from .graphs import MultiDigraph, marked_spanning_tree
from .wtrees import WeightedTree

# exact general-graph diameter is quadratic in the worst case; above this
# size callers should fall back to the height bracket [h, 2h]
MAX_EXACT_DIAMETER_N = 20_000


@dataclass(frozen=True)
class MetricReport:
    n: int
    height: int
    diameter: int
    semi_diameter: int | None = None
    weighted_height: int | None = None


def undirected_adjacency(g: MultiDigraph) -> sparse.csr_matrix:
    """Boolean symmetric adjacency of the simple support (loops dropped)."""
    n = g.n
    if n == 1:
        return sparse.csr_matrix((1, 1), dtype=np.int8)
    rows = np.repeat(np.arange(1, n, dtype=np.int64), g.d)
    cols = g.targets[1:].ravel()
    data = np.ones(len(rows), dtype=np.int8)
    a = sparse.coo_matrix((data, (rows, cols)), shape=(n, n))
    a = a + a.T
    a = a.tocsr()
    a.data = np.ones_like(a.data)
    a.setdiag(0)
    a.eliminate_zeros()
    return a


def _bfs_distances(adj: sparse.csr_matrix, source: int) -> np.ndarray:
    dist = dijkstra(adj, directed=True, unweighted=True, indices=source)
    if np.isinf(dist).any():
        raise ValueError("graph is not connected")
    return dist.astype(np.int64)


def depths(g: MultiDigraph) -> np.ndarray:
    """Shortest undirected distance from every vertex to the root."""
    if g.d == 1:
        # the undirected support is the tree itself; parents precede children
        parent = g.first_targets()
        out = np.zeros(g.n, dtype=np.int64)
        pl = parent.tolist()
        ol = out.tolist()
        for s in range(1, g.n):
            ol[s] = ol[pl[s]] + 1
        return np.asarray(ol, dtype=np.int64)
    return _bfs_distances(undirected_adjacency(g), 0)


def height(g: MultiDigraph) -> int:
    return int(depths(g).max())


def _tree_diameter_two_sweep(adj: sparse.csr_matrix) -> int:
    d0 = _bfs_distances(adj, 0)
    far = int(np.argmax(d0))
    return int(_bfs_distances(adj, far).max())


_BOUNDING_BFS_BUDGET = 12


def _general_diameter_bounded(adj: sparse.csr_matrix) -> int | None:
    """Eccentricity-bounding diameter search, or None if the budget runs out.

    Alternates BFS sources between the periphery (max eccentricity upper
    bound, raises the diameter lower bound) and the centre (min lower
    bound, tightens everything through d <= 2*min_ecc).  Starts at the
    root, which these growth models keep central, so the 2*height ceiling
    is available after one sweep.  Resolves even-diameter instances in a
    couple of sweeps; near-odd cases are left to the bitset closure.
    """
    n = adj.shape[0]
    ecc_lo = np.zeros(n, dtype=np.int64)
    ecc_hi = np.full(n, n, dtype=np.int64)
    lb = 0
    ub = n
    v = 0
    pick_periphery = True
    remaining = np.ones(n, dtype=bool)
    for _ in range(_BOUNDING_BFS_BUDGET):
        dist = _bfs_distances(adj, v)
        ecc = int(dist.max())
        lb = max(lb, ecc)
        ub = min(ub, 2 * ecc)
        np.maximum(ecc_lo, np.maximum(dist, ecc - dist), out=ecc_lo)
        np.minimum(ecc_hi, dist + ecc, out=ecc_hi)
        settled = ecc_lo == ecc_hi
        if settled.any():
            lb = max(lb, int(ecc_lo[settled].max()))
        if lb >= ub:
            return lb
        remaining &= ~settled
        remaining &= ecc_hi > lb
        if not remaining.any():
            return lb
        cand = np.flatnonzero(remaining)
        if pick_periphery:
            v = int(cand[np.argmax(ecc_hi[cand])])
        else:
            v = int(cand[np.argmin(ecc_lo[cand])])
        pick_periphery = not pick_periphery
    return None


def _bitset_diameter(adj: sparse.csr_matrix) -> int:
    """Exact diameter by synchronous bitset closure.

    reach[u] after round k is the ball of radius k around u (one big
    Python integer per vertex, so the per-edge OR runs at memcpy speed);
    a vertex stops changing exactly at round ecc(u), and the last round
    with any change is the diameter.  Cost is O(diameter * m * n / 64),
    which beats BFS-based searches on these shallow graphs.
    """
    n = adj.shape[0]
    indptr, indices = adj.indptr, adj.indices
    neigh = [indices[indptr[u] : indptr[u + 1]].tolist() for u in range(n)]
    reach = [1 << u for u in range(n)]
    diam = 0
    changed = range(n)
    rounds = 0
    while True:
        rounds += 1
        affected = set()
        for u in changed:
            affected.update(neigh[u])
        updates = {}
        for u in affected:
            acc = reach[u]
            for v in neigh[u]:
                acc |= reach[v]
            if acc != reach[u]:
                updates[u] = acc
        if not updates:
            return diam
        diam = rounds
        for u, acc in updates.items():
            reach[u] = acc
        changed = updates


def diameter(g: MultiDigraph) -> int:
    """Exact diameter of the underlying undirected graph."""
    if g.n == 1:
        return 0
    adj = undirected_adjacency(g)
    if g.d == 1:
        return _tree_diameter_two_sweep(adj)
    if g.n > MAX_EXACT_DIAMETER_N:
        raise ValueError(
            f"exact diameter capped at n <= {MAX_EXACT_DIAMETER_N}; "
            "use the height bracket [height, 2*height] beyond that"
        )
    result = _general_diameter_bounded(adj)
    if result is None:
        result = _bitset_diameter(adj)
    return result


def all_pairs_diameter(g: MultiDigraph) -> int:
    """Brute-force all-pairs BFS diameter (small-n oracle)."""
    if g.n == 1:
        return 0
    adj = undirected_adjacency(g)
    dist = dijkstra(adj, directed=True, unweighted=True)
    if np.isinf(dist).any():
        raise ValueError("graph is not connected")
    return int(dist.max())


def _as_weighted_tree(t) -> WeightedTree:
    if isinstance(t, WeightedTree):
        return t
    if isinstance(t, MultiDigraph):
        if t.d != 1:
            raise ValueError("tree metrics need d=1 (or an explicit WeightedTree)")
        return marked_spanning_tree(t)
    raise TypeError(f"expected WeightedTree or MultiDigraph, got {type(t)!r}")


def semi_diameter(t) -> int:
    """Maximum weighted distance over pairs of vertices in distinct root
    subtrees (their path passes through the root).

    With fewer than two root subtrees there is no such pair and the value
    is 0 by convention.
    """
    t = _as_weighted_tree(t)
    n = t.n
    if n <= 2:
        return 0
    parent = t.parent.tolist()
    w = t.vertex_weight.tolist()
    branch_max: dict[int, int] = {}
    branch = [0] * n
    for v in range(1, n):
        b = v if parent[v] == 0 else branch[parent[v]]
        branch[v] = b
        cur = branch_max.get(b)
        if cur is None or w[v] > cur:
            branch_max[b] = w[v]
    if len(branch_max) < 2:
        return 0
    tops = sorted(branch_max.values(), reverse=True)
    return int(tops[0] + tops[1])


def weighted_height(t: WeightedTree) -> int:
    """Maximum root-path weight sum; the root contributes 0, so >= 0."""
    return int(t.vertex_weight.max())


def metric_report(g: MultiDigraph) -> MetricReport:
    report = MetricReport(
        n=g.n,
        height=height(g),
        diameter=diameter(g),
        semi_diameter=semi_diameter(g) if g.d == 1 else None,
    )
    return report
