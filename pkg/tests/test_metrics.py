"""Tests for depths, diameter, semi-diameter, and weighted height.

Small-instance oracles are brute force: Floyd-Warshall over the
undirected simple support, quadratic scans over antipodal pairs, and
explicit root-path sums.
"""

import numpy as np
import pytest

from websurf import metrics
from websurf.graphs import ModelConfig, MultiDigraph, generate_random_surfer
from websurf.streams import SeedSpec
from websurf.wtrees import WeightedTree, generate_third_model, contract_zero_edges


def surfer(n, d, p, master=202, stream=0):
    return generate_random_surfer(ModelConfig(n=n, d=d, p=p, seed=SeedSpec(master, stream)))


def graph_from_targets(rows, d):
    return MultiDigraph(d=d, targets=np.asarray(rows, dtype=np.int64))


def floyd_warshall_diameter(g):
    n = g.n
    big = 10**6
    dist = [[0 if i == j else big for j in range(n)] for i in range(n)]
    for s in range(1, n):
        for t in g.targets[s]:
            t = int(t)
            if t != s:
                dist[s][t] = dist[t][s] = 1
    for k in range(n):
        for i in range(n):
            dik = dist[i][k]
            for j in range(n):
                alt = dik + dist[k][j]
                if alt < dist[i][j]:
                    dist[i][j] = alt
    return max(max(row) for row in dist)


def weighted_tree(parents, weights):
    parents = np.asarray(parents, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.int64)
    w = np.zeros(len(parents), dtype=np.int64)
    for v in range(1, len(parents)):
        w[v] = w[parents[v]] + weights[v]
    parents = parents.copy()
    parents[0] = -1
    return WeightedTree(parent=parents, edge_weight=weights, vertex_weight=w)


def test_depths_trivia():
    assert metrics.depths(surfer(1, 1, 0.5)).tolist() == [0]
    two = graph_from_targets([[0], [0]], 1)
    assert metrics.depths(two).tolist() == [0, 1]
    path = graph_from_targets([[0]] + [[s] for s in range(4)], 1)
    assert metrics.depths(path).tolist() == [0, 1, 2, 3, 4]


def test_depths_tree_scan_matches_bfs():
    g = surfer(800, 1, 0.4)
    scan = metrics.depths(g)
    bfs = metrics._bfs_distances(metrics.undirected_adjacency(g), 0)
    assert np.array_equal(scan, bfs)


def test_diameter_trivia():
    assert metrics.diameter(surfer(1, 1, 0.5)) == 0
    star = graph_from_targets([[0]] + [[0]] * 6, 1)
    assert metrics.diameter(star) == 2


@pytest.mark.parametrize("d,p", [(1, 0.5), (2, 0.4), (3, 0.7)])
def test_diameter_matches_floyd_warshall(d, p):
    for i in range(6):
        n = 4 + (i % 7)
        g = surfer(n, d, p, master=300 + d, stream=i)
        assert metrics.diameter(g) == floyd_warshall_diameter(g)


def test_tree_two_sweep_matches_all_pairs_medium():
    for i in range(3):
        g = surfer(1500, 1, 0.5, master=310, stream=i)
        assert metrics.diameter(g) == metrics.all_pairs_diameter(g)


def test_general_diameter_matches_all_pairs_medium():
    for d, p, i in [(2, 0.3, 0), (2, 0.6, 1), (3, 0.5, 2), (3, 0.9, 3)]:
        g = surfer(900, d, p, master=320, stream=i)
        assert metrics.diameter(g) == metrics.all_pairs_diameter(g)


def test_diameter_at_most_twice_height():
    for i in range(8):
        g = surfer(300, 1 + i % 3, 0.3 + 0.1 * (i % 5), master=330, stream=i)
        assert metrics.diameter(g) <= 2 * metrics.height(g)


def test_exact_diameter_cap():
    n = metrics.MAX_EXACT_DIAMETER_N + 1
    g = MultiDigraph(d=2, targets=np.zeros((n, 2), dtype=np.int64))
    with pytest.raises(ValueError):
        metrics.diameter(g)


def test_semi_diameter_trivia():
    two_leaves = weighted_tree([0, 0, 0], [0, 1, 1])
    assert metrics.semi_diameter(two_leaves) == 2
    path = weighted_tree([0, 0, 1, 2], [0, 1, 1, 1])  # root has a single branch
    assert metrics.semi_diameter(path) == 0
    single = weighted_tree([0], [0])
    assert metrics.semi_diameter(single) == 0


def brute_semi_diameter(t):
    n = t.n
    parent = t.parent
    branch = [0] * n
    for v in range(1, n):
        branch[v] = v if parent[v] == 0 else branch[parent[v]]
    best = None
    for u in range(1, n):
        for v in range(u + 1, n):
            if branch[u] != branch[v]:
                cand = int(t.vertex_weight[u] + t.vertex_weight[v])
                best = cand if best is None else max(best, cand)
    return 0 if best is None else best


def test_semi_diameter_matches_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(40):
        n = int(rng.integers(2, 11))
        parents = [0] + [int(rng.integers(0, v)) for v in range(1, n)]
        weights = [0] + [int(rng.integers(-3, 2)) for _ in range(1, n)]  # weights <= 1
        t = weighted_tree(parents, weights)
        assert metrics.semi_diameter(t) == brute_semi_diameter(t)


def test_semi_diameter_below_diameter_on_unit_trees():
    for i in range(6):
        g = surfer(200, 1, 0.5, master=340, stream=i)
        assert metrics.semi_diameter(g) <= metrics.diameter(g)


def test_weighted_height_unit_weights_is_height():
    g = surfer(500, 1, 0.5, master=350)
    from websurf.graphs import marked_spanning_tree

    tree = marked_spanning_tree(g)
    assert metrics.weighted_height(tree) == metrics.height(g)


def test_weighted_height_brute_force_with_negatives():
    rng = np.random.default_rng(6)
    for _ in range(40):
        n = int(rng.integers(1, 11))
        parents = [0] + [int(rng.integers(0, v)) for v in range(1, n)]
        weights = [0] + [int(rng.integers(-4, 2)) for _ in range(1, n)]
        t = weighted_tree(parents, weights)
        sums = [0] * n
        for v in range(1, n):
            sums[v] = sums[parents[v]] + weights[v]
        assert metrics.weighted_height(t) == max(sums)
        assert metrics.weighted_height(t) >= 0


def test_weighted_height_invariant_under_contraction():
    for i in range(5):
        t = generate_third_model(200, 0.5, SeedSpec(360, i))
        assert metrics.weighted_height(contract_zero_edges(t)) == metrics.weighted_height(t)


def test_metric_report_fields():
    rep = metrics.metric_report(surfer(50, 1, 0.5))
    assert rep.semi_diameter is not None
    assert rep.weighted_height is None
    rep2 = metrics.metric_report(surfer(50, 2, 0.5))
    assert rep2.semi_diameter is None
