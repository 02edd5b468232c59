"""Weighted-tree transformations of the d=1 surfer tree model.

The chain goes: plain recursive tree with walk attachment (first model)
-> weighted recursive tree whose vertex weights reproduce the first
model's depths (second model) -> leaf-only attachment with zero-weight
clones, which bounds the degrees (third model) -> continuous-time binary
branching tree (the T / Tprime variants), which is what the asymptotic
analysis actually studies.

Weights are integers and every edge weight is at most 1 (negative values
are possible).  Vertex weights are root-path sums and are cached.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .streams import SeedSpec, Stream, derive_stream_id, sample_geometric


@dataclass(frozen=True)
class WeightedTree:
    """Rooted tree with integer edge weights; parent[0] == -1 for the root."""

    parent: np.ndarray
    edge_weight: np.ndarray
    vertex_weight: np.ndarray

    @property
    def n(self) -> int:
        return len(self.parent)

    def validate(self) -> None:
        n = self.n
        if n == 0 or self.parent[0] != -1:
            raise ValueError("malformed tree: missing root sentinel")
        if len(self.edge_weight) != n or len(self.vertex_weight) != n:
            raise ValueError("array length mismatch")
        if self.edge_weight[0] != 0 or self.vertex_weight[0] != 0:
            raise ValueError("root must carry zero weight")
        for v in range(1, n):
            if not 0 <= self.parent[v] < v:
                raise ValueError(f"vertex {v} has non-birth-order parent {self.parent[v]}")
            if self.edge_weight[v] > 1:
                raise ValueError(f"edge weight above 1 at vertex {v}")
            if self.vertex_weight[v] != self.vertex_weight[self.parent[v]] + self.edge_weight[v]:
                raise ValueError(f"cached weight wrong at vertex {v}")


def _tree_from_lists(parent, edge_weight, vertex_weight) -> WeightedTree:
    return WeightedTree(
        parent=np.asarray(parent, dtype=np.int64),
        edge_weight=np.asarray(edge_weight, dtype=np.int64),
        vertex_weight=np.asarray(vertex_weight, dtype=np.int64),
    )


def unit_weight_tree(parent) -> WeightedTree:
    """Wrap a parent array as a tree with unit edge weights (depth = weight)."""
    parent = np.asarray(parent, dtype=np.int64)
    n = len(parent)
    ew = np.ones(n, dtype=np.int64)
    ew[0] = 0
    w = np.zeros(n, dtype=np.int64)
    for v in range(1, n):
        w[v] = w[parent[v]] + 1
    out = WeightedTree(parent=parent.copy(), edge_weight=ew, vertex_weight=w)
    out.parent[0] = -1
    return out


def generate_second_model(n: int, p: float, seed: SeedSpec) -> WeightedTree:
    """Weighted recursive tree: attach to a uniform old vertex with edge
    weight max(1 - geo(p), 1 - weight(parent)).

    Consumes the stream exactly like the d=1 surfer generator (one batch
    of uniforms, then one batch of geometrics), so a same-seed pair of
    runs couples exactly: vertex weights here equal depths there.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"need p in (0, 1), got {p}")
    parent = [-1]
    ew = [0]
    w = [0]
    if n > 1:
        stream = seed.stream()
        u = stream.uniforms(n - 1)
        scale = np.arange(1, n)
        starts = np.minimum((scale * u).astype(np.int64), scale - 1).tolist()
        ys = (1 - sample_geometric(p, stream, size=n - 1)).tolist()
        for s in range(1, n):
            par = starts[s - 1]
            e = ys[s - 1]
            wp = w[par]
            if e < 1 - wp:
                e = 1 - wp
            parent.append(par)
            ew.append(e)
            w.append(wp + e)
    return _tree_from_lists(parent, ew, w)


def generate_third_model(n: int, p: float, seed: SeedSpec) -> WeightedTree:
    """Leaf-only variant: each step picks a uniform leaf u, hangs the new
    weighted vertex and a zero-weight clone of u below it (2n-1 vertices).

    The picked leaf's slot in the leaf list is taken over by its clone
    and the weighted child is appended, so the leaf bookkeeping is
    deterministic given the stream.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"need p in (0, 1), got {p}")
    parent = [-1]
    ew = [0]
    w = [0]
    if n > 1:
        stream = seed.stream()
        u = stream.uniforms(n - 1)
        ys = (1 - sample_geometric(p, stream, size=n - 1)).tolist()
        leaves = [0]
        for s in range(1, n):
            pick = int(s * u[s - 1])
            if pick >= s:
                pick = s - 1
            leaf = leaves[pick]
            wp = w[leaf]
            e = ys[s - 1]
            if e < 1 - wp:
                e = 1 - wp
            # weighted child, vertex index 2s-1
            parent.append(leaf)
            ew.append(e)
            w.append(wp + e)
            # zero-weight clone, vertex index 2s
            parent.append(leaf)
            ew.append(0)
            w.append(wp)
            leaves[pick] = 2 * s
            leaves.append(2 * s - 1)
    return _tree_from_lists(parent, ew, w)


def contract_zero_edges(t: WeightedTree) -> WeightedTree:
    """Merge every zero-weight child into its parent.

    Vertex weights of surviving vertices are untouched and the weighted
    height cannot change (a zero edge duplicates its parent's weight).
    """
    n = t.n
    parent = t.parent
    ew = t.edge_weight
    rep = [0] * n
    for v in range(1, n):
        rep[v] = rep[parent[v]] if ew[v] == 0 else v
    new_index = {}
    for v in range(n):
        if rep[v] == v:
            new_index[v] = len(new_index)
    out_parent = [-1]
    out_ew = [0]
    out_w = [0]
    for v in range(1, n):
        if rep[v] != v:
            continue
        out_parent.append(new_index[rep[parent[v]]])
        out_ew.append(int(ew[v]))
        out_w.append(int(t.vertex_weight[v]))
    return _tree_from_lists(out_parent, out_ew, out_w)


VARIANT_T = "T"
VARIANT_TPRIME = "Tprime"


@dataclass(frozen=True)
class ContinuousTree:
    """Snapshot of the binary branching tree at a cutoff time.

    Each vertex carries its birth time and its lifetime draw; a vertex is
    internal iff it died before the cutoff.  Both child edges of a vertex
    share the parent's lifetime as their time value, and exactly one of
    them carries a (possibly negative) weight, the other weight 0.
    """

    parent: np.ndarray
    birth: np.ndarray
    life: np.ndarray
    edge_weight: np.ndarray
    vertex_weight: np.ndarray
    t_max: float
    truncated: bool

    @property
    def n(self) -> int:
        return len(self.parent)

    def weighted_height(self) -> int:
        return int(self.vertex_weight.max())

    def internal_mask(self) -> np.ndarray:
        return self.birth + self.life <= self.t_max


class _DrawBuffer:
    """Chunked draws for the event loop (order-deterministic per seed)."""

    CHUNK = 8192

    def __init__(self, stream: Stream, p: float):
        self._stream = stream
        self._p = p
        self._exp = []
        self._coin = []
        self._geo = []

    def exponential(self) -> float:
        if not self._exp:
            self._exp = self._stream.exponentials(self.CHUNK).tolist()[::-1]
        return self._exp.pop()

    def coin(self) -> int:
        if not self._coin:
            self._coin = self._stream.integers(2, size=self.CHUNK).tolist()[::-1]
        return self._coin.pop()

    def weight_step(self) -> int:
        if not self._geo:
            geo = sample_geometric(self._p, self._stream, size=self.CHUNK)
            self._geo = (1 - geo).tolist()[::-1]
        return self._geo.pop()


def simulate_branching(
    t_max: float,
    p: float,
    variant: str = VARIANT_T,
    cap: int = 2_000_000,
    seed: SeedSpec = SeedSpec(0),
    stop_at_vertices: int | None = None,
) -> ContinuousTree:
    """Event-driven simulation of the branching tree up to time t_max.

    A priority queue holds death times (ties broken by vertex index).  At
    each death two children are born; a fair coin picks which child edge
    carries weight: max(Y, 1 - weight(parent)) in the T variant, plain Y
    in Tprime, with Y = 1 - geo(p).  If the vertex budget ``cap`` would
    be exceeded the result is returned with ``truncated=True`` rather
    than failing silently.

    ``stop_at_vertices`` stops the process the moment the tree reaches
    that many vertices (used for the stopped-law comparison); pass
    t_max=inf with it.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"need p in (0, 1), got {p}")
    if t_max < 0.0:
        raise ValueError(f"need t_max >= 0, got {t_max}")
    if cap < 1:
        raise ValueError(f"need cap >= 1, got {cap}")
    if variant not in (VARIANT_T, VARIANT_TPRIME):
        raise ValueError(f"unknown variant {variant!r}")

    buf = _DrawBuffer(seed.stream(), p)
    parent = [-1]
    birth = [0.0]
    life = [buf.exponential()]
    ew = [0]
    w = [0]
    heap = []
    if life[0] <= t_max:
        heapq.heappush(heap, (life[0], 0))
    truncated = False
    while heap:
        if stop_at_vertices is not None and len(parent) >= stop_at_vertices:
            break
        if len(parent) + 2 > cap:
            truncated = True
            break
        death, v = heapq.heappop(heap)
        side = buf.coin()
        y = buf.weight_step()
        wv = w[v]
        for idx in (0, 1):
            if idx == side:
                e = y
                if variant == VARIANT_T and e < 1 - wv:
                    e = 1 - wv
            else:
                e = 0
            child = len(parent)
            parent.append(v)
            birth.append(death)
            ew.append(e)
            w.append(wv + e)
            el = buf.exponential()
            life.append(el)
            if death + el <= t_max:
                heapq.heappush(heap, (death + el, child))
    return ContinuousTree(
        parent=np.asarray(parent, dtype=np.int64),
        birth=np.asarray(birth),
        life=np.asarray(life),
        edge_weight=np.asarray(ew, dtype=np.int64),
        vertex_weight=np.asarray(w, dtype=np.int64),
        t_max=t_max,
        truncated=truncated,
    )


@dataclass(frozen=True)
class StoppedLawReport:
    """Two-sample comparison of stopped branching trees vs the third model."""

    n: int
    p: float
    trials: int
    statistic: float
    pvalue: float
    significance: float
    passed: bool
    mean_branching: float
    mean_third: float
    mean_gap_se: float
    means_agree: bool


def stopped_tree_law_check(
    n: int,
    p: float,
    trials: int,
    seed: SeedSpec,
    significance: float = 1e-3,
) -> StoppedLawReport:
    """Stop the branching process at 2n-1 vertices and compare its weighted
    height sample against the third model's, via a two-sample KS test."""
    if trials < 2:
        raise ValueError("need at least two trials")
    target = 2 * n - 1
    heights_b = np.empty(trials, dtype=np.int64)
    heights_t = np.empty(trials, dtype=np.int64)
    for i in range(trials):
        spec_b = SeedSpec(seed.master_seed, derive_stream_id(seed.stream_id, "stopped", i))
        tree = simulate_branching(
            math.inf, p, VARIANT_T, cap=8 * n + 16, seed=spec_b, stop_at_vertices=target
        )
        if tree.n != target:
            raise RuntimeError("stopped simulation missed its vertex target")
        heights_b[i] = tree.weighted_height()
        spec_t = SeedSpec(seed.master_seed, derive_stream_id(seed.stream_id, "third", i))
        heights_t[i] = int(generate_third_model(n, p, spec_t).vertex_weight.max())
    ks = stats.ks_2samp(heights_b, heights_t, method="asymp")
    mb, mt = float(heights_b.mean()), float(heights_t.mean())
    se = math.sqrt(heights_b.var(ddof=1) / trials + heights_t.var(ddof=1) / trials)
    return StoppedLawReport(
        n=n,
        p=p,
        trials=trials,
        statistic=float(ks.statistic),
        pvalue=float(ks.pvalue),
        significance=significance,
        passed=bool(ks.pvalue >= significance),
        mean_branching=mb,
        mean_third=mt,
        mean_gap_se=se,
        means_agree=bool(abs(mb - mt) <= 2.0 * se),
    )
