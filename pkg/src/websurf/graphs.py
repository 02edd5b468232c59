"""Webgraph growth models and the edge-list file format.

All models grow a directed multigraph with uniform out-degree d from a
root that carries d self-loops.  Each new vertex picks uniform old
vertices and attaches to the endpoints of random walks started there:
geometric walk lengths for the random-surfer model, the 0-or-geometric
mixture for PageRank-based selection, and an arbitrary step law walking
toward the root for the generalized tree model (d=1 only).

Draw discipline (this is a coupling contract, relied on by tests): every
generator consumes its stream as (1) one uniform per edge for the start
vertex, (2) one batch of walk lengths, (3) for d > 1, one pool of
uniform out-slot choices, consumed walk step by walk step.  Consequently
a beta=0 PageRank-selection run is edge-for-edge identical to a surfer
run with the same seed, and the d=1 surfer tree, the second weighted
model, and the generalized tree with a geometric step law all couple
exactly on a shared seed.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .streams import SeedSpec, sample_L, sample_geometric
from .wtrees import WeightedTree, unit_weight_tree


class Variant(Enum):
    RANDOM_SURFER = "surfer"
    PAGERANK_SELECTION = "pagerank"
    GENERALIZED = "generalized"


@dataclass(frozen=True)
class MultiDigraph:
    """Birth-ordered multigraph; row s of ``targets`` holds the d out-edges
    of vertex s in creation order (row 0 is the root's self-loops).

    The first-created edge of each vertex is slot 0 (the marked edge).
    Immutable once built; safe to share between threads.
    """

    d: int
    targets: np.ndarray
    p: float = 0.0
    beta: float = 0.0
    variant: str = "surfer"
    seed: int = 0

    @property
    def n(self) -> int:
        return len(self.targets)

    def first_targets(self) -> np.ndarray:
        return self.targets[:, 0]

    def validate(self) -> None:
        n, d = self.targets.shape
        if d != self.d:
            raise ValueError("out-degree mismatch")
        if not np.all(self.targets[0] == 0):
            raise ValueError("root must carry d self-loops")
        if n > 1:
            idx = np.arange(1, n).reshape(-1, 1)
            if not np.all((self.targets[1:] >= 0) & (self.targets[1:] < idx)):
                raise ValueError("edge violates birth order")


@dataclass(frozen=True)
class ModelConfig:
    n: int
    d: int
    p: float
    seed: SeedSpec
    beta: float = 0.0
    variant: Variant = Variant.RANDOM_SURFER

    def validate(self) -> None:
        if self.n < 1:
            raise ValueError(f"need n >= 1, got {self.n}")
        if self.d < 1:
            raise ValueError(f"need d >= 1, got {self.d}")
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"need p in (0, 1], got {self.p}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"need beta in [0, 1], got {self.beta}")
        if self.variant is Variant.GENERALIZED and self.d != 1:
            raise ValueError("the generalized walk-toward-root model is defined for d=1 only")


@dataclass(frozen=True)
class StepLaw:
    """Step-length law for the generalized tree model.

    ``table`` is only set for custom laws: pmf values over {0, 1, ...},
    summing to 1 within 1e-12.
    """

    kind: str
    p: float = 0.0
    table: tuple = ()

    CONSTANT0 = "const0"
    BERNOULLI_HALF = "bernoulli"
    GEOMETRIC = "geo"
    CUSTOM = "custom"

    @classmethod
    def constant0(cls) -> "StepLaw":
        return cls(kind=cls.CONSTANT0)

    @classmethod
    def bernoulli_half(cls) -> "StepLaw":
        return cls(kind=cls.BERNOULLI_HALF)

    @classmethod
    def geometric(cls, p: float) -> "StepLaw":
        if not 0.0 < p <= 1.0:
            raise ValueError(f"need p in (0, 1], got {p}")
        return cls(kind=cls.GEOMETRIC, p=p)

    @classmethod
    def custom(cls, pmf) -> "StepLaw":
        arr = np.asarray(pmf, dtype=float)
        if arr.ndim != 1 or len(arr) == 0 or np.any(arr < 0.0):
            raise ValueError("custom pmf must be a nonempty nonnegative vector")
        if abs(arr.sum() - 1.0) > 1e-12:
            raise ValueError(f"custom pmf sums to {arr.sum()}, not 1")
        return cls(kind=cls.CUSTOM, table=tuple(arr.tolist()))

    def sample(self, stream, size: int) -> np.ndarray:
        if self.kind == self.CONSTANT0:
            return np.zeros(size, dtype=np.int64)
        if self.kind == self.BERNOULLI_HALF:
            return (stream.uniforms(size) < 0.5).astype(np.int64)
        if self.kind == self.GEOMETRIC:
            return sample_geometric(self.p, stream, size=size)
        cum = np.cumsum(self.table)
        idx = np.searchsorted(cum, stream.uniforms(size), side="right")
        return np.minimum(idx, len(cum) - 1).astype(np.int64)


def _uniform_starts(stream, n: int, d: int) -> list:
    """floor(s*U) start vertices, d per step, in creation order."""
    scale = np.repeat(np.arange(1, n, dtype=np.int64), d)
    u = stream.uniforms((n - 1) * d)
    return np.minimum((scale * u).astype(np.int64), scale - 1).tolist()


def _build_tree(n: int, starts, lengths) -> np.ndarray:
    """d=1 build: walk toward the root along parent pointers."""
    tgt = [0]
    for s in range(1, n):
        v = starts[s - 1]
        k = lengths[s - 1]
        while k > 0 and v != 0:
            v = tgt[v]
            k -= 1
        tgt.append(v)
    return np.asarray(tgt, dtype=np.int64).reshape(n, 1)


def _build_multigraph(n: int, d: int, starts, lengths, slots) -> np.ndarray:
    """d>1 build: walks choose uniformly among the d out-slots (so parallel
    edges are followed with multiplicity; root self-loops absorb)."""
    flat = [0] * d
    pos = 0
    for s in range(1, n):
        base = (s - 1) * d
        row = []
        for j in range(d):
            v = starts[base + j]
            for _ in range(lengths[base + j]):
                v = flat[v * d + slots[pos]]
                pos += 1
            row.append(v)
        flat.extend(row)
    return np.asarray(flat, dtype=np.int64).reshape(n, d)


def _generate_walk_model(config: ModelConfig, variant_name: str) -> MultiDigraph:
    n, d = config.n, config.d
    if n == 1:
        targets = np.zeros((1, d), dtype=np.int64)
    else:
        stream = config.seed.stream()
        starts = _uniform_starts(stream, n, d)
        lengths_arr = sample_L(config.p, config.beta, stream, size=(n - 1) * d)
        lengths = lengths_arr.tolist()
        if d == 1:
            targets = _build_tree(n, starts, lengths)
        else:
            total = int(lengths_arr.sum())
            slots = stream.integers(d, size=total).tolist() if total else []
            targets = _build_multigraph(n, d, starts, lengths, slots)
    return MultiDigraph(
        d=d,
        targets=targets,
        p=config.p,
        beta=config.beta,
        variant=variant_name,
        seed=config.seed.master_seed,
    )


def generate_random_surfer(config: ModelConfig) -> MultiDigraph:
    """Random-surfer Webgraph: d walks of geometric length per new vertex."""
    config.validate()
    if config.variant is not Variant.RANDOM_SURFER:
        raise ValueError(f"config variant is {config.variant}, not RANDOM_SURFER")
    surfer = ModelConfig(
        n=config.n, d=config.d, p=config.p, seed=config.seed, beta=0.0,
        variant=Variant.RANDOM_SURFER,
    )
    return _generate_walk_model(surfer, "surfer")


def generate_pagerank_selection(config: ModelConfig) -> MultiDigraph:
    """PageRank-based selection Webgraph via its walk formulation: walk
    lengths are 0 with probability beta, geometric otherwise.  beta=0
    reproduces the random-surfer law (and, same-seed, the same edges)."""
    config.validate()
    if config.variant is not Variant.PAGERANK_SELECTION:
        raise ValueError(f"config variant is {config.variant}, not PAGERANK_SELECTION")
    return _generate_walk_model(config, "pagerank")


def generate_generalized_tree(n: int, law: StepLaw, seed: SeedSpec) -> MultiDigraph:
    """Walk-toward-root tree (d=1): each new vertex picks a uniform old
    vertex and moves X steps toward the root, X from the given law."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n == 1:
        targets = np.zeros((1, 1), dtype=np.int64)
    else:
        stream = seed.stream()
        starts = _uniform_starts(stream, n, 1)
        lengths = law.sample(stream, n - 1).tolist()
        targets = _build_tree(n, starts, lengths)
    return MultiDigraph(
        d=1,
        targets=targets,
        p=law.p if law.kind == StepLaw.GEOMETRIC else 0.0,
        beta=0.0,
        variant=f"generalized-{law.kind}",
        seed=seed.master_seed,
    )


def generate_graph(config: ModelConfig, law: StepLaw | None = None) -> MultiDigraph:
    """Dispatch on the config's variant."""
    config.validate()
    if config.variant is Variant.RANDOM_SURFER:
        return generate_random_surfer(config)
    if config.variant is Variant.PAGERANK_SELECTION:
        return generate_pagerank_selection(config)
    if law is None:
        raise ValueError("the generalized variant needs a StepLaw")
    return generate_generalized_tree(config.n, law, config.seed)


def marked_spanning_tree(g: MultiDigraph) -> WeightedTree:
    """Spanning tree induced by each vertex's first-created edge, with unit
    weights.  Its height dominates the height of the underlying graph."""
    return unit_weight_tree(g.first_targets())


# --- edge-list text format ------------------------------------------------

_FORMAT_TAG = "websurf-v1"


def _header_line(g: MultiDigraph) -> str:
    return (
        f"# {_FORMAT_TAG} n={g.n} d={g.d} p={float(g.p)!r} beta={float(g.beta)!r} "
        f"variant={g.variant} seed={g.seed}"
    )


def edge_list_text(g: MultiDigraph) -> str:
    """Serialize: header, then one 's t' line per directed edge in creation
    order; the root's self-loops are implied and omitted."""
    buf = io.StringIO()
    buf.write(_header_line(g))
    buf.write("\n")
    tl = g.targets.tolist()
    for s in range(1, g.n):
        for t in tl[s]:
            buf.write(f"{s} {t}\n")
    return buf.getvalue()


def write_edge_list(g: MultiDigraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(edge_list_text(g))


def parse_edge_list(text: str) -> MultiDigraph:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(f"# {_FORMAT_TAG} "):
        raise ValueError(f"not a {_FORMAT_TAG} edge list")
    fields = {}
    for token in lines[0][2 + len(_FORMAT_TAG) + 1 :].split():
        key, _, value = token.partition("=")
        fields[key] = value
    try:
        n = int(fields["n"])
        d = int(fields["d"])
        p = float(fields["p"])
        beta = float(fields["beta"])
        variant = fields["variant"]
        seed = int(fields["seed"])
    except KeyError as exc:
        raise ValueError(f"edge-list header is missing field {exc}") from exc
    targets = np.zeros((n, d), dtype=np.int64)
    edges = [ln for ln in lines[1:] if ln.strip()]
    if len(edges) != (n - 1) * d:
        raise ValueError(f"expected {(n - 1) * d} edge lines, found {len(edges)}")
    for i, ln in enumerate(edges):
        s_str, t_str = ln.split()
        s, t = int(s_str), int(t_str)
        expect_s = 1 + i // d
        if s != expect_s:
            raise ValueError(f"edge line {i + 1}: expected source {expect_s}, got {s}")
        if not 0 <= t < s:
            raise ValueError(f"edge line {i + 1}: target {t} violates birth order")
        targets[s, i % d] = t
    return MultiDigraph(d=d, targets=targets, p=p, beta=beta, variant=variant, seed=seed)


def read_edge_list(path) -> MultiDigraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_edge_list(fh.read())
