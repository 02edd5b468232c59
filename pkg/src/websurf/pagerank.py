"""PageRank of generated multigraphs and the walk-endpoint equivalence.

The stationarity equation is
    pi(v) = p/n + (1-p) * sum_u pi(u) #(uv) / outdeg(u),
iterated from the uniform vector with geometric convergence at rate
(1-p).  Because every vertex has out-degree exactly d there is no
dangling-node handling anywhere.

``walk_attachment_distribution`` evaluates the analytic law of the
endpoint of a mixture-length random walk from a uniform start; at beta=0
it must agree with the power-iteration PageRank to within the combined
tolerances, which is one of the package's acceptance checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import MultiDigraph
from .streams import SeedSpec, sample_L


@dataclass(frozen=True)
class VertexDistribution:
    probs: np.ndarray

    def validate(self) -> None:
        if np.any(self.probs < -1e-15):
            raise ValueError("negative probability entry")
        if abs(float(self.probs.sum()) - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {self.probs.sum()}")

    def l1_distance(self, other: "VertexDistribution") -> float:
        return float(np.abs(self.probs - other.probs).sum())


def _walk_step(g: MultiDigraph, mu: np.ndarray) -> np.ndarray:
    """One step of the out-edge walk applied to a distribution: each of the
    d edge slots of u forwards mu[u]/d to its target."""
    return np.bincount(
        g.targets.ravel(), weights=np.repeat(mu, g.d), minlength=g.n
    ) / g.d


def pagerank(g: MultiDigraph, p: float, tol: float = 1e-10) -> VertexDistribution:
    """Power iteration for the jump-or-follow stationary distribution."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"need p in (0, 1], got {p}")
    if tol <= 0.0:
        raise ValueError(f"need tol > 0, got {tol}")
    n = g.n
    sigma = np.full(n, 1.0 / n)
    pi = sigma.copy()
    if p == 1.0:
        return VertexDistribution(probs=pi)
    while True:
        new = p * sigma + (1.0 - p) * _walk_step(g, pi)
        # the true residual ||new - T(new)||_1 is at most (1-p)*||new - pi||_1
        if (1.0 - p) * float(np.abs(new - pi).sum()) <= tol:
            return VertexDistribution(probs=new)
        pi = new


def stationarity_residual(g: MultiDigraph, p: float, dist: VertexDistribution) -> float:
    """L1 residual of the stationarity equation at ``dist``."""
    n = g.n
    image = p / n + (1.0 - p) * _walk_step(g, dist.probs)
    return float(np.abs(dist.probs - image).sum())


def walk_attachment_distribution(
    g: MultiDigraph, p: float, beta: float, tol: float = 1e-10
) -> VertexDistribution:
    """Exact endpoint law of a mixture-length walk from a uniform start.

    The geometric-length series is truncated at K = ceil(log(tol)/log(1-p));
    the remaining tail mass (1-p)^(K+1) is assigned to the one-more-step
    distribution so the output still sums to exactly 1 and the L-infinity
    error is below tol.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"need p in (0, 1], got {p}")
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"need beta in [0, 1], got {beta}")
    if tol <= 0.0:
        raise ValueError(f"need tol > 0, got {tol}")
    n = g.n
    sigma = np.full(n, 1.0 / n)
    if p == 1.0:
        walk_law = sigma
    else:
        K = int(math.ceil(math.log(tol) / math.log1p(-p)))
        acc = np.zeros(n)
        term = sigma.copy()
        coeff = p
        for _ in range(K + 1):
            acc += coeff * term
            term = _walk_step(g, term)
            coeff *= 1.0 - p
        # 'term' is now the (K+1)-step law and coeff/p = (1-p)^(K+1)
        acc += (coeff / p) * term
        walk_law = acc
    return VertexDistribution(probs=beta * sigma + (1.0 - beta) * walk_law)


def sample_walk_endpoints(
    g: MultiDigraph, p: float, beta: float, num_walks: int, seed: SeedSpec
) -> np.ndarray:
    """Monte Carlo endpoint counts of mixture-length walks (vectorized)."""
    if num_walks < 1:
        raise ValueError("need at least one walk")
    stream = seed.stream()
    n, d = g.n, g.d
    u = stream.uniforms(num_walks)
    cur = np.minimum((n * u).astype(np.int64), n - 1)
    remaining = np.asarray(sample_L(p, beta, stream, size=num_walks))
    flat = g.targets.ravel()
    while True:
        active = remaining > 0
        if not active.any():
            break
        idx = np.flatnonzero(active)
        slots = stream.integers(d, size=len(idx)) if d > 1 else 0
        cur[idx] = flat[cur[idx] * d + slots]
        remaining[idx] -= 1
    return np.bincount(cur, minlength=n)
