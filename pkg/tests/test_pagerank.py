"""Tests for PageRank power iteration and the walk-endpoint law."""

import math

import numpy as np
import pytest

from websurf import pagerank
from websurf.graphs import ModelConfig, generate_random_surfer
from websurf.streams import SeedSpec


def surfer(n, d, p, master=404, stream=0):
    return generate_random_surfer(ModelConfig(n=n, d=d, p=p, seed=SeedSpec(master, stream)))


def test_single_vertex():
    g = surfer(1, 3, 0.5)
    assert pagerank.pagerank(g, 0.5).probs.tolist() == [1.0]
    assert pagerank.walk_attachment_distribution(g, 0.5, 0.3).probs.tolist() == [1.0]


def test_p_one_uniform():
    g = surfer(50, 2, 0.5)
    pi = pagerank.pagerank(g, 1.0)
    assert np.allclose(pi.probs, 1.0 / 50, atol=0)


def test_parameter_errors():
    g = surfer(10, 1, 0.5)
    with pytest.raises(ValueError):
        pagerank.pagerank(g, 0.0)
    with pytest.raises(ValueError):
        pagerank.pagerank(g, 0.5, tol=0.0)
    with pytest.raises(ValueError):
        pagerank.walk_attachment_distribution(g, 0.5, -0.1)


def test_stationarity_residual_post_condition():
    tol = 1e-10
    for n, d, p in [(2, 1, 0.2), (50, 2, 0.5), (200, 3, 0.9)]:
        g = surfer(n, d, p)
        pi = pagerank.pagerank(g, p, tol)
        pi.validate()
        assert pagerank.stationarity_residual(g, p, pi) <= tol


def test_residual_contracts_at_rate():
    g = surfer(100, 2, 0.3)
    p = 0.3
    n = g.n
    sigma = np.full(n, 1.0 / n)
    pi = sigma.copy()
    prev = pagerank.stationarity_residual(g, p, pagerank.VertexDistribution(pi))
    for _ in range(20):
        pi = p * sigma + (1.0 - p) * pagerank._walk_step(g, pi)
        res = pagerank.stationarity_residual(g, p, pagerank.VertexDistribution(pi))
        if prev > 1e-14:
            assert res <= prev * ((1.0 - p) + 1e-12)
        prev = res


@pytest.mark.parametrize("n", [1, 2, 50, 200])
@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("p", [0.2, 0.5, 0.9])
def test_walk_law_equals_pagerank_at_beta_zero(n, d, p):
    tol = 1e-10
    g = surfer(n, d, p, master=405, stream=n * 10 + d)
    pi = pagerank.pagerank(g, p, tol)
    tau = pagerank.walk_attachment_distribution(g, p, 0.0, tol)
    tau.validate()
    assert pi.l1_distance(tau) <= 2 * tol


def test_beta_one_exactly_uniform():
    g = surfer(64, 2, 0.4)
    tau = pagerank.walk_attachment_distribution(g, 0.4, 1.0)
    assert np.array_equal(tau.probs, np.full(64, 1.0 / 64))


def test_walk_law_valid_distribution_mixed_beta():
    g = surfer(150, 3, 0.3)
    for beta in (0.0, 0.25, 0.75):
        tau = pagerank.walk_attachment_distribution(g, 0.3, beta)
        tau.validate()
        assert abs(float(tau.probs.sum()) - 1.0) < 1e-12


def test_monte_carlo_endpoints_match_analytic():
    g = surfer(200, 2, 0.5, master=406)
    beta = 0.5
    walks = 1_000_000
    analytic = pagerank.walk_attachment_distribution(g, 0.5, beta).probs
    counts = pagerank.sample_walk_endpoints(g, 0.5, beta, walks, SeedSpec(406, 99))
    assert counts.sum() == walks
    sd = np.sqrt(walks * analytic * (1 - analytic))
    z = np.abs(counts - walks * analytic) / np.where(sd > 0, sd, 1.0)
    assert float(z.max()) <= 4.0
