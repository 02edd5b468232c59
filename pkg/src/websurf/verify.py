"""The acceptance checklist behind ``websurf verify``.

Thirteen numbered checks covering the constants, the exact oracles, the
inequality suites, the model equivalences, and the banded Monte Carlo
experiments.  Each check returns a CriterionResult; the CLI prints one
CSV line per check and exits nonzero if any fails.  The whole suite is
deterministic for a fixed master seed and runs in a few minutes.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import experiments, metrics, pagerank, theory, wtrees
from .experiments import ExperimentSpec
from .graphs import ModelConfig, StepLaw, generate_generalized_tree, generate_random_surfer
from .streams import SeedSpec, derive_stream_id
from .wtrees import generate_second_model, generate_third_model

MASTER_SEED = 12345


@dataclass(frozen=True)
class CriterionResult:
    index: int
    name: str
    passed: bool
    detail: str
    seconds: float


def _result(index: int, name: str, passed: bool, detail: str, t0: float) -> CriterionResult:
    return CriterionResult(index, name, bool(passed), detail, time.time() - t0)


def criterion_1_crossover_constant() -> CriterionResult:
    t0 = time.time()
    p0 = theory.crossover_p()
    return _result(1, "crossover constant", abs(p0 - 0.206) <= 1e-3, f"p0={p0:.6f}", t0)


def criterion_2_limit_consistency() -> CriterionResult:
    t0 = time.time()
    gap_e = abs(theory.c_lower(0.999) - math.e)
    ok = gap_e <= 0.02
    worst_eq = 0.0
    for p in (0.25, 0.5, 0.9):
        worst_eq = max(worst_eq, abs(theory.c_upper(p) - theory.c_lower(p)))
    ok = ok and worst_eq <= 1e-10
    return _result(2, "limit consistency", ok, f"|cL(0.999)-e|={gap_e:.4f}, max|cU-cL|={worst_eq:.2e}", t0)


def criterion_3_variational() -> CriterionResult:
    t0 = time.time()
    worst = 0.0
    for p in (0.1, 0.3, 0.7):
        sol = theory.c_upper_variational(p)
        worst = max(worst, abs(sol.ratio - theory.c_upper(p)))
    return _result(3, "variational cross-check", worst <= 1e-6, f"max|ratio-cU|={worst:.2e}", t0)


def criterion_4_pmf_oracle() -> CriterionResult:
    t0 = time.time()
    worst = 0.0
    for p in (0.3, 0.5, 0.8):
        geo_tail = 1  # geometric support cut where the mass is < 1e-18
        while (1.0 - p) ** geo_tail > 1e-18:
            geo_tail += 1
        pmf = np.array([(1.0 - p) ** k * p for k in range(geo_tail + 1)])
        acc = np.array([1.0])
        for m in range(1, 11):
            acc = np.convolve(acc, pmf)
            for target in range(-20, m + 1):
                i = m - target  # value of the geometric part
                brute = acc[i] if 0 <= i < len(acc) else 0.0
                worst = max(worst, abs(theory.step_sum_pmf(m, target, p) - brute))
    return _result(4, "exact pmf oracle", worst <= 1e-12, f"max|pmf-conv|={worst:.2e}", t0)


def criterion_5_tail_bounds() -> CriterionResult:
    t0 = time.time()
    spec = ExperimentSpec(name="acceptance-ld", master_seed=MASTER_SEED, include_mc=False)
    summary = experiments.run_large_deviation_experiment(spec)
    bad = [k for k, v in summary.checks.items() if not v["passed"]]
    return _result(5, "tail bound suite", not bad, f"failed={bad or 'none'}", t0)


def criterion_6_margin_grid() -> CriterionResult:
    t0 = time.time()
    report = theory.diameter_margin_grid()
    ok = report.min_margin > 0.0 and report.n_points == 10_000
    return _result(6, "diameter margin grid", ok,
                   f"min_margin={report.min_margin:.4f} at p={report.argmin_p:.3f}", t0)


def criterion_7_pagerank_equivalence() -> CriterionResult:
    t0 = time.time()
    tol = 1e-10
    worst = 0.0
    for n in (1, 50, 200):
        for d in (1, 2, 3):
            for p in (0.2, 0.5, 0.9):
                seed = SeedSpec(MASTER_SEED, derive_stream_id("acc-eq", n, d, repr(p)))
                g = generate_random_surfer(ModelConfig(n=n, d=d, p=p, seed=seed))
                pi = pagerank.pagerank(g, p, tol)
                tau = pagerank.walk_attachment_distribution(g, p, 0.0, tol)
                worst = max(worst, pi.l1_distance(tau))
    return _result(7, "pagerank equivalence", worst <= 2.0 * tol, f"max L1={worst:.2e}", t0)


def criterion_8_coupling() -> CriterionResult:
    t0 = time.time()
    mismatches = 0
    for p in (0.3, 0.7):
        for trial in range(20):
            seed = SeedSpec(MASTER_SEED, derive_stream_id("acc-couple", repr(p), trial))
            g = generate_random_surfer(ModelConfig(n=10_000, d=1, p=p, seed=seed))
            t = generate_second_model(10_000, p, seed)
            if not np.array_equal(metrics.depths(g), t.vertex_weight):
                mismatches += 1
    return _result(8, "depth/weight coupling", mismatches == 0, f"mismatched trials={mismatches}", t0)


def criterion_9_transform_chain() -> CriterionResult:
    t0 = time.time()
    p = 0.4
    trials = 500
    sig = 1e-3
    details = []
    ok = True
    for n in (500, 2000):
        first = np.empty(trials, dtype=np.int64)
        third = np.empty(trials, dtype=np.int64)
        for i in range(trials):
            seed_f = SeedSpec(MASTER_SEED, derive_stream_id("acc-chain-first", n, i))
            g = generate_random_surfer(ModelConfig(n=n, d=1, p=p, seed=seed_f))
            first[i] = metrics.depths(g).max()
            seed_t = SeedSpec(MASTER_SEED, derive_stream_id("acc-chain-third", n, i))
            third[i] = generate_third_model(n, p, seed_t).vertex_weight.max()
        ks = stats.ks_2samp(first, third, method="asymp")
        ok = ok and ks.pvalue >= sig
        details.append(f"first-vs-third n={n} pKS={ks.pvalue:.4f}")
        stopped = wtrees.stopped_tree_law_check(
            n, p, trials, SeedSpec(MASTER_SEED, derive_stream_id("acc-chain-stop", n)), significance=sig
        )
        ok = ok and stopped.passed
        details.append(f"stopped-vs-third n={n} pKS={stopped.pvalue:.4f}")
    return _result(9, "transformation chain laws", ok, "; ".join(details), t0)


def criterion_10_branching_growth() -> CriterionResult:
    t0 = time.time()
    t_snap = 10.0
    vals = []
    for i in range(100):
        tree = wtrees.simulate_branching(
            t_snap, 0.5, seed=SeedSpec(MASTER_SEED, derive_stream_id("acc-growth", i))
        )
        if tree.truncated:
            return _result(10, "branching growth", False, "hit the node cap", t0)
        vals.append(math.log(tree.n) / t_snap)
    med = float(np.median(vals))
    return _result(10, "branching growth", 0.8 <= med <= 1.2, f"median log|V|/t={med:.3f}", t0)


def criterion_11_height_band() -> CriterionResult:
    t0 = time.time()
    spec = ExperimentSpec(
        name="acceptance-height", n_values=(1_000, 100_000), p=0.9,
        trials=100, master_seed=MASTER_SEED, band=0.25,
    )
    summary = experiments.run_height_experiment(spec)
    band = summary.checks["band_n100000"]
    trend = summary.checks["trend"]
    ok = band["passed"] and trend["passed"]
    return _result(
        11, "height band + trend", ok,
        f"mean_ratio={band['mean_ratio']:.3f} in {np.round(band['band'],3).tolist()}, "
        f"trend {trend['closer']}/{trend['total']}",
        t0,
    )


def criterion_12_webgraph_bound() -> CriterionResult:
    t0 = time.time()
    ok = True
    details = []
    for p in (0.3, 0.7):
        for beta in (0.0, 0.5):
            spec = ExperimentSpec(
                name=f"acceptance-webgraph-p{p}-b{beta}",
                n_values=(10_000,), d_values=(1, 2, 3), p=p, beta=beta,
                variant="surfer" if beta == 0.0 else "pagerank",
                trials=50, master_seed=MASTER_SEED,
            )
            summary = experiments.run_webgraph_bound_experiment(spec)
            ok = ok and summary.checks["diameter_bound"]["passed"]
            ok = ok and summary.checks["marked_tree_dominates"]["passed"]
            details.append(
                f"p={p},beta={beta}: viol={summary.checks['diameter_bound']['violations']}"
            )
    return _result(12, "webgraph diameter bound", ok, "; ".join(details), t0)


def criterion_13_structural_invariants() -> CriterionResult:
    t0 = time.time()
    problems = []
    rng_cases = [
        (50, 1, 0.4), (200, 2, 0.6), (300, 3, 0.3), (1000, 1, 0.9), (500, 2, 0.2)
    ]
    for i, (n, d, p) in enumerate(rng_cases):
        seed = SeedSpec(MASTER_SEED, derive_stream_id("acc-struct", i))
        g = generate_random_surfer(ModelConfig(n=n, d=d, p=p, seed=seed))
        try:
            g.validate()
        except ValueError as exc:
            problems.append(f"graph invariants: {exc}")
            continue
        h = metrics.height(g)
        dia = metrics.diameter(g)
        if dia > 2 * h:
            problems.append(f"diameter {dia} > 2*height {h} (n={n}, d={d})")
        if d == 1:
            semi = metrics.semi_diameter(g)
            if semi > dia:
                problems.append(f"semi {semi} > diameter {dia}")
    for i in range(5):
        seed = SeedSpec(MASTER_SEED, derive_stream_id("acc-struct-tree", i))
        t3 = generate_third_model(400, 0.5, seed)
        t3.validate()
        if t3.n != 2 * 400 - 1:
            problems.append("third model is not on 2n-1 vertices")
        contracted = wtrees.contract_zero_edges(t3)
        contracted.validate()
        if metrics.weighted_height(contracted) != metrics.weighted_height(t3):
            problems.append("zero-edge contraction changed the weighted height")
        zero_edges = int((t3.edge_weight[1:] == 0).sum())
        if contracted.n != t3.n - zero_edges:
            problems.append("contraction removed the wrong number of vertices")
    return _result(13, "structural invariants", not problems, "; ".join(problems) or "all hold", t0)


CRITERIA = [
    criterion_1_crossover_constant,
    criterion_2_limit_consistency,
    criterion_3_variational,
    criterion_4_pmf_oracle,
    criterion_5_tail_bounds,
    criterion_6_margin_grid,
    criterion_7_pagerank_equivalence,
    criterion_8_coupling,
    criterion_9_transform_chain,
    criterion_10_branching_growth,
    criterion_11_height_band,
    criterion_12_webgraph_bound,
    criterion_13_structural_invariants,
]


def run_all(only=None) -> list[CriterionResult]:
    results = []
    for i, fn in enumerate(CRITERIA, start=1):
        if only and i not in only:
            continue
        results.append(fn())
    return results


def format_table(results) -> str:
    lines = ["criterion,name,status,seconds,detail"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        detail = r.detail.replace('"', "'")
        lines.append(f'{r.index},{r.name},{status},{r.seconds:.1f},"{detail}"')
    return "\n".join(lines) + "\n"
