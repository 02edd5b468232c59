"""Command-line entry point.

Subcommands: generate, metrics, pagerank, branch, theory, experiment,
verify.  stdout carries machine-readable output (JSON/CSV); commentary
goes to stderr.  Exit codes: 0 success, 1 check failure, 2 usage or
parameter error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import experiments, metrics, pagerank, theory, verify
from .graphs import (
    ModelConfig,
    StepLaw,
    Variant,
    generate_generalized_tree,
    generate_pagerank_selection,
    generate_random_surfer,
    read_edge_list,
    write_edge_list,
)
from .streams import SeedSpec
from .wtrees import simulate_branching


def _default_threads() -> int:
    env = os.environ.get("WEBSURF_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="websurf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a graph and write the edge-list file")
    g.add_argument("--model", choices=["surfer", "pagerank", "generalized"], required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, default=1)
    g.add_argument("--p", type=float, default=0.5)
    g.add_argument("--beta", type=float, default=0.0)
    g.add_argument("--law", choices=["const0", "bernoulli", "geo"], default="geo",
                   help="step law for the generalized model")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--stream", type=int, default=0)
    g.add_argument("--out", required=True)

    m = sub.add_parser("metrics", help="metrics of an edge-list file as JSON")
    m.add_argument("--in", dest="infile", required=True)

    pr = sub.add_parser("pagerank", help="PageRank of an edge-list file as CSV")
    pr.add_argument("--in", dest="infile", required=True)
    pr.add_argument("--p", type=float, required=True)
    pr.add_argument("--tol", type=float, default=1e-10)

    b = sub.add_parser("branch", help="simulate the branching tree; JSON summary")
    b.add_argument("--t-max", type=float, required=True)
    b.add_argument("--p", type=float, required=True)
    b.add_argument("--variant", choices=["T", "Tprime"], default="T")
    b.add_argument("--cap", type=int, default=2_000_000)
    b.add_argument("--seed", type=int, required=True)
    b.add_argument("--stream", type=int, default=0)

    t = sub.add_parser("theory", help="evaluate constants and rate functions")
    tsub = t.add_subparsers(dest="theory_command", required=True)
    te = tsub.add_parser("eval", help="print one value")
    te.add_argument("--fn", required=True,
                    help="p0|s|cL|cU|cU-var|upsilon|f|h|phi|phi-inv|gL|gU|gU-prime|margin")
    te.add_argument("--p", type=float)
    te.add_argument("--a", type=float)
    te.add_argument("--x", type=float)
    te.add_argument("--c", type=float)
    tt = tsub.add_parser("table", help="CSV table of constants over a p grid")
    tt.add_argument("--fn", default="cL,cU")
    tt.add_argument("--p-grid", required=True, help="lo:hi:step")
    tt.add_argument("--out", default="-")

    e = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    e.add_argument("--kind", choices=["height", "diameter", "webgraph-bound",
                                      "equivalence", "large-deviation"], required=True)
    e.add_argument("--name")
    e.add_argument("--n", type=int, nargs="+", default=[10_000])
    e.add_argument("--d", type=int, nargs="+", default=[1])
    e.add_argument("--p", type=float, default=0.5)
    e.add_argument("--beta", type=float, default=0.0)
    e.add_argument("--variant", choices=["surfer", "pagerank", "generalized"], default="surfer")
    e.add_argument("--law", choices=["const0", "bernoulli", "geo"])
    e.add_argument("--trials", type=int, default=100)
    e.add_argument("--seed", type=int, default=12345)
    e.add_argument("--band", type=float, default=0.25)
    e.add_argument("--threads", type=int, default=None)
    e.add_argument("--out", help="output path prefix for CSV + JSON")

    v = sub.add_parser("verify", help="run the acceptance checklist")
    v.add_argument("--only", type=int, nargs="+", help="criterion numbers to run")
    return parser


def _cmd_generate(args) -> int:
    seed = SeedSpec(args.seed, args.stream)
    if args.model == "surfer":
        g = generate_random_surfer(ModelConfig(n=args.n, d=args.d, p=args.p, seed=seed))
    elif args.model == "pagerank":
        g = generate_pagerank_selection(
            ModelConfig(n=args.n, d=args.d, p=args.p, beta=args.beta, seed=seed,
                        variant=Variant.PAGERANK_SELECTION)
        )
    else:
        law = {
            "const0": StepLaw.constant0(),
            "bernoulli": StepLaw.bernoulli_half(),
            "geo": StepLaw.geometric(args.p),
        }[args.law]
        g = generate_generalized_tree(args.n, law, seed)
    write_edge_list(g, args.out)
    print(f"wrote {g.n} vertices, {max(g.n - 1, 0) * g.d} edges to {args.out}", file=sys.stderr)
    return 0


def _cmd_metrics(args) -> int:
    g = read_edge_list(args.infile)
    report = metrics.metric_report(g)
    out = {
        "n": report.n,
        "height": report.height,
        "diameter": report.diameter,
        "semi_diameter": report.semi_diameter,
        "weighted_height": report.weighted_height,
    }
    print(json.dumps(out, sort_keys=True))
    return 0


def _cmd_pagerank(args) -> int:
    g = read_edge_list(args.infile)
    dist = pagerank.pagerank(g, args.p, args.tol)
    print("vertex,prob")
    for v, q in enumerate(dist.probs):
        print(f"{v},{float(q)!r}")
    return 0


def _cmd_branch(args) -> int:
    tree = simulate_branching(
        args.t_max, args.p, variant=args.variant, cap=args.cap,
        seed=SeedSpec(args.seed, args.stream),
    )
    out = {
        "nodes": tree.n,
        "weighted_height": tree.weighted_height(),
        "truncated": tree.truncated,
        "t_max": tree.t_max,
        "variant": args.variant,
    }
    print(json.dumps(out, sort_keys=True))
    return 0


def _theory_eval(args) -> int:
    fn = args.fn
    need_p = {"s", "cL", "cU", "cU-var", "f", "h", "phi", "phi-inv", "gL", "gU", "gU-prime", "margin"}
    if fn in need_p and args.p is None:
        raise ValueError(f"--fn {fn} needs --p")
    if fn == "p0":
        value = theory.crossover_p()
    elif fn == "s":
        value = theory.height_root(args.p)
    elif fn == "cL":
        value = theory.c_lower(args.p)
    elif fn == "cU":
        value = theory.c_upper(args.p)
    elif fn == "cU-var":
        value = theory.c_upper_variational(args.p).ratio
    elif fn == "upsilon":
        if args.x is None:
            raise ValueError("--fn upsilon needs --x")
        value = theory.exp_rate(args.x)
    elif fn == "f":
        if args.x is None:
            raise ValueError("--fn f needs --x")
        value = theory.step_base(args.x, args.p)
    elif fn == "h":
        if args.x is None:
            raise ValueError("--fn h needs --x")
        value = theory.clamped_base(args.x, args.p)
    elif fn == "phi":
        if args.a is None:
            raise ValueError("--fn phi needs --a")
        value = theory.saddle_point(args.a, args.p)
    elif fn == "phi-inv":
        if args.x is None:
            raise ValueError("--fn phi-inv needs --x (the target value)")
        value = theory.saddle_point_inv(args.x, args.p)
    elif fn == "gL":
        if args.a is None:
            raise ValueError("--fn gL needs --a")
        value = theory.lower_base(args.a, args.p)
    elif fn == "gU":
        if args.a is None:
            raise ValueError("--fn gU needs --a")
        value = theory.upper_base(args.a, args.p)
    elif fn == "gU-prime":
        if args.a is None:
            raise ValueError("--fn gU-prime needs --a")
        value = theory.upper_base_deriv(args.a, args.p)
    elif fn == "margin":
        if args.c is None:
            raise ValueError("--fn margin needs --c")
        value = theory.diameter_margin(args.p, args.c)
    else:
        raise ValueError(f"unknown --fn {fn!r}")
    print(repr(float(value)))
    return 0


def _theory_table(args) -> int:
    lo_s, hi_s, step_s = args.p_grid.split(":")
    lo, hi, step = float(lo_s), float(hi_s), float(step_s)
    if step <= 0 or hi < lo:
        raise ValueError(f"bad p grid {args.p_grid!r}")
    fns = [f.strip() for f in args.fn.split(",") if f.strip()]
    known = {"cL": theory.c_lower, "cU": theory.c_upper, "s": theory.height_root}
    for f in fns:
        if f not in known:
            raise ValueError(f"table supports {sorted(known)}, got {f!r}")
    lines = ["p," + ",".join(fns)]
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    for i in range(count):
        p = lo + i * step
        if not 0.0 < p < 1.0:
            continue
        lines.append(repr(p) + "," + ",".join(repr(float(known[f](p))) for f in fns))
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {count} rows to {args.out}", file=sys.stderr)
    return 0


def _cmd_experiment(args) -> int:
    threads = args.threads if args.threads is not None else _default_threads()
    name = args.name or f"{args.kind}-p{args.p}"
    spec = experiments.ExperimentSpec(
        name=name,
        n_values=tuple(args.n),
        d=args.d[0],
        d_values=tuple(args.d) if len(args.d) > 1 else None,
        p=args.p,
        beta=args.beta,
        variant=args.variant,
        law=args.law,
        trials=args.trials,
        master_seed=args.seed,
        band=args.band,
        threads=threads,
    )
    runner = {
        "height": experiments.run_height_experiment,
        "diameter": experiments.run_diameter_experiment,
        "webgraph-bound": experiments.run_webgraph_bound_experiment,
        "equivalence": experiments.run_equivalence_experiment,
        "large-deviation": experiments.run_large_deviation_experiment,
    }[args.kind]
    summary = runner(spec)
    if args.out:
        csv_path, json_path = experiments.write_outputs(summary, args.out)
        print(f"wrote {csv_path} and {json_path}", file=sys.stderr)
    print(json.dumps(summary.to_json_dict(timestamp=False), sort_keys=True))
    return 0 if summary.passed() else 1


def _cmd_verify(args) -> int:
    results = verify.run_all(only=args.only)
    sys.stdout.write(verify.format_table(results))
    return 0 if all(r.passed for r in results) else 1


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "metrics":
            return _cmd_metrics(args)
        if args.command == "pagerank":
            return _cmd_pagerank(args)
        if args.command == "branch":
            return _cmd_branch(args)
        if args.command == "theory":
            if args.theory_command == "eval":
                return _theory_eval(args)
            return _theory_table(args)
        if args.command == "experiment":
            return _cmd_experiment(args)
        if args.command == "verify":
            return _cmd_verify(args)
        parser.error(f"unknown command {args.command!r}")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
