"""``hypercover run|eval|gen`` command-line front end."""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import algo
from .bounds import ONE_MINUS_INV_E, required_samples
from .evaluation import estimate_coverage
from .generate import KINDS, generate_edges, write_edges
from .oracles import (
    DomSetOracle,
    ExplicitOracle,
    InputFormatError,
    LandmarkOracle,
    RISOracle,
    assign_weights,
    default_workers,
    load_graph,
    load_hypergraph,
)
from .sketch import BudgetExceeded

SCHEMA = "hypercover/1"
BYTES_PER_ELEMENT = 8
PROBLEMS = ("explicit", "domset", "im", "landmark")
ALGOS = ("dta", "bca", "greedy-full", "exact", "budgeted-dta")


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Problem loading


class Instance:
    """Loaded input: an oracle factory plus the dense-id to original-id map."""

    def __init__(self, n, labels, make_oracle, hyperedges=None):
        self.n = n
        self.labels = labels
        self.make_oracle = make_oracle
        self.hyperedges = hyperedges

    def label(self, v):
        return self.labels[v] if self.labels else v

    def index(self):
        return {lab: i for i, lab in enumerate(self.labels or range(self.n))}


def load_instance(args) -> Instance:
    if args.problem == "explicit":
        if not args.hypergraph:
            raise UsageError("--problem explicit needs --hypergraph")
        edges, labels = load_hypergraph(args.hypergraph)
        if not edges:
            raise InputFormatError(f"{args.hypergraph}: no hyperedges")
        n = max(len(labels), 1)

        def make(seed, workers):
            return ExplicitOracle(edges, n=n, seed=seed, workers=workers)

        return Instance(n, labels, make, hyperedges=edges)

    if not args.graph:
        raise UsageError(f"--problem {args.problem} needs --graph")
    graph = load_graph(args.graph, directed=args.directed)
    if args.problem == "domset":
        def make(seed, workers):
            return DomSetOracle(graph, hops=args.hops, seed=seed, workers=workers)
    elif args.problem == "im":
        if args.weights == "file":
            if graph.rev_prob is None:
                raise InputFormatError(f"{args.graph}: --weights file needs a probability column")
            weighted = graph
        else:
            weighted = assign_weights(graph, args.weights, seed=args.seed)

        def make(seed, workers):
            return RISOracle(weighted, seed=seed, workers=workers)
    else:
        def make(seed, workers):
            return LandmarkOracle(graph, seed=seed, workers=workers)
    return Instance(graph.n, graph.labels, make)


def load_budget(path, L, instance: Instance) -> algo.BudgetSpec:
    index = instance.index()
    cost = [None] * instance.n
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            try:
                node, c = int(parts[0]), float(parts[1])
            except (ValueError, IndexError):
                raise InputFormatError(f"{path}:{lineno}: expected 'node cost'") from None
            if node not in index:
                raise InputFormatError(f"{path}:{lineno}: unknown node id {node}")
            if c <= 0:
                raise InputFormatError(f"{path}:{lineno}: cost must be positive")
            cost[index[node]] = c
    missing = [instance.label(v) for v, c in enumerate(cost) if c is None]
    if missing:
        raise InputFormatError(f"{path}: no cost for node(s) {missing[:5]}")
    return algo.BudgetSpec(tuple(cost), float(L))


# ---------------------------------------------------------------------------
# Validation


def validate_run(args) -> None:
    """Checks that do not need the input loaded."""
    if args.algo == "exact" and args.problem != "explicit":
        raise UsageError("--algo exact needs --problem explicit")
    if args.algo == "budgeted-dta":
        if args.budget is None or args.L is None:
            raise UsageError("--algo budgeted-dta needs --budget and --L")
    elif args.budget is not None or args.L is not None:
        raise UsageError("--budget/--L only apply to --algo budgeted-dta")
    if args.algo != "budgeted-dta" and args.k is None:
        raise UsageError(f"--algo {args.algo} needs --k")
    if args.k is not None and args.k < 1:
        raise UsageError("--k must be at least 1")
    limit = algo.BUDGETED_RATIO if args.algo == "budgeted-dta" else ONE_MINUS_INV_E
    if not (0.0 < args.eps < limit):
        raise UsageError(f"eps={args.eps} outside (0, {limit:.6f})")
    if args.delta is not None and not (0.0 < args.delta < 1.0):
        raise UsageError(f"delta={args.delta} outside (0, 1)")
    if args.max_samples < 1:
        raise UsageError("--max-samples must be positive")
    if args.z is not None and args.algo != "bca":
        raise UsageError("--z only applies to --algo bca")
    if args.retain_full_sketch and args.algo not in ("bca", "dta"):
        raise UsageError("--retain-full-sketch applies to --algo bca or dta")


def _delta(args, n: int) -> float:
    if args.delta is not None:
        return args.delta
    if n < 2:
        raise UsageError("default delta = 1/n needs at least two nodes")
    return 1.0 / n


# ---------------------------------------------------------------------------
# Commands


def _emit(record: dict, out) -> None:
    text = json.dumps(record, indent=2, sort_keys=False)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_run(args) -> int:
    validate_run(args)
    inst = load_instance(args)
    n = inst.n
    delta = _delta(args, n)
    if args.k is not None and args.k > n:
        raise UsageError(f"k={args.k} exceeds node count n={n}")
    if args.algo in ("dta", "bca") and args.z is None and args.k >= n:
        raise UsageError(f"k={args.k} must be below n={n} for the guarantee constants")
    budget = load_budget(args.budget, args.L, inst) if args.algo == "budgeted-dta" else None
    workers = args.workers if args.workers is not None else default_workers()
    oracle = inst.make_oracle(args.seed, workers)

    record = {"schema": SCHEMA, "command": "run"}
    extra = {}
    try:
        start = time.perf_counter()
        if args.algo == "exact":
            value, best = algo.brute_force_opt(inst.hyperedges, args.k)
            solution, d_S, T, z_used, peak, cert = best, int(value), len(inst.hyperedges), None, None, None
            samples = 0
        elif args.algo == "greedy-full":
            N = args.samples or required_samples(args.eps, delta, args.k / n)
            if N > args.max_samples:
                raise UsageError(f"greedy-full needs {N} samples, above --max-samples")
            sketch = [oracle.next_hyperedge() for _ in range(N)]
            solution, d_S = algo.full_sketch_greedy(sketch, args.k)
            if len(solution) < args.k:
                used = set(solution)
                solution += [v for v in range(n) if v not in used][: args.k - len(solution)]
            T, z_used, cert, samples = N, None, None, N
            peak = sum(len(e) for e in sketch)
        else:
            if args.algo == "bca":
                if args.z is not None:
                    res = algo.bca(oracle, args.k, args.z, args.bound, args.max_samples,
                                   retain_full_sketch=args.retain_full_sketch)
                else:
                    res = algo.bca_fixed_guarantee(oracle, args.k, args.eps, delta, args.bound, args.max_samples,
                                                   retain_full_sketch=args.retain_full_sketch)
            elif args.algo == "dta":
                res = algo.dta(oracle, args.k, args.eps, delta, args.bound, args.max_samples,
                               retain_full_sketch=args.retain_full_sketch)
            else:
                res = algo.budgeted_dta(oracle, budget, args.eps, delta, args.max_samples)
            solution, d_S, T, z_used = res.solution, res.d_S, res.T, res.z_used
            peak, samples = res.peak_sketch_elements, res.samples_total
            cert = None
            if res.certificate is not None:
                cert = {"lb": res.certificate.lb, "ub": res.certificate.ub, "ratio": res.certificate.ratio}
            if args.retain_full_sketch:
                greedy_sol, greedy_cov = algo.full_sketch_greedy(res.full_sketch, args.k)
                extra = {
                    "full_peak_elements": res.full_peak_elements,
                    "full_peak_bytes": BYTES_PER_ELEMENT * res.full_peak_elements,
                    "reduction_factor": (res.full_peak_elements / peak) if peak else None,
                    "full_greedy": {
                        "solution": [inst.label(v) for v in greedy_sol],
                        "coverage": greedy_cov,
                    },
                }
        wall = time.perf_counter() - start
    finally:
        oracle.close()

    record.update(
        solution=[inst.label(v) for v in solution],
        d_S=d_S,
        T=T,
        z_used=z_used,
        samples_total=samples,
        peak_sketch_elements=peak,
        peak_sketch_bytes=None if peak is None else BYTES_PER_ELEMENT * peak,
        wall_time_s=wall,
        certificate=cert,
    )
    record.update(extra)
    record["config"] = _config_echo(args, n, delta, workers)
    _emit(record, args.out)
    return 0


def _config_echo(args, n, delta, workers=None) -> dict:
    keys = ("problem", "algo", "graph", "hypergraph", "k", "eps", "bound", "seed", "hops",
            "weights", "directed", "budget", "L", "max_samples", "retain_full_sketch", "z", "samples")
    cfg = {key: getattr(args, key, None) for key in keys if hasattr(args, key)}
    cfg.update(n=n, delta=delta)
    if workers is not None:
        cfg["workers"] = workers
    return cfg


def read_solution(path, inst: Instance):
    index = inst.index()
    nodes = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            try:
                lab = int(s)
            except ValueError:
                raise InputFormatError(f"{path}:{lineno}: expected one node id per line") from None
            if lab not in index:
                raise InputFormatError(f"{path}:{lineno}: unknown node id {lab}")
            nodes.append(index[lab])
    if not nodes:
        raise InputFormatError(f"{path}: empty solution file")
    return nodes


def cmd_eval(args) -> int:
    if not (args.eps > 0 and (args.delta is None or 0 < args.delta < 1)):
        raise UsageError("eps must be positive and delta in (0, 1)")
    inst = load_instance(args)
    S = read_solution(args.solution, inst)
    delta = _delta(args, inst.n)
    workers = args.workers if args.workers is not None else default_workers()
    oracle = inst.make_oracle(args.seed, workers)
    try:
        est = estimate_coverage(oracle, S, args.eps, delta, max_samples=args.max_samples)
    finally:
        oracle.close()
    record = {"schema": SCHEMA, "command": "eval", "estimate": est.to_dict()}
    if args.problem in ("domset", "im"):
        # expected number of nodes dominated / influenced
        record["scaled"] = {
            "unit": "nodes",
            "mean": est.mean * inst.n,
            "lb": est.lb * inst.n,
            "ub": est.ub * inst.n,
        }
    elif args.problem == "landmark":
        record["scaled"] = {"unit": "pair_fraction", "mean": est.mean, "lb": est.lb, "ub": est.ub}
    record["config"] = _config_echo(args, inst.n, delta)
    _emit(record, args.out)
    return 0


def cmd_gen(args) -> int:
    edges = generate_edges(args.kind, args.n, m=args.m, p=args.p, seed=args.seed)
    if args.out:
        write_edges(edges, args.out)
    else:
        for u, v in edges:
            print(u, v)
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def _add_problem_flags(p) -> None:
    p.add_argument("--problem", choices=PROBLEMS, default="explicit")
    p.add_argument("--graph", help="edge list: 'u v' or 'u v p' per line")
    p.add_argument("--hypergraph", help="one hyperedge per line; '-' for an empty one")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--hops", type=int, default=2)
    p.add_argument("--weights", choices=("wc", "tri", "file"), default="wc")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=None, help="default 1/n")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--max-samples", type=int, default=algo.DEFAULT_MAX_SAMPLES)
    p.add_argument("--workers", type=int, default=None, help="prefetch threads (HYPERCOVER_THREADS)")
    p.add_argument("--out", help="write JSON here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypercover", description="Max-k-cover over sampled hyperedges.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="select k nodes")
    _add_problem_flags(run)
    run.add_argument("--algo", choices=ALGOS, default="dta")
    run.add_argument("--k", type=int)
    run.add_argument("--bound", choices=algo.BOUNDS, default="req")
    run.add_argument("--z", type=int, default=None, help="fixed threshold for --algo bca")
    run.add_argument("--budget", help="node cost file: 'node cost' per line")
    run.add_argument("--L", type=float, default=None, help="total cost budget")
    run.add_argument("--samples", type=int, default=None, help="sketch size for greedy-full")
    run.add_argument("--retain-full-sketch", action="store_true")
    run.set_defaults(func=cmd_run)

    ev = sub.add_parser("eval", help="estimate the coverage of a solution")
    _add_problem_flags(ev)
    ev.add_argument("--solution", required=True, help="one node id per line")
    ev.set_defaults(func=cmd_eval, max_samples=10 ** 7)

    gen = sub.add_parser("gen", help="write a synthetic edge list")
    gen.add_argument("kind", choices=KINDS)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m", type=int, default=3, help="attachments per node (ba)")
    gen.add_argument("--p", type=float, default=0.05, help="edge probability (er)")
    gen.add_argument("--seed", type=int, default=42)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InputFormatError, BudgetExceeded, algo.SampleCapReached, ValueError, OSError) as exc:
        print(f"hypercover: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
