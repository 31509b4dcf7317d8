"""Command-line entry point: ``qhitting {generate,classical,quantum,sweep,verify}``.

Exit status is 0 on success, 1 when a computation fails or a verification
check does not pass, and 2 on invalid arguments.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .chains import classical_ht, marked_set, transition_from_graph
from .errors import QHittingError
from .graphs import load_graph, make_graph, save_graph
from .harness import (
    distribution_for,
    emit_csv,
    graph_sweep,
    parse_distribution,
    trial_sweep,
    write_summary_csv,
)
from .hitting import quantum_ht, speedup_check
from .verify import all_passed, run_property_suite

FAMILY_PARAMS = {
    "circulant": ("n", "offsets", "directed", "loop_weight"),
    "barbell": ("m1", "m2"),
    "ba": ("n", "m"),
    "er": ("n", "p"),
    "regular": ("d", "n"),
}


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _dist(text):
    try:
        parse_distribution(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _add_family_args(p, required=True):
    g = p.add_argument_group("graph family")
    g.add_argument("--family", choices=sorted(FAMILY_PARAMS), required=required)
    g.add_argument("--n", type=int, help="node count (circulant, ba, er, regular)")
    g.add_argument("--m1", type=int, help="bell size (barbell)")
    g.add_argument("--m2", type=int, help="bar length (barbell)")
    g.add_argument("--m", type=int, help="attachment count (ba)")
    g.add_argument("--p", type=float, help="edge probability (er)")
    g.add_argument("--d", type=int, help="degree (regular)")
    g.add_argument("--offsets", type=_int_list, default=[0, 1], help="circulant offsets, e.g. 0,1,2")
    g.add_argument("--directed", action="store_true", help="directed circulant (arcs i -> i+k only)")
    g.add_argument("--loop-weight", type=float, default=1.0, help="circulant self-loop weight")
    g.add_argument("--seed", type=int, default=0)


def _family_params(args, parser):
    params = {}
    for name in FAMILY_PARAMS[args.family]:
        value = getattr(args, name)
        if value is None:
            parser.error(f"--family {args.family} requires --{name.replace('_', '-')}")
        params[name] = value
    return params


def _graph_from_args(args, parser):
    if getattr(args, "graph", None):
        return load_graph(args.graph)
    if not args.family:
        parser.error("give --graph FILE or --family with its parameters")
    return make_graph(args.family, seed=args.seed, **_family_params(args, parser))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qhitting", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a graph file")
    _add_family_args(p)
    p.add_argument("--out", required=True, help="output path")

    for name, helptext in (("classical", "classical hitting time"), ("quantum", "quantum hitting report")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--graph", required=True, help="graph file")
        p.add_argument("--dist", type=_dist, default="stationary", help="e.g. stationary, dirac:0:0.01")
        p.add_argument("--marked", type=_int_list, required=True, help="marked nodes, e.g. 0 or 0,3")
        p.add_argument("--seed", type=int, default=0, help="seed for random distributions")
        if name == "quantum":
            p.add_argument("--tmax", type=int, default=None)

    p = sub.add_parser("sweep", help="mark every node in turn and average")
    p.add_argument("--graph", help="graph file instead of a family")
    _add_family_args(p, required=False)
    p.add_argument("--dist", type=_dist, default="stationary")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--tmax", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--csv", help="per-node CSV (single trial) or summary CSV (several trials)")
    p.add_argument("--summary-csv", help="summary CSV with one row")

    p = sub.add_parser("verify", help="run the numerical property suite")
    p.add_argument("--graph", help="graph file instead of a family")
    _add_family_args(p, required=False)
    p.add_argument("--dist", type=_dist, default="stationary")
    p.add_argument("--marked", type=_int_list, default=None)
    return parser


def _cmd_generate(args, parser):
    g = _graph_from_args(args, parser)
    save_graph(g, args.out)
    print(f"wrote {args.out}: n={g.n}, edges={g.edge_count}, directed={g.directed}")
    return 0


def _load_problem(args):
    g = load_graph(args.graph)
    P = transition_from_graph(g)
    sigma = distribution_for(args.dist, P, rng=np.random.default_rng(args.seed))
    return P, sigma, marked_set(args.marked, g.n)


def _cmd_classical(args, parser):
    P, sigma, M = _load_problem(args)
    h = classical_ht(P, sigma, M)
    print(f"marked: {list(M)}")
    print(f"p: {sigma[list(M)].sum():.6f}")
    print(f"h: {h:.6f}")
    print(f"sh: {math.sqrt(h):.6f}")
    return 0


def _cmd_quantum(args, parser):
    P, sigma, M = _load_problem(args)
    r = quantum_ht(P, sigma, M, args.tmax)
    print(f"marked: {list(r.marked)}")
    for key in ("p", "qh", "qhe", "qhe_rigorous", "che", "h", "sh", "max_f"):
        print(f"{key}: {getattr(r, key):.6f}")
    chk = speedup_check(r)
    if chk.applicable:
        print(f"qh <= che: {chk.within_che}")
        print(f"qh <= sh: {chk.within_sqrt_h}")
    else:
        print(f"truncated after T = {r.t_last}; speedup check not applicable")
    return 0


def _print_summary(s):
    for key in ("mqh", "mqhe", "mche", "msh", "mh"):
        print(f"{key}: {getattr(s, key):.6f}")


def _cmd_sweep(args, parser):
    if args.trials < 1:
        parser.error("--trials must be >= 1")
    if args.graph:
        g = load_graph(args.graph)
        s = graph_sweep(g, args.dist, args.tmax, rng=np.random.default_rng([args.seed, 0]),
                        threads=args.threads, config={"trials": 1, "seed": args.seed})
    else:
        if not args.family:
            parser.error("give --graph FILE or --family with its parameters")
        s = trial_sweep(args.family, _family_params(args, parser), args.dist, args.trials, args.seed, args.tmax,
                        threads=args.threads)
    print(f"n: {s.n}")
    _print_summary(s)
    if args.csv:
        emit_csv(s, args.csv)
    if args.summary_csv:
        write_summary_csv([s], args.summary_csv)
    return 0


def _cmd_verify(args, parser):
    g = _graph_from_args(args, parser)
    P = transition_from_graph(g)
    sigma = distribution_for(args.dist, P, rng=np.random.default_rng([args.seed, 0]))
    results = run_property_suite(P, sigma, args.marked, seed=args.seed)
    for r in results:
        print(r.line())
    ok = all_passed(results)
    print("all checks passed" if ok else "some checks FAILED")
    return 0 if ok else 1


COMMANDS = {
    "generate": _cmd_generate,
    "classical": _cmd_classical,
    "quantum": _cmd_quantum,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, parser)
    except (QHittingError, OSError) as exc:
        print(f"qhitting: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
