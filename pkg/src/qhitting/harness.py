"""Experiment driver: marked-node sweeps, multi-seed averages, CSV output.

Seeding: trial ``t`` of a sweep with base seed ``s`` samples its graph with
seed ``s + t`` and draws any random distribution from
``numpy.random.default_rng([s, t])``, so graph and distribution streams are
independent and every trial is reproducible on its own.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .chains import make_distribution, transition_from_graph
from .errors import SweepError
from .graphs import Graph, make_graph
from .hitting import HitReport, quantum_ht

THREADS_ENV = "QHITTING_THREADS"

NODE_COLUMNS = ("node", "qh", "qhe", "che", "h", "sh")
SUMMARY_COLUMNS = ("n", "family", "dist", "mqh", "mqhe", "mche", "msh", "mh", "trials", "seed")
FLOAT_FORMAT = "{:.6f}"

# name -> ordered positional parameters after the kind in "kind:a:b"
_DIST_ARGS = {
    "uniform": (),
    "stationary": (),
    "outdegree": (),
    "indegree": (),
    "random": (),
    "eps_stationary": (("eps", float),),
    "dirac": (("node", int), ("delta", float)),
}


@dataclass(frozen=True)
class SweepSummary:
    mqh: float
    mqhe: float
    mche: float
    msh: float
    mh: float
    config: dict
    per_node: tuple[HitReport, ...] = ()
    trials: tuple["SweepSummary", ...] = field(default=(), repr=False)

    __hash__ = None

    @property
    def n(self) -> int:
        return self.config.get("n", len(self.per_node))


def parse_distribution(spec: str) -> tuple[str, dict]:
    """``"dirac:0:0.01"`` -> ``("dirac", {"node": 0, "delta": 0.01})``."""
    kind, *args = spec.split(":")
    if kind not in _DIST_ARGS:
        raise ValueError(f"unknown distribution {kind!r}; choose from {sorted(_DIST_ARGS)}")
    names = _DIST_ARGS[kind]
    if len(args) > len(names):
        raise ValueError(f"distribution {kind!r} takes at most {len(names)} parameters, got {len(args)}")
    try:
        params = {name: conv(a) for (name, conv), a in zip(names, args)}
    except ValueError:
        raise ValueError(f"bad parameters in distribution spec {spec!r}") from None
    return kind, params


def distribution_for(spec: str, P, rng=None) -> np.ndarray:
    kind, params = parse_distribution(spec)
    return make_distribution(kind, P, rng=rng, **params)


def thread_count(threads=None) -> int:
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, 0)) or min(8, os.cpu_count() or 1)
    return max(1, int(threads))


def _mean(values) -> float:
    return float(np.mean(values))


def summarize(reports, config) -> SweepSummary:
    bad = [r.marked for r in reports if not math.isfinite(r.qh)]
    if bad:
        raise SweepError(f"quantum hitting time did not cross the threshold for marked set {bad[0]}",
                         node=bad[0])
    return SweepSummary(
        mqh=_mean([r.qh for r in reports]),
        mqhe=_mean([r.qhe for r in reports]),
        mche=_mean([r.che for r in reports]),
        msh=_mean([r.sh for r in reports]),
        mh=_mean([r.h for r in reports]),
        config=dict(config),
        per_node=tuple(reports),
    )


def node_sweep(P, sigma, t_max=None, *, nodes=None, threads=None, config=None) -> SweepSummary:
    """Mark each node in turn (``|M| = 1``) and average the hitting quantities."""
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    nodes = range(n) if nodes is None else nodes
    workers = thread_count(threads)
    job = lambda i: quantum_ht(P, sigma, [i], t_max)  # noqa: E731
    if workers == 1:
        reports = [job(i) for i in nodes]
    else:
        with ThreadPoolExecutor(workers) as pool:
            reports = list(pool.map(job, nodes))
    cfg = {"n": n}
    cfg.update(config or {})
    return summarize(reports, cfg)


def graph_sweep(g: Graph, dist: str, t_max=None, *, rng=None, threads=None, config=None) -> SweepSummary:
    P = transition_from_graph(g)
    sigma = distribution_for(dist, P, rng=rng)
    cfg = {"family": (g.family_tag or {}).get("family", "custom"), "dist": dist}
    cfg.update(config or {})
    return node_sweep(P, sigma, t_max, threads=threads, config=cfg)


def trial_sweep(family: str, params: dict, dist: str, trials: int = 10, seed: int = 0, t_max=None, *,
                threads=None) -> SweepSummary:
    """Average :func:`graph_sweep` statistics over ``trials`` seeded graph samples."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    runs = []
    for t in range(trials):
        g = make_graph(family, seed=seed + t, **params)
        rng = np.random.default_rng([seed, t])
        runs.append(graph_sweep(g, dist, t_max, rng=rng, threads=threads,
                                config={"family": family, "params": dict(params), "seed": seed + t}))
    return SweepSummary(
        mqh=_mean([r.mqh for r in runs]),
        mqhe=_mean([r.mqhe for r in runs]),
        mche=_mean([r.mche for r in runs]),
        msh=_mean([r.msh for r in runs]),
        mh=_mean([r.mh for r in runs]),
        config={"n": runs[0].n, "family": family, "params": dict(params), "dist": dist, "trials": trials,
                "seed": seed},
        per_node=runs[0].per_node if trials == 1 else (),
        trials=tuple(runs),
    )


def _fmt(x) -> str:
    return "inf" if not math.isfinite(x) else FLOAT_FORMAT.format(x)


def write_node_csv(reports, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(NODE_COLUMNS)
        for r in reports:
            node = r.marked[0] if len(r.marked) == 1 else " ".join(map(str, r.marked))
            w.writerow([node, *(_fmt(v) for v in (r.qh, r.qhe, r.che, r.h, r.sh))])


def write_summary_csv(summaries, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_COLUMNS)
        for s in summaries:
            c = s.config
            w.writerow([c.get("n", ""), c.get("family", ""), c.get("dist", ""),
                        *(_fmt(v) for v in (s.mqh, s.mqhe, s.mche, s.msh, s.mh)),
                        c.get("trials", 1), c.get("seed", "")])


def emit_csv(obj, path) -> Path:
    """Write a per-node file for a single sweep's reports, a summary file otherwise.

    ``obj`` may be a :class:`SweepSummary` (per-node rows), a list of
    :class:`HitReport` (per-node rows) or a list of summaries (summary rows).
    """
    path = Path(path)
    if isinstance(obj, SweepSummary):
        if obj.per_node:
            write_node_csv(obj.per_node, path)
        else:
            write_summary_csv([obj], path)
    else:
        items = list(obj)
        if items and isinstance(items[0], SweepSummary):
            write_summary_csv(items, path)
        else:
            write_node_csv(items, path)
    return path


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
