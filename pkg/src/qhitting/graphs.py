"""Graph records, the experiment graph families, and the JSON graph file format.

A :class:`Graph` is an immutable edge list.  Undirected graphs store each
``{i, j}`` pair once; :meth:`Graph.adjacency` expands it symmetrically.  A
self loop contributes its weight once to the diagonal.

The three random families are sampled with networkx so that their laws match
the networkx generators of the same name.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import jsonschema
import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import GraphFileError, GraphGenerationError, GraphValidationError

DEFAULT_RETRIES = 100

GRAPH_FILE_FORMAT = "qhitting-graph"
GRAPH_FILE_VERSION = 1

GRAPH_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["format", "version", "n", "directed", "edges"],
    "additionalProperties": False,
    "properties": {
        "format": {"const": GRAPH_FILE_FORMAT},
        "version": {"const": GRAPH_FILE_VERSION},
        "n": {"type": "integer", "minimum": 1},
        "directed": {"type": "boolean"},
        "edges": {
            "type": "array",
            "items": {
                "type": "array",
                "prefixItems": [
                    {"type": "integer", "minimum": 0},
                    {"type": "integer", "minimum": 0},
                    {"type": "number", "minimum": 0},
                ],
                "minItems": 3,
                "maxItems": 3,
            },
        },
        "family_tag": {
            "type": ["object", "null"],
            "required": ["family", "params"],
            "properties": {
                "family": {"type": "string"},
                "params": {"type": "object"},
                "seed": {"type": ["integer", "null"]},
            },
        },
    },
}


@dataclass(frozen=True)
class Graph:
    """Weighted graph on nodes ``0..n-1``.

    ``edges`` holds ``(source, target, weight)`` triples.  ``family_tag`` is
    an optional provenance record ``{"family", "params", "seed"}``.
    """

    n: int
    directed: bool
    edges: tuple[tuple[int, int, float], ...]
    family_tag: dict | None = field(default=None, compare=True)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise GraphValidationError(f"node count must be a positive integer, got {self.n!r}")
        clean = []
        for e in self.edges:
            if len(e) != 3:
                raise GraphValidationError(f"edge {e!r} is not a (source, target, weight) triple")
            u, v, w = int(e[0]), int(e[1]), float(e[2])
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphValidationError(f"edge ({u}, {v}) has a node index outside [0, {self.n})")
            if not np.isfinite(w) or w < 0:
                raise GraphValidationError(f"edge ({u}, {v}) has invalid weight {w!r}")
            clean.append((u, v, w))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", tuple(clean))

    __hash__ = None  # family_tag is a dict

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def adjacency(self) -> np.ndarray:
        """Dense weighted adjacency matrix ``A[i, j]``."""
        A = np.zeros((self.n, self.n))
        for u, v, w in self.edges:
            A[u, v] += w
            if not self.directed and u != v:
                A[v, u] += w
        return A

    def out_weights(self) -> np.ndarray:
        return self.adjacency().sum(axis=1)

    def in_weights(self) -> np.ndarray:
        return self.adjacency().sum(axis=0)

    def dangling_nodes(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.out_weights() <= 0)]

    def validate(self, allow_dangling=False):
        if not allow_dangling:
            dangling = self.dangling_nodes()
            if dangling:
                raise GraphValidationError(f"node {dangling[0]} has no outgoing edge of positive weight")
        return self

    def neighbors(self, i: int) -> set[int]:
        """Out-neighbours of ``i`` (excluding ``i`` itself)."""
        row = self.adjacency()[i]
        return {int(j) for j in np.flatnonzero(row > 0) if j != i}

    def edge_multiset(self) -> list[tuple[int, int, float]]:
        """Canonical sorted edge list; undirected pairs are ordered ``u <= v``."""
        if self.directed:
            return sorted(self.edges)
        return sorted((min(u, v), max(u, v), w) for u, v, w in self.edges)

    def is_strongly_connected(self) -> bool:
        return is_strongly_connected(self.adjacency())

    def to_networkx(self) -> nx.Graph:
        G = nx.DiGraph() if self.directed else nx.Graph()
        G.add_nodes_from(range(self.n))
        G.add_weighted_edges_from(self.edges)
        return G


def is_strongly_connected(adjacency) -> bool:
    ncomp, _ = connected_components(csr_matrix(np.asarray(adjacency) > 0), directed=True, connection="strong")
    return ncomp == 1


def _tag(family, seed=None, **params):
    return {"family": family, "params": params, "seed": seed}


def _from_networkx(G: nx.Graph, family_tag: dict) -> Graph:
    mapping = {v: i for i, v in enumerate(sorted(G.nodes()))}
    edges = tuple((mapping[u], mapping[v], 1.0) for u, v in G.edges())
    return Graph(len(mapping), G.is_directed(), edges, family_tag)


def circulant_with_loops(n: int, offsets: Sequence[int] = (0, 1), *, directed: bool = False,
                         loop_weight: float = 1.0) -> Graph:
    """Circulant graph where every node carries a self loop.

    Undirected: node ``i`` is adjacent to ``i ± k (mod n)`` for each offset ``k``.
    Directed: arcs ``i -> i + k (mod n)`` only.  Offset 0 is the self loop and
    must be present; ``loop_weight`` sets its adjacency weight.
    """
    if n < 3:
        raise GraphValidationError(f"circulant graph needs n >= 3, got {n}")
    offsets = [int(k) for k in offsets]
    if not offsets:
        raise GraphValidationError("circulant graph needs a nonempty offset list")
    if not any(k % n == 0 for k in offsets):
        raise GraphValidationError("circulant offsets must include 0 (self loop)")
    if loop_weight <= 0:
        raise GraphValidationError("loop_weight must be positive")
    steps = sorted({k % n for k in offsets if k % n})
    edges = [(i, i, float(loop_weight)) for i in range(n)]
    seen = set()
    for i in range(n):
        for k in steps:
            j = (i + k) % n
            key = (i, j) if directed else (min(i, j), max(i, j))
            if key not in seen:
                seen.add(key)
                edges.append((key[0], key[1], 1.0))
    tag = _tag("circulant", n=n, offsets=sorted({k % n for k in offsets}), directed=directed,
               loop_weight=float(loop_weight))
    return Graph(n, directed, tuple(edges), tag)


def barbell(m1: int, m2: int) -> Graph:
    """Two ``m1``-cliques joined by a path of ``m2`` nodes (networkx node order)."""
    if m1 < 3:
        raise GraphValidationError(f"barbell bells need m1 >= 3, got {m1}")
    if m2 < 0:
        raise GraphValidationError(f"barbell bar length must be >= 0, got {m2}")
    n = 2 * m1 + m2
    edges = []
    for offset in (0, m1 + m2):
        edges += [(offset + i, offset + j, 1.0) for i in range(m1) for j in range(i + 1, m1)]
    edges += [(i, i + 1, 1.0) for i in range(m1 - 1, m1 + m2)]
    return Graph(n, False, tuple(edges), _tag("barbell", m1=m1, m2=m2))


def barabasi_albert(n: int, m: int, seed=None) -> Graph:
    """Preferential-attachment graph; each new node attaches to ``m`` existing nodes."""
    if not 1 <= m < n:
        raise GraphValidationError(f"Barabasi-Albert graph needs 1 <= m < n, got n={n}, m={m}")
    G = nx.barabasi_albert_graph(n, m, seed=seed)
    return _from_networkx(G, _tag("ba", seed=seed, n=n, m=m))


def erdos_renyi_directed(n: int, p: float, seed=None, max_retries: int = DEFAULT_RETRIES) -> Graph:
    """Directed G(n, p), resampled until strongly connected."""
    if not 0 < p <= 1:
        raise GraphValidationError(f"edge probability must lie in (0, 1], got {p}")
    rng = random.Random(seed)
    for _ in range(max_retries):
        G = nx.gnp_random_graph(n, p, seed=rng, directed=True)
        if n == 1 or nx.is_strongly_connected(G):
            return _from_networkx(G, _tag("er", seed=seed, n=n, p=p))
    raise GraphGenerationError(
        f"no strongly connected G({n}, {p}) sample in {max_retries} attempts; increase p or the retry budget")


def random_regular(d: int, n: int, seed=None, max_retries: int = DEFAULT_RETRIES) -> Graph:
    """Uniform-ish random ``d``-regular graph, resampled until connected."""
    if d < 1 or d >= n or (d * n) % 2:
        raise GraphValidationError(f"no connected {d}-regular graph on {n} nodes (need 1 <= d < n, d*n even)")
    rng = random.Random(seed)
    for _ in range(max_retries):
        G = nx.random_regular_graph(d, n, seed=rng)
        if nx.is_connected(G):
            return _from_networkx(G, _tag("regular", seed=seed, d=d, n=n))
    raise GraphGenerationError(f"no connected {d}-regular graph on {n} nodes in {max_retries} attempts")


def graph_to_dict(g: Graph) -> dict:
    return {
        "format": GRAPH_FILE_FORMAT,
        "version": GRAPH_FILE_VERSION,
        "n": g.n,
        "directed": g.directed,
        "edges": [[u, v, w] for u, v, w in g.edges],
        "family_tag": g.family_tag,
    }


def graph_from_dict(doc: dict) -> Graph:
    try:
        jsonschema.Draft202012Validator(GRAPH_SCHEMA).validate(doc)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise GraphFileError(f"graph file schema violation at {path}: {exc.message}") from None
    try:
        return Graph(doc["n"], doc["directed"], tuple(tuple(e) for e in doc["edges"]), doc.get("family_tag"))
    except GraphValidationError as exc:
        raise GraphFileError(str(exc)) from None


def save_graph(g: Graph, path) -> None:
    # json writes floats via repr, which round-trips exactly
    Path(path).write_text(json.dumps(graph_to_dict(g), indent=1) + "\n")


def load_graph(path) -> Graph:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise GraphFileError(f"{path}: not valid JSON ({exc})") from None
    return graph_from_dict(doc)


FAMILIES = {
    "circulant": circulant_with_loops,
    "barbell": barbell,
    "ba": barabasi_albert,
    "er": erdos_renyi_directed,
    "regular": random_regular,
}


def make_graph(family: str, seed=None, **params) -> Graph:
    """Build a graph of a named family; ``seed`` is ignored by deterministic families."""
    if family not in FAMILIES:
        raise GraphValidationError(f"unknown graph family {family!r}; choose from {sorted(FAMILIES)}")
    if family in ("ba", "er", "regular"):
        params["seed"] = seed
    return FAMILIES[family](**params)


def vertex_shift(g: Graph, shift: int = 1) -> Graph:
    """Relabel every node ``i -> i + shift (mod n)``."""
    edges = tuple(((u + shift) % g.n, (v + shift) % g.n, w) for u, v, w in g.edges)
    return Graph(g.n, g.directed, edges, g.family_tag)


def edges_from_pairs(pairs: Iterable[tuple[int, int]]) -> tuple[tuple[int, int, float], ...]:
    return tuple((int(u), int(v), 1.0) for u, v in pairs)
