"""Classical Markov-chain layer.

Transition matrices and distributions are plain float ``ndarray`` objects;
``as_stochastic`` and ``as_distribution`` validate them and return read-only
copies.  Marked sets are sorted tuples of node indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order

from .errors import (
    ChainError,
    ConvergenceError,
    DanglingNodeError,
    DefectiveEigenbasisError,
    ReducibleChainError,
    UnreachableTargetError,
)
from .graphs import Graph, is_strongly_connected

ROW_SUM_TOL = 1e-12
EXACT_REVERSAL_TOL = 1e-10


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def as_stochastic(P, tol=ROW_SUM_TOL) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ChainError(f"transition matrix must be square, got shape {P.shape}")
    if np.any(P < 0) or not np.all(np.isfinite(P)):
        raise ChainError("transition matrix has negative or non-finite entries")
    err = np.abs(P.sum(axis=1) - 1).max()
    if err > tol:
        raise ChainError(f"transition matrix rows deviate from 1 by {err:.3e}")
    return _frozen(P)


def as_distribution(sigma, n=None, tol=ROW_SUM_TOL) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 1:
        raise ChainError("distribution must be a vector")
    if n is not None and sigma.shape[0] != n:
        raise ChainError(f"distribution has length {sigma.shape[0]}, expected {n}")
    if not np.all(sigma > 0):
        raise ChainError(f"distribution must be strictly positive (node {int(np.argmin(sigma))} has {sigma.min()!r})")
    if abs(sigma.sum() - 1) > tol:
        raise ChainError(f"distribution sums to {sigma.sum()!r}, not 1")
    return _frozen(sigma)


def marked_set(M, n: int) -> tuple[int, ...]:
    """Normalise ``M`` (an int or an iterable of ints) to a sorted tuple."""
    members = (M,) if np.isscalar(M) else tuple(M)
    members = tuple(sorted({int(i) for i in members}))
    if not members:
        raise ChainError("marked set must be nonempty")
    if members[0] < 0 or members[-1] >= n:
        raise ChainError(f"marked node outside [0, {n})")
    if len(members) == n:
        raise ChainError("marked set must be a proper subset of the nodes")
    return members


def unmarked(M, n: int) -> np.ndarray:
    keep = np.ones(n, dtype=bool)
    keep[list(M)] = False
    return np.flatnonzero(keep)


@dataclass(frozen=True)
class ReversedChain:
    """Generalised time reversal of ``P`` with respect to a distribution.

    ``p_star = D_r^{-1} P_hat`` with ``P_hat = diag(sigma)^-1 P^T diag(sigma)``
    and ``row_scale`` the diagonal of ``D_r``.
    """

    p_star: np.ndarray
    row_scale: np.ndarray
    exact_flag: bool

    __hash__ = None


def transition_from_graph(g: Graph) -> np.ndarray:
    A = g.adjacency()
    out = A.sum(axis=1)
    dangling = np.flatnonzero(out <= 0)
    if dangling.size:
        raise DanglingNodeError(dangling[0])
    return as_stochastic(A / out[:, None])


def is_irreducible(P) -> bool:
    return is_strongly_connected(np.asarray(P) > 0)


def _require_irreducible(P):
    if not is_irreducible(P):
        raise ReducibleChainError("transition matrix is reducible: the graph is not strongly connected")


def stationary(P, tol=1e-10, method="direct", max_iter=100_000) -> np.ndarray:
    """Stationary distribution of an irreducible chain.

    ``method="direct"`` solves the singular system with one equation replaced
    by the normalisation.  ``method="power"`` iterates the lazy chain
    ``(I + P) / 2`` (same fixed point, no periodicity issue) from uniform.
    """
    P = np.asarray(P, dtype=float)
    _require_irreducible(P)
    n = P.shape[0]
    if method == "direct":
        lhs = P.T - np.eye(n)
        lhs[-1, :] = 1.0
        rhs = np.zeros(n)
        rhs[-1] = 1.0
        pi = np.linalg.solve(lhs, rhs)
    elif method == "power":
        pi = np.full(n, 1.0 / n)
        for _ in range(max_iter):
            pi = 0.5 * (pi + pi @ P)
            if np.abs(pi @ P - pi).sum() <= tol:
                break
    else:
        raise ValueError(f"unknown method {method!r}")
    pi = pi / pi.sum()
    residual = np.abs(pi @ P - pi).sum()
    if residual > tol or np.any(pi <= 0):
        raise ConvergenceError(f"stationary solve residual {residual:.3e} exceeds {tol:.1e}", residual)
    return _frozen(pi)


def make_distribution(kind: str, context=None, *, n=None, eps=1e-2, seed=None, node=0, delta=1e-2,
                      weights=None, rng=None) -> np.ndarray:
    """Build a strictly positive starting distribution.

    kind:
        ``uniform``, ``stationary``, ``outdegree``, ``indegree``,
        ``eps_stationary`` (``|pi (1 + eps * randn)|`` renormalised),
        ``dirac`` (weight 1 on ``node``, ``delta`` elsewhere, renormalised),
        ``random`` (i.i.d. uniform weights in (0, 1], renormalised) and
        ``custom`` (``weights`` renormalised).
    context:
        a :class:`Graph` or a transition matrix; sets ``n`` when given.
    """
    graph = context if isinstance(context, Graph) else None
    P = None
    if context is not None and graph is None:
        P = np.asarray(context, dtype=float)
    if n is None:
        if graph is not None:
            n = graph.n
        elif P is not None:
            n = P.shape[0]
        elif weights is not None:
            n = len(weights)
        else:
            raise ChainError(f"distribution {kind!r} needs a graph, a matrix or n")
    if rng is None:
        rng = np.random.default_rng(seed)

    def need_P():
        if P is not None:
            return P
        if graph is not None:
            return transition_from_graph(graph)
        raise ChainError(f"distribution {kind!r} needs a transition matrix or graph")

    if kind == "uniform":
        w = np.ones(n)
    elif kind == "stationary":
        return stationary(need_P())
    elif kind in ("outdegree", "indegree"):
        if graph is not None:
            A = graph.adjacency()
        elif P is not None:
            A = (P > 0).astype(float)
        else:
            raise ChainError(f"distribution {kind!r} needs a graph or matrix")
        w = A.sum(axis=1) if kind == "outdegree" else A.sum(axis=0)
    elif kind == "eps_stationary":
        pi = stationary(need_P())
        if eps == 0:
            return pi
        w = np.abs(pi * (1.0 + eps * rng.standard_normal(n)))
    elif kind == "dirac":
        if not 0 <= node < n:
            raise ChainError(f"dirac node {node} outside [0, {n})")
        w = np.full(n, float(delta))
        w[node] = 1.0
    elif kind == "random":
        w = 1.0 - rng.random(n)
    elif kind == "custom":
        if weights is None:
            raise ChainError("custom distribution needs weights")
        w = np.asarray(weights, dtype=float)
        if w.shape != (n,):
            raise ChainError(f"custom weights have shape {w.shape}, expected ({n},)")
    else:
        raise ChainError(f"unknown distribution kind {kind!r}")
    if not np.all(w > 0):
        raise ChainError(f"{kind} distribution has a nonpositive weight at node {int(np.argmin(w))}")
    return as_distribution(w / w.sum())


def reversed_chain(P, sigma) -> ReversedChain:
    P = np.asarray(P, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    p_hat = (P.T * sigma[None, :]) / sigma[:, None]
    row_scale = p_hat.sum(axis=1)
    zero = np.flatnonzero(row_scale <= 0)
    if zero.size:
        raise DanglingNodeError(zero[0], direction="incoming")
    p_star = p_hat / row_scale[:, None]
    exact = bool(np.abs(sigma @ P - sigma).sum() <= EXACT_REVERSAL_TOL)
    return ReversedChain(_frozen(p_star), _frozen(row_scale), exact)


def absorb(P, M) -> np.ndarray:
    """Replace the rows of the marked nodes by self-loop indicators."""
    P = np.array(P, dtype=float)
    M = marked_set(M, P.shape[0])
    P[list(M), :] = 0.0
    P[list(M), list(M)] = 1.0
    return _frozen(P)


def _check_reachable(P, M):
    """Raise unless every node reaches ``M`` through positive-probability arcs."""
    n = P.shape[0]
    # BFS from a virtual sink on the reversed graph
    pattern = (np.asarray(P) > 0).T.astype(np.int8)
    sink = np.zeros((n + 1, n + 1), dtype=np.int8)
    sink[:n, :n] = pattern
    sink[n, list(M)] = 1
    reached = breadth_first_order(csr_matrix(sink), n, directed=True, return_predecessors=False)
    missing = np.setdiff1d(np.arange(n), reached)
    if missing.size:
        raise UnreachableTargetError(f"node {int(missing[0])} cannot reach the marked set {list(M)}")


def hitting_times_to(P, M) -> np.ndarray:
    """Expected first-arrival time at ``M`` from every node (0 on ``M``)."""
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    M = marked_set(M, n)
    _check_reachable(P, M)
    keep = unmarked(M, n)
    h = np.zeros(n)
    h[keep] = np.linalg.solve(np.eye(keep.size) - P[np.ix_(keep, keep)], np.ones(keep.size))
    return h


def classical_ht(P, sigma, M) -> float:
    """``sigma_{-M}^T (I - P_{-M})^{-1} 1``; the restriction is not renormalised."""
    sigma = np.asarray(sigma, dtype=float)
    return float(sigma @ hitting_times_to(P, M))


def hitting_time_matrix(P) -> np.ndarray:
    """``H[i, j]``: expected steps from ``i`` to first reach ``j``; zero diagonal."""
    P = np.asarray(P, dtype=float)
    _require_irreducible(P)
    n = P.shape[0]
    H = np.empty((n, n))
    for j in range(n):
        lhs = np.eye(n) - P
        lhs[j, :] = 0.0
        lhs[j, j] = 1.0
        rhs = np.ones(n)
        rhs[j] = 0.0
        H[:, j] = np.linalg.solve(lhs, rhs)
    return H


def kemeny(P) -> float:
    pi = stationary(P)
    return float(pi @ hitting_time_matrix(P) @ pi)


class SpectralHittingTime(NamedTuple):
    terms: np.ndarray
    total: float


def _spectral_parts(P, sigma, M, cond_limit):
    P = np.asarray(P, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    n = P.shape[0]
    M = marked_set(M, n)
    _check_reachable(P, M)
    rev = reversed_chain(P, sigma)
    D = np.sqrt(P * rev.p_star.T)
    keep = unmarked(M, n)
    K = D[np.ix_(keep, keep)] * np.sqrt(rev.row_scale[keep])[None, :]
    lam, V = np.linalg.eig(K)
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond > cond_limit:
        raise DefectiveEigenbasisError(
            f"eigenvector matrix condition number {cond:.3e} exceeds {cond_limit:.1e}; use classical_ht")
    order = np.argsort(-np.abs(lam), kind="stable")
    lam, V = lam[order], V[:, order]
    root = np.sqrt(sigma[keep])
    x = V.T @ root
    y = np.linalg.solve(V, root)
    return lam, x, y, M


def classical_ht_spectral(P, sigma, M, cond_limit=1e8) -> SpectralHittingTime:
    """Hitting time as a sum over eigenpairs of ``D_{-M} D_r^{1/2}``.

    Terms are ``x_i y_i / (1 - lambda_i)`` with ``x = V^T sqrt(sigma_{-M})``
    and ``y = V^{-1} sqrt(sigma_{-M})``, ordered by decreasing ``|lambda|``.
    """
    lam, x, y, _ = _spectral_parts(P, sigma, M, cond_limit)
    terms = x * y / (1.0 - lam)
    total = terms.sum()
    if abs(total.imag) > 1e-8:
        raise DefectiveEigenbasisError(f"spectral sum has imaginary part {total.imag:.3e}")
    return SpectralHittingTime(terms, float(total.real))


def spectral_ht_diagnostic(P, sigma, M, cond_limit=1e8) -> dict:
    """Both sides of the conjectured two-sided estimate, next to the exact value.

    Reported only; nothing here is asserted.
    """
    lam, x, y, M = _spectral_parts(P, sigma, M, cond_limit)
    lead = lam[0]
    p = float(np.asarray(sigma)[list(M)].sum())
    return {
        "lower": complex(x[0] * y[0] / (1 - lead)),
        "upper": complex((1 - p) / (1 - lead)),
        "h": classical_ht(P, sigma, M),
        "leading_eigenvalue": complex(lead),
    }


class MonteCarloEstimate(NamedTuple):
    mean: float
    stderr: float
    truncated: int
    samples: int


def monte_carlo_ht(P, sigma, M, samples=10_000, cap=10_000, seed=None) -> MonteCarloEstimate:
    """Simulated first-arrival times at ``M`` from starts drawn from ``sigma``.

    Trajectories still running after ``cap`` steps count as ``cap`` and are
    reported in ``truncated``.
    """
    if samples < 1 or cap < 1:
        raise ValueError("samples and cap must be >= 1")
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    M = marked_set(M, n)
    rng = np.random.default_rng(seed)
    cum = np.cumsum(P, axis=1)
    target = np.zeros(n, dtype=bool)
    target[list(M)] = True

    pos = rng.choice(n, size=samples, p=np.asarray(sigma) / np.sum(sigma))
    times = np.zeros(samples, dtype=np.int64)
    active = np.flatnonzero(~target[pos])
    for t in range(1, cap + 1):
        if active.size == 0:
            break
        u = rng.random(active.size)
        nxt = np.minimum((cum[pos[active]] <= u[:, None]).sum(axis=1), n - 1)
        pos[active] = nxt
        times[active] = t
        active = active[~target[nxt]]
    truncated = int(active.size)
    times = times.astype(float)
    stderr = float(times.std(ddof=1) / np.sqrt(samples)) if samples > 1 else float("nan")
    return MonteCarloEstimate(float(times.mean()), stderr, truncated, samples)
