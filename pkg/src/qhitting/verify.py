"""Numerical self-checks of a configuration (graph chain plus distribution).

Each check produces a residual and a tolerance; nothing is asserted here, the
caller decides what to do with failures.  Checks that only make sense for a
reversible chain started from its stationary distribution are skipped
otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chains import classical_ht, hitting_time_matrix, marked_set, monte_carlo_ht, stationary
from .hitting import (
    cesaro_by_iteration,
    cesaro_spectral,
    f_series,
    hitting_spectrum,
    quantum_ht,
)
from .szegedy import (
    apply_walk,
    build_absorbing_walk,
    build_walk,
    dense_walk_operator,
    initial_state,
    split_state,
    verify_spectral_theorem,
)

DENSE_LIMIT = 30


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tol: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"{status}  {self.name:<28} {self.value:.3e} <= {self.tol:.0e}{extra}"


def _check(name, value, tol, detail=""):
    value = float(value)
    return CheckResult(name, value, tol, bool(value <= tol), detail)


def is_reversible_stationary(P, sigma, tol=1e-12) -> bool:
    P = np.asarray(P)
    flow = np.asarray(sigma)[:, None] * P
    return bool(np.abs(flow - flow.T).max() <= tol and np.abs(sigma @ P - sigma).sum() <= 1e-10)


def default_marked(n: int) -> list[int]:
    return sorted({0, n // 2, n - 1})


def run_property_suite(P, sigma, marked=None, *, seed=0, n_states=100, t_cesaro=200, mc_samples=20_000,
                       spectral_theorem=True) -> list[CheckResult]:
    P = np.asarray(P, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    n = P.shape[0]
    marked = default_marked(n) if marked is None else [int(i) for i in marked]
    rng = np.random.default_rng(seed)
    reversible = is_reversible_stationary(P, sigma)
    out = []

    walk = build_walk(P, sigma)
    walks = [("base", walk)] + [(f"M={{{i}}}", build_absorbing_walk(P, sigma, [i])) for i in marked]

    worst = 0.0
    for _, w in walks:
        for _ in range(n_states):
            s = rng.standard_normal(w.dim)
            s /= np.linalg.norm(s)
            worst = max(worst, abs(np.linalg.norm(apply_walk(w, s)) - 1.0))
    out.append(_check("norm_preservation", worst, 1e-12, f"{n_states} random states per walk"))

    xi = initial_state(walk)
    out.append(_check("xi0_fixed_point", np.linalg.norm(apply_walk(walk, xi) - xi), 1e-10))

    if n <= DENSE_LIMIT:
        worst = 0.0
        for _, w in walks:
            Wd = dense_walk_operator(w)
            for _ in range(5):
                s = rng.standard_normal(w.dim)
                worst = max(worst, np.abs(Wd @ s - apply_walk(w, s)).max())
        out.append(_check("matrix_free_vs_dense", worst, 1e-12))

    lo = hi = 0.0
    for _, w in walks:
        sv = np.linalg.svd(w.discriminant, compute_uv=False)
        lo, hi = min(lo, sv.min()), max(hi, sv.max() - 1.0)
    out.append(_check("singular_value_range", max(hi, -lo), 1e-12))

    if reversible:
        ev_d = np.sort(np.linalg.eigvals(walk.discriminant).real)
        ev_p = np.sort(np.linalg.eigvals(P).real)
        out.append(_check("discriminant_similarity", np.abs(ev_d - ev_p).max(), 1e-8))

    if spectral_theorem and n <= 200:
        rep = verify_spectral_theorem(walk)
        worst_key = max(rep.residuals, key=rep.residuals.get)
        out.append(_check("spectral_theorem", rep.residuals[worst_key], 1e-8, f"worst: {worst_key}"))

    H = hitting_time_matrix(P)
    block = nu_err = pm_err = dual = ht_err = mc_z = bound_gap = che_gap = 0.0
    bound_detail = []
    for i in marked:
        M = marked_set([i], n)
        w = build_absorbing_walk(P, sigma, M)
        keep = np.setdiff1d(np.arange(n), M)
        d_base = walk.discriminant
        expected = np.zeros((n, n))
        expected[np.ix_(keep, keep)] = d_base[np.ix_(keep, keep)]
        expected[i, i] = 1.0
        block = max(block, np.abs(w.discriminant - expected).max())

        p = float(sigma[i])
        spec, nu = hitting_spectrum(P, sigma, M, w)
        nu_err = max(nu_err, abs(nu @ nu - (1 - p)))
        psi_m, psi_rest = split_state(w, sigma)
        pm_err = max(pm_err, abs(psi_m @ psi_m - p))

        b_iter = cesaro_by_iteration(w, psi_rest, t_cesaro)
        b_spec = cesaro_spectral(spec, nu, np.arange(t_cesaro + 1))
        dual = max(dual, np.abs(b_iter - b_spec).max())

        h = classical_ht(P, sigma, M)
        h_mat = float(np.delete(sigma * H[:, i], i).sum())
        ht_err = max(ht_err, abs(h - h_mat) / max(h, 1e-300))

        mc = monte_carlo_ht(P, sigma, M, samples=mc_samples, cap=max(10_000, int(50 * h)), seed=[seed, i])
        mc_z = max(mc_z, abs(mc.mean - h) / mc.stderr if mc.stderr > 0 else 0.0)

        if reversible:
            rep = quantum_ht(P, sigma, M)
            T = math.ceil(rep.qhe_rigorous)
            fs = f_series(P, sigma, M, T, early_exit=False, walk=w)
            bound_gap = max(bound_gap, (1 - p - 1e-8) - fs.values[T])
            che_gap = max(che_gap, rep.qh - rep.che)
            bound_detail.append(f"{i}: F({T})={fs.values[T]:.4f}")

    out.append(_check("absorbing_block_structure", block, 1e-12))
    out.append(_check("nu_norm", nu_err, 1e-10))
    out.append(_check("psi_M_norm", pm_err, 1e-12))
    out.append(_check("dual_path_cesaro", dual, 1e-8, f"T <= {t_cesaro}"))
    out.append(_check("classical_vs_matrix", ht_err, 1e-8, "relative"))
    out.append(_check("monte_carlo_oracle", mc_z, 3.0, "standard errors"))
    if reversible:
        out.append(_check("rigorous_bound_realized", max(bound_gap, 0.0), 0.0, "; ".join(bound_detail)))
        out.append(_check("che_bound_realized", max(che_gap, 0.0), 0.0, "qh - che"))
    return out


def stationary_suite(P, **kwargs) -> list[CheckResult]:
    return run_property_suite(P, stationary(P), **kwargs)


def all_passed(results) -> bool:
    return all(r.passed for r in results)
