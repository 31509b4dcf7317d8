"""Quantum hitting times and the analytic bounds that accompany them.

``F(T) = (1/(T+1)) sum_{t<=T} ||W^t psi_0 - psi_0||^2`` is accumulated by
iterating the absorbing walk.  The quantum hitting time is the first ``T``
at which ``F`` strictly exceeds ``1 - p`` (``p`` the distribution mass on the
marked set), refined by linear interpolation between ``T0 - 1`` and ``T0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .chains import as_distribution, classical_ht, marked_set
from .errors import UnreachableTargetError
from .szegedy import (
    SpectralData,
    SzegedyWalk,
    build_absorbing_walk,
    build_walk,
    initial_state,
    nu_coefficients,
    spectral,
)

T_MAX_PER_NODE = 50
CLASS_ONE_NU_TOL = 1e-10


@dataclass(frozen=True)
class FSeries:
    values: np.ndarray
    inner_values: np.ndarray  # the same series via 2|psi|^2 - 2 * mean <psi, W^t psi>
    threshold: float
    crossing_index: int | None
    truncated: bool

    __hash__ = None

    @property
    def max_value(self) -> float:
        return float(self.values.max())


def default_t_max(n: int) -> int:
    return T_MAX_PER_NODE * n


def f_series(P, sigma, M=None, t_max=None, *, absorbing=True, early_exit=True, walk: SzegedyWalk | None = None
             ) -> FSeries:
    """Accumulate ``F(T)`` for ``T = 0..t_max``.

    With ``absorbing=False`` the unmodified walk is iterated instead (a
    diagnostic: its initial state is fixed, so ``F`` stays at zero).  ``M``
    is then optional and only sets the threshold.
    """
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    sigma = as_distribution(sigma, n)
    if t_max is None:
        t_max = default_t_max(n)
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    if walk is None:
        walk = build_absorbing_walk(P, sigma, M) if absorbing else build_walk(P, sigma)
    if M is None:
        M = walk.marked
    p = float(sigma[list(marked_set(M, n))].sum()) if np.size(M) else 0.0
    threshold = 1.0 - p

    psi = initial_state(walk, sigma)[walk.support]
    norm2 = float(psi @ psi)
    s = psi.copy()
    values = [0.0]
    inner = [0.0]
    dist_acc = 0.0
    dot_acc = norm2
    crossing = None
    for T in range(1, t_max + 1):
        s = walk.step_support(s)
        diff = s - psi
        dist_acc += float(diff @ diff)
        dot_acc += float(psi @ s)
        values.append(dist_acc / (T + 1))
        inner.append(2.0 * norm2 - 2.0 * dot_acc / (T + 1))
        if crossing is None and values[-1] > threshold:
            crossing = T
            if early_exit:
                break
    return FSeries(np.array(values), np.array(inner), threshold, crossing, crossing is None)


def interpolate_qh(values, threshold: float, crossing_index: int) -> float:
    """``(T0 - 1) + (threshold - F(T0 - 1)) / (F(T0) - F(T0 - 1))``."""
    if crossing_index < 1:
        raise ValueError("crossing index must be >= 1 (F(0) is always 0)")
    lo, hi = values[crossing_index - 1], values[crossing_index]
    return (crossing_index - 1) + (threshold - lo) / (hi - lo)


def cesaro_cos_sum(theta, T):
    """``sum_{t=0}^{T} cos(2 t theta)`` in closed form (``theta`` in (0, pi/2])."""
    theta = np.asarray(theta, dtype=float)
    T = np.asarray(T)
    return np.sin((T + 1) * theta) * np.cos(T * theta) / np.sin(theta)


def cesaro_spectral(spec: SpectralData, nu, T):
    """``B(z, T) = (1/(T+1)) sum_t <z, W^t z>`` from the spectrum alone.

    ``z = sum_k nu_k A u_k``.  Class-one components contribute ``nu_k^2``,
    interior ones the Cesaro mean of ``cos(2 t theta_k)`` and class-zero ones
    the Cesaro mean of ``(-1)^t``.  ``T`` may be an array.
    """
    nu2 = np.asarray(nu, dtype=float) ** 2
    T = np.asarray(T)
    scalar = T.ndim == 0
    T = np.atleast_1d(T).astype(float)
    out = np.full(T.shape, nu2[spec.class_one].sum())
    k = spec.class_interior
    if k.size:
        theta = spec.angles[k]
        out += (nu2[k][None, :] * cesaro_cos_sum(theta[None, :], T[:, None])).sum(axis=1) / (T + 1)
    out += nu2[spec.class_zero].sum() * ((T.astype(int) % 2 == 0) / (T + 1))
    return float(out[0]) if scalar else out


def cesaro_by_iteration(walk: SzegedyWalk, z, t_max: int) -> np.ndarray:
    """``B(z, T)`` for ``T = 0..t_max`` by stepping the walk."""
    z = np.asarray(z, dtype=float)
    zs = z[walk.support]
    off = float(z @ z - zs @ zs)  # amplitudes off the support are fixed by W
    s = zs.copy()
    acc = float(zs @ zs) + off
    out = [acc]
    for T in range(1, t_max + 1):
        s = walk.step_support(s)
        acc += float(zs @ s) + off
        out.append(acc / (T + 1))
    return np.array(out)


def qhe_bound(spec: SpectralData, nu, p: float, angle_exponent: float = 1.0) -> float:
    """``64/(1-p) * sum_k nu_k^2 / theta_k**angle_exponent`` over non-class-one ``k``.

    ``angle_exponent=1`` is the guaranteed bound: ``F`` exceeds ``1 - p`` at
    any ``T`` beyond it.  ``angle_exponent=0.5`` is the square-root-angle
    estimate reported as ``HitReport.qhe``.  Class-zero angles are pi/2.
    """
    if not 0 <= p < 1:
        raise ValueError(f"p must lie in [0, 1), got {p}")
    nu2 = np.asarray(nu, dtype=float) ** 2
    stuck = nu2[spec.class_one].sum()
    if np.sqrt(stuck) > CLASS_ONE_NU_TOL:
        raise UnreachableTargetError(
            f"initial state has weight {np.sqrt(stuck):.3e} on fixed points of the absorbing walk; "
            "some unmarked node cannot reach the marked set")
    k = np.concatenate([spec.class_interior, spec.class_zero])
    return float(64.0 / (1.0 - p) * np.sum(nu2[k] / spec.angles[k] ** angle_exponent))


def che_bound(h: float, p: float) -> float:
    """``64 / sqrt(1 - p) * sqrt(h)``."""
    if not 0 <= p < 1:
        raise ValueError(f"p must lie in [0, 1), got {p}")
    if h < 0:
        raise ValueError(f"hitting time must be nonnegative, got {h}")
    return 64.0 / math.sqrt(1.0 - p) * math.sqrt(h)


@dataclass(frozen=True)
class HitReport:
    """Hitting quantities for one marked set.

    ``qhe`` uses the square-root-angle form of the spectral estimate and
    ``qhe_rigorous`` the linear-angle form (see :func:`qhe_bound`).  When the
    F-series never crosses the threshold ``qh`` is ``inf`` and ``truncated``
    is set.
    """

    marked: tuple[int, ...]
    qh: float
    qhe: float
    qhe_rigorous: float
    che: float
    h: float
    sh: float
    p: float
    truncated: bool
    max_f: float
    t_last: int


def hitting_spectrum(P, sigma, M, walk: SzegedyWalk | None = None):
    """SVD data of the absorbing discriminant and the matching ``nu``."""
    if walk is None:
        walk = build_absorbing_walk(P, sigma, M)
    spec = spectral(walk.discriminant)
    return spec, nu_coefficients(spec, sigma, M)


def quantum_ht(P, sigma, M, t_max=None) -> HitReport:
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    M = marked_set(M, n)
    sigma = as_distribution(sigma, n)
    walk = build_absorbing_walk(P, sigma, M)
    fs = f_series(P, sigma, M, t_max, walk=walk)
    qh = math.inf if fs.truncated else interpolate_qh(fs.values, fs.threshold, fs.crossing_index)
    p = float(sigma[list(M)].sum())
    h = classical_ht(P, sigma, M)
    spec, nu = hitting_spectrum(P, sigma, M, walk)
    return HitReport(
        marked=M,
        qh=float(qh),
        qhe=qhe_bound(spec, nu, p, angle_exponent=0.5),
        qhe_rigorous=qhe_bound(spec, nu, p),
        che=che_bound(h, p),
        h=h,
        sh=math.sqrt(h),
        p=p,
        truncated=fs.truncated,
        max_f=fs.max_value,
        t_last=len(fs.values) - 1,
    )


class SpeedupCheck(NamedTuple):
    applicable: bool
    within_che: bool
    within_sqrt_h: bool


def speedup_check(report: HitReport) -> SpeedupCheck:
    """``qh <= che`` (guaranteed for reversible chains from stationarity) and
    ``qh <= sqrt(h)`` (an empirical tendency only).  Not applicable when qh
    is infinite."""
    if not math.isfinite(report.qh):
        return SpeedupCheck(False, False, False)
    return SpeedupCheck(True, report.qh <= report.che, report.qh <= report.sh)
