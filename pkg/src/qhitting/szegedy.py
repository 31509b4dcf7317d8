"""Szegedy walk: isometries, discriminant, SVD classification, matrix-free steps.

Hilbert-space layout: the basis state ``|x, y>`` has flat index ``x * n + y``.
A walk is described by two stochastic matrices, ``forward`` (F) and
``backward`` (R):

* column ``x`` of the isometry ``A`` carries ``sqrt(F[x, y])`` at ``(x, y)``;
* column ``y`` of ``B_hat`` carries ``sqrt(R[y, x])`` at ``(x, y)``.

so the discriminant ``A^T B_hat`` is the entrywise product
``sqrt(F[x, y] * R[y, x])``.  One step is ``W = R_B R_A`` with
``R_A = 2 A A^T - I``.  Every amplitude is real, so states are real vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chains import absorb, as_distribution, marked_set, reversed_chain, unmarked
from .errors import ChainError, WalkConstructionError

CLASS_TOL = 1e-10
CLIP_TOL = 1e-12
BLOCK_TOL = 1e-12
DENSE_VERIFY_LIMIT = 200


@dataclass(frozen=True)
class SzegedyWalk:
    """Matrix-free Szegedy walk for the pair ``(forward, backward)``.

    ``base`` is the unabsorbed chain and ``base_backward`` its generalised
    reversal; both coincide with ``forward``/``backward`` unless ``marked``
    is nonempty.  The state ``A sqrt(sigma)`` is always built from ``base``.
    """

    forward: np.ndarray
    backward: np.ndarray
    sigma: np.ndarray
    row_scale: np.ndarray
    exact_flag: bool
    base: np.ndarray
    base_backward: np.ndarray
    marked: tuple[int, ...] = ()
    sqrt_forward: np.ndarray = field(init=False, repr=False)
    sqrt_backward: np.ndarray = field(init=False, repr=False)
    support: np.ndarray = field(init=False, repr=False)

    __hash__ = None

    def __post_init__(self):
        sf = np.sqrt(self.forward)
        sb = np.sqrt(self.backward).T  # sb[x, y] = sqrt(R[y, x])
        support = np.flatnonzero(((sf > 0) | (sb > 0)).ravel())
        for name, value in (("sqrt_forward", sf), ("sqrt_backward", sb), ("support", support)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        n = self.n
        object.__setattr__(self, "_rows", support // n)
        object.__setattr__(self, "_cols", support % n)
        object.__setattr__(self, "_a", sf.ravel()[support])
        object.__setattr__(self, "_b", sb.ravel()[support])

    @property
    def n(self) -> int:
        return self.forward.shape[0]

    @property
    def dim(self) -> int:
        return self.n * self.n

    @property
    def discriminant(self) -> np.ndarray:
        return self.sqrt_forward * self.sqrt_backward

    def isometries(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense ``A`` and ``B_hat`` (shape ``n^2 x n``); for tests and small n."""
        n = self.n
        A = np.zeros((n * n, n))
        B = np.zeros((n * n, n))
        idx = np.arange(n)
        for x in range(n):
            A[x * n + idx, x] = self.sqrt_forward[x]
            B[idx * n + x, x] = self.sqrt_backward[:, x]
        return A, B

    def step_support(self, s: np.ndarray) -> np.ndarray:
        """One walk step on the amplitudes restricted to ``support``.

        Off the support both reflections negate, so ``W`` acts there as the
        identity and those amplitudes never need touching.
        """
        n = self.n
        c = np.bincount(self._rows, self._a * s, minlength=n)
        s1 = 2.0 * self._a * c[self._rows] - s
        d = np.bincount(self._cols, self._b * s1, minlength=n)
        return 2.0 * self._b * d[self._cols] - s1


def build_walk(P, sigma) -> SzegedyWalk:
    rev = reversed_chain(P, sigma)
    P = np.asarray(P, dtype=float)
    return SzegedyWalk(P, rev.p_star, np.asarray(sigma, dtype=float), rev.row_scale, rev.exact_flag,
                       P, rev.p_star)


def build_absorbing_walk(P, sigma, M) -> SzegedyWalk:
    """Walk on the absorbed forward chain and the absorbed reversed chain.

    The discriminant must come out block diagonal: the identity on ``M`` and
    the unmarked principal block of the unabsorbed discriminant elsewhere.
    """
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    M = marked_set(M, n)
    rev = reversed_chain(P, sigma)
    w = SzegedyWalk(absorb(P, M), absorb(rev.p_star, M), np.asarray(sigma, dtype=float), rev.row_scale,
                    rev.exact_flag, P, rev.p_star, M)
    d_abs = w.discriminant
    d_base = np.sqrt(P * rev.p_star.T)
    keep = unmarked(M, n)
    expected = np.zeros((n, n))
    expected[np.ix_(keep, keep)] = d_base[np.ix_(keep, keep)]
    expected[list(M), list(M)] = 1.0
    err = np.abs(d_abs - expected).max()
    if err > BLOCK_TOL:
        raise WalkConstructionError(f"absorbing discriminant deviates from its block form by {err:.3e}")
    return w


def _check_state(w: SzegedyWalk, s):
    s = np.asarray(s)
    if s.shape != (w.dim,):
        raise ValueError(f"state has shape {s.shape}, expected ({w.dim},)")
    return s


def apply_walk(w: SzegedyWalk, s) -> np.ndarray:
    """``R_B(R_A(s))`` without assembling either reflection.

    Complex states are handled by acting on the real and imaginary parts.
    """
    s = _check_state(w, s)
    if np.iscomplexobj(s):
        return apply_walk(w, s.real) + 1j * apply_walk(w, s.imag)
    out = np.array(s, dtype=float)
    out[w.support] = w.step_support(out[w.support])
    return out


def initial_state(w: SzegedyWalk, sigma=None, check=True) -> np.ndarray:
    """``A sqrt(sigma)`` for the unabsorbed chain: amplitude ``sqrt(sigma_x P[x, y])``."""
    if sigma is None:
        sigma = w.sigma
    elif check and not np.allclose(sigma, w.sigma, rtol=0, atol=1e-12):
        raise ChainError("distribution does not match the one the walk was built with")
    sigma = as_distribution(sigma, w.n)
    return (np.sqrt(sigma)[:, None] * np.sqrt(w.base)).ravel()


def split_state(w: SzegedyWalk, sigma=None, M=None) -> tuple[np.ndarray, np.ndarray]:
    """``(psi_M, psi_-M)``: the initial state split by whether ``x`` is marked."""
    M = marked_set(w.marked if M is None else M, w.n)
    psi = initial_state(w, sigma).reshape(w.n, w.n)
    mask = np.zeros(w.n, dtype=bool)
    mask[list(M)] = True
    psi_m = np.where(mask[:, None], psi, 0.0).ravel()
    psi_rest = np.where(mask[:, None], 0.0, psi).ravel()
    return psi_m, psi_rest


@dataclass(frozen=True)
class SpectralData:
    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    angles: np.ndarray  # arccos of every singular value; pi/2 on class_zero, 0 on class_one
    class_one: np.ndarray
    class_interior: np.ndarray
    class_zero: np.ndarray

    __hash__ = None

    @property
    def interior_angles(self) -> np.ndarray:
        return self.angles[self.class_interior]


def spectral(d, tol=CLASS_TOL) -> SpectralData:
    """Full SVD of a discriminant with the {1, interior, 0} classification."""
    d = np.asarray(d, dtype=float)
    U, s, Vt = np.linalg.svd(d)
    if s.size and s[0] > 1 + CLIP_TOL:
        raise WalkConstructionError(f"singular value {s[0]!r} exceeds 1; input is not a discriminant")
    s = np.clip(s, 0.0, 1.0)
    one = np.flatnonzero(s >= 1 - tol)
    zero = np.flatnonzero(s <= tol)
    interior = np.flatnonzero((s > tol) & (s < 1 - tol))
    angles = np.arccos(s)
    angles[one] = 0.0
    angles[zero] = np.pi / 2
    return SpectralData(s, U, Vt.T, angles, one, interior, zero)


def nu_coefficients(spec: SpectralData, sigma, M) -> np.ndarray:
    """``S^T z`` where ``z`` is ``sqrt(sigma)`` on unmarked nodes and 0 on ``M``."""
    sigma = np.asarray(sigma, dtype=float)
    n = spec.left_vectors.shape[0]
    if sigma.shape != (n,):
        raise ValueError(f"distribution length {sigma.shape[0]} does not match discriminant size {n}")
    M = marked_set(M, n)
    z = np.sqrt(sigma)
    z[list(M)] = 0.0
    return spec.left_vectors.T @ z


@dataclass
class SpectralTheoremReport:
    """Maximum residuals of the spectral-theorem checks (report only)."""

    residuals: dict[str, float]
    counts: dict[str, int]

    def passed(self, tol=1e-8) -> bool:
        return all(v <= tol for v in self.residuals.values())


def _rotation_residual(R, theta):
    best = np.inf
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    for sign in (1.0, -1.0):
        target = np.array([[c, -sign * s], [sign * s, c]])
        best = min(best, np.abs(R - target).max())
    return best


def verify_spectral_theorem(w: SzegedyWalk, spec: SpectralData | None = None) -> SpectralTheoremReport:
    """Check the eigen-structure of ``W`` predicted by the SVD of the discriminant.

    * interior ``k``: ``A u_k - exp(-i theta_k) B v_k`` is an eigenvector with
      eigenvalue ``exp(-2 i theta_k)`` (and the conjugate pair likewise);
    * ``span{A u_k, B v_k}`` is invariant and ``W`` rotates it by ``2 theta_k``;
    * class one: ``A u_k`` is fixed;  class zero: ``W A u_k = -A u_k``;
    * ``A sqrt(sigma)`` is fixed by the unabsorbed walk.
    """
    n = w.n
    if n > DENSE_VERIFY_LIMIT:
        raise ValueError(f"dense verification is limited to n <= {DENSE_VERIFY_LIMIT}, got {n}")
    if spec is None:
        spec = spectral(w.discriminant)
    A, B = w.isometries()
    W = lambda s: apply_walk(w, s)  # noqa: E731
    res = {"isometry_A": np.abs(A.T @ A - np.eye(n)).max(), "isometry_B": np.abs(B.T @ B - np.eye(n)).max()}
    res["singular_range"] = max(0.0, spec.singular_values.max() - 1.0, -spec.singular_values.min())
    res["svd"] = np.abs(w.discriminant @ spec.right_vectors - spec.left_vectors * spec.singular_values).max()
    eig = plane = rot = 0.0
    for k in spec.class_interior:
        theta = spec.angles[k]
        a = A @ spec.left_vectors[:, k]
        b = B @ spec.right_vectors[:, k]
        for sgn in (1, -1):
            v = a - np.exp(-sgn * 1j * theta) * b
            eig = max(eig, np.linalg.norm(W(v) - np.exp(-sgn * 2j * theta) * v) / np.linalg.norm(v))
        q, _ = np.linalg.qr(np.column_stack([a, b]))
        image = np.column_stack([W(q[:, 0]), W(q[:, 1])])
        R = q.T @ image
        plane = max(plane, np.abs(image - q @ R).max())
        rot = max(rot, _rotation_residual(R, theta))
    res["interior_eigvec"] = eig
    res["plane_invariance"] = plane
    res["plane_rotation"] = rot
    one = 0.0
    for k in spec.class_one:
        a = A @ spec.left_vectors[:, k]
        one = max(one, np.linalg.norm(W(a) - a))
    res["class_one_fixed"] = one
    zero = 0.0
    for k in spec.class_zero:
        a = A @ spec.left_vectors[:, k]
        zero = max(zero, np.linalg.norm(W(a) + a))
    res["class_zero_flip"] = zero
    if not w.marked:
        xi = initial_state(w)
        res["xi0_fixed"] = np.linalg.norm(W(xi) - xi)
    counts = {"one": spec.class_one.size, "interior": spec.class_interior.size, "zero": spec.class_zero.size}
    return SpectralTheoremReport({k: float(v) for k, v in res.items()}, counts)


def dense_walk_operator(w: SzegedyWalk) -> np.ndarray:
    """Explicit ``(2 B B^T - I)(2 A A^T - I)``; only sensible for small n."""
    A, B = w.isometries()
    I = np.eye(w.dim)
    return (2 * B @ B.T - I) @ (2 * A @ A.T - I)
