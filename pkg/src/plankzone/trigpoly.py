"""Slice polynomials T(theta) = prod_j (cos theta + a_j sin theta) and their analysis.

For M symmetric with M 1 = 1 and v orthogonal to 1, the slope vector is
a = M v and T traces prod_j (M v_theta)_j along v_theta = cos(theta) 1 +
sin(theta) v.  The tools here expand T in Fourier form, check Bernstein's
inequality on samples, split T - cos(n theta) as sin^2(theta) psi(theta),
count roots, and build the shrunken slice used to refute an oversized
diagonal entry of M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from plankzone.errors import PreconditionError


def _matrix(M):
    return np.asarray(getattr(M, "entries", M), dtype=float)


@dataclass(frozen=True)
class ProductTrigPoly:
    slopes: np.ndarray

    def __post_init__(self):
        a = np.array(self.slopes, dtype=float).ravel()
        a.setflags(write=False)
        object.__setattr__(self, "slopes", a)

    @property
    def n(self) -> int:
        return len(self.slopes)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        c, s = np.cos(theta)[..., None], np.sin(theta)[..., None]
        return np.prod(c + self.slopes * s, axis=-1)


@dataclass(frozen=True)
class FourierForm:
    """c_0 + sum_{m=1}^{n} (c_m cos m theta + s_m sin m theta).

    ``sin_coeffs[m-1]`` holds s_m.
    """

    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.cos_coeffs, dtype=float).ravel()
        s = np.array(self.sin_coeffs, dtype=float).ravel()
        if len(c) != len(s) + 1:
            raise ValueError("need one more cosine than sine coefficient")
        object.__setattr__(self, "cos_coeffs", c)
        object.__setattr__(self, "sin_coeffs", s)

    @property
    def degree(self) -> int:
        return len(self.sin_coeffs)

    def effective_degree(self, tol: float = 1e-10) -> int:
        big = np.flatnonzero((np.abs(self.cos_coeffs[1:]) > tol) | (np.abs(self.sin_coeffs) > tol))
        return int(big[-1] + 1) if big.size else 0

    def __call__(self, theta, chunk: int = 4096):
        theta = np.asarray(theta, dtype=float)
        flat = theta.ravel()
        m = np.arange(1, self.degree + 1)
        out = np.empty(flat.shape)
        for i in range(0, len(flat), chunk):
            t = flat[i : i + chunk, None] * m
            out[i : i + chunk] = self.cos_coeffs[0] + np.cos(t) @ self.cos_coeffs[1:] + np.sin(t) @ self.sin_coeffs
        return out.reshape(theta.shape)

    def sample(self, N: int) -> np.ndarray:
        """Values at theta_j = 2 pi j / N, j = 0..N-1, via an inverse real FFT."""
        n = self.degree
        if N <= 2 * n:
            return self(2 * np.pi * np.arange(N) / N)
        X = np.zeros(N // 2 + 1, dtype=complex)
        X[0] = N * self.cos_coeffs[0]
        X[1 : n + 1] = 0.5 * N * (self.cos_coeffs[1:] - 1j * self.sin_coeffs)
        return np.fft.irfft(X, n=N)

    def derivative(self) -> "FourierForm":
        m = np.arange(1, self.degree + 1)
        return FourierForm(np.concatenate([[0.0], m * self.sin_coeffs]), -m * self.cos_coeffs[1:])

    def __sub__(self, other: "FourierForm") -> "FourierForm":
        deg = max(self.degree, other.degree)
        a, b = self.padded(deg), other.padded(deg)
        return FourierForm(a.cos_coeffs - b.cos_coeffs, a.sin_coeffs - b.sin_coeffs)

    def padded(self, degree: int) -> "FourierForm":
        extra = degree - self.degree
        if extra < 0:
            raise ValueError("cannot pad to a lower degree")
        return FourierForm(np.pad(self.cos_coeffs, (0, extra)), np.pad(self.sin_coeffs, (0, extra)))

    @classmethod
    def cos_n(cls, n: int) -> "FourierForm":
        c = np.zeros(n + 1)
        c[n] = 1.0
        return cls(c, np.zeros(n))


def slice_poly(M, v) -> ProductTrigPoly:
    """Slice polynomial of M along span{1, v}; slopes are M v."""
    return ProductTrigPoly(_matrix(M) @ np.asarray(v, dtype=float))


def eval_derivatives(T: ProductTrigPoly, theta):
    """(T, T', T'') at theta by running the product rule over the factors.

    Each factor f = cos + a sin has f' = a cos - sin and f'' = -f, so no
    division by T is needed and zeros of T are harmless.
    """
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    P, dP, d2P = np.ones_like(c), np.zeros_like(c), np.zeros_like(c)
    for a in T.slopes:
        f = c + a * s
        df = a * c - s
        P, dP, d2P = P * f, dP * f + P * df, d2P * f + 2 * dP * df - P * f
    return P, dP, d2P


def log_derivatives(T: ProductTrigPoly, theta):
    """T'/T and (T''T - T'^2)/T^2 from the logarithmic derivative; needs T(theta) != 0."""
    theta = np.asarray(theta, dtype=float)[..., None]
    c, s = np.cos(theta), np.sin(theta)
    f = c + T.slopes * s
    first = -np.sum((s - T.slopes * c) / f, axis=-1)
    second = -np.sum((1 + T.slopes**2) / f**2, axis=-1)
    return first, second


def to_fourier(T: ProductTrigPoly) -> FourierForm:
    """Exact expansion by convolving the factors in the exponential basis.

    cos + a sin = e^{i theta}(1 - i a)/2 + e^{-i theta}(1 + i a)/2.
    """
    coeffs = np.ones(1, dtype=complex)  # index k <-> e^{i (k - deg) theta}
    for a in T.slopes:
        coeffs = np.convolve(coeffs, np.array([(1 + 1j * a) / 2, 0.0, (1 - 1j * a) / 2]))
    n = T.n
    pos = coeffs[n:]  # e^{i m theta}, m = 0..n
    cos_c = np.concatenate([[pos[0].real], 2 * pos[1:].real])
    sin_c = -2 * pos[1:].imag
    return FourierForm(cos_c, sin_c)


@dataclass(frozen=True)
class BernsteinReport:
    sup_T: float
    sup_dT: float
    sup_d2T: float
    degree: int
    first_order: bool
    second_order: bool


def bernstein_check(F: FourierForm, grid: Optional[int] = None, tol: float = 1e-9) -> BernsteinReport:
    """Sampled check of ||T'|| <= n ||T|| and ||T''|| <= n^2 ||T||."""
    n = max(F.degree, 1)
    grid = 1024 * n if grid is None else grid
    if grid < 1024 * n:
        raise ValueError(f"grid must have at least 1024*n = {1024 * n} points")
    dF = F.derivative()
    sT = float(np.max(np.abs(F.sample(grid))))
    s1 = float(np.max(np.abs(dF.sample(grid))))
    s2 = float(np.max(np.abs(dF.derivative().sample(grid))))
    return BernsteinReport(sT, s1, s2, F.degree, s1 <= n * sT + tol, s2 <= n * n * sT + tol)


def _times_sin2(deg: int) -> np.ndarray:
    """Matrix of psi -> sin^2(theta) psi on real coefficient vectors.

    Layout for degree D: [c_0..c_D, s_1..s_D]; input degree ``deg``,
    output degree ``deg + 2``.
    """
    D = deg + 2
    A = np.zeros((2 * D + 1, 2 * deg + 1))

    def cos_idx(m):
        return abs(m)

    def sin_idx(m):
        return D + abs(m)

    for m in range(deg + 1):
        # sin^2 cos m = cos m / 2 - cos(m+2) / 4 - cos(m-2) / 4
        A[cos_idx(m), m] += 0.5
        A[cos_idx(m + 2), m] -= 0.25
        A[cos_idx(m - 2), m] -= 0.25
    for m in range(1, deg + 1):
        col = deg + m
        A[sin_idx(m), col] += 0.5
        A[sin_idx(m + 2), col] -= 0.25
        if m != 2:
            A[sin_idx(m - 2), col] -= 0.25 * np.sign(m - 2)
    return A


@dataclass(frozen=True)
class QDecomposition:
    Q: FourierForm
    psi: FourierForm
    residual: float
    psi_degree: int
    high_coeff_max: float


def q_decompose(F: FourierForm, n: Optional[int] = None, tol: float = 1e-8, grid: int = 4096) -> QDecomposition:
    """Write Q = T - cos(n theta) as sin^2(theta) psi(theta).

    Division is done in coefficient space by least squares, with psi allowed
    up to degree n so that the vanishing of its top two harmonics can be
    checked rather than assumed.
    """
    n = F.degree if n is None else n
    if F.degree > n:
        raise ValueError(f"polynomial degree {F.degree} exceeds n = {n}")
    F = F.padded(n)
    t0 = float(F(np.array([0.0]))[0])
    d0 = float(F.derivative()(np.array([0.0]))[0])
    if abs(t0 - 1.0) > tol or abs(d0) > tol:
        raise ValueError(f"need T(0) = 1 and T'(0) = 0, got T(0) = {t0!r}, T'(0) = {d0!r}")
    Q = F - FourierForm.cos_n(n)
    target = np.concatenate([Q.cos_coeffs, [0.0, 0.0], Q.sin_coeffs, [0.0, 0.0]])
    A = _times_sin2(n)
    sol, *_ = np.linalg.lstsq(A, target, rcond=None)
    psi = FourierForm(sol[: n + 1], sol[n + 1 :])
    theta = 2 * np.pi * np.arange(grid) / grid
    resid = float(np.max(np.abs(Q(theta) - np.sin(theta) ** 2 * psi(theta))))
    high = 0.0
    if n >= 1:
        top = [n] if n == 1 else [n - 1, n]
        high = float(max(max(abs(psi.cos_coeffs[m]), abs(psi.sin_coeffs[m - 1])) for m in top))
    return QDecomposition(Q, psi, resid, psi.effective_degree(), high)


@dataclass(frozen=True)
class RootCount:
    count: int
    sign_changes: int
    touching: int
    identically_zero: bool
    roots: tuple = field(default=())


def count_roots(F: FourierForm, grid: Optional[int] = None, zero_tol: float = 1e-12) -> RootCount:
    """Distinct roots on [0, 2 pi) seen on a uniform periodic grid.

    Sign changes between consecutive nonzero samples count once each (and
    are bisected to locate them).  A run of near-zero samples counts once,
    whether the sign changes across it or not, so a double root sitting on
    a grid point is still counted.
    """
    n = max(F.degree, 1)
    grid = 4096 * n if grid is None else grid
    if grid < 4096 * n:
        raise ValueError(f"grid must have at least 4096*n = {4096 * n} points")
    vals = F.sample(grid)
    if np.all(np.abs(vals) < zero_tol):
        return RootCount(0, 0, 0, True)
    h = 2 * np.pi / grid
    zero = np.abs(vals) < zero_tol
    start = int(np.flatnonzero(~zero)[0])
    order = np.roll(np.arange(grid), -start)  # begin at a nonzero sample
    sign_changes = touching = 0
    roots = []
    prev = order[0]
    run = []
    for idx in list(order[1:]) + [order[0]]:
        if zero[idx]:
            run.append(idx)
            continue
        if run:
            if np.sign(vals[idx]) != np.sign(vals[prev]):
                sign_changes += 1
            else:
                touching += 1
            roots.append(float(h * run[len(run) // 2]))
            run = []
        elif np.sign(vals[idx]) != np.sign(vals[prev]):
            sign_changes += 1
            roots.append(_bisect(F, h * prev, h * prev + h * ((idx - prev) % grid)))
        prev = idx
    return RootCount(sign_changes + touching, sign_changes, touching, False, tuple(sorted(r % (2 * np.pi) for r in roots)))


def _bisect(F, lo, hi, iters=60):
    flo = float(F(np.array([lo]))[0])
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = float(F(np.array([mid]))[0])
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def slice_vector(M, k: int) -> np.ndarray:
    """(n e_k - 1) / sqrt(n m_kk - 1): e_k projected off 1 and scaled onto x'Mx = n."""
    M = _matrix(M)
    n = M.shape[0]
    denom = float(n * M[k, k] - 1)
    if denom <= 0:
        raise PreconditionError(f"slice {k} is degenerate: n m_kk - 1 = {denom:.3e} must be positive")
    e = np.zeros(n)
    e[k] = n
    return (e - 1.0) / math.sqrt(denom)


def slice_norm_identity(M, k: int):
    """Return (||M v_k||^2, (n^2 ||M e_k||^2 - n) / (n m_kk - 1)); the two agree when M 1 = 1."""
    M = _matrix(M)
    n = M.shape[0]
    lhs = float(np.sum((M @ slice_vector(M, k)) ** 2))
    rhs = (n * n * float(np.sum(M[k] ** 2)) - n) / (n * M[k, k] - 1)
    return lhs, rhs


@dataclass(frozen=True)
class AlphaSlice:
    k: int
    alpha: float
    v_k: np.ndarray
    v_k_alpha: np.ndarray
    poly: ProductTrigPoly
    root: float

    def point(self, theta: float) -> np.ndarray:
        return math.cos(theta) * np.ones(len(self.v_k)) + math.sin(theta) * self.v_k_alpha

    def quadratic_form(self, M, theta) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        M = _matrix(M)
        P = np.cos(theta)[:, None] + np.sin(theta)[:, None] * self.v_k_alpha[None, :]
        return np.einsum("ij,jk,ik->i", P, M, P)


def alpha_slice(M, k: int) -> AlphaSlice:
    """Shrunken slice through -sqrt(alpha) v_k with alpha = cot^2(pi/2n) / (n m_kk - 1).

    Defined when m_kk exceeds csc^2(pi/2n)/n, which is exactly alpha < 1.
    The k-th slope is then -cot(pi/2n), so the k-th factor of T vanishes at
    theta = pi/2n and pi + pi/2n.
    """
    M = _matrix(M)
    n = M.shape[0]
    thr = 1.0 / (n * math.sin(math.pi / (2 * n)) ** 2)
    if not M[k, k] > thr:
        raise PreconditionError(f"m_kk = {M[k, k]!r} must exceed csc^2(pi/2n)/n = {thr!r}")
    vk = slice_vector(M, k)
    alpha = (1.0 / math.tan(math.pi / (2 * n))) ** 2 / (n * M[k, k] - 1)
    va = -math.sqrt(alpha) * vk
    poly = ProductTrigPoly(M @ va)
    a_k = poly.slopes[k]
    root = math.atan2(1.0, -a_k) % math.pi  # cos + a_k sin = 0
    return AlphaSlice(k, alpha, vk, va, poly, root)


@dataclass(frozen=True)
class ContradictionCertificate:
    b: np.ndarray
    theta: float
    T_value: float
    scale: float
    quadratic_form: float
    product: float


def _search_ranges(n):
    return [(math.pi / n, (n - 1) * math.pi / n), ((n + 1) * math.pi / n, (2 * n - 1) * math.pi / n)]


def contradiction_search(M, k: int, grid: int = 100_000) -> ContradictionCertificate:
    """Find b on x'Mx = n with prod |(M b)_j| > 1 from an oversized m_kk.

    |T| of the alpha-slice reaches 1 somewhere in the two search arcs (else
    T - cos(n theta) would have too many roots); the slice point there sits
    strictly inside the ellipsoid, and rescaling it outward by s > 1
    multiplies the product by s^n.
    """
    M = _matrix(M)
    n = M.shape[0]
    sl = alpha_slice(M, k)
    best_theta, best_val = None, -np.inf
    per = grid // 2
    for lo, hi in _search_ranges(n):
        thetas = np.linspace(lo, hi, per)
        vals = np.abs(sl.poly(thetas))
        i = int(np.argmax(vals))
        theta, val = float(thetas[i]), float(vals[i])
        if hi > lo:
            step = (hi - lo) / max(per - 1, 1)
            a, b = max(lo, theta - step), min(hi, theta + step)
            r = minimize_scalar(lambda t: -abs(float(sl.poly(t))), bounds=(a, b), method="bounded",
                                options={"xatol": 1e-13})
            if -r.fun > val:
                theta, val = float(r.x), float(-r.fun)
        if val > best_val:
            best_theta, best_val = theta, val
    # for n = 2 the arcs are single points where |T| = 1 exactly; rounding is tolerated
    if best_val < 1.0 - 1e-12:
        raise RuntimeError(
            f"no theta with |T| >= 1 in the search arcs (max {best_val!r}); root-count argument violated"
        )
    p = sl.point(best_theta)
    q = float(p @ M @ p)
    s = math.sqrt(n / q)
    b = s * p
    return ContradictionCertificate(b, best_theta, best_val, s, float(b @ M @ b), float(np.prod(np.abs(M @ b))))
