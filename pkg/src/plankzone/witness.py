"""Witness vectors v with |<v_k, v>| >= sqrt(n) sin(pi/2n) and the matrix M."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from plankzone.errors import CertificationError, ConvergenceError, PreconditionError
from plankzone.geom_core import KERNEL_TOL, UnitVectorSet, as_matrix, gram
from plankzone.inverse_eigen import DualConfig, residual, solve_dual


@dataclass(frozen=True)
class WitnessConfig:
    seed: int = 0
    starts_per_dim: int = 8
    sign_starts_max_n: int = 10
    ascent_steps: int = 10
    max_iter: int = 200
    stationarity_tol: float = 1e-9
    certify_tol: float = 1e-9
    tie_tol: float = 1e-12


@dataclass(frozen=True)
class WitnessResult:
    v: np.ndarray
    margins: np.ndarray
    min_margin: float
    bound: float
    certified: bool
    w: np.ndarray
    path: str = "direct"
    stationarity: float = 0.0

    @property
    def n(self) -> int:
        return len(self.margins)

    @property
    def unit_margins(self) -> np.ndarray:
        return self.margins / math.sqrt(self.n)

    @property
    def unit_min_margin(self) -> float:
        return self.min_margin / math.sqrt(self.n)


def zone_bound(n: int) -> float:
    """sqrt(n) sin(pi/2n), the guaranteed margin for a witness of norm sqrt(n)."""
    return math.sqrt(n) * math.sin(math.pi / (2 * n))


def _canonical_sign(v):
    nz = np.flatnonzero(np.abs(v) > 1e-15)
    return -1.0 if nz.size and v[nz[0]] < 0 else 1.0


def _result(V, v, path, tol):
    n = V.shape[0]
    v = v * _canonical_sign(v)
    inner = V @ v
    margins = np.abs(inner)
    w = 1.0 / inner
    stationarity = float(np.linalg.norm(v - V.T @ w))
    bound = zone_bound(n)
    mm = float(np.min(margins))
    return WitnessResult(v, margins, mm, bound, mm >= bound - tol, w, path, stationarity)


def _starts(V, cfg: WitnessConfig):
    n, d = V.shape
    rng = np.random.default_rng(cfg.seed)
    starts = []
    colprod = np.prod(np.abs(V), axis=0)
    if np.max(colprod) > 0:
        e = np.zeros(d)
        e[int(np.argmax(colprod))] = 1.0
        starts.append(e)
    starts.extend(rng.standard_normal((cfg.starts_per_dim * n, d)))
    if n <= cfg.sign_starts_max_n:
        # least-squares points with <v_k, x> as close as possible to a sign vector
        pinv = np.linalg.pinv(V)
        for rest in itertools.product((1.0, -1.0), repeat=n - 1):
            starts.append(pinv @ np.array((1.0,) + rest))
    X = np.array(starts)
    # resample starts sitting on a hyperplane <v_k, x> = 0
    for i in range(len(X)):
        for _ in range(100):
            nx = np.linalg.norm(X[i])
            if nx > 0 and np.min(np.abs(V @ X[i])) > 1e-8 * nx:
                break
            X[i] = X[i] + 1e-3 * max(nx, 1.0) * rng.standard_normal(d)
    return X


def _log_prod(V, X):
    return np.sum(np.log(np.abs(X @ V.T)), axis=1)


def _ascend(V, X, steps):
    """Projected gradient ascent of sum(log|<v_k, x>|) on the sphere |x| = sqrt(n)."""
    r = math.sqrt(V.shape[0])
    X = r * X / np.linalg.norm(X, axis=1, keepdims=True)
    for _ in range(steps):
        P = X @ V.T
        S = np.sign(P)
        G = (1.0 / P) @ V
        G -= (np.sum(G * X, axis=1) / r**2)[:, None] * X
        gn = np.linalg.norm(G, axis=1, keepdims=True)
        gn[gn == 0] = 1.0
        f0 = _log_prod(V, X)
        eta = np.full((len(X), 1), 0.25 * r)
        pending = np.ones(len(X), dtype=bool)
        for _ in range(30):
            idx = np.flatnonzero(pending)
            if idx.size == 0:
                break
            Y = X[idx] + eta[idx] * G[idx] / gn[idx]
            Y = r * Y / np.linalg.norm(Y, axis=1, keepdims=True)
            good = np.all(np.sign(Y @ V.T) == S[idx], axis=1)
            fy = np.full(len(idx), -np.inf)
            fy[good] = _log_prod(V, Y[good])
            good &= fy > f0[idx]
            X[idx[good]] = Y[good]
            pending[idx[good]] = False
            eta[idx[~good]] *= 0.5
    return X


def _polish(V, X, cfg: WitnessConfig):
    """Damped Newton on F(x) = x - V'(1/(Vx)), the fixed-point form of stationarity.

    F is the gradient of |x|^2/2 - sum(log|<v_k, x>|), convex on each sign
    cell, so Armijo backtracking inside the cell converges.
    """
    n, d = V.shape
    eye = np.eye(d)
    S = np.sign(X @ V.T)

    def merit(Y):
        return 0.5 * np.sum(Y * Y, axis=1) - _log_prod(V, Y)

    def resid(Y):
        return Y - (1.0 / (Y @ V.T)) @ V

    F = resid(X)
    res = np.linalg.norm(F, axis=1)
    stalled = np.zeros(len(X), dtype=bool)
    for _ in range(cfg.max_iter):
        act = np.flatnonzero((res > 0.01 * cfg.stationarity_tol) & ~stalled)
        if act.size == 0:
            break
        P = X[act] @ V.T
        J = eye[None] + np.einsum("ki,mk,kj->mij", V, 1.0 / P**2, V)
        D = -np.linalg.solve(J, F[act][:, :, None])[:, :, 0]
        g0 = merit(X[act])
        slope = np.sum(F[act] * D, axis=1)
        t = np.ones(len(act))
        moved = np.zeros(len(act), dtype=bool)
        for _ in range(60):
            todo = np.flatnonzero(~moved)
            if todo.size == 0:
                break
            Y = X[act[todo]] + t[todo, None] * D[todo]
            inside = np.all(np.sign(Y @ V.T) == S[act[todo]], axis=1)
            ok = np.zeros(len(todo), dtype=bool)
            if inside.any():
                Yi = Y[inside]
                sub = todo[inside]
                g1 = merit(Yi)
                r1 = np.linalg.norm(resid(Yi), axis=1)
                ok[inside] = (g1 <= g0[sub] + 1e-4 * t[sub] * slope[sub]) | (r1 < res[act[sub]])
            X[act[todo[ok]]] = Y[ok]
            moved[todo[ok]] = True
            t[todo[~ok]] *= 0.5
        stalled[act[~moved]] = True
        F[act] = resid(X[act])
        res[act] = np.linalg.norm(F[act], axis=1)
    return X, res


def maximize_product(vs, cfg: WitnessConfig = WitnessConfig()) -> WitnessResult:
    """Vector v of norm sqrt(n) maximizing prod |<v_k, v>| (multi-start).

    Works directly with the vectors, so singular Gram matrices are fine.
    Each start is pushed uphill on the sphere and then polished by Newton
    on v = sum_k v_k / <v_k, v>; the best product wins, ties going to the
    lowest start index.
    """
    if not isinstance(vs, UnitVectorSet):
        vs = UnitVectorSet(vs)
    V = np.asarray(vs.vectors)
    X = _ascend(V, _starts(V, cfg), cfg.ascent_steps)
    X, res = _polish(V, X, cfg)
    ok = res <= cfg.stationarity_tol
    if not ok.any():
        raise ConvergenceError(f"no start reached stationarity; best residual {np.min(res):.3e}")
    scores = np.where(ok, _log_prod(V, X), -np.inf)
    top = np.max(scores)
    best = int(np.flatnonzero(scores >= top - cfg.tie_tol * max(1.0, abs(top)))[0])
    return _result(V, X[best], "direct", cfg.certify_tol)


def witness_from_w(vs, w, tol: float = 1e-8, certify_tol: float = 1e-9) -> WitnessResult:
    """v = sum_k w_k v_k for an inverse eigenvector w of the Gram matrix."""
    if not isinstance(vs, UnitVectorSet):
        vs = UnitVectorSet(vs)
    V = np.asarray(vs.vectors)
    w = np.asarray(w, dtype=float)
    r = float(np.max(np.abs(residual(gram(vs), w))))
    if r > tol:
        raise ValueError(f"w is not an inverse eigenvector of the Gram matrix (residual {r:.3e})")
    return _result(V, V.T @ w, "dual", certify_tol)


@dataclass(frozen=True)
class ConjugatedMatrix:
    """M with m_jk = w_j H_jk w_k; M 1 = 1 when H w = 1/w."""

    entries: np.ndarray

    def __post_init__(self):
        M = np.array(self.entries, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError(f"M must be square, got shape {M.shape}")
        if np.max(np.abs(M - M.T)) > 1e-9 * max(1.0, np.max(np.abs(M))):
            raise ValueError("M is not symmetric")
        M = 0.5 * (M + M.T)
        M.setflags(write=False)
        object.__setattr__(self, "entries", M)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def row_sum_error(self) -> float:
        return float(np.max(np.abs(self.entries.sum(axis=1) - 1.0)))


def build_M(H, w, tol: float = 1e-8) -> ConjugatedMatrix:
    H = as_matrix(H)
    w = np.asarray(w, dtype=float)
    r = float(np.max(np.abs(residual(H, w))))
    if r > tol:
        raise ValueError(f"w is not an inverse eigenvector (residual {r:.3e}); M 1 = 1 would fail")
    return ConjugatedMatrix(w[:, None] * H * w[None, :])


@dataclass(frozen=True)
class MBoundReport:
    n: int
    row_sum_error: float
    lambda_max: float
    lambda_min: float
    diag_min: float
    diag_max: float
    norm_bound: bool
    diag_lower: bool
    diag_sharp: bool
    diag_weak: bool
    ones_eigenvector: bool

    @property
    def ok(self) -> bool:
        return self.norm_bound and self.diag_lower and self.diag_sharp and self.diag_weak and self.ones_eigenvector


def diag_threshold(n: int) -> float:
    """csc^2(pi/2n) / n, the sharp upper bound for the diagonal of M."""
    return 1.0 / (n * math.sin(math.pi / (2 * n)) ** 2)


def check_M_bounds(M, tol: float = 1e-8, lower_tol: float = 1e-10, row_tol: float = 1e-9) -> MBoundReport:
    """Spectral and diagonal bounds on M (reported, not asserted)."""
    if isinstance(M, ConjugatedMatrix):
        M = M.entries
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if n < 2:
        raise PreconditionError("the bounds on M are stated for n >= 2")
    evals = np.linalg.eigvalsh(M)
    diag = np.diag(M)
    rse = float(np.max(np.abs(M.sum(axis=1) - 1.0)))
    return MBoundReport(
        n=n,
        row_sum_error=rse,
        lambda_max=float(evals[-1]),
        lambda_min=float(evals[0]),
        diag_min=float(diag.min()),
        diag_max=float(diag.max()),
        norm_bound=bool(evals[-1] <= n - 1 + tol),
        diag_lower=bool(diag.min() >= 1.0 / n - lower_tol),
        diag_sharp=bool(diag.max() <= diag_threshold(n) + tol),
        diag_weak=bool(diag.max() <= (1 + (n - 1) ** 2) / n + tol),
        ones_eigenvector=rse <= row_tol,
    )


@dataclass(frozen=True)
class CertifyConfig:
    kernel_tol: float = KERNEL_TOL
    certify_tol: float = 1e-9
    dual: DualConfig = field(default_factory=DualConfig)
    witness: WitnessConfig = field(default_factory=WitnessConfig)


def certify_zone_bound(vs, cfg: CertifyConfig = CertifyConfig()) -> WitnessResult:
    """Produce a certified witness: dual route for invertible H, direct otherwise.

    Raises CertificationError (carrying the best margin) if the witness
    falls short of sqrt(n) sin(pi/2n).
    """
    if not isinstance(vs, UnitVectorSet):
        vs = UnitVectorSet(vs)
    if vs.n < 2:
        raise PreconditionError("certification is stated for n >= 2")
    H = gram(vs)
    if H.is_invertible(cfg.kernel_tol):
        sol = solve_dual(H, cfg.dual)
        result = witness_from_w(vs, sol.w, certify_tol=cfg.certify_tol)
    else:
        result = maximize_product(vs, cfg.witness)
    if not result.certified:
        raise CertificationError(
            f"witness margin {result.min_margin!r} below bound {result.bound!r} ({result.path} route)",
            best_margin=result.min_margin,
        )
    return result
