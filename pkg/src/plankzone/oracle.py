"""Brute-force references used to check the solvers.

Nothing here calls the Newton or ascent code in inverse_eigen / witness;
the quadrant cross-check uses its own unconstrained reparametrization and
a quasi-Newton optimizer.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from plankzone.geom_core import SignPattern, UnitVectorSet, all_sign_patterns, as_matrix, icosphere


@dataclass(frozen=True)
class OracleResult:
    value: float
    argument: np.ndarray
    method: str  # "grid" | "analytic2d" | "exhaustive"
    resolution: float


def grid_search_witness(vs, resolution: Optional[int] = None) -> OracleResult:
    """Maximize min_k |<v_k, x>| over a grid of unit vectors x.

    ``resolution`` is the number of directions on the half circle for d = 2
    (at least 1000) and the icosphere subdivision level for d = 3 (at least
    5).  The objective is 1-Lipschitz in angle, so the result is within one
    grid spacing of the optimum.
    """
    if not isinstance(vs, UnitVectorSet):
        vs = UnitVectorSet(vs)
    V = np.asarray(vs.vectors)
    d = vs.d
    if d == 1:
        return OracleResult(float(np.min(np.abs(V[:, 0]))), np.array([1.0]), "grid", 0.0)
    if d == 2:
        resolution = 4096 if resolution is None else resolution
        if resolution < 1000:
            raise ValueError("circle grid needs at least 1000 points")
        phi = np.pi * np.arange(resolution) / resolution
        X = np.column_stack([np.cos(phi), np.sin(phi)])
    elif d == 3:
        resolution = 6 if resolution is None else resolution
        if resolution < 5:
            raise ValueError("sphere grid needs subdivision level >= 5")
        X = icosphere(resolution)
    else:
        raise ValueError(f"grid oracle supports d <= 3, got d = {d}; use witness.maximize_product")
    vals = np.min(np.abs(X @ V.T), axis=1)
    i = int(np.argmax(vals))
    return OracleResult(float(vals[i]), np.array(X[i]), "grid", float(resolution))


def analytic_2d(angles) -> OracleResult:
    """Exact max over theta of min_k |cos(theta - theta_k)| for lines at ``angles``.

    The optimum lies at a line direction or at one of the two bisectors of a
    pair of cyclically consecutive lines; all candidates are evaluated.
    """
    th = np.sort(np.mod(np.asarray(angles, dtype=float), np.pi))
    if th.size == 0:
        raise ValueError("need at least one angle")
    nxt = np.append(th[1:], th[0] + np.pi)
    mids = 0.5 * (th + nxt)
    cands = np.mod(np.concatenate([th, mids, mids + np.pi / 2]), np.pi)
    vals = np.min(np.abs(np.cos(cands[:, None] - th[None, :])), axis=1)
    i = int(np.argmax(vals))
    return OracleResult(float(vals[i]), np.array([math.cos(cands[i]), math.sin(cands[i])]), "analytic2d", 0.0)


def max_gap_2d(angles) -> float:
    """sin(g/2) for the largest gap g between lines; equals the analytic optimum."""
    th = np.sort(np.mod(np.asarray(angles, dtype=float), np.pi))
    gaps = np.diff(np.append(th, th[0] + np.pi))
    return float(math.sin(np.max(gaps) / 2)) if len(th) > 1 else 1.0


def bang_sign_search(H, max_n: int = 20, chunk: int = 1 << 14) -> tuple:
    """Exhaustive search for signs eps with min_j eps_j (H eps)_j >= 1/n.

    Returns (SignPattern, value) for the pattern maximizing that minimum.
    Raises RuntimeError if no pattern reaches 1/n.
    """
    H = as_matrix(H)
    n = H.shape[0]
    if n > max_n:
        raise ValueError(f"exhaustive sign search limited to n <= {max_n}")
    best_val, best = -np.inf, None
    rows = itertools.product((1.0, -1.0), repeat=n - 1)
    while True:
        block = list(itertools.islice(rows, chunk))
        if not block:
            break
        E = np.hstack([np.ones((len(block), 1)), np.array(block).reshape(len(block), n - 1)])
        vals = np.min(E * (E @ H), axis=1)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best = float(vals[i]), E[i]
    if best_val < 1.0 / n:
        raise RuntimeError(f"no sign vector reaches 1/n = {1 / n!r} (best {best_val!r})")
    return SignPattern(tuple(int(s) for s in best)), best_val


def _quadrant_max(H, signs, rng, starts=4, bound=30.0):
    """Max of sum(log|w_i|) over the quadrant on w'Hw = n, or None if unbounded.

    With w = signs * exp(y) and the scale fixed by the constraint, the
    objective is sum(y) + (n/2) log(n / w'Hw), invariant under y -> y + c;
    y_0 = 0 fixes that freedom.
    """
    n = len(signs)

    def full(z):
        return np.concatenate([[0.0], z])

    def fun(z):
        y = full(z)
        w = signs * np.exp(y)
        q = max(float(w @ H @ w), 1e-300)
        val = np.sum(y) + 0.5 * n * math.log(n / q)
        g = 1.0 - n * (w * (H @ w)) / q
        return -val, -g[1:]

    best = None
    for s in range(starts):
        z0 = np.zeros(n - 1) if s == 0 else rng.uniform(-1, 1, n - 1)
        r = minimize(fun, z0, jac=True, method="L-BFGS-B", bounds=[(-bound, bound)] * (n - 1),
                     options={"maxiter": 2000, "ftol": 1e-15, "gtol": 1e-11})
        y = full(r.x)
        w = signs * np.exp(y)
        q = float(w @ H @ w)
        degenerate = q <= 1e-10 * float(w @ w) or np.any(np.abs(r.x) > bound - 1.0)
        if degenerate:
            return None
        if best is None or -r.fun > best[0]:
            best = (-r.fun, w * math.sqrt(n / q))
    return best


@dataclass(frozen=True)
class EnumerationCheck:
    agree: int
    total: int
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.agree == self.total


def cross_check_enumeration(H, solutions, seed: int = 0, value_tol: float = 1e-6, max_n: int = 12) -> EnumerationCheck:
    """Compare enumerated inverse eigenvectors against per-quadrant maximization.

    ``solutions`` is the list returned by ``inverse_eigen.enumerate_all``.
    For every quadrant, presence must agree and, when present, the maximal
    sum(log|w_i|) must match the solution's value within ``value_tol``.
    """
    H = as_matrix(H)
    n = H.shape[0]
    if n > max_n:
        raise ValueError(f"cross-check limited to n <= {max_n}")
    by_q = {str(s.quadrant): s for s in solutions}
    rng = np.random.default_rng(seed)
    mismatches = []
    agree = total = 0
    for q in all_sign_patterns(n):
        total += 1
        found = _quadrant_max(H, q.array(), rng) if n > 1 else (0.0, q.array())
        sol = by_q.get(str(q))
        if found is None and sol is None:
            agree += 1
        elif found is not None and sol is not None:
            mine = float(np.sum(np.log(np.abs(sol.w))))
            if abs(mine - found[0]) <= value_tol:
                agree += 1
            else:
                mismatches.append((str(q), "value", mine, found[0]))
        else:
            mismatches.append((str(q), "presence", sol is not None, found is not None))
    return EnumerationCheck(agree, total, mismatches)
