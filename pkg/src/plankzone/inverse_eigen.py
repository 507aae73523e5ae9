"""Inverse eigenvectors of Gram matrices: solutions of H w = 1/w.

Inside a fixed quadrant the equation is the stationarity condition of the
strictly convex function g(w) = w'Hw/2 - sum(log|w_k|), whose Hessian is
H + diag(1/w^2).  This gives uniqueness per quadrant, a globally convergent
damped Newton iteration, and the existence test: a quadrant carries a
solution iff its closure meets Ker(H) only at 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from plankzone.errors import ConvergenceError, PreconditionError, UnsupportedInputError
from plankzone.geom_core import KERNEL_TOL, SignPattern, all_sign_patterns, as_matrix, kernel_basis


@dataclass(frozen=True)
class NewtonConfig:
    tol: float = 1e-10
    max_iter: int = 200
    max_halvings: int = 60
    polish_steps: int = 3
    armijo: float = 1e-4
    kernel_tol: float = KERNEL_TOL


@dataclass(frozen=True)
class DualConfig:
    seed: int = 0
    random_starts_per_dim: int = 8
    max_sign_bits: int = 10
    tie_tol: float = 1e-12
    newton: NewtonConfig = field(default_factory=NewtonConfig)


@dataclass(frozen=True)
class InverseEigenSolution:
    w: np.ndarray
    residual: float
    quadrant: SignPattern
    converged: bool
    iterations: int

    @property
    def n(self) -> int:
        return len(self.w)

    @property
    def status(self) -> str:
        return "converged" if self.converged else "failed"

    def quadratic_form(self, H) -> float:
        return float(self.w @ as_matrix(H) @ self.w)


def residual(H, w) -> np.ndarray:
    """Return H w - 1/w."""
    w = np.asarray(w, dtype=float)
    zero = np.flatnonzero(w == 0)
    if zero.size:
        raise ValueError(f"w has a zero entry at index {int(zero[0])}")
    return as_matrix(H) @ w - 1.0 / w


def _objective(H, W):
    return 0.5 * np.einsum("ij,jk,ik->i", W, H, W) - np.sum(np.log(np.abs(W)), axis=1)


def newton_batch(H, W0, cfg: NewtonConfig = NewtonConfig()):
    """Damped Newton on F(w) = Hw - 1/w for each row of W0, keeping its quadrant.

    Returns (W, residuals, converged, iterations).  A step is halved until it
    stays strictly inside the starting quadrant and either the convex merit
    g decreases (Armijo) or the residual norm decreases.
    """
    H = as_matrix(H)
    W = np.array(W0, dtype=float, ndmin=2)
    m, n = W.shape
    S = np.sign(W)
    iters = np.zeros(m, dtype=int)
    F = W @ H - 1.0 / W
    res = np.max(np.abs(F), axis=1)
    done = res <= cfg.tol
    stalled = np.zeros(m, dtype=bool)
    eye = np.eye(n)

    def step(idx):
        Wi, Fi = W[idx], F[idx]
        J = H[None, :, :] + eye[None, :, :] / (Wi**2)[:, :, None]
        D = -np.linalg.solve(J, Fi[:, :, None])[:, :, 0]
        g0 = _objective(H, Wi)
        slope = np.sum(Fi * D, axis=1)
        r0 = np.linalg.norm(Fi, axis=1)
        t = np.ones(len(idx))
        accepted = np.zeros(len(idx), dtype=bool)
        newW = Wi.copy()
        for _ in range(cfg.max_halvings):
            todo = ~accepted
            if not todo.any():
                break
            cand = Wi[todo] + t[todo, None] * D[todo]
            inside = np.all(np.sign(cand) == S[idx][todo], axis=1) & np.all(np.abs(cand) > 1e-14, axis=1)
            ok = np.zeros(len(cand), dtype=bool)
            if inside.any():
                c_in = cand[inside]
                g1 = _objective(H, c_in)
                r1 = np.linalg.norm(c_in @ H - 1.0 / c_in, axis=1)
                sub = np.flatnonzero(todo)[inside]
                ok[inside] = (g1 <= g0[sub] + cfg.armijo * t[sub] * slope[sub]) | (r1 < r0[sub])
            rows = np.flatnonzero(todo)[ok]
            newW[rows] = cand[ok]
            accepted[rows] = True
            t[todo & ~accepted] *= 0.5
        return newW, accepted

    for _ in range(cfg.max_iter):
        active = np.flatnonzero(~done & ~stalled)
        if active.size == 0:
            break
        newW, acc = step(active)
        W[active[acc]] = newW[acc]
        stalled[active[~acc]] = True
        iters[active[acc]] += 1
        F[active] = W[active] @ H - 1.0 / W[active]
        res[active] = np.max(np.abs(F[active]), axis=1)
        done |= res <= cfg.tol

    # extra full steps squeeze the residual toward rounding level
    for _ in range(cfg.polish_steps):
        idx = np.flatnonzero(done)
        if idx.size == 0:
            break
        J = H[None, :, :] + eye[None, :, :] / (W[idx] ** 2)[:, :, None]
        cand = W[idx] - np.linalg.solve(J, F[idx][:, :, None])[:, :, 0]
        Fc = cand @ H - 1.0 / cand
        rc = np.max(np.abs(Fc), axis=1)
        better = (rc < res[idx]) & np.all(np.sign(cand) == S[idx], axis=1)
        if not better.any():
            break
        sel = idx[better]
        W[sel], F[sel], res[sel] = cand[better], Fc[better], rc[better]
    return W, res, res <= cfg.tol, iters


def quadrant_meets_kernel(H, q: SignPattern, tol: float = KERNEL_TOL) -> bool:
    """True iff some nonzero kernel vector of H lies in the closed quadrant q."""
    basis = kernel_basis(H, tol)
    if not basis:
        return False
    K = np.column_stack(basis)
    s = q.array()
    A = s[:, None] * K  # rows: s_i * (K c)_i >= 0
    if K.shape[1] == 1:
        col = A[:, 0]
        return bool(np.all(col >= -1e-9) or np.all(col <= 1e-9))
    # feasibility of {c : A c >= 0, sum(A c) = 1}
    res = linprog(
        np.zeros(K.shape[1]),
        A_ub=-A,
        b_ub=np.zeros(len(s)),
        A_eq=A.sum(axis=0, keepdims=True),
        b_eq=[1.0],
        bounds=[(None, None)] * K.shape[1],
        method="highs",
    )
    return res.status == 0


def _start_for(H, signs):
    quad = np.einsum("ij,jk,ik->i", signs, H, signs)
    scale = np.sqrt(signs.shape[1] / np.maximum(quad, 1e-300))
    return signs * scale[:, None]


def _solutions(H, patterns, cfg):
    signs = np.array([p.signs for p in patterns], dtype=float)
    W, res, conv, iters = newton_batch(H, _start_for(H, signs), cfg)
    return [
        InverseEigenSolution(W[i].copy(), float(res[i]), p, bool(conv[i]), int(iters[i]))
        for i, p in enumerate(patterns)
    ]


def solve_in_quadrant(H, q: SignPattern, cfg: NewtonConfig = NewtonConfig()) -> Optional[InverseEigenSolution]:
    """The inverse eigenvector of H with sign pattern q.

    Returns None when the closed quadrant meets Ker(H) nontrivially, in which
    case no solution exists.  Otherwise returns the Newton result; check
    ``converged`` to tell a solver failure from success.
    """
    H = as_matrix(H)
    if q.n != H.shape[0]:
        raise ValueError(f"sign pattern has length {q.n}, matrix has size {H.shape[0]}")
    if quadrant_meets_kernel(H, q, cfg.kernel_tol):
        return None
    return _solutions(H, [q], cfg)[0]


def _negate(sol: InverseEigenSolution) -> InverseEigenSolution:
    return InverseEigenSolution(-sol.w, sol.residual, -sol.quadrant, sol.converged, sol.iterations)


def enumerate_all(H, cfg: NewtonConfig = NewtonConfig(), max_n: int = 20) -> list:
    """All inverse eigenvectors of H, one per admissible quadrant.

    Solutions come in pairs (w, -w); only quadrants with a leading '+' are
    solved and the rest are obtained by negation.  Results are ordered by
    the '+'/'-' string of the quadrant.
    """
    H = as_matrix(H)
    n = H.shape[0]
    if n > max_n:
        raise ValueError(f"enumeration over 2^{n} quadrants is too large (limit n <= {max_n})")
    has_kernel = bool(kernel_basis(H, cfg.kernel_tol))
    patterns = [q for q in all_sign_patterns(n, first_positive=True)
                if not (has_kernel and quadrant_meets_kernel(H, q, cfg.kernel_tol))]
    sols = _solutions(H, patterns, cfg) if patterns else []
    failed = [s for s in sols if not s.converged]
    if failed:
        raise ConvergenceError(
            f"Newton failed in {len(failed)} quadrant(s), e.g. {failed[0].quadrant} "
            f"with residual {failed[0].residual:.3e}"
        )
    out = sols + [_negate(s) for s in sols]
    return sorted(out, key=lambda s: str(s.quadrant))


def _dual_patterns(n, cfg: DualConfig):
    # all sign vectors on the first min(n, bits) coordinates, rest '+'
    bits = min(n, cfg.max_sign_bits)
    seen = {}
    for head in itertools.product((1, -1), repeat=bits):
        signs = head + (1,) * (n - bits)
        if signs[0] < 0:
            signs = tuple(-s for s in signs)
        seen.setdefault(signs, None)
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.random_starts_per_dim * n):
        x = rng.standard_normal(n)
        signs = tuple(int(s) for s in np.where(x >= 0, 1, -1))
        if signs[0] < 0:
            signs = tuple(-s for s in signs)
        seen.setdefault(signs, None)
    return [SignPattern(s) for s in seen]


def solve_dual(H, cfg: DualConfig = DualConfig()) -> InverseEigenSolution:
    """Inverse eigenvector w = 1/u where u maximizes prod|u_k| on u'H^{-1}u = n.

    Each quadrant holds exactly one critical point of the product on the
    ellipsoid (the inverse eigenvector of H^{-1} there), so the global
    maximum is found by solving every candidate quadrant and keeping the
    best.  For n <= ``max_sign_bits`` every quadrant is visited.  The
    winner is mapped back through u -> 1/u and polished against H itself.
    """
    H = as_matrix(H)
    n = H.shape[0]
    evals = np.linalg.eigvalsh(H)
    if evals[0] <= cfg.newton.kernel_tol:
        raise UnsupportedInputError(
            f"H is singular (smallest eigenvalue {evals[0]:.3e}); "
            "use witness.maximize_product for the direct route"
        )
    Hinv = np.linalg.inv(H)
    Hinv = 0.5 * (Hinv + Hinv.T)
    patterns = sorted(_dual_patterns(n, cfg), key=str)
    duals = _solutions(Hinv, patterns, cfg.newton)
    scores = np.array([np.sum(np.log(np.abs(s.w))) if s.converged else -np.inf for s in duals])
    if not np.isfinite(scores).any():
        raise ConvergenceError("Newton failed in every quadrant of H^-1")
    top = np.max(scores)
    best = next(i for i, s in enumerate(scores) if s >= top - cfg.tie_tol * max(1.0, abs(top)))
    u = duals[best].w
    W, res, conv, iters = newton_batch(H, (1.0 / u)[None, :], cfg.newton)
    sol = InverseEigenSolution(W[0].copy(), float(res[0]), patterns[best], bool(conv[0]), int(iters[0]))
    if not sol.converged:
        raise ConvergenceError(f"polishing 1/u against H stalled at residual {sol.residual:.3e}")
    return sol


@dataclass(frozen=True)
class WBoundReport:
    n: int
    sup_norm: float
    sharp_limit: float
    bang_limit: float
    strong_limit: float
    sharp_bound: bool
    bang_bound: bool
    strong_bound: bool


def sharp_w_limit(n: int) -> float:
    return 1.0 / (math.sqrt(n) * math.sin(math.pi / (2 * n)))


def verify_w_bounds(sol: InverseEigenSolution, n: Optional[int] = None, tol: float = 1e-8) -> WBoundReport:
    """Compare ||w||_inf with n^{-1/2} csc(pi/2n), sqrt(n) and sqrt(n-1).

    The bounds are guaranteed only for the dual-route solution; for other
    quadrants this just records what holds.
    """
    if not sol.converged:
        raise PreconditionError("bound report needs a converged solution")
    n = sol.n if n is None else n
    sup = float(np.max(np.abs(sol.w)))
    sharp, bang, strong = sharp_w_limit(n), math.sqrt(n), math.sqrt(max(n - 1, 0))
    return WBoundReport(n, sup, sharp, bang, strong, sup <= sharp + tol, sup <= bang + tol, sup <= strong + tol)
