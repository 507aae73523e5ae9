"""Random and constructed instances shared by tests and experiment scripts."""

from __future__ import annotations

import math

import numpy as np

from plankzone.geom_core import UnitVectorSet, gram
from plankzone.inverse_eigen import DualConfig, solve_dual
from plankzone.witness import build_M, diag_threshold


def random_vectors(rng, n: int, d: int) -> UnitVectorSet:
    return UnitVectorSet.normalized(rng.standard_normal((n, d)))


def random_instance(rng, n_max: int = 8, full_rank: bool = False) -> UnitVectorSet:
    """n in 2..n_max and d in 2..n (d = n when ``full_rank``)."""
    n = int(rng.integers(2, n_max + 1))
    d = n if full_rank else int(rng.integers(2, n + 1))
    return random_vectors(rng, n, d)


def random_invertible_gram(rng, n_max: int = 8, min_eig: float = 1e-6):
    """Gram matrix of n Gaussian directions in R^n, redrawn until well inside the PD cone."""
    while True:
        vs = random_instance(rng, n_max, full_rank=True)
        H = gram(vs)
        if H.eigenvalues[0] > min_eig:
            return vs, H


def dual_M(H, seed: int = 0) -> np.ndarray:
    """M = diag(w) H diag(w) for the product-maximizing inverse eigenvector."""
    sol = solve_dual(H, DualConfig(seed=seed))
    return build_M(H, sol.w).entries


def complement_basis(n: int) -> np.ndarray:
    """Orthonormal n x (n-1) basis of the complement of the all-ones vector."""
    Q, _ = np.linalg.qr(np.column_stack([np.ones(n), np.eye(n)[:, : n - 1]]))
    return Q[:, 1:]


def random_slice_direction(rng, M) -> np.ndarray:
    """Random v orthogonal to 1 with v'Mv = n."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    v = complement_basis(n) @ rng.standard_normal(n - 1)
    return v * math.sqrt(n / float(v @ M @ v))


def oversized_M(rng, n: int, excess=(0.02, 0.5)) -> tuple:
    """Symmetric PD M with M1 = 1 and m_kk above csc^2(pi/2n)/n for a random k.

    M = 11'/n + P B P with B random PD on the complement of 1; the P B P part
    is scaled so that m_kk = (1 + e) times the threshold, e drawn from ``excess``.
    Returns (M, k).
    """
    if n < 2:
        raise ValueError("need n >= 2")
    P = complement_basis(n)
    A = rng.standard_normal((n - 1, n - 1))
    B = P @ (A @ A.T + 0.1 * np.eye(n - 1)) @ P.T
    k = int(rng.integers(n))
    target = diag_threshold(n) * (1.0 + rng.uniform(*excess))
    B *= (target - 1.0 / n) / B[k, k]
    M = np.ones((n, n)) / n + B
    return 0.5 * (M + M.T), k
