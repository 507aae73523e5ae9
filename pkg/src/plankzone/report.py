"""The full verification pipeline as a JSON-ready report.

gram -> witness (dual or direct route) -> inverse eigenvector bounds ->
M bounds -> slice-polynomial checks -> optional oracles.  ``overall`` is
the conjunction of every enabled block's ``ok``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from plankzone import oracle, trigpoly
from plankzone.geom_core import SignPattern, UnitVectorSet, gram
from plankzone.inverse_eigen import DualConfig, InverseEigenSolution, residual, verify_w_bounds
from plankzone.witness import CertifyConfig, WitnessConfig, build_M, certify_zone_bound, check_M_bounds

SCHEMA = "1"


@dataclass(frozen=True)
class VerifyConfig:
    seed: int = 0
    certify_tol: float = 1e-9
    residual_tol: float = 1e-10
    bound_tol: float = 1e-8
    oracle_slack: float = 1e-6
    oracle: bool = False
    trig: bool = True

    def certify(self) -> CertifyConfig:
        return CertifyConfig(
            certify_tol=self.certify_tol,
            dual=DualConfig(seed=self.seed),
            witness=WitnessConfig(seed=self.seed, certify_tol=self.certify_tol),
        )


def top_slice_vector(M) -> np.ndarray:
    """Eigenvector of M orthogonal to 1 with the largest eigenvalue, scaled onto x'Mx = n."""
    n = M.shape[0]
    # orthonormal basis of the complement of 1
    Q, _ = np.linalg.qr(np.column_stack([np.ones(n), np.eye(n)[:, : n - 1]]))
    B = Q[:, 1:]
    evals, evecs = np.linalg.eigh(B.T @ M @ B)
    v = B @ evecs[:, -1]
    return v * math.sqrt(n / float(v @ M @ v))


def slice_checks(M, v, tol_bern=1e-9, tol_sup=1e-9, tol_norm=1e-6, tol_q=1e-10) -> dict:
    n = M.shape[0]
    T = trigpoly.slice_poly(M, v)
    F = trigpoly.to_fourier(T)
    bern = trigpoly.bernstein_check(F, tol=tol_bern)
    mv2 = float(np.sum(T.slopes**2))
    dec = trigpoly.q_decompose(F, n)
    roots = trigpoly.count_roots(dec.Q)
    _, d1, d2 = trigpoly.eval_derivatives(T, np.array([0.0]))
    block = {
        "slope_sum": float(np.sum(T.slopes)),
        "second_derivative_gap": float(d2[0] + n + mv2),
        "sup_T": bern.sup_T,
        "sup_dT": bern.sup_dT,
        "sup_d2T": bern.sup_d2T,
        "bernstein_first": bern.first_order,
        "bernstein_second": bern.second_order,
        "sup_T_le_1": bern.sup_T <= 1 + tol_sup,
        "Mv_norm_sq": mv2,
        "Mv_norm_bound": mv2 <= n * (n - 1) + tol_norm,
        "q_residual": dec.residual,
        "psi_degree": dec.psi_degree,
        "psi_high_coeff": dec.high_coeff_max,
        "root_count": roots.count,
        "q_ok": dec.residual <= tol_q and dec.high_coeff_max <= tol_q,
        "roots_ok": roots.identically_zero or roots.count <= 2 * n - 2,
    }
    block["ok"] = all(block[k] for k in ("bernstein_first", "bernstein_second", "sup_T_le_1",
                                         "Mv_norm_bound", "q_ok", "roots_ok"))
    return block


def build_report(vs: UnitVectorSet, cfg: VerifyConfig = VerifyConfig(), source: Optional[str] = None) -> dict:
    """Run every check on ``vs``; raises CertificationError if no witness is found."""
    n, d = vs.n, vs.d
    H = gram(vs)
    result = certify_zone_bound(vs, cfg.certify())
    w = result.w
    res = float(np.max(np.abs(residual(H, w))))
    quad_err = abs(float(w @ H.entries @ w) - n)
    sol = InverseEigenSolution(w, res, SignPattern.of(w), res <= cfg.residual_tol, 0)
    wb = verify_w_bounds(sol, n, tol=cfg.bound_tol) if sol.converged else None

    report = {
        "schema": SCHEMA,
        "instance": {"n": n, "d": d, "source": source, "seed": cfg.seed},
        "witness": {
            "path": result.path,
            "v": result.v,
            "margins": result.margins,
            "min_margin": result.min_margin,
            "bound": result.bound,
            "unit_margins": result.unit_margins,
            "unit_min_margin": result.unit_min_margin,
            "unit_bound": math.sin(math.pi / (2 * n)),
            "stationarity": result.stationarity,
            "certified": result.certified,
            "ok": result.certified,
        },
    }
    ie = {
        "w": w,
        "residual": res,
        "quadrant": str(sol.quadrant),
        "quadratic_form_error": quad_err,
    }
    if wb is not None:
        ie.update({
            "sup_norm": wb.sup_norm,
            "sharp_limit": wb.sharp_limit,
            "sharp_bound": wb.sharp_bound,
            "bang_bound": wb.bang_bound,
            "strong_bound": wb.strong_bound,
        })
    ie["ok"] = bool(sol.converged and quad_err <= cfg.bound_tol and wb is not None and wb.sharp_bound
                    and wb.bang_bound and wb.strong_bound)
    report["inverse_eigen"] = ie

    M = build_M(H, w).entries
    mb = check_M_bounds(M, tol=cfg.bound_tol)
    report["M"] = {
        "row_sum_error": mb.row_sum_error,
        "lambda_max": mb.lambda_max,
        "lambda_min": mb.lambda_min,
        "diag_min": mb.diag_min,
        "diag_max": mb.diag_max,
        "diag_limit": 1.0 / (n * math.sin(math.pi / (2 * n)) ** 2),
        "norm_bound": mb.norm_bound,
        "diag_lower": mb.diag_lower,
        "diag_sharp": mb.diag_sharp,
        "diag_weak": mb.diag_weak,
        "ones_eigenvector": mb.ones_eigenvector,
        "ok": mb.ok,
    }

    if cfg.trig:
        top = slice_checks(M, top_slice_vector(M))
        per_k = []
        for k in range(n):
            if n * M[k, k] - 1 <= 1e-12:
                continue
            block = slice_checks(M, trigpoly.slice_vector(M, k))
            lhs, rhs = trigpoly.slice_norm_identity(M, k)
            block["k"] = k
            block["norm_identity_error"] = abs(lhs - rhs)
            per_k.append(block)
        report["trig"] = {
            "top_eigen_slice": top,
            "coordinate_slices": per_k,
            "max_root_count": max([top["root_count"]] + [b["root_count"] for b in per_k]),
            "max_q_residual": max([top["q_residual"]] + [b["q_residual"] for b in per_k]),
            "ok": top["ok"] and all(b["ok"] for b in per_k),
        }

    if cfg.oracle:
        report["oracle"] = oracle_block(vs, result, cfg)

    report["overall"] = all(report[k]["ok"] for k in ("witness", "inverse_eigen", "M", "trig", "oracle") if k in report)
    return report


def oracle_block(vs, result, cfg: VerifyConfig) -> dict:
    n, d = vs.n, vs.d
    unit_bound = math.sin(math.pi / (2 * n))
    block = {}
    ok = True
    if d <= 3:
        res = oracle.grid_search_witness(vs)
        slack = np.pi / res.resolution if d == 2 else 0.02
        block["grid_value"] = res.value
        block["grid_resolution"] = res.resolution
        # brute force maximizes the minimum directly, so it can only do better
        block["grid_not_below_solver"] = res.value >= result.unit_min_margin - slack - cfg.oracle_slack
        block["grid_above_bound"] = res.value >= unit_bound - slack
        ok &= block["grid_not_below_solver"] and block["grid_above_bound"]
    if d == 2:
        V = np.asarray(vs.vectors)
        exact = oracle.analytic_2d(np.arctan2(V[:, 1], V[:, 0]))
        block["analytic_value"] = exact.value
        block["analytic_not_below_solver"] = exact.value >= result.unit_min_margin - cfg.oracle_slack
        ok &= block["analytic_not_below_solver"]
    if n <= 16:
        try:
            pattern, val = oracle.bang_sign_search(gram(vs))
            block["bang_signs"] = str(pattern)
            block["bang_value"] = val
            block["bang_ok"] = True
        except RuntimeError:
            block["bang_ok"] = False
        ok &= block["bang_ok"]
    block["ok"] = bool(ok)
    return block
