import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plankzone.errors import PreconditionError, UnsupportedInputError
from plankzone.geom_core import SignPattern, UnitVectorSet, extremal_configuration, gram
from plankzone.instances import random_invertible_gram
from plankzone.inverse_eigen import (
    DualConfig,
    InverseEigenSolution,
    enumerate_all,
    newton_batch,
    quadrant_meets_kernel,
    residual,
    sharp_w_limit,
    solve_dual,
    solve_in_quadrant,
    verify_w_bounds,
)


def test_residual_names_zero_entry():
    with pytest.raises(ValueError, match="index 1"):
        residual(np.eye(2), [1.0, 0.0])


def test_identity_solutions_are_sign_vectors():
    sols = enumerate_all(np.eye(3))
    assert len(sols) == 8
    for s in sols:
        np.testing.assert_allclose(s.w, s.quadrant.array(), atol=1e-12)
    assert [str(s.quadrant) for s in sols] == sorted(str(s.quadrant) for s in sols)


def test_extremal_three_fixture(extremal3_gram):
    sol = solve_in_quadrant(extremal3_gram, SignPattern.parse("++-"))
    np.testing.assert_allclose(sol.w, np.array([1, 2, -2]) / math.sqrt(3), atol=1e-10)
    assert sol.residual <= 1e-10


def test_extremal_three_has_six_solutions(extremal3_gram):
    # the kernel (1,-1,1) excludes the quadrants +-+ and -+-
    sols = enumerate_all(extremal3_gram)
    assert len(sols) == 6
    assert {"+-+", "-+-"}.isdisjoint(str(s.quadrant) for s in sols)
    assert solve_in_quadrant(extremal3_gram, SignPattern.parse("+-+")) is None


def test_rank_one_gram():
    H = gram(UnitVectorSet([[1.0, 0.0], [-1.0, 0.0]]))
    sols = enumerate_all(H)
    assert [str(s.quadrant) for s in sols] == ["+-", "-+"]
    np.testing.assert_allclose(np.abs(sols[0].w), [2**-0.5, 2**-0.5], atol=1e-12)


def test_quadrant_meets_kernel_two_dimensional_kernel():
    # four vectors in R^2 give a 2-dimensional kernel; the LP path is used
    H = gram(extremal_configuration(4))
    count = sum(quadrant_meets_kernel(H, SignPattern(tuple(1 - 2 * b for b in bits)))
                for bits in np.ndindex(*(2,) * 4))
    sols = enumerate_all(H)
    assert count + len(sols) == 16


def test_length_mismatch():
    with pytest.raises(ValueError):
        solve_in_quadrant(np.eye(3), SignPattern.parse("++"))


@given(st.integers(0, 2**32 - 1))
def test_every_solution_satisfies_the_equation(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    d = int(rng.integers(1, n + 1))
    H = gram(UnitVectorSet.normalized(rng.standard_normal((n, d))))
    for s in enumerate_all(H):
        assert np.max(np.abs(residual(H, s.w))) <= 1e-10
        assert s.quadratic_form(H) == pytest.approx(n, abs=1e-8)
        assert SignPattern.of(s.w) == s.quadrant


def test_newton_keeps_rows_in_quadrant():
    H = gram(extremal_configuration(3))
    W0 = np.array([[1.0, 1.0, -1.0], [5.0, 0.01, -3.0]])
    W, res, conv, _ = newton_batch(H, W0)
    assert conv.all()
    np.testing.assert_array_equal(np.sign(W), np.sign(W0))
    np.testing.assert_allclose(W[0], W[1], atol=1e-12)


def test_dual_rejects_singular(extremal3_gram):
    with pytest.raises(UnsupportedInputError, match="maximize_product"):
        solve_dual(extremal3_gram)


def test_dual_is_best_quadrant(rng):
    _, H = random_invertible_gram(rng, n_max=6)
    sol = solve_dual(H)
    best = max(enumerate_all(H), key=lambda s: -np.sum(np.log(np.abs(s.w))))
    # minimal sum log|w| is the dual maximum of sum log|u| with u = 1/w
    assert np.sum(np.log(np.abs(sol.w))) == pytest.approx(np.sum(np.log(np.abs(best.w))), abs=1e-9)


def test_dual_is_deterministic(rng):
    _, H = random_invertible_gram(rng)
    a, b = solve_dual(H, DualConfig(seed=3)), solve_dual(H, DualConfig(seed=3))
    np.testing.assert_array_equal(a.w, b.w)


@given(st.integers(0, 2**32 - 1))
def test_dual_sup_norm_bound(seed):
    _, H = random_invertible_gram(np.random.default_rng(seed))
    rep = verify_w_bounds(solve_dual(H))
    assert rep.sharp_bound and rep.strong_bound and rep.bang_bound


def test_sharp_limit_values():
    assert sharp_w_limit(3) == pytest.approx(2 / math.sqrt(3), abs=1e-15)
    assert sharp_w_limit(2) == pytest.approx(1.0, abs=1e-15)


def test_bound_report_requires_convergence():
    sol = InverseEigenSolution(np.ones(2), 1.0, SignPattern.parse("++"), False, 0)
    with pytest.raises(PreconditionError):
        verify_w_bounds(sol)
