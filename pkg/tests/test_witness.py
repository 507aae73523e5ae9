import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plankzone.errors import CertificationError, PreconditionError
from plankzone.geom_core import UnitVectorSet, extremal_configuration, gram
from plankzone.instances import random_instance, random_invertible_gram
from plankzone.inverse_eigen import solve_dual
from plankzone.witness import (
    CertifyConfig,
    WitnessConfig,
    build_M,
    certify_zone_bound,
    check_M_bounds,
    diag_threshold,
    maximize_product,
    witness_from_w,
    zone_bound,
)


def test_zone_bound_values():
    assert zone_bound(2) == pytest.approx(1.0, abs=1e-15)
    assert zone_bound(3) == pytest.approx(math.sqrt(3) / 2, abs=1e-15)
    assert zone_bound(4) == pytest.approx(2 * 0.38268343236508984, abs=1e-15)


@pytest.mark.parametrize("n", range(2, 9))
def test_extremal_is_tight(n):
    r = certify_zone_bound(extremal_configuration(n))
    # n = 2 is an orthonormal pair, so its Gram matrix is invertible
    assert r.path == ("dual" if n == 2 else "direct")
    assert abs(r.min_margin - zone_bound(n)) <= 1e-9
    assert np.linalg.norm(r.v) == pytest.approx(math.sqrt(n), abs=1e-9)


def test_extremal_three_witness(extremal3):
    r = maximize_product(extremal3)
    np.testing.assert_allclose(r.v, [math.sqrt(3), 0.0], atol=1e-9)
    np.testing.assert_allclose(r.margins, [math.sqrt(3), math.sqrt(3) / 2, math.sqrt(3) / 2], atol=1e-9)
    np.testing.assert_allclose(r.w, np.array([1, 2, -2]) / math.sqrt(3), atol=1e-9)


def test_orthonormal_witness():
    r = certify_zone_bound(UnitVectorSet(np.eye(3)))
    np.testing.assert_allclose(r.unit_margins, 1 / math.sqrt(3), atol=1e-12)
    assert r.path == "dual"


def test_witness_has_norm_sqrt_n_and_is_stationary(rng):
    vs = random_instance(rng)
    r = maximize_product(vs)
    assert np.linalg.norm(r.v) == pytest.approx(math.sqrt(vs.n), abs=1e-9)
    assert r.stationarity <= 1e-9
    assert r.v[np.flatnonzero(np.abs(r.v) > 1e-15)[0]] > 0


def test_direct_and_dual_routes_agree(rng):
    vs, H = random_invertible_gram(rng, n_max=6)
    dual = witness_from_w(vs, solve_dual(H).w)
    direct = maximize_product(vs)
    prod = lambda r: float(np.sum(np.log(r.margins)))
    assert prod(direct) == pytest.approx(prod(dual), abs=1e-8)


def test_maximize_product_deterministic(rng):
    vs = random_instance(rng)
    a = maximize_product(vs, WitnessConfig(seed=5))
    b = maximize_product(vs, WitnessConfig(seed=5))
    np.testing.assert_array_equal(a.v, b.v)


@given(st.integers(0, 2**32 - 1))
def test_certified_on_random_instances(seed):
    vs = random_instance(np.random.default_rng(seed))
    r = certify_zone_bound(vs)
    assert r.min_margin >= zone_bound(vs.n) - 1e-9


def test_certification_error_carries_margin():
    vs = extremal_configuration(4)
    with pytest.raises(CertificationError) as info:
        certify_zone_bound(vs, CertifyConfig(witness=WitnessConfig(certify_tol=-1e-3)))
    assert info.value.best_margin == pytest.approx(zone_bound(4), abs=1e-9)


def test_certify_requires_two_vectors():
    with pytest.raises(PreconditionError):
        certify_zone_bound(UnitVectorSet([[1.0, 0.0]]))


def test_witness_from_w_rejects_non_solution(extremal3):
    with pytest.raises(ValueError):
        witness_from_w(extremal3, [1.0, 1.0, 1.0])


def test_M_fixture(extremal3_gram):
    w = np.array([1, 2, -2]) / math.sqrt(3)
    M = build_M(extremal3_gram, w).entries
    expected = np.array([[1, 1, 1], [1, 4, -2], [1, -2, 4]]) / 3
    np.testing.assert_allclose(M, expected, atol=1e-12)
    rep = check_M_bounds(M)
    assert rep.ok
    assert rep.lambda_max == pytest.approx(2.0, abs=1e-10)
    assert rep.diag_max == pytest.approx(diag_threshold(3), abs=1e-10)


@given(st.integers(0, 2**32 - 1))
def test_M_bounds_on_dual_solutions(seed):
    _, H = random_invertible_gram(np.random.default_rng(seed))
    M = build_M(H, solve_dual(H).w)
    assert M.row_sum_error() <= 1e-9
    assert check_M_bounds(M).ok


def test_M_bounds_need_two():
    with pytest.raises(PreconditionError):
        check_M_bounds(np.ones((1, 1)))


def test_build_M_rejects_non_solution():
    with pytest.raises(ValueError):
        build_M(np.eye(2), [2.0, 1.0])


def test_diag_threshold_small_n():
    assert diag_threshold(2) == pytest.approx(1.0, abs=1e-15)
    assert diag_threshold(3) == pytest.approx(4 / 3, abs=1e-15)
