import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plankzone.geom_core import UnitVectorSet, extremal_configuration, gram
from plankzone.instances import random_instance
from plankzone.inverse_eigen import enumerate_all
from plankzone.oracle import (
    analytic_2d,
    bang_sign_search,
    cross_check_enumeration,
    grid_search_witness,
    max_gap_2d,
)
from plankzone.witness import maximize_product


def lines(angles):
    a = np.asarray(angles, dtype=float)
    return UnitVectorSet(np.column_stack([np.cos(a), np.sin(a)]))


@pytest.mark.parametrize("n", range(1, 10))
def test_analytic_extremal(n):
    res = analytic_2d(np.arange(n) * np.pi / n)
    assert res.value == pytest.approx(math.sin(math.pi / (2 * n)), abs=1e-15)


@given(st.lists(st.floats(0, math.pi, allow_nan=False), min_size=2, max_size=9))
def test_analytic_equals_largest_gap(angles):
    assert analytic_2d(angles).value == pytest.approx(max_gap_2d(angles), abs=1e-12)


@given(st.lists(st.floats(0, math.pi, allow_nan=False), min_size=1, max_size=6))
def test_grid_within_spacing_of_analytic(angles):
    vs = lines(angles)
    g = grid_search_witness(vs, 2000)
    a = analytic_2d(angles).value
    assert a - math.pi / 2000 <= g.value <= a + 1e-12


def test_grid_resolution_limits():
    with pytest.raises(ValueError):
        grid_search_witness(extremal_configuration(3), 10)
    with pytest.raises(ValueError):
        grid_search_witness(UnitVectorSet(np.eye(4)))


def test_sphere_grid_orthonormal():
    g = grid_search_witness(UnitVectorSet(np.eye(3)))
    assert g.value == pytest.approx(1 / math.sqrt(3), abs=0.02)


def test_product_maximizer_differs_from_max_min():
    # with lines at 0, 10 and 90 degrees the product and the minimum peak at different places
    angles = np.radians([0.0, 10.0, 90.0])
    exact = analytic_2d(angles).value
    solver = maximize_product(lines(angles)).unit_min_margin
    assert exact == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert solver < exact - 0.05
    assert solver >= math.sin(math.pi / 6) - 1e-12


@given(st.lists(st.floats(0, math.pi, allow_nan=False), min_size=2, max_size=8))
def test_max_min_dominates_product_witness(angles):
    vs = lines(angles)
    assert analytic_2d(angles).value >= maximize_product(vs).unit_min_margin - 1e-12


def test_bang_identity_and_extremal():
    pattern, val = bang_sign_search(np.eye(4))
    assert val == 1.0 and str(pattern) == "++++"
    _, val = bang_sign_search(gram(extremal_configuration(5)))
    assert val >= 1 / 5


@given(st.integers(0, 2**32 - 1))
def test_bang_on_random(seed):
    vs = random_instance(np.random.default_rng(seed), n_max=10)
    _, val = bang_sign_search(gram(vs))
    assert val >= 1 / vs.n


def test_bang_size_limit():
    with pytest.raises(ValueError):
        bang_sign_search(np.eye(21))


@pytest.mark.parametrize(
    "H",
    [np.eye(3), gram(extremal_configuration(3)).entries, np.array([[1.0, -1.0], [-1.0, 1.0]])],
    ids=["identity", "extremal3", "rank1"],
)
def test_cross_check_enumeration(H):
    chk = cross_check_enumeration(H, enumerate_all(H))
    assert chk.ok, chk.mismatches


def test_cross_check_random(rng):
    vs = random_instance(rng, n_max=5)
    H = gram(vs)
    assert cross_check_enumeration(H, enumerate_all(H)).ok


def test_cross_check_detects_missing_solution():
    sols = enumerate_all(np.eye(2))
    chk = cross_check_enumeration(np.eye(2), sols[1:])
    assert not chk.ok and chk.mismatches[0][1] == "presence"
