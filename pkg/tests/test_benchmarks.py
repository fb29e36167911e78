import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from formopt.benchmarks import (benchmark_names, cross_in_tray, get_benchmark, happy_cat, holder_table,
                                schaffer_n1, schaffer_n4, sphere)
from formopt.errors import ConfigError, DimensionError


def test_schaffer_n1_origin_and_grid():
    assert schaffer_n1(0.0, 0.0) == 0.0
    g = np.arange(-1000, 1001) / 1000.0
    X, Y = np.meshgrid(g, g)
    F = schaffer_n1(X, Y)
    assert F.min() >= 0.0
    zeros = np.argwhere(F == 0.0)
    assert zeros.tolist() == [[1000, 1000]]


def test_holder_table_values():
    assert holder_table(8.05502, 9.66459) == pytest.approx(-19.2085, abs=1e-4)
    assert holder_table(-8.05502, 9.66459) == pytest.approx(-19.2085, abs=1e-4)
    assert holder_table(0.0, 3.7) == 0.0


def test_cross_in_tray_values():
    assert cross_in_tray(1.34940, 1.34940) == pytest.approx(-2.062612, abs=1e-5)
    assert cross_in_tray(-1.34940, 1.34940) == pytest.approx(-2.062612, abs=1e-5)
    assert cross_in_tray(0.0, 0.0) == pytest.approx(-0.0001)


def test_happy_cat_values():
    assert happy_cat([-1.0, -1.0], 0.125) == pytest.approx(0.0, abs=1e-12)
    assert happy_cat([-1.0, -1.0], 1.0) == pytest.approx(0.0, abs=1e-12)
    # direct evaluation at the origin: (n^2)^alpha + 0 + 1/2
    assert happy_cat([0.0, 0.0], 0.125) == pytest.approx(2 ** 0.25 + 0.5)
    with pytest.raises(DimensionError):
        happy_cat([])


def test_schaffer_n4_values_and_grid():
    assert schaffer_n4(0.0, 1.253115) == pytest.approx(0.292579, abs=1e-5)
    assert schaffer_n4(0.0, -1.253115) == pytest.approx(0.292579, abs=1e-5)
    g = np.arange(-5000, 5001) / 100.0
    low = math.inf
    for row in np.array_split(g, 20):
        X, Y = np.meshgrid(row, g)
        low = min(low, float(schaffer_n4(X, Y).min()))
    assert low >= 0.292579 - 1e-4


def test_sphere_values():
    assert sphere(np.zeros(6)) == 0.0
    assert sphere(np.ones(6)) == 6.0
    assert sphere([-2.0, 3.0]) == 13.0


def test_scalar_and_batch_paths_agree():
    rng = np.random.default_rng(0)
    for name in benchmark_names():
        bench = get_benchmark(name)
        X = bench.space.lower + bench.space.width * rng.random((20, bench.dims))
        batch = bench.batch_fn(X)
        scalar = np.array([bench(x) for x in X])
        np.testing.assert_allclose(batch, scalar, rtol=1e-12, atol=1e-12)


def test_known_minima_are_consistent():
    for name in benchmark_names():
        bench = get_benchmark(name)
        for pos in bench.known_min_positions:
            assert bench(np.array(pos)) == pytest.approx(bench.known_min_value, abs=1e-5)


def test_registry_lookup():
    assert get_benchmark("schaffer-n2").name == "schaffer-n1"
    assert get_benchmark("6d-sphere").dims == 6
    with pytest.raises(ConfigError, match="valid names"):
        get_benchmark("rosenbrock")
    other = get_benchmark("happy-cat", happy_cat_alpha=0.25)
    assert other(np.zeros(2)) == pytest.approx(2 ** 0.5 + 0.5)


def test_fold():
    assert get_benchmark("holder-table").fold([[-8.0, 9.0]]).tolist() == [[8.0, 9.0]]
    np.testing.assert_allclose(get_benchmark("schaffer-n4").fold([[0.6, -0.8]]), [[0.0, 1.0]])
    assert get_benchmark("sphere").fold([[-1.0] * 6]).tolist() == [[-1.0] * 6]


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=1, max_size=8))
def test_sphere_nonnegative(x):
    assert sphere(x) >= 0.0


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=2, max_size=6), st.randoms(use_true_random=False))
def test_happy_cat_permutation_invariant(x, random):
    y = list(x)
    random.shuffle(y)
    assert happy_cat(y) == pytest.approx(happy_cat(x), rel=1e-12, abs=1e-12)
