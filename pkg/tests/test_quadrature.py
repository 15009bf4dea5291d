import numpy as np
import pytest
from scipy import special
from hypothesis import given
from hypothesis import strategies as st

from splitquat.quadrature import (
    NestedRule, TensorRule, active_points, clustered_rule, gl_rule, neville, trapezoid_rule,
)


@given(st.integers(1, 12))
def test_gauss_legendre_exact_for_polynomials(n):
    x, w = gl_rule(-0.5, 2.0, n)
    deg = 2 * n - 1
    exact = (2.0 ** (deg + 1) - (-0.5) ** (deg + 1)) / (deg + 1)
    assert np.isclose(np.sum(w * x**deg), exact, rtol=1e-12)


def test_trapezoid_is_spectral_on_periodic():
    x, w = trapezoid_rule(0, 2 * np.pi, 32)
    assert np.isclose(np.sum(w * np.exp(np.cos(x))), 2 * np.pi * special.i0(1.0), rtol=0, atol=1e-12)


@pytest.mark.parametrize("delta", [1e-1, 1e-3, 1e-6])
def test_clustered_rule_near_pole(delta):
    p = 0.3 + 1j * delta
    x, w = clustered_rule(-1.0, 1.0, [p], 24)
    approx = np.sum(w / (x - p))
    # the path x - p stays below the real axis, so principal logs are continuous
    exact = np.log(1 - p) - np.log(-1 - p)
    assert abs(approx - exact) <= 1e-8


def test_clustered_periodic_near_pole():
    p = 1.0 + 1e-4j
    x, w = clustered_rule(0.0, 2 * np.pi, [p], 24, periodic=True)
    approx = np.sum(w / (np.exp(1j * x) - np.exp(1j * p)))
    # residues at 0 and at the pole (just inside the unit circle) cancel
    assert abs(approx) <= 1e-9


def test_clustered_rule_without_points():
    x, w = clustered_rule(0.0, 1.0, np.zeros(0, dtype=complex), 8)
    assert np.isclose(w.sum(), 1.0)
    assert np.isclose(np.sum(w * x**5), 1 / 6)


def test_clustered_rule_batch_shapes():
    pts = np.array([[0.5 + 1e-3j, 10.0], [np.nan, np.nan], [0.1 + 0.2j, 0.9 - 1e-5j]])
    x, w = clustered_rule(0.0, 1.0, pts, 24)
    assert x.shape == w.shape == (3, 2 * 24 * 3)
    assert np.allclose(w.sum(axis=-1), 1.0, rtol=0, atol=1e-10)
    assert np.all((x >= 0) & (x <= 1))


def test_active_points_filters():
    pts = active_points([0.5 + 0.1j, 0.5 + 0.1j, 10.0, np.inf], 0.0, 1.0, False)
    assert len(pts) == 1


def test_neville_recovers_polynomial():
    xs = [0.4, 0.2, 0.1, 0.05]
    ys = np.array([3 - 2 * x + 5 * x**2 for x in xs])
    diag = neville(xs, ys)
    assert np.isclose(diag[2], 3.0)
    assert np.isclose(diag[3], 3.0)


def test_tensor_rule_chunks_cover_grid():
    rule = TensorRule()
    res = (5, 6, 7)
    total = 0.0
    count = 0
    for u, w in rule.chunks((0, 0, 0), (1, 2, 3), (False, True, False), res):
        total += w.sum()
        count += len(w)
    assert count == 5 * 6 * 7
    assert np.isclose(total, 6.0)
    assert rule.shape(None, None, None, res) == res
    assert rule.coarsen(res) == (2, 3, 3)


def test_nested_rule_integrates_volume():
    def sing(level, outer):
        if level == 0:
            return np.array([0.5 + 1e-2j])
        if level == 1:
            return np.array([0.25 + 1e-2j])
        return np.full((len(outer[1]), 1), 0.75 + 1e-2j)

    rule = NestedRule(sing)
    total = 0.0
    for u, w in rule.chunks((0, 0, 0), (1, 1, 1), (False, False, False), (6, 6, 6)):
        total += np.sum(w * u[:, 0] * u[:, 1] * u[:, 2])
    assert np.isclose(total, 0.125)
    assert rule.shape((0, 0, 0), (1, 1, 1), (False,) * 3, (6, 6, 6)) == (24, 24, 24)
