import numpy as np
import pytest

from splitquat.algebra import E0, ET1, Biquaternion, classify_real_form, inverse, mul, quad_form_N
from splitquat.regions import (
    RegionVerdict, SU11Params, in_gamma0, in_gamma0_bar, omega_margin, random_gamma0,
    region_verdict, su11_sample,
)


def test_identity_sample():
    assert su11_sample(SU11Params(0, 0, 0)).isclose(E0)


def test_hyperbolic_sample():
    t = 0.7
    z = su11_sample((t, 0.0, 0.0))
    assert z.isclose(np.cosh(t) * E0 + np.sinh(t) * ET1)
    ev = np.sort(np.linalg.eigvals(z.to_matrix()).real)
    assert np.allclose(ev, [np.exp(-t), np.exp(t)])


def test_samples_lie_in_su11(rng):
    for t, a, b in rng.uniform([0, 0, 0], [3, 7, 7], (30, 3)):
        z = su11_sample(SU11Params(t, a, b))
        assert classify_real_form(z, 1e-9) == {"HR"}
        assert np.isclose(quad_form_N(z), 1.0)


def test_negative_t_rejected():
    with pytest.raises(ValueError):
        SU11Params(-1.0)


def test_gamma0_examples():
    z = Biquaternion.from_matrix(np.diag([2.0, 0.5]))
    assert in_gamma0(z) and not in_gamma0_bar(z)
    assert not in_gamma0(E0) and not in_gamma0_bar(E0)


def test_gamma0_semigroup_and_inverse(rng):
    for _ in range(100):
        a, b = random_gamma0(rng), random_gamma0(rng)
        assert in_gamma0(mul(a, b))
        assert in_gamma0_bar(inverse(a))


def test_group_elements_are_on_the_boundary(rng):
    z = su11_sample((1.0, 0.3, 0.2))
    assert not in_gamma0(z) and not in_gamma0_bar(z)


def test_omega_margin_examples():
    assert omega_margin(Biquaternion()) == 1.0
    assert omega_margin(2 * E0) <= 1e-3
    assert omega_margin(5j * E0) > 1.0


def test_omega_margin_lower_than_samples(rng):
    x0 = Biquaternion(0.3, 0.1j, 0.2, -0.4)
    m = omega_margin(x0, grid=(16, 16, 16))
    for t, a, b in rng.uniform([0, 0, 0], [6, 7, 7], (200, 3)):
        assert m <= abs(quad_form_N(su11_sample((t, a, b)) - x0)) + 1e-12


def test_region_verdict():
    v = region_verdict(Biquaternion.from_matrix(np.diag([2.0, 0.5])), grid=(16, 16, 16))
    assert isinstance(v, RegionVerdict)
    assert v.in_gamma0 and v.truncation_t_max == 6.0
    assert region_verdict(2 * E0).likely_in_omega is False


def test_definiteness_exclusive(rng):
    for _ in range(200):
        z = Biquaternion.from_matrix(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
        assert not (in_gamma0(z) and in_gamma0_bar(z))


@pytest.mark.parametrize("x0", [Biquaternion(0.3, 0.1j, 0.2, -0.4), 1.5 * E0, Biquaternion(0.2, 0, 0, 0.9)])
def test_margin_monotone(x0):
    # nested grids: t step 2/15 in both, angle grids 16 inside 32
    a = omega_margin(x0, t_max=2.0, grid=(16, 16, 16))
    b = omega_margin(x0, t_max=6.0, grid=(46, 16, 16))
    c = omega_margin(x0, t_max=6.0, grid=(91, 32, 32))
    assert b <= a + 1e-9 and c <= b + 1e-9
