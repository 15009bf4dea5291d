
import numpy as np
import pytest
from scipy import integrate

from splitquat.algebra import E0, E1, ET1, Biquaternion
from splitquat.calculus import constant, kernel
from splitquat.errors import ConeTangency, IntegrandSingular, NonConvergent, WindowTooWide
from splitquat.fueter import (
    REGULARIZED_SCHEDULE, EpsSchedule, FueterQuery, cf_classical, cf_deformed, cf_regularized,
    deformed_values, eps_extrapolate, homotopy_check, regularized_limit, regularized_values,
    sphere_kernel_integral, sphere_kernel_reference, theta_regularized, transversality,
)
from splitquat.geometry import box_boundary_HR, sphere_H, sphere_HR

C = Biquaternion(1.5, 0.5j, -0.25, 2.0)
KY = kernel(5 * E0)
BOX = box_boundary_HR((0, 0, 0, 0), (1.2, 1.0, 0.9, 1.1))


def hr(*c):
    return Biquaternion.from_coords(c, "HR")


# classical


def test_classical_constant_inside_and_outside():
    assert cf_classical(FueterQuery(C, sphere_H(), Biquaternion(), res=(32, 32, 32))).isclose(C, atol=1e-6)
    assert cf_classical(FueterQuery(C, sphere_H(), 3 * E0, res=(32, 32, 32))).isclose(Biquaternion(), atol=1e-6)


def test_classical_kernel_function():
    x0 = 0.2 * E1
    val = cf_classical(FueterQuery(KY, sphere_H(), x0, res=(48, 48, 48)))
    assert val.isclose(KY(x0), atol=1e-6)


def test_classical_right_side():
    x0 = 0.3 * E1 - 0.1 * E0
    val = cf_classical(FueterQuery(KY, sphere_H(), x0, side="right", res=(48, 48, 48)))
    assert val.isclose(KY(x0), atol=1e-6)


def test_classical_on_boundary_rejected():
    with pytest.raises(IntegrandSingular):
        cf_classical(FueterQuery(C, sphere_H(), E0))


# deformed


def test_deformed_constant_at_center():
    assert cf_deformed(FueterQuery(C, sphere_HR(), Biquaternion(), eps=0.1)).isclose(C, atol=1e-6)


def test_deformed_is_constant_in_eps():
    x0 = hr(0.3, -0.4, 0.2, 0.5)
    vals = [deformed_values(sphere_HR(), x0, [C], e)[0].value for e in (0.05, 0.1, 0.2)]
    for v in vals:
        assert v.isclose(C, atol=1e-6)
    assert max(abs(vals[i].coeffs - vals[0].coeffs).max() for i in (1, 2)) <= 1e-6


def test_deformed_kernel_function():
    x0 = 0.3 * ET1
    assert cf_deformed(FueterQuery(KY, sphere_HR(), x0, eps=0.1)).isclose(KY(x0), atol=1e-5)


def test_deformed_negative_eps_and_exterior():
    x0 = hr(1.2, 0.3, -0.2, 0.4)
    out = deformed_values(sphere_HR(), x0, [C, KY], -0.1)
    assert all(r.value.isclose(Biquaternion(), atol=1e-5) for r in out)


def test_deformed_requires_nonzero_eps():
    with pytest.raises(ValueError):
        cf_deformed(FueterQuery(C, sphere_HR(), Biquaternion(), eps=0.0))


def test_split_formulas_need_hr_point():
    with pytest.raises(ValueError):
        cf_deformed(FueterQuery(C, sphere_HR(), 0.1 * E1, eps=0.1))


# regularized


@pytest.mark.parametrize("eps", [0.2, 0.05])
def test_regularized_constant_single_eps(eps):
    val = cf_regularized(FueterQuery(C, sphere_HR(), Biquaternion(), eps=eps))
    assert val.isclose(C / (1 + eps**2), atol=1e-6)


def test_regularized_extrapolation_inside():
    sched = EpsSchedule(values=(0.2, 0.1, 0.05))
    samples = [(e, cf_regularized(FueterQuery(C, sphere_HR(), Biquaternion(), eps=e))) for e in sched.values]
    assert eps_extrapolate(samples, sched).value.isclose(C, atol=1e-4)


def test_regularized_limit_inside():
    ext, samples = regularized_limit(FueterQuery(KY, sphere_HR(), hr(0.3, -0.4, 0.2, 0.5)))
    assert len(samples) == len(REGULARIZED_SCHEDULE.values)
    assert ext.value.isclose(KY(hr(0.3, -0.4, 0.2, 0.5)), atol=1e-3)


def test_regularized_limit_outside():
    ext, _ = regularized_limit(FueterQuery(C, sphere_HR(), 3 * E0))
    assert ext.value.isclose(Biquaternion(), atol=1e-3)


def test_regularized_warns_on_degenerate_box_point():
    # the cone of this point touches an edge of the box tangentially
    x0 = hr(0.3, -0.4, 0.2, 0.5)
    assert transversality(BOX, x0) < 1e-10
    with pytest.warns(ConeTangency):
        regularized_values(BOX, x0, [C], 0.2, res=(2, 2, 2))


def test_transversality_generic_points():
    assert transversality(sphere_HR(), Biquaternion()) > 0.1
    assert transversality(BOX, hr(-0.42, 0.09, -0.02, -0.45)) > 1e-2


def test_regularized_schedule_is_linear_in_eps():
    assert REGULARIZED_SCHEDULE.power == 1


# extrapolation


def test_extrapolate_model():
    vals = [(e, 1 / (1 + e**2)) for e in (0.2, 0.1, 0.05)]
    assert abs(eps_extrapolate(vals).value.z0 - 1) <= 1e-6


def test_extrapolate_constant_sequence():
    ext = eps_extrapolate([(e, C) for e in (0.4, 0.2, 0.1)])
    assert ext.value.isclose(C, atol=1e-14) and ext.stability <= 1e-14


def test_extrapolate_garbage():
    with pytest.raises(NonConvergent):
        eps_extrapolate([(0.2, 1.0), (0.1, -1.0), (0.05, 1.0), (0.025, -1.0)])


def test_extrapolate_needs_samples():
    with pytest.raises(ValueError):
        eps_extrapolate([(0.1, 1.0)])


def test_schedule_validation():
    with pytest.raises(ValueError):
        EpsSchedule(values=(0.1, 0.2))
    with pytest.raises(ValueError):
        EpsSchedule(power=0)


# closed-form lemma integrals


@pytest.mark.parametrize("r,eps", [(1.0, 1.0), (1.0, 0.1), (2.0, 0.1)])
def test_sphere_kernel_integral(r, eps):
    ref = sphere_kernel_reference(eps)
    assert abs(sphere_kernel_integral(r, eps) - ref) <= 1e-6 * abs(ref)


def test_sphere_kernel_reference_values():
    assert sphere_kernel_reference(1.0) == pytest.approx(-np.pi**2)


def test_theta_antiderivative_case():
    for eps in (0.5, 0.1, -0.2):
        val = theta_regularized(lambda t: np.sin(2 * t), 2, eps, window=(0.0, np.pi / 2))
        assert abs(val - (-1 / (1 + eps**2))) <= 1e-10


def test_theta_zero_function():
    assert theta_regularized(lambda t: 0.0 * t, 3, 0.1) == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_theta_matches_direct_quadrature(n):
    eps, a, b = 0.3, np.pi / 4 - 0.3, np.pi / 4 + 0.3

    def g(t):
        return np.cos(t) + 0.5 * t

    def f(t):
        return g(t) / (np.cos(2 * t) + 1j * eps) ** n

    re = integrate.quad(lambda t: f(t).real, a, b, epsabs=1e-13, limit=200)[0]
    im = integrate.quad(lambda t: f(t).imag, a, b, epsabs=1e-13, limit=200)[0]
    assert abs(theta_regularized(g, n, eps, window=(a, b)) - (re + 1j * im)) <= 1e-9


def test_theta_branch_jump():
    def g(t):
        return 1.0 + 0.0 * t

    plus = theta_regularized(g, 1, 1e-3)
    minus = theta_regularized(g, 1, -1e-3)
    jump = plus - minus
    assert abs(jump.real) <= 1e-2
    # +i0 and -i0 differ by the residue of 1/cos 2t at pi/4
    assert abs(jump - (-1j * np.pi)) <= 1e-2
    assert abs(theta_regularized(g, 1, 0.0) - theta_regularized(g, 1, -0.0) + 1j * np.pi) <= 1e-9


def test_theta_window_checks():
    with pytest.raises(WindowTooWide):
        theta_regularized(lambda t: 1.0 + 0 * t, 1, 0.1, window=(0.0, np.pi / 2))
    with pytest.raises(WindowTooWide):
        theta_regularized(lambda t: 1.0 + 0 * t, 1, 0.1, window=np.pi)
    with pytest.raises(ValueError):
        theta_regularized(lambda t: t, 0, 0.1)


# homotopy


def test_homotopy_sphere():
    assert homotopy_check(sphere_HR(), hr(0.3, -0.4, 0.2, 0.5), 0.1, 0.3) <= 1e-6


def test_homotopy_sphere_outside():
    assert homotopy_check(sphere_HR(), hr(1.2, 0.3, -0.2, 0.4), 0.1, 0.3, inside=False) <= 1e-6


@pytest.mark.slow
def test_homotopy_box():
    box = box_boundary_HR((0, 0, 0, 0), (1, 1, 1, 1))
    assert homotopy_check(box, hr(0.2, -0.1, 0.3, 0.15), 0.1, 0.3, f=constant(C)) <= 1e-6


def test_query_validation():
    with pytest.raises(ValueError):
        FueterQuery(C, sphere_HR(), Biquaternion(), side="up")


def test_sign_audit():
    # raw integrals carry opposite signs; both normalizations give +f(X0)
    from splitquat.geometry import integrate_form

    raw = integrate_form(sphere_H(), kernel(), res=(32, 32, 32)).value
    assert raw.isclose(2 * np.pi**2 * E0, atol=1e-10)
    assert sphere_kernel_integral(1.0, 0.1) == pytest.approx(-2 * np.pi**2 / 1.01, rel=1e-8)
    one = Biquaternion(1.0)
    assert cf_classical(FueterQuery(one, sphere_H(), Biquaternion(), res=(32, 32, 32))).isclose(one, atol=1e-10)
    assert cf_deformed(FueterQuery(one, sphere_HR(), Biquaternion(), eps=0.1)).isclose(one, atol=1e-8)
    assert cf_regularized(FueterQuery(one, sphere_HR(), Biquaternion(), eps=0.1)).isclose(one / 1.01, atol=1e-8)
