"""Cauchy-Fueter integral formulas: classical, deformed contour, regularized.

All three evaluate a boundary integral of kernel * Dz * f (or f * Dz * kernel
for right-regular f) and should reproduce f(X0) for X0 inside the boundary
and 0 outside.  The classical formula is normalized by +1/(2 pi^2), the two
split variants by -1/(2 pi^2).
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import integrate as sp_integrate

from .algebra import (
    BASIS_FACTORS,
    Biquaternion,
    as_biquaternion,
    classify_real_form,
    qeuclid_sq,
    qmul,
    qnorm_form,
)
from .errors import ConeTangency, IntegrandSingular, NonConvergent, WindowTooWide
from .geometry import (
    Chain,
    Cycle3,
    QuadResult,
    as_field,
    deform,
    dz_of_frame,
    integrate,
    integrate_measure,
    quadric_rule,
    sphere_H,
    sphere_HR,
)
from .quadrature import TensorRule, neville

TWO_PI_SQ = 2.0 * np.pi**2
ETA = np.array([1.0, -1.0, -1.0, 1.0])
_PLUS = np.array([1.0, -1.0, -1.0, -1.0])

SPLIT_RES = (16, 16, 16)
SPLIT_RES_FINE = (20, 20, 20)
FACE_RES = (10, 10, 10)
FACE_RES_FINE = (12, 12, 12)
TANGENCY_THRESHOLD = 1e-3


@dataclass(frozen=True)
class FueterQuery:
    f: object
    boundary: Cycle3 | Chain
    X0: object
    side: str = "left"
    eps: float = 0.0
    res: tuple[int, int, int] | None = None

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValueError(f"unknown side {self.side!r}")


@dataclass(frozen=True)
class EpsSchedule:
    values: tuple[float, ...] = (0.2, 0.1, 0.05, 0.025)
    extrapolation_order: int = 2
    power: int = 2
    tol: float = 1e-2

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size < 2 or np.any(v <= 0) or np.any(np.diff(v) >= 0):
            raise ValueError("eps values must be positive and strictly decreasing")
        if self.extrapolation_order < 1 or self.power < 1:
            raise ValueError("order and power must be positive")


# the regularized integrals carry a term linear in |eps| (the exterior value
# decays like |eps|, box edges add eps log eps), so their limit is
# extrapolated in powers of |eps| from small samples
REGULARIZED_SCHEDULE = EpsSchedule(values=(0.05, 0.025, 0.0125), power=1)


class Extrapolation(NamedTuple):
    value: Biquaternion
    stability: float
    order: int


# ----------------------------------------------------------------------------
# shared evaluation


def _x0_coeffs(x0) -> np.ndarray:
    return as_biquaternion(x0).coeffs


def _hr_coords(z: np.ndarray) -> np.ndarray:
    if "HR" not in classify_real_form(Biquaternion.from_array(z), 1e-10):
        raise ValueError("X0 must lie in HR for the split variants")
    return (z / BASIS_FACTORS["HR"]).real


def _stack_fields(fs):
    fields = [as_field(f) for f in fs]

    def ev(z):
        return np.stack([fl(z) for fl in fields], axis=-2)

    return ev


def _boundary_integral(boundary, kern, fs, side, res, rule, threads=None):
    """Sum of kern(Z) Dz f(Z) (left) or f(Z) Dz kern(Z) for each f, in one pass."""
    fv = _stack_fields(fs)

    def integrand(z, t):
        k = kern(z)
        d = dz_of_frame(t)
        vals = fv(z)
        if side == "left":
            kd = qmul(k, d)
            return qmul(kd[:, None, :], vals)
        dk = qmul(d, k)
        return qmul(vals, dk[:, None, :])

    kw = {"threads": threads} if threads else {}
    value, err, shape = integrate(boundary, integrand, res, rule, **kw)
    return value, np.broadcast_to(err, (len(fs),)), shape


def _results(value, err, shape, scale):
    return [QuadResult(Biquaternion.from_array(scale * v), float(abs(scale) * e), shape)
            for v, e in zip(value, err)]


def _singular_guard(n: np.ndarray, w: np.ndarray):
    scale = np.maximum(qeuclid_sq(w), 1e-300)
    if np.any(np.abs(n) < 1e-13 * scale):
        raise IntegrandSingular("integrand singular at a quadrature node")


# ----------------------------------------------------------------------------
# classical


def classical_kernel(x0c):
    def kern(z):
        w = z - x0c
        n = qnorm_form(w)
        _singular_guard(n, w)
        return (w * _PLUS) / (n * n)[:, None]

    return kern


def _check_off_boundary(boundary, x0c):
    for face in boundary.faces:
        if face.kind == "sphere_H":
            gap = abs(np.sqrt(qeuclid_sq(x0c - face.meta["center"])) - face.meta["r"])
            if gap < 1e-9 * max(1.0, face.meta["r"]):
                raise IntegrandSingular("X0 lies on the boundary")


def classical_values(boundary, x0, fs, side="left", res=None, rule=None, threads=None) -> list[QuadResult]:
    x0c = _x0_coeffs(x0)
    _check_off_boundary(boundary, x0c)
    value, err, shape = _boundary_integral(boundary, classical_kernel(x0c), fs, side, res, rule, threads)
    return _results(value, err, shape, 1.0 / TWO_PI_SQ)


def cf_classical(q: FueterQuery) -> Biquaternion:
    """Classical formula on a boundary in H: f(X0) inside, 0 outside."""
    return classical_values(q.boundary, q.X0, [q.f], q.side, q.res)[0].value


# ----------------------------------------------------------------------------
# deformed contour


def deformed_kappa(eps: float) -> np.ndarray:
    """Coefficients of N(h_eps(Y)) = (1 - eps^2) N(Y) + 2 i eps S(Y) in HR coordinates."""
    return (1.0 - eps**2) * ETA + 2j * eps


def regularized_kappa(eps: float) -> np.ndarray:
    """Coefficients of N(Y) + i eps ||Y||^2 in HR coordinates."""
    return ETA + 1j * eps


def _nested_res(boundary, eps: float = 1.0) -> tuple[int, int, int]:
    # box faces carry many more candidate singular points than a sphere chart;
    # both need a finer rule once the cone lift gets small
    small = abs(eps) < 0.02
    if all(f.kind != "face" for f in boundary.faces):
        return SPLIT_RES_FINE if small else SPLIT_RES
    return FACE_RES_FINE if small else FACE_RES


def _split_rule(kappa, x0r):
    def rule(face):
        return quadric_rule(face, kappa, x0r)

    return rule


def _cell_diameter(face, res) -> float:
    """Rough diameter of a quadrature cell on ``face`` at tensor resolution ``res``."""
    grid = np.stack(np.meshgrid(*[np.linspace(lo, hi, 5) for lo, hi in zip(face.lower, face.upper)],
                                indexing="ij"), axis=-1).reshape(-1, 3)
    t = face.tangents(grid)
    speed = np.sqrt(np.sum(np.abs(t) ** 2, axis=-1)).max(axis=0)
    steps = (np.asarray(face.upper) - np.asarray(face.lower)) / np.asarray(res)
    return float(np.sqrt(np.sum((speed * steps) ** 2)))


def deformed_values(boundary, x0, fs, eps, side="left", res=None, rule=None, threads=None) -> list[QuadResult]:
    if eps == 0:
        raise ValueError("eps must be non-zero")
    x0c = _x0_coeffs(x0)
    x0r = _hr_coords(x0c)
    cyc = deform(boundary, eps, x0c)
    if rule is None:
        rule = _split_rule(deformed_kappa(eps), x0r)
    nested = all(rule(f) is not None for f in boundary.faces) if callable(rule) else False
    if res is None:
        res = _nested_res(boundary, eps) if nested else (96, 96, 96)
    if not nested:
        # tensor fallback: keep the cone lift large relative to the cells
        for face in boundary.faces:
            pts = face.points(np.array([[(lo + hi) / 2 for lo, hi in zip(face.lower, face.upper)]]))
            reach = abs(eps) * np.sqrt(qeuclid_sq(pts - x0c)).max()
            if reach < 10 * _cell_diameter(face, res):
                raise IntegrandSingular("eps too small for the tensor resolution")
    value, err, shape = _boundary_integral(cyc, classical_kernel(x0c), fs, side, res, rule, threads)
    return _results(value, err, shape, -1.0 / TWO_PI_SQ)


def cf_deformed(q: FueterQuery) -> Biquaternion:
    """Deformed-contour formula for holomorphic f on a boundary in HR."""
    return deformed_values(q.boundary, q.X0, [q.f], q.eps, q.side, q.res)[0].value


# ----------------------------------------------------------------------------
# regularized


def regularized_kernel(x0c, eps):
    def kern(z):
        w = z - x0c
        n = qnorm_form(w) + 1j * eps * qeuclid_sq(w)
        _singular_guard(n, w)
        return (w * _PLUS) / (n * n)[:, None]

    return kern


def _box_strata_margin(meta, x0r) -> float:
    """How far the cone of X0 is from touching an edge or corner of a box tangentially.

    On the stratum where the coordinates in F are fixed at their face values,
    N(X - X0) = C_F + sum over free j of eta_j (x_j - x0_j)^2, whose zero set is
    singular at the critical point x_j = x0_j when C_F = 0.  Returns the
    smallest |C_F| / (sum over F of d_k^2) over strata whose critical point lies
    in the closed stratum.
    """
    cx, w = np.asarray(meta["center"]), np.asarray(meta["half_widths"])
    inside = np.abs(x0r - cx) <= w
    worst = np.inf
    for k in range(2, 5):
        for axes in itertools.combinations(range(4), k):
            free = [j for j in range(4) if j not in axes]
            if not all(inside[j] for j in free):
                continue
            ax = list(axes)
            for sides in itertools.product((-1.0, 1.0), repeat=k):
                d = cx[ax] + np.asarray(sides) * w[ax] - x0r[ax]
                worst = min(worst, abs(ETA[ax] @ d**2) / max(d @ d, 1e-300))
    return float(worst)


def transversality(boundary, x0, res: int = 24) -> float:
    """Smallest tangential gradient of N(X - X0) over boundary nodes near the cone.

    For HR boxes the edges and corners are checked as well, see
    :func:`_box_strata_margin`.  Returns ``inf`` when no node lies near the cone.
    """
    x0c = _x0_coeffs(x0)
    worst = np.inf
    if isinstance(boundary, Chain) and boundary.kind == "box" and boundary.meta.get("form") == "HR":
        worst = _box_strata_margin(boundary.meta, _hr_coords(x0c))
    for face in boundary.faces:
        rule = TensorRule()
        for u, _ in rule.chunks(face.lower, face.upper, face.periodic, (res, res, res)):
            z, t = face.evaluate(u)
            w = z - x0c
            n = qnorm_form(w).real
            scale = qeuclid_sq(w)
            near = np.abs(n) < 0.1 * np.maximum(scale, 1e-300)
            if not np.any(near):
                continue
            tn, wn = t[near], w[near]
            grad = 2.0 * np.einsum("nkc,nc->nk", tn, wn).real
            x = tn / BASIS_FACTORS["HR"]
            gram = np.einsum("nic,njc->nij", x, np.conj(x)).real
            sol = np.linalg.solve(gram, grad[..., None])[..., 0]
            tang = np.sqrt(np.maximum(np.einsum("nk,nk->n", grad, sol), 0.0))
            tang = tang / np.sqrt(scale[near])
            worst = min(worst, float(tang.min()))
    return worst


def regularized_values(boundary, x0, fs, eps, side="left", res=None, rule=None,
                       check_transversal=True, threads=None) -> list[QuadResult]:
    if eps == 0:
        raise ValueError("eps must be non-zero")
    x0c = _x0_coeffs(x0)
    x0r = _hr_coords(x0c)
    if check_transversal:
        g = transversality(boundary, x0c)
        if g < TANGENCY_THRESHOLD:
            warnings.warn(f"boundary meets the null cone of X0 nearly tangentially "
                          f"(tangential gradient {g:.2e})", ConeTangency, stacklevel=2)
    if rule is None:
        rule = _split_rule(regularized_kappa(eps), x0r)
    if res is None:
        res = _nested_res(boundary, eps)
    value, err, shape = _boundary_integral(boundary, regularized_kernel(x0c, eps), fs, side, res, rule, threads)
    return _results(value, err, shape, -1.0 / TWO_PI_SQ)


def cf_regularized(q: FueterQuery) -> Biquaternion:
    """Regularized formula at a single eps; see :func:`regularized_limit` for eps -> 0."""
    return regularized_values(q.boundary, q.X0, [q.f], q.eps, q.side, q.res)[0].value


# ----------------------------------------------------------------------------
# eps -> 0


def _row(v) -> float:
    return float(np.sqrt(np.sum(np.abs(v) ** 2)))


def eps_extrapolate(values: Sequence[tuple[float, object]], schedule: EpsSchedule | None = None) -> Extrapolation:
    """Polynomial (Richardson) extrapolation to eps = 0 in powers of eps**power.

    Uses the ``extrapolation_order + 1`` smallest eps samples.  The
    stability indicator is the change between the last two orders; it must
    not exceed ``schedule.tol`` (relative to the value once that exceeds 1).
    """
    schedule = schedule or EpsSchedule()
    if len(values) < 2:
        raise ValueError("need at least two samples")
    pairs = sorted(((abs(float(e)), as_biquaternion(v).coeffs) for e, v in values), key=lambda p: -p[0])
    order = min(schedule.extrapolation_order, len(pairs) - 1)
    pairs = pairs[-(order + 1):]
    xs = [e**schedule.power for e, _ in pairs]
    diag = neville(xs, np.array([v for _, v in pairs]))
    value = diag[order]
    stability = _row(diag[order] - diag[order - 1])
    if not np.isfinite(stability) or stability > schedule.tol * max(1.0, _row(value)):
        raise NonConvergent(f"extrapolants differ by {stability:.3e} (tolerance {schedule.tol:g})")
    return Extrapolation(Biquaternion.from_array(value), stability, order)


def regularized_limit(q: FueterQuery, schedule: EpsSchedule | None = None):
    """eps -> 0 limit of the regularized formula; returns (Extrapolation, samples).

    The default schedule extrapolates in powers of |eps|, see ``REGULARIZED_SCHEDULE``.
    """
    schedule = schedule or REGULARIZED_SCHEDULE
    samples = []
    # only the smallest order + 1 samples enter the extrapolant
    for i, e in enumerate(schedule.values[-(schedule.extrapolation_order + 1):]):
        v = regularized_values(q.boundary, q.X0, [q.f], e, q.side, q.res, check_transversal=(i == 0))[0]
        samples.append((e, v.value))
    return eps_extrapolate(samples, schedule), samples


# ----------------------------------------------------------------------------
# closed-form lemma integrals


def sphere_kernel_integral(r: float, eps: float, res=None, full: bool = False):
    """r * integral over the HR sphere of radius r of dS / (N(X) + i eps r^2)^2."""
    if r <= 0 or eps == 0:
        raise ValueError("need r > 0 and eps != 0")
    cyc = sphere_HR((0.0, 0.0, 0.0, 0.0), r)
    rule = quadric_rule(cyc, regularized_kappa(eps), np.zeros(4))
    shift = 1j * eps * r * r

    def g(z):
        return 1.0 / (qnorm_form(z) + shift) ** 2

    out = integrate_measure(cyc, g, res or SPLIT_RES, rule)
    out = QuadResult(r * out.value, r * out.err_estimate, out.resolution)
    return out if full else out.value


def sphere_kernel_reference(eps: float) -> float:
    return -TWO_PI_SQ / (1.0 + eps**2)


def _window(window) -> tuple[float, float]:
    if np.ndim(window) == 0:
        t0 = float(window)
        return np.pi / 4 - t0, np.pi / 4 + t0
    a, b = (float(x) for x in window)
    return a, b


def theta_regularized(g: Callable, n: int, eps: float, window=np.pi / 8, deg: int = 64) -> complex:
    """The integral of g(t) / (cos 2t + i eps)^n over a window around pi/4.

    Repeated integration by parts (antiderivative of the denominator along
    d(cos 2t)) lowers n to 1, where the principal logarithm takes over; the
    result is stable as eps -> 0 and ``eps = +0.0`` / ``-0.0`` give the two
    boundary values.  The window must stay inside [0, pi/2]; touching an end
    is allowed only where g vanishes.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    a, b = _window(window)
    if not (0.0 <= a < b <= np.pi / 2):
        raise WindowTooWide(f"window [{a}, {b}] leaves [0, pi/2]")
    for end in (a, b):
        if end in (0.0, np.pi / 2) and abs(g(end)) > 1e-12:
            raise WindowTooWide("window reaches a zero of sin 2t where g does not vanish")

    def cplx(c):
        # assign the imaginary part so that eps = -0.0 keeps its sign
        c = np.asarray(c, dtype=float)
        out = np.empty(c.shape, dtype=complex)
        out.real = c
        out.imag = eps
        return out

    cheb = np.polynomial.Chebyshev

    def as_h(fn):
        # h = g / (d cos2t / dt), interpolated on Chebyshev points (never the ends)
        return cheb.interpolate(lambda t: fn(t) / (-2.0 * np.sin(2 * t)), deg, domain=[a, b])

    c_a, c_b = np.cos(2 * a), np.cos(2 * b)
    total = 0j
    factor = 1.0 + 0j
    fn = g
    for m in range(n, 1, -1):
        h = as_h(fn)
        boundary = h(b) * cplx(c_b) ** (1 - m) - h(a) * cplx(c_a) ** (1 - m)
        total += factor * (-boundary / (m - 1))
        factor = factor / (m - 1)
        fn = h.deriv()
    h = as_h(fn)
    hp = h.deriv()

    def log_c(t):
        return np.log(cplx(np.cos(2 * t)))

    boundary = h(b) * log_c(b) - h(a) * log_c(a)
    pts = [np.pi / 4] if a < np.pi / 4 < b else None
    re = sp_integrate.quad(lambda t: (hp(t) * log_c(t)).real, a, b, points=pts, limit=200, epsabs=1e-13)[0]
    im = sp_integrate.quad(lambda t: (hp(t) * log_c(t)).imag, a, b, points=pts, limit=200, epsabs=1e-13)[0]
    return complex(total + factor * (boundary - (re + 1j * im)))


# ----------------------------------------------------------------------------
# homotopy


def homotopy_check(boundary, x0, eps: float, r: float, f=None, inside: bool = True,
                   res=None, sphere_res=(48, 48, 48)) -> float:
    """Deviation between the deformed-boundary integral and the one over -S_r.

    S_r is the Euclidean sphere of radius r about X0 in H + X0.  When
    ``inside`` is False the reference is 0 (the deformed boundary is null
    homologous in the complement of the cone).
    """
    f = Biquaternion(1.0) if f is None else f
    x0c = _x0_coeffs(x0)
    dv = deformed_values(boundary, x0, [f], eps, "left", res)[0].value.coeffs * (-TWO_PI_SQ)
    if not inside:
        return float(np.sqrt(np.sum(np.abs(dv) ** 2)))
    sv = classical_values(sphere_H(Biquaternion.from_array(x0c), r), x0c, [f], "left", sphere_res)[0]
    ref = -sv.value.coeffs * TWO_PI_SQ
    return float(np.sqrt(np.sum(np.abs(dv - ref) ** 2)))
