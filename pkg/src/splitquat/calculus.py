"""Dirac operators on the real forms and their holomorphic variant.

Derivatives are central differences unless ``h == 0``, which selects the
closed-form holomorphic partials carried by the built-in function kinds.
Every real-form operator is written as sum_k a_k d/dx^k with coefficient
biquaternions a_k; since z^k = f_k x^k for the form's basis factors f_k, a
derivative along x^k is f_k times the holomorphic derivative along z^k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from .algebra import (
    BASIS_FACTORS,
    ET0,
    ET1,
    ET2,
    E0,
    E1,
    E2,
    E3,
    Biquaternion,
    RealFormPoint,
    as_biquaternion,
    euclid_norm,
    qinv,
    qmul,
    qnorm_form,
)
from .errors import SingularElement, StencilOutsideDomain

Operator = Literal["nabla", "nabla_plus"]
Side = Literal["left", "right"]
Form = Literal["H", "HR", "M", "holomorphic"]

H_FIRST = 1e-4
H_SECOND = 1e-2

_PLUS = np.array([1.0, -1.0, -1.0, -1.0])


# ----------------------------------------------------------------------------
# functions


@dataclass(frozen=True)
class QFunction:
    """A biquaternion-valued function with optional closed-form partials.

    ``array_eval`` maps ``(..., 4)`` coefficient arrays to ``(..., 4)``.
    ``partials`` (when known) maps ``(..., 4)`` to ``(..., 4, 4)`` where
    entry ``[..., k, :]`` is the holomorphic derivative along z^k.
    ``center`` marks the singular point of the kernel family.
    """

    array_eval: Callable[[np.ndarray], np.ndarray]
    kind: str = "Custom"
    params: dict = field(default_factory=dict, compare=False)
    partials: Callable[[np.ndarray], np.ndarray] | None = None
    center: np.ndarray | None = None

    def __call__(self, z):
        if isinstance(z, (Biquaternion, RealFormPoint)):
            return Biquaternion.from_array(self.array_eval(as_biquaternion(z).coeffs))
        return self.array_eval(np.asarray(z, dtype=complex))

    @property
    def has_exact(self) -> bool:
        return self.partials is not None


def constant(c) -> QFunction:
    cc = as_biquaternion(c).coeffs

    def ev(z):
        return np.broadcast_to(cc, np.shape(z)).astype(complex)

    def dv(z):
        return np.zeros(np.shape(z)[:-1] + (4, 4), dtype=complex)

    return QFunction(ev, "Constant", {"c": as_biquaternion(c)}, dv)


def linear(a=E0, b=E0) -> QFunction:
    """Z -> a Z b."""
    ac, bc = as_biquaternion(a).coeffs, as_biquaternion(b).coeffs
    units = np.eye(4, dtype=complex)
    dconst = qmul(qmul(ac, units), bc)

    def ev(z):
        return qmul(qmul(ac, z), bc)

    def dv(z):
        return np.broadcast_to(dconst, np.shape(z)[:-1] + (4, 4)).copy()

    return QFunction(ev, "Linear", {"a": as_biquaternion(a), "b": as_biquaternion(b)}, dv)


def kernel(center=Biquaternion()) -> QFunction:
    """The Cauchy-Fueter kernel (Z - c)^+ / N(Z - c)^2."""
    c = as_biquaternion(center).coeffs

    def ev(z):
        w = z - c
        n = qnorm_form(w)
        return (w * _PLUS) / (n * n)[..., None]

    def dv(z):
        w = z - c
        n = qnorm_form(w)[..., None, None]
        eye = np.eye(4) * _PLUS
        return eye / n**2 - 4.0 * w[..., :, None] * (w * _PLUS)[..., None, :] / n**3

    return QFunction(ev, "Kernel", {"center": as_biquaternion(center)}, dv, c)


def reciprocal_n(center=Biquaternion()) -> QFunction:
    """1 / N(Z - c), times e0."""
    c = as_biquaternion(center).coeffs

    def ev(z):
        w = z - c
        out = np.zeros(w.shape, dtype=complex)
        out[..., 0] = 1.0 / qnorm_form(w)
        return out

    def dv(z):
        w = z - c
        n = qnorm_form(w)
        out = np.zeros(w.shape[:-1] + (4, 4), dtype=complex)
        out[..., :, 0] = -2.0 * w / (n * n)[..., None]
        return out

    return QFunction(ev, "ReciprocalN", {"center": as_biquaternion(center)}, dv, c)


def polynomial(table: dict) -> QFunction:
    """sum over multi-indices alpha of z^alpha * c_alpha (c_alpha biquaternion or scalar)."""
    terms = [(np.asarray(k, dtype=int), as_biquaternion(v).coeffs) for k, v in table.items()]
    for k, _ in terms:
        if k.shape != (4,) or np.any(k < 0):
            raise ValueError("multi-indices must be four non-negative integers")

    def mono(z, alpha):
        out = np.ones(z.shape[:-1], dtype=complex)
        for j in range(4):
            if alpha[j]:
                out = out * z[..., j] ** alpha[j]
        return out

    def ev(z):
        out = np.zeros(z.shape, dtype=complex)
        for alpha, c in terms:
            out = out + mono(z, alpha)[..., None] * c
        return out

    def dv(z):
        out = np.zeros(z.shape[:-1] + (4, 4), dtype=complex)
        for alpha, c in terms:
            for k in range(4):
                if alpha[k]:
                    beta = alpha.copy()
                    beta[k] -= 1
                    out[..., k, :] += (alpha[k] * mono(z, beta))[..., None] * c
        return out

    return QFunction(ev, "Polynomial", {"table": dict(table)}, dv)


def custom(fn: Callable[[np.ndarray], np.ndarray], partials=None, name: str = "Custom") -> QFunction:
    return QFunction(fn, name, {}, partials)


# ----------------------------------------------------------------------------
# operators


@dataclass(frozen=True)
class DiracSpec:
    operator: Operator = "nabla_plus"
    side: Side = "left"
    form: Form = "HR"

    def __post_init__(self):
        if self.operator not in ("nabla", "nabla_plus"):
            raise ValueError(f"unknown operator {self.operator!r}")
        if self.side not in ("left", "right"):
            raise ValueError(f"unknown side {self.side!r}")
        if self.form not in COEFFICIENTS:
            raise ValueError(f"unknown form {self.form!r}")

    @property
    def coefficients(self) -> np.ndarray:
        return COEFFICIENTS[self.form][self.operator]


def _rows(*units):
    return np.array([u.coeffs for u in units])


# coefficient of d/dx^k for each (form, operator); the M table is fixed by
# requiring that holomorphic functions see the same operator in every form
COEFFICIENTS = {
    "H": {"nabla_plus": _rows(E0, E1, E2, E3), "nabla": _rows(E0, -E1, -E2, -E3)},
    "holomorphic": {"nabla_plus": _rows(E0, E1, E2, E3), "nabla": _rows(E0, -E1, -E2, -E3)},
    "HR": {"nabla_plus": _rows(E0, -ET1, -ET2, E3), "nabla": _rows(E0, ET1, ET2, -E3)},
    "M": {"nabla_plus": _rows(-ET0, E1, E2, E3), "nabla": _rows(-ET0, -E1, -E2, -E3)},
}

# direction in coefficient space of a unit step in x^k
_DIRECTIONS = {
    "H": np.diag(BASIS_FACTORS["H"]),
    "HR": np.diag(BASIS_FACTORS["HR"]),
    "M": np.diag(BASIS_FACTORS["M"]),
    "holomorphic": np.eye(4, dtype=complex),
}

# signature of the wave operator in each form's real coordinates
_WAVE_SIGNS = {
    "H": np.array([1.0, 1.0, 1.0, 1.0]),
    "holomorphic": np.array([1.0, 1.0, 1.0, 1.0]),
    "HR": np.array([1.0, -1.0, -1.0, 1.0]),
    "M": np.array([-1.0, 1.0, 1.0, 1.0]),
}


def _point(x) -> np.ndarray:
    return as_biquaternion(x).coeffs


def _guard(f: QFunction, pts: np.ndarray, h: float):
    if f.center is not None:
        n = np.abs(qnorm_form(pts - f.center))
        if np.any(n < 10 * h):
            raise StencilOutsideDomain("stencil comes within 10 h of the null cone of the center")


def _eval(f, pts, h):
    _guard(f, pts, h)
    with np.errstate(all="ignore"):
        try:
            vals = f.array_eval(pts)
        except (ZeroDivisionError, SingularElement, FloatingPointError) as exc:
            raise StencilOutsideDomain(str(exc)) from exc
    if not np.all(np.isfinite(vals)):
        raise StencilOutsideDomain("function is not finite on the stencil")
    return vals


# central difference stencils: offsets (in units of h) and weights
# integer weights and a common divisor, so constants difference to exactly 0
_STENCILS = {
    2: (np.array([1.0, -1.0]), np.array([1.0, -1.0]), 2.0),
    4: (np.array([2.0, 1.0, -1.0, -2.0]), np.array([-1.0, 8.0, -8.0, 1.0]), 12.0),
}


def coordinate_derivatives(f: QFunction, z: np.ndarray, form: Form, h: float, order: int = 2) -> np.ndarray:
    """d f / d x^k for k = 0..3 at coefficient point(s) ``z``; shape ``(..., 4, 4)``."""
    dirs = _DIRECTIONS[form]
    if h == 0:
        if f.partials is None:
            raise ValueError(f"{f.kind} function has no closed-form derivatives")
        return f.partials(z) * np.diag(dirs)[:, None]
    offsets, weights, div = _STENCILS[order]
    z = np.asarray(z, dtype=complex)
    pts = np.stack([z + s * h * dirs[k] for k in range(4) for s in offsets], axis=-2)
    vals = _eval(f, pts, h)
    vals = vals.reshape(vals.shape[:-2] + (4, len(offsets), 4))
    return np.einsum("...ksc,s->...kc", vals, weights) / (div * h)


def _combine(coeffs, derivs, side):
    if side == "left":
        return qmul(coeffs, derivs).sum(axis=-2)
    return qmul(derivs, coeffs).sum(axis=-2)


def apply_dirac(spec: DiracSpec, f: QFunction, x, h: float = H_FIRST, order: int = 2) -> Biquaternion:
    """Dirac operator of ``spec`` applied to ``f`` at ``x`` (left or right).

    ``h == 0`` uses closed-form partials; otherwise central differences of
    the given order (2 or 4).
    """
    if h < 0:
        raise ValueError("step must be non-negative")
    d = coordinate_derivatives(f, _point(x), spec.form, h, order)
    return Biquaternion.from_array(_combine(spec.coefficients, d, spec.side))


def dirac_field(spec: DiracSpec, f: QFunction, h: float = H_FIRST) -> QFunction:
    """The function x -> (spec applied to f)(x), usable for nested differences."""

    def ev(z):
        return _combine(spec.coefficients, coordinate_derivatives(f, z, spec.form, h), spec.side)

    return QFunction(ev, "Derived", {"spec": spec}, None, f.center)


def regularity_residual(f: QFunction, x, form: Form = "HR", side: Side = "left", h: float = H_FIRST,
                        order: int = 2) -> float:
    """Euclidean norm of nabla^+ f (left) or f nabla^+ (right) at ``x``."""
    return euclid_norm(apply_dirac(DiracSpec("nabla_plus", side, form), f, x, h, order))


# second differences: offsets and weights, the centre handled separately
_SECOND = {
    2: (np.array([1.0, -1.0]), np.array([1.0, 1.0]), -2.0),
    4: (np.array([2.0, 1.0, -1.0, -2.0]), np.array([-1.0, 16.0, 16.0, -1.0]) / 12.0, -30.0 / 12.0),
}


def wave_operator(f: QFunction, x, h: float = H_SECOND, form: Form = "HR", order: int = 2) -> Biquaternion:
    """Second-difference approximation of the wave operator of ``form`` at ``x``."""
    z = _point(x)
    dirs = _DIRECTIONS[form]
    signs = _WAVE_SIGNS[form]
    offsets, weights, w0 = _SECOND[order]
    pts = np.array([z + s * h * dirs[k] for k in range(4) for s in offsets] + [z])
    vals = _eval(f, pts, h)
    centre = vals[-1]
    lap = vals[:-1].reshape(4, len(offsets), 4)
    second = (np.einsum("ksc,s->kc", lap, weights) + w0 * centre) / h**2
    return Biquaternion.from_array(np.einsum("k,kc->c", signs, second))


def wave_residual(f: QFunction, x, h: float = H_SECOND) -> float:
    """|| box_{2,2} f - nabla_R(nabla_R^+ f) || at ``x`` in HR, both by differences."""
    inner = dirac_field(DiracSpec("nabla_plus", "left", "HR"), f, h)
    outer = apply_dirac(DiracSpec("nabla", "left", "HR"), inner, x, h)
    return euclid_norm(wave_operator(f, x, h, "HR") - outer)


@dataclass(frozen=True)
class ChainRuleReport:
    """Residuals of the three derivative identities for F(Z^+) and F(Z^-1)."""

    nabla_of_conj: float
    nabla_plus_of_conj: float
    nabla_of_inverse: float

    def max(self) -> float:
        return max(self.nabla_of_conj, self.nabla_plus_of_conj, self.nabla_of_inverse)


def verify_chain_rules(F: QFunction, z, h: float = 1e-3, order: int = 4) -> ChainRuleReport:
    """Finite-difference check of the derivative rules under Z -> Z^+ and Z -> Z^-1.

    The rules hold for scalar-valued F.  All derivatives are holomorphic and
    taken by central differences (fourth order by default, so the residual
    is not dominated by truncation near the small values of N(Z^-1)).
    """
    z = _point(z)
    if abs(qnorm_form(z)) <= 1e-12 * max(1.0, float(np.sum(np.abs(z) ** 2))):
        raise SingularElement("N(Z) vanishes; the inverse rule is undefined")
    probe = F.array_eval(np.stack([z, z * _PLUS, qinv(z)]))
    if np.any(np.abs(probe[:, 1:]) > 1e-12 * max(1.0, float(np.abs(probe).max()))):
        raise ValueError("the chain rules hold for scalar-valued functions only")
    nab = DiracSpec("nabla", "left", "holomorphic")
    nabp = DiracSpec("nabla_plus", "left", "holomorphic")
    zp = z * _PLUS
    zi = qinv(z)

    g_conj = QFunction(lambda w: F.array_eval(w * _PLUS), "Composite")
    g_inv = QFunction(lambda w: F.array_eval(qinv(w)), "Composite")

    r1 = apply_dirac(nab, g_conj, z, h, order) - apply_dirac(nabp, F, zp, h, order)
    r2 = apply_dirac(nabp, g_conj, z, h, order) - apply_dirac(nab, F, zp, h, order)
    inner = apply_dirac(nab, F, zi, h, order).coeffs
    rhs = -qmul(qmul(zi, inner), zi)
    r3 = apply_dirac(nab, g_inv, z, h, order).coeffs - rhs
    return ChainRuleReport(euclid_norm(r1), euclid_norm(r2), float(np.sqrt(np.sum(np.abs(r3) ** 2))))
