"""The 3-form Dz, parameterized 3-cycles and their quadrature.

Cycles are charts from a parameter box into biquaternion coefficient space.
All chart and tangent functions are vectorized: ``u`` has shape ``(n, 3)``,
points come back as ``(n, 4)`` complex arrays and tangents as ``(n, 3, 4)``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .algebra import (
    BASIS_FACTORS,
    Biquaternion,
    as_biquaternion,
    embed_coords,
    qconj,
    qmul,
)
from ._kernels import deform_frame, dz_rows, hopf_frame
from .errors import DegenerateFrame, IntegrandSingular
from .quadrature import NestedRule, TensorRule

HALF_PI = 0.5 * np.pi
TWO_PI = 2.0 * np.pi
H_GEOM = 1e-6

DEFAULT_TENSOR_RES = (48, 48, 48)
MAX_TENSOR_RES = 384
DEFAULT_NESTED_RES = (8, 8, 8)
MAX_NESTED_RES = 64


# ----------------------------------------------------------------------------
# volume form and Dz


def _det3(a, b, c):
    return (
        a[..., 0] * (b[..., 1] * c[..., 2] - b[..., 2] * c[..., 1])
        - a[..., 1] * (b[..., 0] * c[..., 2] - b[..., 2] * c[..., 0])
        + a[..., 2] * (b[..., 0] * c[..., 1] - b[..., 1] * c[..., 0])
    )


_DROP = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]]


def dz_array(t2: np.ndarray, t3: np.ndarray, t4: np.ndarray) -> np.ndarray:
    """Dz on tangent triples given as ``(..., 4)`` coefficient arrays.

    Component i is dV(e_i, t2, t3, t4), i.e. the signed 3x3 minor with
    coordinate i removed.
    """
    out = np.empty(np.broadcast(t2, t3, t4).shape, dtype=complex)
    for i, cols in enumerate(_DROP):
        sign = -1.0 if i % 2 else 1.0
        out[..., i] = sign * _det3(t2[..., cols], t3[..., cols], t4[..., cols])
    return out


def dz_matrix_formula(t2: np.ndarray, t3: np.ndarray, t4: np.ndarray) -> np.ndarray:
    """Dz computed from 2x2 matrix coordinates, as an independent cross-check.

    Returns the 2x2 matrix whose entries are the wedge products of three
    matrix-entry differentials (halved), evaluated on the triple.
    """
    from .algebra import to_matrix_array

    m = [to_matrix_array(t).reshape(t.shape[:-1] + (4,)) for t in (t2, t3, t4)]

    def wedge(idx):
        a, b, c = (np.stack([mm[..., k] for k in idx], axis=-1) for mm in m)
        return _det3(a, b, c)

    # flattened matrix entries: 0 = z11, 1 = z12, 2 = z21, 3 = z22
    out = np.empty(m[0].shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = -wedge([0, 1, 2])
    out[..., 0, 1] = -wedge([0, 1, 3])
    out[..., 1, 0] = wedge([0, 2, 3])
    out[..., 1, 1] = wedge([1, 2, 3])
    return 0.5 * out


def dz_of_frame(t: np.ndarray) -> np.ndarray:
    """Dz on frames stacked as ``(..., 3, 4)``."""
    t = np.asarray(t, dtype=complex)
    return dz_rows(np.ascontiguousarray(t.reshape(-1, 3, 4))).reshape(t.shape[:-2] + (4,))


def eval_dV(z1, z2, z3, z4) -> complex:
    rows = np.array([as_biquaternion(z).coeffs for z in (z1, z2, z3, z4)])
    return complex(np.linalg.det(rows))


def eval_Dz(t2, t3, t4) -> Biquaternion:
    """Value of Dz on an ordered triple of tangent vectors."""
    a, b, c = (as_biquaternion(t).coeffs for t in (t2, t3, t4))
    return Biquaternion.from_array(dz_array(a, b, c))


# ----------------------------------------------------------------------------
# cycles


Chart = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Cycle3:
    """An oriented parameterized 3-cycle.

    ``chart`` maps ``(n, 3)`` parameters to ``(n, 4)`` coefficients.  When
    ``tangent`` is missing, central differences with step ``H_GEOM`` are used.
    ``kind`` and ``meta`` describe built-in shapes so that quadrature can
    locate singularities analytically.
    """

    chart: Chart
    lower: tuple[float, float, float]
    upper: tuple[float, float, float]
    periodic: tuple[bool, bool, bool] = (False, False, False)
    orientation: int = 1
    tangent: Callable[[np.ndarray], np.ndarray] | None = None
    kind: str = "custom"
    meta: dict = field(default_factory=dict, compare=False)
    frame: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]] | None = None

    def points(self, u: np.ndarray) -> np.ndarray:
        return self.chart(np.atleast_2d(u))

    def evaluate(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Points and tangents together (shares work for built-in charts)."""
        u = np.atleast_2d(np.asarray(u, dtype=float))
        if self.frame is not None:
            return self.frame(u)
        return self.chart(u), self.tangents(u)

    def tangents(self, u: np.ndarray) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, dtype=float))
        if self.tangent is not None:
            return self.tangent(u)
        out = np.empty(u.shape[:-1] + (3, 4), dtype=complex)
        for k in range(3):
            du = np.zeros(3)
            du[k] = H_GEOM
            out[..., k, :] = (self.chart(u + du) - self.chart(u - du)) / (2 * H_GEOM)
        return out

    def __neg__(self) -> "Cycle3":
        return replace(self, orientation=-self.orientation)

    @property
    def faces(self) -> tuple["Cycle3", ...]:
        return (self,)


@dataclass(frozen=True)
class Chain:
    """A formal sum of cycles, e.g. the eight faces of a box."""

    parts: tuple[Cycle3, ...]
    kind: str = "chain"
    meta: dict = field(default_factory=dict, compare=False)

    def __neg__(self) -> "Chain":
        return Chain(tuple(-p for p in self.parts), self.kind, self.meta)

    @property
    def faces(self) -> tuple[Cycle3, ...]:
        return self.parts


def _center_coeffs(center, form: str) -> np.ndarray:
    if hasattr(center, "tag"):
        if center.tag != form:
            raise ValueError(f"center must be a {form} point, got {center.tag}")
        return center.embed().coeffs
    if isinstance(center, Biquaternion):
        return center.coeffs
    c = np.asarray(center)
    if c.shape != (4,):
        raise ValueError("center must be a point, a Biquaternion or four coordinates")
    return embed_coords(c.astype(float), form)


def _center_real(center, form: str) -> np.ndarray:
    """Real coordinates of ``center`` in ``form`` (HR or H only)."""
    z = _center_coeffs(center, form)
    x = z / BASIS_FACTORS[form]
    return x.real


def sphere_HR(center=(0.0, 0.0, 0.0, 0.0), r: float = 1.0) -> Cycle3:
    """Euclidean sphere of radius r in HR, in Hopf-type angles.

    x0 = r cos t cos p, x1 = r sin t sin s, x2 = r sin t cos s, x3 = r cos t sin p
    over (t, p, s) in [0, pi/2] x [0, 2pi] x [0, 2pi].
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    c = _center_coeffs(center, "HR")

    def frame(u):
        return hopf_frame(np.ascontiguousarray(u, dtype=float), float(r), c)

    def chart(u):
        return frame(u)[0]

    def tangent(u):
        return frame(u)[1]

    return Cycle3(chart, (0.0, 0.0, 0.0), (HALF_PI, TWO_PI, TWO_PI), (False, True, True),
                  1, tangent, "sphere_HR", {"center": _center_real(center, "HR"), "r": float(r)}, frame)


def sphere_H(center=Biquaternion(), r: float = 1.0) -> Cycle3:
    """Euclidean sphere of radius r in the affine space H + center.

    Standard S^3 angles: x0 = r cos t, x1 = r sin t cos p,
    x2 = r sin t sin p cos s, x3 = r sin t sin p sin s.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    c = as_biquaternion(center).coeffs

    def chart(u):
        t, p, s = u[..., 0], u[..., 1], u[..., 2]
        st, sp = np.sin(t), np.sin(p)
        x = np.stack([np.cos(t), st * np.cos(p), st * sp * np.cos(s), st * sp * np.sin(s)], axis=-1)
        return c + r * x

    def tangent(u):
        t, p, s = u[..., 0], u[..., 1], u[..., 2]
        ct, st, cp, sp, cs, ss = np.cos(t), np.sin(t), np.cos(p), np.sin(p), np.cos(s), np.sin(s)
        z = np.zeros_like(t)
        dt = np.stack([-st, ct * cp, ct * sp * cs, ct * sp * ss], axis=-1)
        dp = np.stack([z, -st * sp, st * cp * cs, st * cp * ss], axis=-1)
        ds = np.stack([z, z, -st * sp * ss, st * sp * cs], axis=-1)
        return (r * np.stack([dt, dp, ds], axis=-2)).astype(complex)

    return Cycle3(chart, (0.0, 0.0, 0.0), (np.pi, np.pi, TWO_PI), (False, False, True),
                  1, tangent, "sphere_H", {"center": c, "r": float(r)})


def _face(form, center_x, widths, axis, side):
    f = BASIS_FACTORS[form]
    params = [j for j in range(4) if j != axis]
    value = center_x[axis] + side * widths[axis]
    lower = tuple(center_x[j] - widths[j] for j in params)
    upper = tuple(center_x[j] + widths[j] for j in params)

    def chart(u):
        x = np.empty(u.shape[:-1] + (4,))
        x[..., axis] = value
        for k, j in enumerate(params):
            x[..., j] = u[..., k]
        return x * f

    basis = np.zeros((3, 4), dtype=complex)
    for k, j in enumerate(params):
        basis[k, j] = f[j]

    def tangent(u):
        return np.broadcast_to(basis, u.shape[:-1] + (3, 4)).copy()

    def frame(u):
        return chart(u), tangent(u)

    orientation = int(side * (-1) ** axis)
    meta = {"form": form, "axis": axis, "value": float(value), "params": tuple(params),
            "lower": lower, "upper": upper}
    return Cycle3(chart, lower, upper, (False, False, False), orientation, tangent, "face", meta, frame)


def box_boundary(center=(0.0, 0.0, 0.0, 0.0), half_widths=(1.0, 1.0, 1.0, 1.0), form: str = "HR") -> Chain:
    """Boundary of an axis-aligned box in real coordinates of ``form``.

    Faces are oriented with the outward normal first.
    """
    w = np.asarray(half_widths, dtype=float)
    if w.shape != (4,) or np.any(w <= 0):
        raise ValueError("need four positive half widths")
    cx = _center_real(center, form)
    faces = tuple(_face(form, cx, w, k, s) for k in range(4) for s in (-1, 1))
    return Chain(faces, "box", {"form": form, "center": cx, "half_widths": w})


def box_boundary_HR(center=(0.0, 0.0, 0.0, 0.0), half_widths=(1.0, 1.0, 1.0, 1.0)) -> Chain:
    return box_boundary(center, half_widths, "HR")


def deform(c, eps: float, z0) -> Cycle3 | Chain:
    """Push a cycle through Z -> Z + i*eps*(Z - z0)^-.

    The map is affine, so tangents are pushed through its linear part.
    """
    if isinstance(c, Chain):
        return Chain(tuple(deform(p, eps, z0) for p in c.parts), c.kind, dict(c.meta, eps=eps))
    z0c = as_biquaternion(z0).coeffs

    def frame(u):
        z, t = c.evaluate(u)
        # built-in frames return fresh arrays, so the map may work in place
        fresh = c.frame is not None
        z = np.ascontiguousarray(z, dtype=complex) if fresh else np.array(z, dtype=complex)
        t = np.ascontiguousarray(t, dtype=complex) if fresh else np.array(t, dtype=complex)
        return deform_frame(z.reshape(-1, 4), t.reshape(-1, 3, 4), float(eps), z0c)

    def chart(u):
        return frame(u)[0]

    def tangent(u):
        return frame(u)[1]

    meta = {"base": c, "eps": float(eps), "z0": z0c}
    return Cycle3(chart, c.lower, c.upper, c.periodic, c.orientation, tangent, "deformed", meta, frame)


# ----------------------------------------------------------------------------
# singularities of diagonal quadrics along built-in charts


def _hopf_points(kappa, cvec, r):
    """Singular-point generator for Q = sum kappa_k (x_k - c_k)^2 on a Hopf sphere.

    ``cvec`` is X0 minus the sphere center, in HR coordinates.
    """
    p, m = complex(kappa[0]), complex(kappa[1])
    c0, c1, c2, c3 = (float(v) for v in cvec)
    rho03, phi0 = np.hypot(c0, c3), np.arctan2(c3, c0)
    rho12, psi0 = np.hypot(c1, c2), np.arctan2(c1, c2)
    tiny = 1e-14 * max(1.0, r)

    def level0():
        kap = np.sqrt(-m / p)
        out = []
        for s1 in (1.0, -1.0):
            for s2 in (1.0, -1.0):
                for sig in (1.0, -1.0):
                    rhs = s1 * rho03 - sig * kap * s2 * rho12
                    a = r * (1 + 1j * sig * kap)
                    cc = r * (1 - 1j * sig * kap)
                    roots = np.roots([a, -2 * rhs, cc]) if abs(a) > 0 else np.array([])
                    for t in roots:
                        if t != 0:
                            out.append(-1j * np.log(t))
        return np.array(out, dtype=complex)

    def level1(theta):
        ct, st = np.cos(theta), np.sin(theta)
        if r * ct * rho03 < tiny:
            return np.array([], dtype=complex)
        a0 = r * r * ct * ct + rho03 * rho03
        b0 = r * r * st * st + rho12 * rho12
        out = []
        for s2 in (1.0, -1.0):
            astar = -(m / p) * (b0 - 2 * s2 * r * st * rho12)
            w = (a0 - astar) / (2 * r * ct * rho03)
            base = np.arccos(complex(w))
            out.extend([phi0 + base, phi0 - base])
        return np.array(out, dtype=complex)

    def level2(theta, phi):
        phi = np.asarray(phi, dtype=float)
        ct, st = np.cos(theta), np.sin(theta)
        if r * st * rho12 < tiny:
            return np.full(phi.shape + (2,), np.nan, dtype=complex)
        A = r * r * ct * ct - 2 * r * ct * rho03 * np.cos(phi - phi0) + rho03 * rho03
        b0 = r * r * st * st + rho12 * rho12
        w = (b0 + (p / m) * A) / (2 * r * st * rho12)
        base = np.arccos(w.astype(complex))
        return np.stack([psi0 + base, psi0 - base], axis=-1)

    def points(level, outer):
        if level == 0:
            return level0()
        if level == 1:
            return level1(outer[0])
        return level2(outer[0], outer[1])

    return points


def _face_points(kappa, x0, meta):
    """Singular-point generator for the quadric on an axis-aligned face."""
    kappa = np.asarray(kappa, dtype=complex)
    axis, value, params = meta["axis"], meta["value"], meta["params"]
    lo, hi = meta["lower"], meta["upper"]
    fixed = kappa[axis] * (value - x0[axis]) ** 2

    def options(k):
        j = params[k]
        vals = [lo[k] - x0[j], hi[k] - x0[j]]
        if lo[k] < x0[j] < hi[k]:
            vals.append(0.0)
        return vals

    def points(level, outer):
        j = params[level]
        base = fixed
        for k in range(level):
            o = np.asarray(outer[k], dtype=float)
            base = base + kappa[params[k]] * (o - x0[params[k]]) ** 2
        base = np.asarray(base, dtype=complex)
        combos = [0.0]
        for k in range(level + 1, 3):
            combos = [s + kappa[params[k]] * e * e for s in combos for e in options(k)]
        rhs = -(base[..., None] + np.asarray(combos, dtype=complex)) / kappa[j]
        y = np.sqrt(rhs)
        return np.concatenate([x0[j] + y, x0[j] - y], axis=-1)

    return points


def quadric_rule(cycle: Cycle3, kappa: Sequence[complex], x0: Sequence[float]) -> NestedRule | None:
    """A clustered rule for integrands singular near Q = sum kappa_k (x_k - x0_k)^2 = 0.

    ``x0`` holds HR coordinates.  Returns None when the cycle is not one of
    the built-in shapes the singular set can be located on.
    """
    base = cycle.meta.get("base", cycle) if cycle.kind == "deformed" else cycle
    x0 = np.asarray(x0, dtype=float)
    kappa = np.asarray(kappa, dtype=complex)
    if base.kind == "sphere_HR":
        if not (np.isclose(kappa[0], kappa[3]) and np.isclose(kappa[1], kappa[2])):
            return None
        return NestedRule(_hopf_points(kappa, x0 - base.meta["center"], base.meta["r"]))
    if base.kind == "face" and base.meta.get("form") == "HR":
        return NestedRule(_face_points(kappa, x0, base.meta))
    return None


# ----------------------------------------------------------------------------
# integration


@dataclass(frozen=True)
class QuadResult:
    value: Biquaternion | complex
    err_estimate: float
    resolution: tuple[int, int, int]


Field = Callable[[np.ndarray], np.ndarray]


def as_field(f) -> Field:
    """Coerce a QFunction, Biquaternion, scalar or array callable to an array field."""
    if f is None:
        f = Biquaternion(1.0)
    if isinstance(f, (int, float, complex)):
        f = Biquaternion(f)
    if isinstance(f, Biquaternion):
        c = f.coeffs

        def const(z):
            return np.broadcast_to(c, z.shape).copy()

        return const
    if hasattr(f, "array_eval"):
        return f.array_eval
    if callable(f):
        return f
    raise TypeError(f"cannot integrate {type(f).__name__}")


def _default_rule(face):
    return TensorRule()


def _resolve_rule(rule, face):
    if rule is None:
        return _default_rule(face)
    if isinstance(rule, (TensorRule, NestedRule)):
        return rule
    r = rule(face)
    return r if r is not None else TensorRule()


def _sum_cycle(face, integrand, rule, res, threads):
    def work(chunk):
        u, w = chunk
        z, t = face.evaluate(u)
        with np.errstate(all="ignore"):
            vals = integrand(z, t)
        if not np.all(np.isfinite(vals)):
            raise IntegrandSingular(f"non-finite integrand on {face.kind} cycle")
        w = w.reshape(w.shape + (1,) * (vals.ndim - 1))
        return (w * vals).sum(axis=0)

    chunks = rule.chunks(face.lower, face.upper, face.periodic, res)
    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(ch) for ch in chunks]
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    return face.orientation * total


def _total(c, integrand, rule, res, threads):
    total = 0
    shape = (0, 0, 0)
    for face in c.faces:
        rl = _resolve_rule(rule, face)
        r = tuple(res) if res is not None else None
        total = total + _sum_cycle(face, integrand, rl, r, threads)
        shape = tuple(max(a, b) for a, b in zip(shape, rl.shape(face.lower, face.upper, face.periodic, r)))
    return total, shape


def _norm(v):
    return float(np.sqrt(np.sum(np.abs(v) ** 2)))


def _row_norm(v):
    """Euclidean norm over the coefficient axis (whole value for scalars)."""
    a = np.abs(np.asarray(v)) ** 2
    return float(np.sqrt(a)) if a.ndim == 0 else np.sqrt(a.sum(axis=-1))


def _is_nested(rule, c):
    return isinstance(_resolve_rule(rule, c.faces[0]), NestedRule)


def integrate(
    c: Cycle3 | Chain,
    integrand: Callable[[np.ndarray, np.ndarray], np.ndarray],
    res: Sequence[int] | None = None,
    rule=None,
    *,
    rtol: float = 1e-8,
    max_res: int | None = None,
    threads: int | None = None,
):
    """Integrate ``integrand(Z, T)`` over a cycle or chain.

    ``T`` holds the chart tangents, shape ``(n, 3, 4)``.

    ``rule`` is None (tensor Gauss-Legendre/trapezoid), a rule object, or a
    function ``face -> rule`` (returning None falls back to the tensor rule).
    With ``res`` given, the error estimate compares against the half
    resolution; without it the resolution is doubled from the default until
    the change is below ``rtol`` (relative, floored at 1) or the cap is hit.
    Returns ``(value, err_estimate, resolution)``; for batched integrands the
    error estimate is per row of the coefficient axis.
    """
    nested = _is_nested(rule, c)

    def coarsen(r):
        return tuple(max(2, k // 2) for k in r)

    if res is not None:
        res = tuple(int(k) for k in res)
        fine, shape = _total(c, integrand, rule, res, threads)
        coarse, _ = _total(c, integrand, rule, coarsen(res), threads)
        return fine, _row_norm(fine - coarse), shape
    res = DEFAULT_NESTED_RES if nested else DEFAULT_TENSOR_RES
    cap = max_res or (MAX_NESTED_RES if nested else MAX_TENSOR_RES)
    prev, _ = _total(c, integrand, rule, coarsen(res), threads)
    while True:
        cur, shape = _total(c, integrand, rule, res, threads)
        err = _row_norm(cur - prev)
        if np.max(err) <= rtol * max(1.0, _norm(cur)) or 2 * max(res) > cap:
            return cur, err, shape
        prev, res = cur, tuple(2 * k for k in res)


def integrate_form(
    c: Cycle3 | Chain,
    left=None,
    right=None,
    res: Sequence[int] | None = None,
    rule=None,
    **kw,
) -> QuadResult:
    """The integral of left(Z) * Dz * right(Z) over ``c`` (product in that order)."""
    lf, rf = as_field(left), as_field(right)

    def integrand(z, t):
        return qmul(qmul(lf(z), dz_of_frame(t)), rf(z))

    value, err, shape = integrate(c, integrand, res, rule, **kw)
    return QuadResult(Biquaternion.from_array(value), float(err), shape)


def frame_volume(tangents: np.ndarray, form: str = "HR") -> np.ndarray:
    """Euclidean 3-volume of tangent frames ``(..., 3, 4)`` in ``form`` coordinates."""
    x = tangents / BASIS_FACTORS[form]
    g = np.einsum("...ik,...jk->...ij", x, np.conj(x)).real
    return np.sqrt(np.clip(np.linalg.det(g), 0.0, None))


def integrate_measure(c: Cycle3 | Chain, g=None, res=None, rule=None, form: str = "HR", **kw) -> QuadResult:
    """The integral of the scalar ``g(Z)`` against the Euclidean measure dS.

    Orientation signs are ignored, dS being a measure.
    """
    gf = (lambda z: np.ones(z.shape[:-1])) if g is None else g
    if isinstance(c, Chain):
        c = Chain(tuple(replace(f, orientation=1) for f in c.parts), c.kind, c.meta)
    else:
        c = replace(c, orientation=1)

    def integrand(z, t):
        return gf(z) * frame_volume(t, form)

    value, err, shape = integrate(c, integrand, res, rule, **kw)
    return QuadResult(complex(value), err, shape)


# ----------------------------------------------------------------------------
# restriction lemma


def _orient(n: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """Reorder frames so that det[n, tau] > 0."""
    det = np.linalg.det(np.concatenate([n[:, None, :], tau], axis=1))
    flip = det < 0
    tau = tau.copy()
    tau[flip, 0], tau[flip, 1] = tau[flip, 1].copy(), tau[flip, 0].copy()
    return tau


def restriction_check(
    kind: str,
    r: float = 1.0,
    sample_count: int = 500,
    seed: int = 0,
    reverse: bool = False,
    patch: float = 1.0,
) -> float:
    """Max componentwise deviation of Dz from its restriction formula on HR level sets.

    ``norm_level``: on ||X|| = r, Dz(frame) = X^- / r dS(frame).
    ``N_level``: on N(X) = r^2 (points with hyperbolic radius up to ``patch``),
    Dz(frame) = X / ||X|| dS(frame).  Frames are random, positively oriented
    relative to the outward normal, unless ``reverse`` is set.
    """
    rng = np.random.default_rng(seed)
    n = sample_count
    if kind == "norm_level":
        x = rng.normal(size=(n, 4))
        x *= r / np.linalg.norm(x, axis=1, keepdims=True)
        normal = x
    elif kind == "N_level":
        s = rng.uniform(0.0, patch, n)
        a, b = rng.uniform(0.0, TWO_PI, (2, n))
        x = r * np.stack([np.cosh(s) * np.cos(a), np.sinh(s) * np.sin(b),
                          np.sinh(s) * np.cos(b), np.cosh(s) * np.sin(a)], axis=1)
        normal = x * np.array([1.0, -1.0, -1.0, 1.0])
    else:
        raise ValueError(f"unknown level set kind {kind!r}")
    unit = normal / np.linalg.norm(normal, axis=1, keepdims=True)
    raw = rng.normal(size=(n, 3, 4))
    tau = raw - np.einsum("nk,nj->njk", unit, np.einsum("njk,nk->nj", raw, unit))
    tau = _orient(unit, tau)
    if reverse:
        tau = tau[:, [1, 0, 2], :]
    dS = frame_volume(tau.astype(complex), "HR")
    if np.any(dS < 1e-12):
        raise DegenerateFrame("sampled tangent frame is rank deficient")
    f = BASIS_FACTORS["HR"]
    xz = x * f
    dz = dz_array(*(tau[:, k, :] * f for k in range(3)))
    norm = np.linalg.norm(x, axis=1)
    if kind == "norm_level":
        expected = qconj(xz, "minus") / r * dS[:, None]
    else:
        expected = xz / norm[:, None] * dS[:, None]
    return float(np.max(np.abs(dz - expected)))
