"""One-dimensional rules and the node generators used by ``integrate_form``.

Two generators are provided:

* :class:`TensorRule` -- Gauss-Legendre on bounded parameters, trapezoid on
  periodic ones, tensorised.
* :class:`NestedRule` -- iterated one-dimensional rules whose panels are
  split at the real parts of known complex singularities of the integrand
  (and of its partial integrals), with a sinh change of variables that
  clusters nodes toward each split point.  With the sinh map the
  convergence rate no longer depends on how close the singularity is to
  the real axis, which is what makes the small-epsilon integrals tractable.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterator, Sequence

import numpy as np

# singular points farther than REACH * (interval length) from the interval are ignored
REACH = 0.5
CHUNK_POINTS = 60_000


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def gl_rule(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    return a + half * (t + 1.0), half * w


def trapezoid_rule(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    h = (b - a) / n
    return a + h * np.arange(n), np.full(n, h)


def _half_panel(p, length, delta, m, direction):
    """Sinh-clustered GL on [p, p + direction*length] toward ``p``."""
    t, w = gauss_legendre(m)
    s = 0.5 * (t + 1.0)
    length = length[..., None]
    floor = 1e-15 * np.maximum(length, 1e-300)
    d = np.clip(delta[..., None], floor, 1e6 * length + 1e-300)
    T = np.arcsinh(length / d)
    x = p[..., None] + direction * d * np.sinh(s * T)
    wt = d * np.cosh(s * T) * (0.5 * T) * w
    return x, wt


def active_points(points, a: float, b: float, periodic: bool, reach: float = REACH) -> np.ndarray:
    """The subset of complex ``points`` close enough to [a, b] to need clustering."""
    pts = np.asarray(points, dtype=complex).ravel()
    pts = pts[np.isfinite(pts)]
    span = b - a
    if periodic:
        dist = np.abs(pts.imag)
    else:
        dist = np.abs(pts - np.clip(pts.real, a, b))
    pts = pts[dist < reach * span]
    if pts.size:
        key = np.round(pts / (1e-12 * span + 1e-300))
        _, idx = np.unique(key, return_index=True)
        pts = pts[np.sort(idx)]
    return pts


def clustered_rule(
    a: float,
    b: float,
    points,
    m: int,
    periodic: bool = False,
    reach: float = REACH,
) -> tuple[np.ndarray, np.ndarray]:
    """Composite GL on [a, b] with panels split at complex ``points``.

    ``points`` has shape ``(..., K)``; leading axes are batch axes and the
    result has shape ``(..., n)`` with ``n = 2*m*(K+1)``.  Points that are not
    within ``reach*(b-a)`` of the interval are idle: they duplicate an active
    point of the same row (adding only zero-weight nodes), or become evenly
    spread break points when the row has none.  Every batch row therefore has
    the same node count.
    """
    pts = np.asarray(points, dtype=complex)
    if pts.ndim == 0:
        pts = pts[None]
    span = b - a
    K = pts.shape[-1]
    if K == 0 and not periodic:
        pts = np.full(pts.shape[:-1] + (1,), np.nan, dtype=complex)
        K = 1
    finite = np.isfinite(pts)
    pts = np.where(finite, pts, a)
    if periodic:
        loc = a + np.mod(pts.real - a, span)
        delta = np.abs(pts.imag)
        slots = K + 1
        spread = a + span * np.arange(slots) / slots
        loc = np.concatenate([loc, np.full(pts.shape[:-1] + (1,), a)], axis=-1)
        delta = np.concatenate([delta, np.full(pts.shape[:-1] + (1,), np.inf)], axis=-1)
        finite = np.concatenate([finite, np.zeros(pts.shape[:-1] + (1,), bool)], axis=-1)
    else:
        loc = np.clip(pts.real, a, b)
        delta = np.abs(pts - loc)
        slots = K
        spread = a + span * (np.arange(K) + 1) / (K + 1)
    active = finite & (delta < reach * span)
    delta = np.where(active, delta, np.inf)
    # idle slots copy the row's nearest active point (a zero-length panel);
    # rows without active points get evenly spread plain break points
    best = np.argmin(delta, axis=-1)[..., None]
    has = np.any(active, axis=-1, keepdims=True)
    fill_loc = np.where(has, np.take_along_axis(loc, best, axis=-1), spread)
    fill_delta = np.where(has, np.take_along_axis(delta, best, axis=-1), np.inf)
    loc = np.where(active, loc, fill_loc)
    delta = np.where(active, delta, fill_delta)

    order = np.argsort(loc, axis=-1, kind="stable")
    loc = np.take_along_axis(loc, order, axis=-1)
    delta = np.take_along_axis(delta, order, axis=-1)
    batch = loc.shape[:-1]
    if periodic:
        brk = np.concatenate([loc, loc[..., :1] + span], axis=-1)
        dlt = np.concatenate([delta, delta[..., :1]], axis=-1)
    else:
        brk = np.concatenate([np.full(batch + (1,), a), loc, np.full(batch + (1,), b)], axis=-1)
        dlt = np.concatenate([np.full(batch + (1,), np.inf), delta, np.full(batch + (1,), np.inf)], axis=-1)
    left, right = brk[..., :-1], brk[..., 1:]
    half = 0.5 * (right - left)
    xl, wl = _half_panel(left, half, dlt[..., :-1], m, +1.0)
    xr, wr = _half_panel(right, half, dlt[..., 1:], m, -1.0)
    x = np.concatenate([xl, xr[..., ::-1]], axis=-1).reshape(batch + (-1,))
    w = np.concatenate([wl, wr[..., ::-1]], axis=-1).reshape(batch + (-1,))
    return x, w


def _axis_rule(a, b, n, periodic):
    return trapezoid_rule(a, b, n) if periodic else gl_rule(a, b, n)


class TensorRule:
    """Gauss-Legendre x trapezoid tensor grid; ``res`` counts nodes per axis."""

    name = "tensor"

    def coarsen(self, res):
        return tuple(max(2, r // 2) for r in res)

    def chunks(self, lower, upper, periodic, res) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        rules = [_axis_rule(lower[k], upper[k], res[k], periodic[k]) for k in range(3)]
        (x0, w0), (x1, w1), (x2, w2) = rules
        step = max(1, CHUNK_POINTS // (len(x1) * len(x2)))
        g1, g2 = np.meshgrid(x1, x2, indexing="ij")
        wt12 = np.outer(w1, w2)
        for i in range(0, len(x0), step):
            xs = x0[i:i + step]
            u = np.empty((len(xs),) + g1.shape + (3,))
            u[..., 0] = xs[:, None, None]
            u[..., 1] = g1
            u[..., 2] = g2
            w = w0[i:i + step, None, None] * wt12
            yield u.reshape(-1, 3), w.reshape(-1)

    def shape(self, lower, upper, periodic, res):
        return tuple(int(r) for r in res)


SingularPoints = Callable[[int, tuple], np.ndarray]


class NestedRule:
    """Iterated clustered rules; ``res`` is the GL order per half panel.

    ``singular_points(level, outer)`` returns complex candidate singular
    locations for parameter ``level`` given the already fixed outer
    parameters ``outer`` (a tuple of arrays, outermost first).  Level 0 gets
    ``()`` and returns shape ``(K0,)``; level 1 gets a scalar and returns
    ``(K1,)``; level 2 gets ``(scalar, array(n1))`` and returns ``(n1, K2)``.
    """

    name = "nested"

    def __init__(self, singular_points: SingularPoints):
        self.singular_points = singular_points

    def coarsen(self, res):
        return tuple(max(2, r // 2) for r in res)

    def _outer(self, lower, upper, periodic, res):
        p0 = active_points(self.singular_points(0, ()), lower[0], upper[0], periodic[0])
        return clustered_rule(lower[0], upper[0], p0, res[0], periodic[0])

    def _middle(self, x0, lower, upper, periodic, res):
        p1 = active_points(self.singular_points(1, (x0,)), lower[1], upper[1], periodic[1])
        return clustered_rule(lower[1], upper[1], p1, res[1], periodic[1])

    def chunks(self, lower, upper, periodic, res):
        x0, w0 = self._outer(lower, upper, periodic, res)
        buf_u: list[np.ndarray] = []
        buf_w: list[np.ndarray] = []
        count = 0
        for i in range(len(x0)):
            x1, w1 = self._middle(x0[i], lower, upper, periodic, res)
            p2 = np.asarray(self.singular_points(2, (x0[i], x1)), dtype=complex)
            x2, w2 = clustered_rule(lower[2], upper[2], p2, res[2], periodic[2])
            u = np.empty(x2.shape + (3,))
            u[..., 0] = x0[i]
            u[..., 1] = x1[:, None]
            u[..., 2] = x2
            buf_u.append(u.reshape(-1, 3))
            buf_w.append((w0[i] * w1[:, None] * w2).reshape(-1))
            count += x2.size
            if count >= CHUNK_POINTS:
                yield np.concatenate(buf_u), np.concatenate(buf_w)
                buf_u, buf_w, count = [], [], 0
        if buf_u:
            yield np.concatenate(buf_u), np.concatenate(buf_w)

    def shape(self, lower, upper, periodic, res):
        x0, _ = self._outer(lower, upper, periodic, res)
        x1, _ = self._middle(x0[len(x0) // 2], lower, upper, periodic, res)
        p2 = np.asarray(self.singular_points(2, (x0[len(x0) // 2], x1)), dtype=complex)
        return (len(x0), len(x1), 2 * res[2] * (p2.shape[-1] + 1))


def neville(xs: Sequence[float], ys: np.ndarray, x: float = 0.0) -> np.ndarray:
    """Neville tableau for polynomial extrapolation; returns all diagonals.

    ``ys`` has shape ``(n, ...)``.  Entry ``[k]`` of the result is the value at
    ``x`` of the degree-``k`` interpolant through the last ``k+1`` samples.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys)
    n = len(xs)
    table = [ys[i].astype(complex) for i in range(n)]
    diag = [table[-1]]
    for k in range(1, n):
        new = []
        for i in range(n - k):
            j = i + k
            num = (x - xs[i]) * table[i + 1] - (x - xs[j]) * table[i]
            new.append(num / (xs[j] - xs[i]))
        table = new
        diag.append(table[-1])
    return np.array(diag)
