"""SU(1,1) inside HR, the semigroups Gamma0 / Gamma0-bar, and Omega margins.

Gamma0 is the set of Z with Z* e~3 Z - e~3 positive definite, where e~3 is
diag(1, -1) in the matrix picture; Gamma0-bar is the negative definite case.
Omega is the set of X0 with N(X - X0) != 0 for every X in SU(1,1).  The group
is non-compact, so margins are estimated on a truncated parameter box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .algebra import Biquaternion, as_biquaternion, from_matrix_array, qnorm_form, to_matrix_array

DEFINITENESS_TOL = 1e-10
DEFAULT_T_MAX = 6.0
DEFAULT_GRID = (64, 64, 64)
# margins below this are reported as "likely not in Omega"
MARGIN_FLOOR = 1e-6

_J = np.diag([1.0, -1.0])


@dataclass(frozen=True)
class SU11Params:
    t: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("t must be non-negative")


@dataclass(frozen=True)
class RegionVerdict:
    in_gamma0: bool
    in_gamma0_bar: bool
    omega_margin: float
    truncation_t_max: float

    @property
    def likely_in_omega(self) -> bool:
        return self.omega_margin >= MARGIN_FLOOR


def su11_array(t, alpha, beta) -> np.ndarray:
    """e-coefficients of the SU(1,1) elements with the given parameters (broadcast)."""
    t, alpha, beta = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (t, alpha, beta)))
    m = np.empty(t.shape + (2, 2), dtype=complex)
    ch, sh = np.cosh(t), np.sinh(t)
    m[..., 0, 0] = ch * np.exp(1j * alpha)
    m[..., 0, 1] = sh * np.exp(1j * beta)
    m[..., 1, 0] = sh * np.exp(-1j * beta)
    m[..., 1, 1] = ch * np.exp(-1j * alpha)
    return from_matrix_array(m)


def su11_sample(p: SU11Params | tuple | None = None, alpha: float | None = None,
                beta: float | None = None) -> Biquaternion:
    """The SU(1,1) element with hyperbolic radius t and phases alpha, beta.

    Accepts an :class:`SU11Params`, a (t, alpha, beta) tuple, or three numbers.
    """
    if p is None:
        p = SU11Params()
    elif not isinstance(p, SU11Params):
        p = SU11Params(*p) if alpha is None else SU11Params(float(p), alpha, beta or 0.0)
    return Biquaternion.from_array(su11_array(p.t, p.alpha, p.beta))


def _definiteness(z) -> np.ndarray:
    m = to_matrix_array(as_biquaternion(z).coeffs)
    h = m.conj().T @ _J @ m - _J
    return np.linalg.eigvalsh(0.5 * (h + h.conj().T))


def in_gamma0(z, tol: float = DEFINITENESS_TOL) -> bool:
    """True iff Z* e~3 Z - e~3 is positive definite (both eigenvalues > tol)."""
    return bool(np.all(_definiteness(z) > tol))


def in_gamma0_bar(z, tol: float = DEFINITENESS_TOL) -> bool:
    """True iff Z* e~3 Z - e~3 is negative definite (both eigenvalues < -tol)."""
    return bool(np.all(_definiteness(z) < -tol))


def _affine(x0c: np.ndarray) -> tuple[complex, np.ndarray]:
    """N(X - X0) = c + v . (ch cos a, ch sin a, sh cos b, sh sin b) on the group."""
    # X = ch cos a e0 + i sh cos b e1 - i sh sin b e2 - ch sin a e3 and N(X) = 1
    c = 1.0 + complex(qnorm_form(x0c))
    v = -2.0 * np.array([x0c[0], -x0c[3], 1j * x0c[1], -1j * x0c[2]])
    return c, v


def _features(t, a, b):
    ch, sh = np.cosh(t), np.sinh(t)
    return np.stack([ch * np.cos(a), ch * np.sin(a), sh * np.cos(b), sh * np.sin(b)], axis=-1)


def _n_on_group(x0c: np.ndarray, t, a, b) -> np.ndarray:
    c, v = _affine(x0c)
    return c + _features(t, a, b) @ v


def omega_margin(x0, t_max: float = DEFAULT_T_MAX, grid=DEFAULT_GRID, starts: int = 8) -> float:
    """Estimated min |N(X - X0)| over SU(1,1) truncated to t <= t_max.

    A grid search over [0, t_max] x [0, 2 pi)^2 is followed by bounded local
    descent from the ``starts`` best grid nodes.  This is an estimate, not a
    certificate: the infimum over the full group may be smaller.
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    x0c = as_biquaternion(x0).coeffs
    c, v = _affine(x0c)
    nt, na, nb = (int(g) for g in grid)
    ts = np.linspace(0.0, t_max, nt)
    angs_a = 2 * np.pi * np.arange(na) / na
    angs_b = 2 * np.pi * np.arange(nb) / nb
    T, A, B = np.meshgrid(ts, angs_a, angs_b, indexing="ij")
    vals = np.abs(c + _features(T, A, B) @ v).ravel()
    best = float(vals.min())
    order = np.argsort(vals, kind="stable")[:starts]

    def objective(p):
        t, a, b = p
        ch, sh = np.cosh(t), np.sinh(t)
        ca, sa, cb, sb = np.cos(a), np.sin(a), np.cos(b), np.sin(b)
        n = c + v @ np.array([ch * ca, ch * sa, sh * cb, sh * sb])
        dn = np.array([v @ np.array([sh * ca, sh * sa, ch * cb, ch * sb]),
                       v[0] * (-ch * sa) + v[1] * (ch * ca),
                       v[2] * (-sh * sb) + v[3] * (sh * cb)])
        return float(abs(n) ** 2), 2.0 * (np.conj(n) * dn).real

    bounds = [(0.0, t_max), (None, None), (None, None)]
    for idx in order:
        p0 = np.array([T.flat[idx], A.flat[idx], B.flat[idx]])
        res = optimize.minimize(objective, p0, jac=True, method="L-BFGS-B", bounds=bounds,
                                options={"ftol": 1e-30, "gtol": 1e-14, "maxiter": 200})
        best = min(best, float(np.sqrt(max(res.fun, 0.0))))
    return best


def region_verdict(z, t_max: float = DEFAULT_T_MAX, grid=DEFAULT_GRID) -> RegionVerdict:
    z = as_biquaternion(z)
    return RegionVerdict(in_gamma0(z), in_gamma0_bar(z), omega_margin(z, t_max, grid), float(t_max))


def random_gamma0(rng: np.random.Generator, scale: float = 1.0, max_tries: int = 10_000) -> Biquaternion:
    """Rejection sample of a Gamma0 element from Gaussian complex 2x2 matrices."""
    for _ in range(max_tries):
        m = scale * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        z = Biquaternion.from_matrix(m)
        if in_gamma0(z):
            return z
    raise RuntimeError("rejection sampling for Gamma0 did not succeed")
