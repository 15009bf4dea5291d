"""Arithmetic of the complexified quaternions and their three real forms.

Elements are stored as four complex coefficients ``(z0, z1, z2, z3)`` in the
basis ``e0, e1, e2, e3`` with ``e1 e2 = e3`` and ``ek**2 = -e0``.  The
array-level functions at the top of the module act on the last axis of
arrays of shape ``(..., 4)`` and are what the quadrature code uses; the
:class:`Biquaternion` wrapper is the user-facing scalar type.

Matrix view (``E_k`` are the standard 2x2 realisations)::

    M(Z) = [[z0 - i z3, -i z1 - z2],
            [-i z1 + z2, z0 + i z3]]

so that ``det M(Z) = N(Z) = z0**2 + z1**2 + z2**2 + z3**2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from ._kernels import qmul_rows
from .errors import SingularElement

ConjKind = Literal["c", "plus", "minus"]
FormTag = Literal["H", "HR", "M"]

_PLUS = np.array([1.0, -1.0, -1.0, -1.0])
_MINUS = np.array([1.0, -1.0, -1.0, 1.0])

# coordinate -> e-coefficient factors for each real form
BASIS_FACTORS: dict[str, np.ndarray] = {
    "H": np.array([1, 1, 1, 1], dtype=complex),
    "HR": np.array([1, 1j, -1j, 1], dtype=complex),
    "M": np.array([-1j, 1, 1, 1], dtype=complex),
}

# signature of N on each real form, in that form's own coordinates
SIGNATURES: dict[str, np.ndarray] = {
    "H": np.array([1.0, 1.0, 1.0, 1.0]),
    "HR": np.array([1.0, -1.0, -1.0, 1.0]),
    "M": np.array([-1.0, 1.0, 1.0, 1.0]),
}


# ---------------------------------------------------------------------------
# array-level kernels
# ---------------------------------------------------------------------------

def qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Quaternion product along the last axis (broadcasting)."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
    shape = a.shape
    out = qmul_rows(np.ascontiguousarray(a.reshape(-1, 4)), np.ascontiguousarray(b.reshape(-1, 4)))
    return out.reshape(shape)


def qconj(z: np.ndarray, kind: ConjKind) -> np.ndarray:
    if kind == "c":
        return np.conj(z)
    if kind == "plus":
        return z * _PLUS
    if kind == "minus":
        return z * _MINUS
    raise ValueError(f"unknown conjugation {kind!r}")


def qnorm_form(z: np.ndarray) -> np.ndarray:
    """N(Z) = sum z_k**2 along the last axis."""
    return np.einsum("...k,...k->...", z, z)


def qpairing(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.einsum("...k,...k->...", z, w)


def qeuclid_sq(z: np.ndarray) -> np.ndarray:
    """Squared Euclidean norm; the E_k are orthogonal with |E_k|_F**2 = 2."""
    return np.einsum("...k,...k->...", z, np.conj(z)).real


def qform_s(z: np.ndarray) -> np.ndarray:
    """S(Z) = z11 z22 + z12 z21 = z0**2 - z1**2 - z2**2 + z3**2."""
    return np.einsum("...k,...k->...", z * _MINUS, z)


def qinv(z: np.ndarray) -> np.ndarray:
    return qconj(z, "plus") / qnorm_form(z)[..., None]


def to_matrix_array(z: np.ndarray) -> np.ndarray:
    z0, z1, z2, z3 = z[..., 0], z[..., 1], z[..., 2], z[..., 3]
    m = np.empty(z.shape[:-1] + (2, 2), dtype=complex)
    m[..., 0, 0] = z0 - 1j * z3
    m[..., 0, 1] = -1j * z1 - z2
    m[..., 1, 0] = -1j * z1 + z2
    m[..., 1, 1] = z0 + 1j * z3
    return m


def from_matrix_array(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    a, b, c, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    return np.stack(
        [(a + d) / 2, 1j * (b + c) / 2, (c - b) / 2, 1j * (a - d) / 2], axis=-1
    )


def embed_coords(coords: np.ndarray, tag: FormTag) -> np.ndarray:
    """Real coordinates of a real form (last axis) -> e-coefficients."""
    return np.asarray(coords, dtype=float) * BASIS_FACTORS[tag]


def real_coords(z: np.ndarray, tag: FormTag) -> np.ndarray:
    """Inverse of :func:`embed_coords`; imaginary residue is discarded."""
    return (np.asarray(z) / BASIS_FACTORS[tag]).real


# ---------------------------------------------------------------------------
# scalar type
# ---------------------------------------------------------------------------

class Biquaternion:
    """An immutable element of the complexified quaternions."""

    __slots__ = ("_z",)

    def __init__(self, z0: complex = 0, z1: complex = 0, z2: complex = 0, z3: complex = 0):
        z = np.array([z0, z1, z2, z3], dtype=complex)
        z.flags.writeable = False
        object.__setattr__(self, "_z", z)

    @classmethod
    def from_array(cls, z: Iterable[complex]) -> "Biquaternion":
        z = np.asarray(z, dtype=complex).reshape(4)
        return cls(*z)

    @classmethod
    def from_matrix(cls, m) -> "Biquaternion":
        return cls.from_array(from_matrix_array(np.asarray(m, dtype=complex)))

    @classmethod
    def from_coords(cls, coords: Iterable[float], tag: FormTag) -> "Biquaternion":
        return cls.from_array(embed_coords(np.asarray(list(coords), dtype=float), tag))

    def __setattr__(self, name, value):
        raise AttributeError("Biquaternion is immutable")

    @property
    def coeffs(self) -> np.ndarray:
        return self._z

    @property
    def z0(self) -> complex:
        return complex(self._z[0])

    @property
    def z1(self) -> complex:
        return complex(self._z[1])

    @property
    def z2(self) -> complex:
        return complex(self._z[2])

    @property
    def z3(self) -> complex:
        return complex(self._z[3])

    def to_matrix(self) -> np.ndarray:
        return to_matrix_array(self._z)

    def coords(self, tag: FormTag) -> np.ndarray:
        return real_coords(self._z, tag)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Biquaternion):
            return Biquaternion.from_array(self._z + other._z)
        if np.isscalar(other):
            return Biquaternion.from_array(self._z + np.array([other, 0, 0, 0]))
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Biquaternion.from_array(-self._z)

    def __sub__(self, other):
        if isinstance(other, Biquaternion):
            return Biquaternion.from_array(self._z - other._z)
        if np.isscalar(other):
            return Biquaternion.from_array(self._z - np.array([other, 0, 0, 0]))
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Biquaternion):
            return Biquaternion.from_array(qmul(self._z, other._z))
        if np.isscalar(other):
            return Biquaternion.from_array(self._z * other)
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return Biquaternion.from_array(self._z * other)
        return NotImplemented

    def __truediv__(self, other):
        if np.isscalar(other):
            return Biquaternion.from_array(self._z / other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, Biquaternion):
            return NotImplemented
        return bool(np.array_equal(self._z, other._z))

    def __hash__(self):
        return hash(tuple(self._z.tolist()))

    def __repr__(self):
        parts = ", ".join(f"{c:.6g}" for c in self._z)
        return f"Biquaternion({parts})"

    def conj(self, kind: ConjKind) -> "Biquaternion":
        return conjugate(self, kind)

    def isclose(self, other: "Biquaternion", atol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self._z - other._z) <= atol))


E0 = Biquaternion(1, 0, 0, 0)
E1 = Biquaternion(0, 1, 0, 0)
E2 = Biquaternion(0, 0, 1, 0)
E3 = Biquaternion(0, 0, 0, 1)
ET0 = Biquaternion(-1j, 0, 0, 0)   # Minkowski time unit
ET1 = Biquaternion(0, 1j, 0, 0)    # split unit, squares to +e0
ET2 = Biquaternion(0, 0, -1j, 0)   # split unit, squares to +e0
ET3 = Biquaternion(0, 0, 0, 1j)    # diag(1, -1); not in the HR basis
ZERO = Biquaternion()

BASES: dict[str, tuple[Biquaternion, ...]] = {
    "H": (E0, E1, E2, E3),
    "HR": (E0, ET1, ET2, E3),
    "M": (ET0, E1, E2, E3),
}


@dataclass(frozen=True)
class RealFormPoint:
    """A point of one of the real forms, given by real coordinates in its basis."""

    tag: FormTag
    coords: tuple[float, float, float, float]

    def __post_init__(self):
        if self.tag not in BASIS_FACTORS:
            raise ValueError(f"unknown real form {self.tag!r}")
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))
        if len(self.coords) != 4:
            raise ValueError("a real-form point needs exactly four coordinates")

    def embed(self) -> Biquaternion:
        return Biquaternion.from_coords(self.coords, self.tag)


def as_biquaternion(x) -> Biquaternion:
    if isinstance(x, Biquaternion):
        return x
    if isinstance(x, RealFormPoint):
        return x.embed()
    if np.ndim(x) == 0:
        return Biquaternion(complex(x))
    return Biquaternion.from_array(x)


# ---------------------------------------------------------------------------
# named operations
# ---------------------------------------------------------------------------

def mul(a: Biquaternion, b: Biquaternion) -> Biquaternion:
    return Biquaternion.from_array(qmul(a.coeffs, b.coeffs))


def conjugate(z: Biquaternion, kind: ConjKind) -> Biquaternion:
    """Complex (``c``), quaternionic (``plus``) or ``-e3 Z e3`` (``minus``) conjugate."""
    return Biquaternion.from_array(qconj(z.coeffs, kind))


def quad_form_N(z: Biquaternion) -> complex:
    return complex(qnorm_form(z.coeffs))


def euclid_norm(z: Biquaternion) -> float:
    return float(np.sqrt(qeuclid_sq(z.coeffs)))


def form_S(z: Biquaternion) -> complex:
    return complex(qform_s(z.coeffs))


def pairing(z: Biquaternion, w: Biquaternion) -> complex:
    """Symmetric bilinear form ``tr(Z+ W) / 2``."""
    return complex(qpairing(z.coeffs, w.coeffs))


def singular_tolerance(z: Biquaternion) -> float:
    return 1e-12 * max(1.0, euclid_norm(z) ** 2)


def inverse(z: Biquaternion, tol: float | None = None) -> Biquaternion:
    n = quad_form_N(z)
    if tol is None:
        tol = singular_tolerance(z)
    if abs(n) <= tol:
        raise SingularElement(f"|N(Z)| = {abs(n):.3e} is below {tol:.1e}; Z lies on the null cone")
    return Biquaternion.from_array(qconj(z.coeffs, "plus") / n)


def classify_real_form(z: Biquaternion, tol: float = 1e-12) -> set[str]:
    """Real forms containing ``z`` up to a componentwise absolute tolerance."""
    c = z.coeffs
    cc = np.conj(c)
    tags = set()
    if np.all(np.abs(cc - c) <= tol):
        tags.add("H")
    if np.all(np.abs(qconj(cc, "minus") - c) <= tol):
        tags.add("HR")
    if np.all(np.abs(qconj(cc, "plus") + c) <= tol):
        tags.add("M")
    return tags


def gram_matrix(basis: Iterable[Biquaternion]) -> np.ndarray:
    basis = list(basis)
    return np.array([[pairing(a, b) for b in basis] for a in basis])


def random_biquaternion(rng: np.random.Generator, scale: float = 1.0) -> Biquaternion:
    return Biquaternion.from_array(scale * (rng.normal(size=4) + 1j * rng.normal(size=4)))


def random_point(rng: np.random.Generator, tag: FormTag, scale: float = 1.0) -> Biquaternion:
    return Biquaternion.from_coords(scale * rng.normal(size=4), tag)


def identity_residuals(rng: np.random.Generator, count: int = 10_000) -> dict[str, float]:
    """Worst relative residuals of the basic identities over random pairs.

    Residuals are scaled by ``|Z| |W|`` (``|Z|**2 |W|**2`` for the norm), the
    natural size of the compared quantities, so near-null products do not
    inflate them.
    """
    z = rng.normal(size=(count, 4)) + 1j * rng.normal(size=(count, 4))
    w = rng.normal(size=(count, 4)) + 1j * rng.normal(size=(count, 4))
    nz, nw = np.sqrt(qeuclid_sq(z)), np.sqrt(qeuclid_sq(w))
    scale = nz * nw
    zw = qmul(z, w)

    def worst(diff, s):
        return float(np.max(np.linalg.norm(diff.reshape(count, -1), axis=-1) / s))

    anti = qconj(zw, "plus") - qmul(qconj(w, "plus"), qconj(z, "plus"))
    mult = (qnorm_form(zw) - qnorm_form(z) * qnorm_form(w))[:, None]
    kinds = ("c", "plus", "minus")
    comm = max(worst(qconj(qconj(z, a), b) - qconj(qconj(z, b), a), nz)
               for i, a in enumerate(kinds) for b in kinds[i + 1:])
    mat = to_matrix_array(zw) - to_matrix_array(z) @ to_matrix_array(w)
    return {
        "conj_antimultiplicative": worst(anti, scale),
        "norm_multiplicative": worst(mult, scale**2),
        "conjugations_commute": comm,
        "matrix_oracle": worst(mat, scale),
    }
