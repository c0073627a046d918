"""Vertex and side transfer matrices acting on conjugate-pair vectors.

Every matrix used here has the shape [[p, q], [conj q, conj p]], so it is
stored as the pair (p, q). Entries may be numpy arrays, which lets a whole
sigma grid be pushed through a product at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import AngleClass, GeometryError, PolygonSpec


@dataclass(frozen=True)
class ConjVector:
    """The vector (c, conj c)."""

    c: complex

    @property
    def array(self) -> np.ndarray:
        return np.array([self.c, np.conj(self.c)])

    @property
    def sharp(self) -> np.ndarray:
        """Real coordinates (Re c, Im c)."""
        return np.array([np.real(self.c), np.imag(self.c)])

    def dot(self, other: "ConjVector") -> float:
        """u . v = u1 conj(v1) + u2 conj(v2), real for conjugate pairs."""
        return 2.0 * np.real(self.c * np.conj(other.c))

    def __mul__(self, s) -> "ConjVector":
        return ConjVector(self.c * s)

    __rmul__ = __mul__


N_VEC = ConjVector(1.0 + 0j)
D_VEC = ConjVector(1j)
X_EVEN = ConjVector(np.exp(-0.25j * np.pi) / math.sqrt(2.0))
X_ODD = ConjVector(np.exp(0.25j * np.pi) / math.sqrt(2.0))


def special_vector(a: AngleClass) -> ConjVector:
    """X(alpha): the even vector for parity +1, the odd one for parity -1."""
    if a.parity is None:
        raise GeometryError("special vector needs a classified angle")
    return X_EVEN if a.parity == 1 else X_ODD


def perp(v: ConjVector) -> ConjVector:
    """A vector orthogonal to v in the conjugate-pair dot product."""
    return ConjVector(1j * v.c)


def bc_vector(bc: str) -> ConjVector:
    return N_VEC if bc == "N" else D_VEC


@dataclass(frozen=True)
class ConjMatrix:
    p: complex
    q: complex

    @property
    def matrix(self) -> np.ndarray:
        p, q = np.asarray(self.p), np.asarray(self.q)
        return np.array([[p, q], [np.conj(q), np.conj(p)]])

    @property
    def det(self):
        return np.abs(self.p) ** 2 - np.abs(self.q) ** 2

    @property
    def trace(self):
        return 2.0 * np.real(self.p)

    def inverse(self) -> "ConjMatrix":
        return ConjMatrix(np.conj(self.p), -self.q)

    def __matmul__(self, other):
        if isinstance(other, ConjMatrix):
            return ConjMatrix(self.p * other.p + self.q * np.conj(other.q),
                              self.p * other.q + self.q * np.conj(other.p))
        if isinstance(other, ConjVector):
            return ConjVector(self.p * other.c + self.q * np.conj(other.c))
        return NotImplemented

    @property
    def sharp(self) -> np.ndarray:
        """The real 2x2 matrix acting on (Re c, Im c)."""
        p, q = complex(self.p), complex(self.q)
        return np.array([[p.real + q.real, q.imag - p.imag],
                         [p.imag + q.imag, p.real - q.real]])


IDENTITY = ConjMatrix(1.0 + 0j, 0j)


def vertex_matrix(a: AngleClass) -> ConjMatrix:
    if a.is_exceptional:
        raise GeometryError("vertex matrix undefined at an exceptional angle")
    s = a.sin_mu
    return ConjMatrix(1.0 / s + 0j, -1j * a.cos_mu / s)


def side_matrix(length: float, sigma) -> ConjMatrix:
    if not length > 0:
        raise GeometryError("side length must be positive")
    sigma = np.asarray(sigma, dtype=float)
    return ConjMatrix(np.exp(1j * length * sigma), np.zeros_like(sigma, dtype=complex))


def chain_transfer(angles, lengths, sigma) -> ConjMatrix:
    """A(a_k) B(l_k) ... A(a_1) B(l_1) for equal numbers of angles and lengths."""
    m = ConjMatrix(np.ones_like(np.asarray(sigma, float), dtype=complex),
                   np.zeros_like(np.asarray(sigma, float), dtype=complex))
    for a, l in zip(angles, lengths):
        m = vertex_matrix(a) @ (side_matrix(l, sigma) @ m)
    return m


def polygon_transfer(p: PolygonSpec, sigma) -> ConjMatrix:
    """T = C(a_n, l_n) ... C(a_1, l_1) with C = A B."""
    if p.is_exceptional:
        raise GeometryError("polygon_transfer needs non-exceptional angles")
    return chain_transfer(p.angles, p.lengths, sigma)


def component_transfer(interior_angles, lengths, sigma) -> ConjMatrix:
    """U = B(l_last) A(a_{k}) B(l_k) ... A(a_1) B(l_1)."""
    if len(lengths) != len(interior_angles) + 1:
        raise GeometryError("need one more length than interior angles")
    if any(a.is_exceptional for a in interior_angles):
        raise GeometryError("interior angles must be non-exceptional")
    return side_matrix(lengths[-1], sigma) @ chain_transfer(interior_angles, lengths[:-1], sigma)
