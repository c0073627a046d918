"""Exponential sums and the characteristic polynomials built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .geometry import AngleClass, Component, GeometryError, PolygonSpec, ZigzagSpec
from .transfer import ConjVector, bc_vector, perp, special_vector

MERGE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ExpPolynomial:
    """sum_k amps[k] * exp(i * freqs[k] * sigma), frequencies sorted and merged."""

    freqs: np.ndarray
    amps: np.ndarray

    @classmethod
    def make(cls, freqs, amps, tol: float = MERGE_TOL) -> "ExpPolynomial":
        freqs = np.asarray(freqs, dtype=float).ravel()
        amps = np.asarray(amps, dtype=complex).ravel()
        if freqs.size == 0:
            return cls(np.zeros(0), np.zeros(0, dtype=complex))
        order = np.argsort(freqs, kind="stable")
        freqs, amps = freqs[order], amps[order]
        scale = max(1.0, float(np.max(np.abs(freqs))))
        out_f, out_a = [freqs[0]], [amps[0]]
        for f, a in zip(freqs[1:], amps[1:]):
            if f - out_f[-1] <= tol * scale:
                out_a[-1] += a
            else:
                out_f.append(f)
                out_a.append(a)
        return cls(np.array(out_f), np.array(out_a, dtype=complex))

    @classmethod
    def constant(cls, c) -> "ExpPolynomial":
        return cls.make([0.0], [c])

    def __call__(self, sigma):
        sigma = np.asarray(sigma, dtype=float)
        phase = np.multiply.outer(sigma, self.freqs)
        return np.exp(1j * phase) @ self.amps if self.freqs.size else np.zeros_like(sigma, complex)

    def eval_real(self, sigma):
        """Real part of the value, accumulated with cos/sin only."""
        sigma = np.asarray(sigma, dtype=float)
        phase = np.multiply.outer(sigma, self.freqs)
        return np.cos(phase) @ self.amps.real - np.sin(phase) @ self.amps.imag

    def derivative(self) -> "ExpPolynomial":
        return ExpPolynomial(self.freqs.copy(), 1j * self.freqs * self.amps)

    def shift(self, omega: float) -> "ExpPolynomial":
        """Multiply by exp(i omega sigma)."""
        return ExpPolynomial.make(self.freqs + omega, self.amps)

    def conj(self) -> "ExpPolynomial":
        """Complex conjugate as a function of real sigma."""
        return ExpPolynomial.make(-self.freqs, np.conj(self.amps))

    def scale(self, c) -> "ExpPolynomial":
        return ExpPolynomial(self.freqs.copy(), self.amps * c)

    def __add__(self, other: "ExpPolynomial") -> "ExpPolynomial":
        return ExpPolynomial.make(np.concatenate([self.freqs, other.freqs]),
                                  np.concatenate([self.amps, other.amps]))

    def __sub__(self, other: "ExpPolynomial") -> "ExpPolynomial":
        return self + other.scale(-1.0)

    def real_part(self) -> "ExpPolynomial":
        return (self + self.conj()).scale(0.5)

    def imag_part(self) -> "ExpPolynomial":
        return (self - self.conj()).scale(-0.5j)

    def amplitude_sum(self) -> float:
        return float(np.sum(np.abs(self.amps)))

    def max_frequency(self) -> float:
        return float(np.max(np.abs(self.freqs))) if self.freqs.size else 0.0

    def terms(self):
        return list(zip(self.freqs.tolist(), self.amps.tolist()))


def sign_changes(z: Sequence[int]) -> set[int]:
    """1-based indices j with z_j != z_{j+1}, cyclically."""
    n = len(z)
    return {j + 1 for j in range(n) if z[j] != z[(j + 1) % n]}


def padded_sign_changes(z: Sequence[int]) -> set[int]:
    """Sign changes of (z_1..z_n, -1), read non-cyclically, restricted to 1..n."""
    padded = list(z) + [-1]
    return {j + 1 for j in range(len(z)) if padded[j] != padded[j + 1]}


def _cos_product(angles: Sequence[AngleClass], idx: Iterable[int]) -> float:
    out = 1.0
    for j in idx:
        out *= angles[j - 1].cos_mu
    return out


def sign_vectors(n: int):
    """All z in {+-1}^n with z_1 = +1."""
    for tail in product((1, -1), repeat=n - 1):
        yield (1,) + tail


def p_coefficient(angles, z) -> float:
    return _cos_product(angles, sign_changes(z))


def q_coefficient(angles, z) -> float:
    return _cos_product(angles, padded_sign_changes(z))


def f_pair(angles: Sequence[AngleClass], lengths: Sequence[float]):
    """(F_n, F~_n) by the first-order recurrence; n = 0 gives (1, 0)."""
    if len(angles) != len(lengths):
        raise GeometryError("f_pair needs as many angles as lengths")
    F = ExpPolynomial.constant(1.0)
    Ft = ExpPolynomial.make([], [])
    for a, l in zip(angles, lengths):
        c = a.cos_mu
        Fbar, Ftbar = F.conj(), Ft.conj()
        F, Ft = (F.shift(l) + Ftbar.shift(-l).scale(-1j * c),
                 Ft.shift(l) + Fbar.shift(-l).scale(-1j * c))
    return F, Ft


def f_pair_direct(angles: Sequence[AngleClass], lengths: Sequence[float], max_n: int = 16):
    """(F_n, F~_n) from the 2^(n-1)-term sums over sign vectors."""
    n = len(angles)
    if n > max_n:
        raise GeometryError(f"direct sum limited to n <= {max_n}")
    if n == 0:
        return ExpPolynomial.constant(1.0), ExpPolynomial.make([], [])
    ell = np.asarray(lengths, float)
    fr, pa, qa = [], [], []
    for z in sign_vectors(n):
        fr.append(float(np.dot(ell, z)))
        pa.append(p_coefficient(angles, z))
        qa.append(q_coefficient(angles, z))
    fr = np.array(fr)
    return (ExpPolynomial.make(fr, pa),
            ExpPolynomial.make(-fr, np.array(qa) * -1j))


def f_even(angles, lengths) -> ExpPolynomial:
    return f_pair(angles, lengths)[0].real_part()


def f_odd(angles, lengths) -> ExpPolynomial:
    return f_pair(angles, lengths)[0].imag_part()


def sine_product(angles) -> float:
    return math.prod(a.sin_mu for a in angles)


def polygon_char_poly(p: PolygonSpec) -> ExpPolynomial:
    """F^P = F_even - prod sin(mu_j); valid with or without exceptional angles."""
    return f_even(p.angles, p.lengths) - ExpPolynomial.constant(sine_product(p.angles))


def polygon_amplitude_scale(p: PolygonSpec) -> float:
    """sum over sign vectors of |p_zeta|, the natural size of F^P."""
    F, _ = f_pair(p.angles, p.lengths)
    return max(F.amplitude_sum(), 1e-300)


def component_char_poly(component: Component) -> ExpPolynomial:
    """Re F for components with equal terminal parities, Im F otherwise."""
    if any(a.is_exceptional for a in component.angles):
        raise GeometryError("component interior angles must be non-exceptional")
    F, _ = f_pair(component.poly_angles, component.lengths)
    return F.imag_part() if component.odd else F.real_part()


def endpoint_condition_poly(interior, lengths, start: ConjVector, target: ConjVector) -> ExpPolynomial:
    """A real polynomial vanishing exactly where U(sigma) start . target = 0.

    U = B(l_last) T(interior, lengths[:-1]); the factor prod(sin) is dropped,
    so interior angles may be anywhere in the non-exceptional range.
    """
    F, Ft = f_pair(interior, lengths[:-1])
    a = complex(start.c)
    v1 = (F.scale(a) + Ft.scale(np.conj(a))).shift(lengths[-1])
    return v1.scale(np.conj(complex(target.c))).real_part().scale(2.0)


def zigzag_char_poly(z: ZigzagSpec) -> ExpPolynomial:
    """Polynomial whose real roots are the zigzag quasi-eigenvalues."""
    if z.is_exceptional:
        raise GeometryError("exceptional zigzags split into component polynomials")
    return endpoint_condition_poly(z.angles, z.lengths, bc_vector(z.bc_start),
                                   perp(bc_vector(z.bc_end)))


def zigzag_poly_direct(z: ZigzagSpec):
    """The explicit sign-vector sums for the four end-condition pairs (test oracle).

    NN: sum p sin((l.z + l_n) s) - q cos((l_n - l.z) s)
    DD: sum p sin((l.z + l_n) s) + q cos((l_n - l.z) s)
    ND: sum p cos((l.z + l_n) s) + q sin((l_n - l.z) s)
    DN: sum p cos((l.z + l_n) s) - q sin((l_n - l.z) s)
    """
    alpha, ell = z.angles, np.asarray(z.lengths, float)
    ln = ell[-1]
    n1 = len(alpha)
    use_sin, q_sign = {("N", "N"): (1, -1), ("D", "D"): (1, 1),
                       ("N", "D"): (0, 1), ("D", "N"): (0, -1)}[(z.bc_start, z.bc_end)]

    def f(sigma):
        sigma = np.asarray(sigma, float)
        if n1 == 0:
            return np.sin(ln * sigma) if use_sin else np.cos(ln * sigma)
        total = np.zeros_like(sigma)
        for zeta in sign_vectors(n1):
            lz = float(np.dot(ell[:-1], zeta))
            pz, qz = p_coefficient(alpha, zeta), q_coefficient(alpha, zeta)
            if use_sin:
                total += pz * np.sin((lz + ln) * sigma) + q_sign * qz * np.cos((ln - lz) * sigma)
            else:
                total += pz * np.cos((lz + ln) * sigma) + q_sign * qz * np.sin((ln - lz) * sigma)
        return total

    return f


def special_condition_poly(interior, lengths, left: AngleClass, right: AngleClass) -> ExpPolynomial:
    """U X(left) . X(right) as a real polynomial (second route for components)."""
    return endpoint_condition_poly(interior, lengths, special_vector(left), special_vector(right))
