"""Arguments on the universal cover of the punctured plane and counting functions.

Rotations add to the argument, symmetric maps move it within the current
quadrant of their eigenframe, negative maps add pi. Everything is computed
factor by factor, never by continuation in sigma, so no unwrapping is needed.

All counting functions use the "positive part" of every negative vertex map:
the raw lifted argument has pi subtracted for each negative factor. With this
normalisation the argument of U(0)N lies in (-pi/4, pi/4), as the start rules
for zigzag enumeration require.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import AngleClass, Component, GeometryError, PolygonSpec, ZigzagSpec, decompose, zigzag_components
from .transfer import polygon_transfer

QUARTER = math.pi / 4
HALF = math.pi / 2

ARG_N = 0.0
ARG_D = HALF
ARG_X_EVEN = -QUARTER
ARG_X_ODD = QUARTER
ROTATION_TOL = 1e-10


@dataclass(frozen=True)
class LiftedVector:
    modulus: float
    arg: float

    def __post_init__(self):
        if not self.modulus > 0:
            raise ValueError("lifted vectors have positive modulus")

    @property
    def planar(self) -> complex:
        return self.modulus * complex(math.cos(self.arg), math.sin(self.arg))


N_HAT = LiftedVector(1.0, ARG_N)
D_HAT = LiftedVector(1.0, ARG_D)
X_EVEN_HAT = LiftedVector(1.0, ARG_X_EVEN)
X_ODD_HAT = LiftedVector(1.0, ARG_X_ODD)


@dataclass(frozen=True)
class LiftedSymmetric:
    """sign * S, S symmetric positive with eigenvalue tau along eigen_arg and 1/tau across."""

    tau: float
    eigen_arg: float = QUARTER
    sign: int = 1

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive; put the sign in `sign`")
        if abs(((self.eigen_arg - QUARTER) / HALF) - round((self.eigen_arg - QUARTER) / HALF)) > 1e-12:
            raise ValueError("eigen_arg must be an odd multiple of pi/4")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @classmethod
    def vertex(cls, a: AngleClass) -> "LiftedSymmetric":
        """Lift of the real form of the vertex matrix: eigenvalue tan(mu/2) on the odd vector."""
        t = a.tan_half_mu
        return cls(abs(t), ARG_X_ODD, 1 if t > 0 else -1)

    @property
    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.eigen_arg), math.sin(self.eigen_arg)
        e1, e2 = np.array([c, s]), np.array([-s, c])
        return self.sign * (self.tau * np.outer(e1, e1) + np.outer(e2, e2) / self.tau)


def lift_rotate(v: LiftedVector, psi: float) -> LiftedVector:
    return LiftedVector(v.modulus, v.arg + psi)


def _symmetric_args(tau: float, eigen_arg: float, sign: int, theta):
    """Vectorised argument update of a lifted symmetric map."""
    theta = np.asarray(theta, float)
    q = np.floor((theta - eigen_arg) / HALF)
    w1 = eigen_arg + HALF * q
    delta = theta - w1
    t_eff = np.where(np.mod(q, 2) == 0, tau, 1.0 / tau)
    out = w1 + np.arctan2(np.sin(delta) / t_eff, np.cos(delta) * t_eff)
    return out + (math.pi if sign < 0 else 0.0)


def lift_symmetric_apply(S: LiftedSymmetric, v: LiftedVector) -> LiftedVector:
    arg = float(_symmetric_args(S.tau, S.eigen_arg, S.sign, v.arg))
    mod = float(np.linalg.norm(S.matrix @ np.array([math.cos(v.arg), math.sin(v.arg)]))) * v.modulus
    return LiftedVector(mod, arg)


def _check_non_exceptional(angles):
    if any(a.is_exceptional for a in angles):
        raise GeometryError("lifted words need non-exceptional angles")


def word_args(angles: Sequence[AngleClass], lengths: Sequence[float], sigma, start_arg,
              variant: str = "T"):
    """Raw lifted arguments of W(sigma) v for a grid of sigma.

    variant "T": A(a_n) R(s l_n) ... A(a_1) R(s l_1), equal numbers of angles and lengths.
    variant "U": R(s l_last) followed by the "T" word on the remaining lengths.
    """
    _check_non_exceptional(angles)
    sigma = np.asarray(sigma, float)
    if variant == "U":
        if len(lengths) != len(angles) + 1:
            raise GeometryError("U words need one more length than angles")
        body, last = lengths[:-1], lengths[-1]
    elif variant == "T":
        if len(lengths) != len(angles):
            raise GeometryError("T words need as many lengths as angles")
        body, last = lengths, None
    else:
        raise ValueError(f"unknown variant {variant!r}")
    theta = np.broadcast_to(np.asarray(start_arg, float), sigma.shape).astype(float)
    for a, l in zip(angles, body):
        S = LiftedSymmetric.vertex(a)
        theta = _symmetric_args(S.tau, S.eigen_arg, S.sign, theta + sigma * l)
    if last is not None:
        theta = theta + sigma * last
    return theta


def negative_count(angles: Sequence[AngleClass]) -> int:
    return sum(1 for a in angles if a.sin_mu < 0)


def lifted_word_arg(angles, lengths, sigma, start: LiftedVector, variant: str = "T"):
    """Final lifted argument of the word applied to ``start`` (raw, no normalisation)."""
    out = word_args(angles, lengths, sigma, start.arg, variant)
    return float(out) if np.ndim(out) == 0 else out


def _positive_word_args(angles, lengths, sigma, start_arg, variant):
    return word_args(angles, lengths, sigma, start_arg, variant) - math.pi * negative_count(angles)


def _bc_arg(bc: str) -> float:
    return ARG_N if bc == "N" else ARG_D


def _x_arg(a: AngleClass) -> float:
    return ARG_X_EVEN if a.parity == 1 else ARG_X_ODD


def _x_perp_arg(a: AngleClass) -> float:
    # X_even is orthogonal to X_odd; the lifts are the ones fixed by the start-count rules
    return ARG_X_ODD if a.parity == 1 else ARG_X_EVEN


def _floor(x):
    # guards values that should be integers but sit an ulp below
    x = np.asarray(x, float)
    return np.floor(x + 1e-12 * np.maximum(1.0, np.abs(x)))


def phi_zigzag(z: ZigzagSpec, sigma):
    _check_non_exceptional(z.angles)
    out = (_positive_word_args(z.angles, z.lengths, sigma, _bc_arg(z.bc_start), "U")
           - _bc_arg(z.bc_end)) / math.pi
    return float(out) if np.ndim(out) == 0 else out


def zigzag_count(z: ZigzagSpec, sigma):
    """Natural-enumeration counting function, right-continuous; dispatches on exceptional angles."""
    if z.is_exceptional:
        return exceptional_zigzag_counting(z, sigma)
    return zigzag_counting(z, sigma)


def zigzag_counting(z: ZigzagSpec, sigma):
    phi = np.asarray(phi_zigzag(z, sigma))
    out = _floor(phi) + (1 if z.bc_start == "N" else 0)
    return int(out) if out.ndim == 0 else out.astype(int)


def phi_component(component: Component, sigma):
    """Argument function of an exceptional component between two exceptional vertices."""
    out = (_positive_word_args(component.angles, component.lengths, sigma, _x_arg(component.left), "U")
           - _x_perp_arg(component.right)) / math.pi
    return float(out) if np.ndim(out) == 0 else out


def component_count(component: Component, sigma):
    """Half-integer valued counting function of one exceptional component."""
    offset = {(-1, -1): 0.0, (1, 1): 1.0}.get((component.left.parity, component.right.parity), 0.5)
    return _floor(phi_component(component, sigma)) + offset


def _endpoint_start_count(interior, lengths, bc, exc: AngleClass, sigma):
    phi = (_positive_word_args(interior, lengths, sigma, _bc_arg(bc), "U") - _x_perp_arg(exc)) / math.pi
    odd = exc.parity == -1
    offset = {("D", True): -0.5, ("D", False): 0.0, ("N", True): 0.5, ("N", False): 1.0}[(bc, odd)]
    return _floor(phi) + offset


def _endpoint_end_count(interior, lengths, exc: AngleClass, bc, sigma):
    phi = (_positive_word_args(interior, lengths, sigma, _x_arg(exc), "U") - _bc_arg(bc)) / math.pi
    return _floor(phi) + (0.5 if exc.parity == -1 else 1.0)


def exceptional_zigzag_counting(z: ZigzagSpec, sigma):
    first, middle, last = zigzag_components(z)
    total = _endpoint_start_count(first[0], first[1], z.bc_start, first[2], sigma)
    for comp in middle:
        total = total + component_count(comp, sigma)
    total = total + _endpoint_end_count(last[0], last[1], last[2], z.bc_end, sigma)
    out = np.rint(total)
    return int(out) if np.ndim(out) == 0 else out.astype(int)


@dataclass(frozen=True)
class PreservedDirections:
    args: tuple[float, float]
    degenerate: bool

    @property
    def vectors(self) -> tuple[LiftedVector, LiftedVector]:
        return tuple(LiftedVector(1.0, a) for a in self.args)


def preserved_directions_from_matrix(M: np.ndarray) -> PreservedDirections:
    """Two unit directions v with |Mv| = |v|, for M of determinant one."""
    G = M.T @ M
    w, V = np.linalg.eigh(G)
    s = w[1]
    # det M = 1, so the eigenvalues of G are s and 1/s
    if s * s - 1.0 < ROTATION_TOL:
        return PreservedDirections((0.0, HALF), True)
    a, b = math.sqrt(1.0 / (s + 1.0)), math.sqrt(s / (s + 1.0))
    out = []
    for sgn in (1.0, -1.0):
        v = a * V[:, 1] + sgn * b * V[:, 0]
        out.append(math.atan2(v[1], v[0]) % math.pi)
    return PreservedDirections((out[0], out[1]), False)


def norm_preserved_directions(p: PolygonSpec, sigma: float) -> PreservedDirections:
    return preserved_directions_from_matrix(polygon_transfer(p, float(sigma)).sharp)


def delta_functions(p: PolygonSpec, sigma):
    """Lifted rotation angles of T along its two norm-preserved directions (positive parts)."""
    _check_non_exceptional(p.angles)
    sig = np.atleast_1d(np.asarray(sigma, float))
    out = np.empty((sig.size, 2))
    neg = negative_count(p.angles)
    for i, s in enumerate(sig):
        dirs = preserved_directions_from_matrix(polygon_transfer(p, float(s)).sharp)
        for j, t in enumerate(dirs.args):
            out[i, j] = float(word_args(p.angles, p.lengths, s, t, "T")) - math.pi * neg - t
    return out[0] if np.ndim(sigma) == 0 else out


def psi_functions(p: PolygonSpec, sigma):
    return delta_functions(p, sigma) / (2.0 * math.pi)


def polygon_counting(p: PolygonSpec, sigma):
    """Quasi-eigenvalue counting function #{sigma_m <= sigma} of a polygon.

    With an even number of negative vertex maps this is [psi_1] + [psi_2] + 1,
    with an odd number [psi_1 + 1/2] + [psi_2 + 1/2]. Exceptional polygons are
    counted component by component.
    """
    if p.is_exceptional:
        return exceptional_polygon_counting(p, sigma)
    psi = np.atleast_2d(psi_functions(p, sigma))
    if negative_count(p.angles) % 2:
        out = _floor(psi[:, 0] + 0.5) + _floor(psi[:, 1] + 0.5)
    else:
        out = _floor(psi[:, 0]) + _floor(psi[:, 1]) + 1
    out = out.astype(int)
    return int(out[0]) if np.ndim(sigma) == 0 else out


def exceptional_polygon_counting(p: PolygonSpec, sigma):
    total = 0.0
    for comp in decompose(p).components:
        total = total + component_count(comp, sigma)
    out = np.rint(total)
    return int(out) if np.ndim(out) == 0 else out.astype(int)
