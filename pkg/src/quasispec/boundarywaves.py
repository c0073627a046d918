"""Boundary quasi-waves: piecewise trigonometric traces built from transfer-matrix eigenvectors.

On side j the wave is 2 Re(c_j e^{i sigma s}) for s in [-l_j, 0], where s = 0 is
the end vertex V_j and c_j is the coefficient incoming into V_j. All integrals
are evaluated in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import GeometryError, PolygonSpec, ZigzagSpec, decompose, zigzag_components
from .transfer import (ConjVector, bc_vector, perp, polygon_transfer, side_matrix,
                       special_vector, vertex_matrix)
from .trigpoly import component_char_poly, polygon_char_poly, f_pair


@dataclass(frozen=True)
class BoundaryQuasiWave:
    sigma: float
    lengths: tuple[float, ...]
    c_in: tuple[complex, ...]
    c_out: tuple[complex, ...]
    label: str = ""

    def trace(self, side: int, s):
        """Value on side ``side`` at local coordinate s in [-l, 0]."""
        return 2.0 * np.real(self.c_in[side] * np.exp(1j * self.sigma * np.asarray(s, float)))

    def sample(self, points_per_side: int = 50):
        """(arc length from V_0, value) over the whole boundary."""
        out_s, out_v, start = [], [], 0.0
        for j, l in enumerate(self.lengths):
            s = np.linspace(-l, 0.0, points_per_side, endpoint=False)
            out_s.append(start + l + s)
            out_v.append(self.trace(j, s))
            start += l
        return np.concatenate(out_s), np.concatenate(out_v)


def _segment_integral(omega, length):
    """int_{-l}^0 exp(i omega s) ds."""
    return np.exp(-0.5j * omega * length) * length * np.sinc(omega * length / (2.0 * math.pi))


def _pair_integral(a: complex, b: complex, s1: float, s2: float, length: float) -> float:
    """int_{-l}^0 2Re(a e^{i s1 s}) 2Re(b e^{i s2 s}) ds."""
    return 2.0 * float(np.real(a * b * _segment_integral(s1 + s2, length)
                               + a * np.conj(b) * _segment_integral(s1 - s2, length)))


def edge_masses_raw(sigma, lengths, c_in) -> np.ndarray:
    return np.array([_pair_integral(c, c, sigma, sigma, l) for c, l in zip(c_in, lengths)])


def wave_inner_product(w1: BoundaryQuasiWave, w2: BoundaryQuasiWave) -> float:
    if w1.lengths != w2.lengths:
        raise GeometryError("waves live on different boundaries")
    return math.fsum(_pair_integral(a, b, w1.sigma, w2.sigma, l)
                     for a, b, l in zip(w1.c_in, w2.c_in, w1.lengths))


def edge_mass_distribution(w: BoundaryQuasiWave) -> np.ndarray:
    m = edge_masses_raw(w.sigma, w.lengths, w.c_in)
    return m / m.sum()


def _normalised(sigma, lengths, c_in, c_out, label) -> BoundaryQuasiWave:
    norm = math.sqrt(edge_masses_raw(sigma, lengths, c_in).sum())
    if not norm > 0:
        raise GeometryError("wave vanishes identically")
    return BoundaryQuasiWave(float(sigma), tuple(lengths), tuple(complex(c) / norm for c in c_in),
                             tuple(complex(c) / norm for c in c_out), label)


def _propagate_cycle(p: PolygonSpec, sigma: float, seed: complex):
    c_in, c_out, prev = [], [], ConjVector(seed)
    for a, l in zip(p.angles, p.lengths):
        cin = side_matrix(l, sigma) @ prev
        cout = vertex_matrix(a) @ cin
        c_in.append(complex(cin.c))
        c_out.append(complex(cout.c))
        prev = cout
    return c_in, c_out


def _real_null_space(M: np.ndarray, tol: float):
    """Orthonormal basis (as complex numbers) of the near-kernel of a real 2x2 matrix."""
    U, s, Vt = np.linalg.svd(M)
    scale = max(1.0, s[0])
    basis = [Vt[k] for k in range(2) if s[k] <= tol * scale]
    if not basis:
        basis = [Vt[1]]
    return [complex(v[0], v[1]) for v in basis], s


def _gram_schmidt(vectors, inner):
    out = []
    for v in vectors:
        for u in out:
            v = v - inner(u, v) * u
        n = math.sqrt(inner(v, v))
        if n > 1e-10:
            out.append(v / n)
    return out


def polygon_waves(p: PolygonSpec, sigma: float, double_tol: float = 1e-6) -> list[BoundaryQuasiWave]:
    """An L2-orthonormal basis of the quasi-waves at a quasi-eigenvalue."""
    if p.is_exceptional:
        return _exceptional_polygon_waves(p, sigma)
    scale = max(f_pair(p.angles, p.lengths)[0].amplitude_sum(), 1.0)
    if abs(float(polygon_char_poly(p).eval_real(sigma))) > 1e-6 * scale:
        raise GeometryError(f"{sigma!r} is not a quasi-eigenvalue")
    T = polygon_transfer(p, sigma).sharp
    seeds, _ = _real_null_space(T - np.eye(2), double_tol)
    raw = []
    for b in seeds:
        c_in, c_out = _propagate_cycle(p, sigma, b)
        raw.append(np.array(c_in + c_out))
    n = p.n
    inner = lambda u, v: math.fsum(_pair_integral(a, b, sigma, sigma, l)
                                   for a, b, l in zip(u[:n], v[:n], p.lengths))
    basis = _gram_schmidt(raw, inner)
    return [BoundaryQuasiWave(float(sigma), p.lengths, tuple(v[:n]), tuple(v[n:]), f"wave{k + 1}")
            for k, v in enumerate(basis)]


def solve_wave(p: PolygonSpec, sigma_m: float, orthogonal_to: BoundaryQuasiWave | None = None):
    """One normalised quasi-wave; with ``orthogonal_to`` the second wave of a double."""
    waves = polygon_waves(p, sigma_m)
    if orthogonal_to is None:
        return waves[0]
    for w in waves:
        if abs(wave_inner_product(w, orthogonal_to)) < 1e-8:
            return w
    raise GeometryError("no second independent wave at this quasi-eigenvalue")


def _chain_wave(interior, lengths, sigma, seed: ConjVector):
    c_in, c_out, prev = [], [], seed
    for j, l in enumerate(lengths):
        cin = side_matrix(l, sigma) @ prev
        c_in.append(complex(cin.c))
        if j < len(interior):
            prev = vertex_matrix(interior[j]) @ cin
            c_out.append(complex(prev.c))
    return c_in, c_out


def _exceptional_polygon_waves(p: PolygonSpec, sigma: float, tol: float = 1e-6):
    """One wave per vanishing component, supported on that component only."""
    n = p.n
    out = []
    for kappa, comp in enumerate(decompose(p).components, start=1):
        if sigma == 0.0:
            # constants survive only where the graph problem is Neumann at both ends
            if not (comp.left.parity == 1 and comp.right.parity == -1):
                continue
        else:
            f = component_char_poly(comp)
            if abs(float(f.eval_real(sigma))) > tol * max(f.amplitude_sum(), 1.0):
                continue
        seed = special_vector(comp.left)
        c_in, c_out = _chain_wave(comp.angles, comp.lengths, sigma, seed)
        full_in, full_out = [0j] * n, [0j] * n
        for k, c in enumerate(c_in):
            full_in[(comp.first_side + k) % n] = c
        for k, c in enumerate(c_out):
            full_out[(comp.first_side + k) % n] = c
        full_out[(comp.first_side - 1) % n] = complex(seed.c)
        out.append(_normalised(sigma, p.lengths, full_in, full_out, f"component{kappa}"))
    if not out:
        raise GeometryError(f"{sigma!r} is not a quasi-eigenvalue")
    return out


def transfer_residual(p: PolygonSpec, w: BoundaryQuasiWave) -> float:
    """Largest violation of the side and vertex transfer laws."""
    res = 0.0
    for j, a in enumerate(p.angles):
        cin = complex((side_matrix(p.lengths[j], w.sigma) @ ConjVector(w.c_out[j - 1])).c)
        res = max(res, abs(cin - w.c_in[j]))
        if a.is_exceptional:
            x = special_vector(a)
            res = max(res, abs(ConjVector(w.c_in[j]).dot(x)),
                      abs(ConjVector(w.c_out[j]).dot(perp(x))))
        else:
            res = max(res, abs(complex((vertex_matrix(a) @ ConjVector(w.c_in[j])).c) - w.c_out[j]))
    return res


def zigzag_wave(z: ZigzagSpec, sigma: float, tol: float = 1e-6) -> list[BoundaryQuasiWave]:
    """Quasi-waves of a zigzag with Neumann (2cos) or Dirichlet (-2sin) start."""
    n = z.n
    if not z.is_exceptional:
        c_in, c_out = _chain_wave(z.angles, z.lengths, sigma, bc_vector(z.bc_start))
        end = ConjVector(c_in[-1]).dot(perp(bc_vector(z.bc_end)))
        if abs(end) > tol * max(1.0, max(abs(c) for c in c_in)):
            raise GeometryError(f"{sigma!r} is not a zigzag quasi-eigenvalue")
        return [_normalised(sigma, z.lengths, c_in, c_out + [0j], "zigzag")]
    first, middle, last = zigzag_components(z)
    pieces = [(first[0], first[1], bc_vector(z.bc_start), special_vector(first[2]), 0)]
    for comp in middle:
        pieces.append((comp.angles, comp.lengths, special_vector(comp.left), special_vector(comp.right),
                       comp.first_side))
    pieces.append((last[0], last[1], special_vector(last[2]), perp(bc_vector(z.bc_end)), n - len(last[1])))
    out = []
    for k, (interior, lengths, seed, target, first_side) in enumerate(pieces):
        c_in, c_out = _chain_wave(interior, lengths, sigma, seed)
        if abs(ConjVector(c_in[-1]).dot(target)) > tol * max(1.0, max(abs(c) for c in c_in)):
            continue
        if sigma == 0.0 and abs(sum(abs(np.real(c)) for c in c_in)) < 1e-12:
            continue
        fin = [0j] * n
        fout = [0j] * n
        for i, c in enumerate(c_in):
            fin[first_side + i] = c
        for i, c in enumerate(c_out):
            fout[first_side + i] = c
        out.append(_normalised(sigma, z.lengths, fin, fout, f"piece{k + 1}"))
    if not out:
        raise GeometryError(f"{sigma!r} is not a zigzag quasi-eigenvalue")
    return out
