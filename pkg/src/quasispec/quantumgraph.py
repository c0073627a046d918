"""The boundary as a quantum graph: scattering matrices, secular determinant, shooting oracle.

The shooting oracle works with the real state (f, f'/sigma) of a solution of
-f'' = sigma^2 f on each edge. Along an edge the state is rotated, at a vertex
it is scaled by the matching conditions. It shares no code with the
trigonometric-polynomial route.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import brentq

from .geometry import AngleClass, PolygonSpec, decompose
from .rootfind import TOUCH_TOL, ScanOptions, Spectrum, _merge, hidden_pair_roots, near_any
from .trigpoly import polygon_amplitude_scale, polygon_char_poly


@dataclass(frozen=True)
class ScatteringPair:
    vertex_matrix: np.ndarray
    edge_matrix: np.ndarray


def vertex_scattering(p: PolygonSpec) -> np.ndarray:
    n = p.n
    S = np.zeros((2 * n, 2 * n))
    for j, a in enumerate(p.angles):
        c, s = a.cos_mu, a.sin_mu
        S[2 * j:2 * j + 2, 2 * j:2 * j + 2] = [[-c, s], [s, c]]
    return S


def edge_scattering(p: PolygonSpec, sigma: float) -> np.ndarray:
    n = p.n
    E = np.zeros((2 * n, 2 * n), dtype=complex)
    ph = np.exp(-1j * sigma * np.asarray(p.lengths))
    E[0, 2 * n - 1] = E[2 * n - 1, 0] = ph[0]
    for j in range(1, n):
        E[2 * j - 1, 2 * j] = E[2 * j, 2 * j - 1] = ph[j]
    return E


def scattering_pair(p: PolygonSpec, sigma: float) -> ScatteringPair:
    return ScatteringPair(vertex_scattering(p), edge_scattering(p, sigma))


def secular_det(p: PolygonSpec, sigma: float) -> complex:
    """det(Sc_v Sc_e(sigma) - I) through an LU factorisation."""
    M = vertex_scattering(p) @ edge_scattering(p, sigma) - np.eye(2 * p.n)
    with warnings.catch_warnings():
        # an exactly singular matrix is a legitimate answer here: the determinant is 0
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=False)
    swaps = np.count_nonzero(piv != np.arange(piv.size))
    return complex((-1) ** swaps * np.prod(np.diag(lu)))


def secular_residual(p: PolygonSpec, sigmas) -> float:
    """sup |secular_det - 2 exp(-i sigma L) F^P(sigma)| over the given points."""
    fp = polygon_char_poly(p)
    L = p.perimeter
    sig = np.asarray(sigmas, float)
    lhs = np.array([secular_det(p, s) for s in sig])
    rhs = 2.0 * np.exp(-1j * sig * L) * fp.eval_real(sig)
    return float(np.max(np.abs(lhs - rhs)))


# --- shooting oracle -------------------------------------------------------

def _rotation(theta):
    """R(-theta), stacked along leading axes when theta is an array."""
    c, s = np.cos(theta), np.sin(theta)
    return np.moveaxis(np.array([[c, s], [-s, c]]), (0, 1), (-2, -1))


def _vertex_scaling(a: AngleClass) -> np.ndarray:
    half = math.pi ** 2 / (4.0 * a.value)
    if a.kind == "special":
        # exact values avoid 1e-16 noise in tan at odd multiples of pi/4
        t = float(a.parity)
    else:
        t = math.tan(half)
    return np.diag([1.0 / t, t])


def _chain_state(angles, lengths, sigma: float, start: np.ndarray) -> np.ndarray:
    """State at the end of a chain of edges separated by non-exceptional vertices."""
    sigma = np.asarray(sigma, float)
    v = np.broadcast_to(start, sigma.shape + (2,))[..., None]
    for a, l in zip(angles, lengths[:-1]):
        v = _vertex_scaling(a) @ (_rotation(sigma * l) @ v)
    return (_rotation(sigma * lengths[-1]) @ v)[..., 0]


def cycle_monodromy(p: PolygonSpec, sigma) -> np.ndarray:
    sigma = np.asarray(sigma, float)
    M = np.broadcast_to(np.eye(2), sigma.shape + (2, 2))
    for a, l in zip(p.angles, p.lengths):
        M = _vertex_scaling(a) @ _rotation(sigma * l) @ M
    return M


def _component_shoot(comp, sigma: float) -> float:
    # O = +1 at a vertex: Dirichlet on the incoming side, Neumann on the outgoing one
    start = np.array([1.0, 0.0]) if comp.left.parity == 1 else np.array([0.0, 1.0])
    v = _chain_state(comp.angles, comp.lengths, sigma, start)
    return v[..., 0] if comp.right.parity == 1 else v[..., 1]


def _scan_sign_changes(g, xs, tol):
    """(roots, touches, samples); g is evaluated on the whole grid, then pointwise."""
    vals = np.asarray(g(xs), float)
    touch = TOUCH_TOL * max(1.0, float(np.max(np.abs(vals))))
    gf = lambda x: float(g(x))
    out = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        out.append(brentq(gf, xs[i], xs[i + 1], xtol=tol(xs[i])))
    pairs, touches = hidden_pair_roots(gf, xs, vals, tol, touch)
    return sorted(out + pairs), touches, vals


def graph_laplacian_spectrum(p: PolygonSpec, sigma_max: float = 50.0,
                             opts: ScanOptions | None = None) -> Spectrum:
    """Square roots of the Laplacian eigenvalues of the boundary cycle, with multiplicity."""
    opts = opts or ScanOptions(sigma_max=sigma_max)
    tol = lambda x: opts.refine_tol * max(1.0, abs(x))
    entries = []
    if not p.is_exceptional:
        L = p.perimeter
        if abs(math.prod(_vertex_scaling(a)[1, 1] for a in p.angles) - 1.0) < 1e-9:
            entries.append((0.0, 1, "graph"))
        xs = np.linspace(0.0, sigma_max, int(math.ceil(sigma_max * L / opts.step_factor)) + 1)
        xs[0] = min(1e-9, xs[1] / 2)
        tr = lambda s: np.trace(cycle_monodromy(p, s), axis1=-2, axis2=-1) - 2.0
        off = lambda s: float(cycle_monodromy(p, s)[0, 1])
        simple, touches, tvals = _scan_sign_changes(tr, xs, tol)
        ovals = cycle_monodromy(p, xs)[:, 0, 1]
        doubles = []
        for i in np.nonzero(np.sign(ovals[:-1]) * np.sign(ovals[1:]) < 0)[0]:
            if np.sign(tvals[i]) * np.sign(tvals[i + 1]) < 0:
                continue
            x = brentq(off, xs[i], xs[i + 1], xtol=tol(xs[i]))
            M = cycle_monodromy(p, x)
            if np.max(np.abs(M - np.eye(2))) < 1e-6 * max(1.0, np.max(np.abs(M))):
                doubles.append(x)
        entries += [(x, 2, "graph") for x in doubles]
        entries += [(x, 1, "graph") for x in simple if not near_any(x, doubles)]
        entries += [(x, 2, "graph") for x in touches if not near_any(x, doubles)]
        return Spectrum(_merge(entries, lambda x: 100 * tol(x)), sigma_max)
    dec = decompose(p)
    nn = sum(1 for c in dec.components if c.left.parity == 1 and c.right.parity == -1)
    if nn:
        entries.append((0.0, nn, "graph"))
    for kappa, comp in enumerate(dec.components, start=1):
        xs = np.linspace(0.0, sigma_max, int(math.ceil(sigma_max * comp.length / opts.step_factor)) + 1)
        xs[0] = min(1e-9, xs[1] / 2)
        roots, touches, _ = _scan_sign_changes(lambda s: _component_shoot(comp, s), xs, tol)
        entries += [(x, 1, f"graph{kappa}") for x in roots]
        entries += [(x, 2, f"graph{kappa}") for x in touches]
    return Spectrum(_merge(entries, lambda x: 100 * tol(x)), sigma_max)


def path_condition(angles, lengths, bc_start: str, bc_end: str, sigma):
    """Shooting function of the open path; zero at zigzag quasi-eigenvalues.

    The vertex scalings are diagonal in the frame of the two special vectors,
    where the Neumann vector is (1, -1) and the Dirichlet vector (1, 1).
    """
    vec = {"N": np.array([1.0, -1.0]), "D": np.array([1.0, 1.0])}
    v = _chain_state(angles, lengths, sigma, vec[bc_start])
    # v parallel to the end vector: its component along the orthogonal one vanishes
    w = vec["D" if bc_end == "N" else "N"]
    return v[..., 0] * w[0] + v[..., 1] * w[1]


@dataclass(frozen=True)
class DiracReport:
    symmetric: bool
    max_asymmetry: float
    zero_order_even: bool
    positive_count: int


def dirac_symmetry_check(p: PolygonSpec, sigma_grid) -> DiracReport:
    """Root set of F^P is symmetric about zero and zero is a root of even order."""
    fp = polygon_char_poly(p)
    sig = np.asarray(sigma_grid, float)
    sig = sig[sig >= 0]
    asym = float(np.max(np.abs(fp.eval_real(sig) - fp.eval_real(-sig)))) if sig.size else 0.0
    scale = polygon_amplitude_scale(p)
    d1 = fp.derivative()
    zero_even = abs(float(d1.eval_real(0.0))) < 1e-9 * scale * max(1.0, fp.max_frequency())
    vals = fp.eval_real(sig)
    pos = int(np.count_nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0))
    return DiracReport(asym < 1e-9 * scale, asym, zero_even, pos)
