"""Locating quasi-eigenvalues as real roots of the characteristic polynomials."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .geometry import GeometryError, PolygonSpec, ZigzagSpec, decompose, zigzag_components
from .transfer import bc_vector, perp, special_vector
from .trigpoly import (ExpPolynomial, component_char_poly, endpoint_condition_poly,
                       polygon_amplitude_scale, polygon_char_poly, f_pair, zigzag_char_poly)


@dataclass(frozen=True)
class ScanOptions:
    sigma_max: float = 50.0
    step_factor: float = 0.05
    refine_tol: float = 1e-12
    double_root_tol: float = 1e-7

    def __post_init__(self):
        for name in ("sigma_max", "step_factor", "refine_tol", "double_root_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class QuasiEigenvalue:
    sigma: float
    multiplicity: int
    provenance: str = "boundary"
    index: int = 0


@dataclass(frozen=True)
class Spectrum:
    """Sorted quasi-eigenvalues that are complete on [0, sigma_max]."""

    values: tuple[QuasiEigenvalue, ...]
    sigma_max: float

    def flat(self) -> np.ndarray:
        """Each value repeated by its multiplicity."""
        return np.repeat([v.sigma for v in self.values],
                         [v.multiplicity for v in self.values]).astype(float)

    def __len__(self):
        return len(self.values)


# an extremum this close to zero, relative to the amplitude scale, is at
# rounding level: its sign carries no information and it counts as a touch
TOUCH_TOL = 1e-11


def bisect_root(f: Callable[[float], float], a: float, b: float, tol: Callable[[float], float],
                fa: float | None = None, max_iter: int = 200) -> float:
    """Plain bisection on a sign change; ``tol`` maps the midpoint to an absolute width."""
    fa = f(a) if fa is None else fa
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        if b - a <= tol(m) or m == a or m == b:
            return m
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def _root_order(f: ExpPolynomial, x: float, tol: float, max_order: int = 6) -> int:
    """Smallest k with the k-th derivative at x clearly non-zero."""
    g = f
    for k in range(max_order):
        scale = float(np.sum(np.abs(g.amps))) or 1.0
        if abs(complex(g(x))) > tol * scale:
            return max(k, 1)
        g = g.derivative()
    return max_order


def _shared_root(g: ExpPolynomial, x: float, thresh: float) -> bool:
    """Whether g vanishes at x itself, not merely close by.

    Near exceptional angles g can be small at x while its own zero sits a short
    but resolvable distance away; one Newton step measures that distance.
    """
    gx = abs(float(g.eval_real(x)))
    if gx >= thresh:
        return False
    dg = abs(float(g.derivative().eval_real(x)))
    return dg < thresh or gx <= 1e-11 * max(1.0, abs(x)) * dg


def scan_real_roots(f: ExpPolynomial, interval: tuple[float, float], step: float,
                    refine_tol: float = 1e-12, double_root_tol: float = 1e-7,
                    scale: float | None = None):
    """All real roots of a real-valued exponential sum on a closed interval.

    Returns (root, order) pairs. Sign changes on the grid are bisected. Cells in
    which the derivative changes sign are split at the critical point: a
    critical value at rounding level (``TOUCH_TOL * scale``) is a root of even
    order, otherwise each half is searched for its own sign change.
    """
    a, b = map(float, interval)
    if not b > a:
        raise ValueError("degenerate interval")
    if scale is None:
        scale = f.amplitude_sum() or 1.0
    tol = lambda x: refine_tol * max(1.0, abs(x))
    touch = TOUCH_TOL * scale
    n = max(2, int(math.ceil((b - a) / step)) + 1)
    xs = np.linspace(a, b, n)
    ys = f.eval_real(xs)
    df = f.derivative()
    ds = df.eval_real(xs)
    fr = lambda x: float(f.eval_real(x))
    dr = lambda x: float(df.eval_real(x))
    found = []
    zero = np.abs(ys) <= 0.0
    for i in np.nonzero(zero)[0]:
        found.append(float(xs[i]))
    sgn = np.sign(ys)
    dsg = np.sign(ds)
    turning = set(np.nonzero(dsg[:-1] * dsg[1:] < 0)[0].tolist())
    for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
        if i not in turning:
            found.append(bisect_root(fr, xs[i], xs[i + 1], tol, ys[i]))
    # cells where f turns: split at the critical point, which also catches
    # two close roots inside one cell and roots of even order
    for i in sorted(turning):
        c = bisect_root(dr, xs[i], xs[i + 1], tol, ds[i])
        fc = fr(c)
        if abs(fc) <= touch:
            found.append(c)
            continue
        for lo, hi, flo, fhi in ((xs[i], c, ys[i], fc), (c, xs[i + 1], fc, ys[i + 1])):
            if flo * fhi < 0:
                found.append(bisect_root(fr, lo, hi, tol, flo))
    # tangential roots exactly at the ends of the interval
    for x, d in ((a, ds[0]), (b, ds[-1])):
        if abs(ys[0 if x == a else -1]) <= touch and abs(d) <= touch * max(1.0, f.max_frequency()):
            found.append(x)
    found.sort()
    merged: list[float] = []
    for x in found:
        if merged and x - merged[-1] <= 100 * tol(x):
            continue
        merged.append(x)
    return [(x, _root_order(f, x, double_root_tol)) for x in merged]


def hidden_pair_roots(g: Callable[[float], float], xs: np.ndarray, vals: np.ndarray,
                      xtol: Callable[[float], float], touch: float):
    """Root pairs that hide between grid samples of the same sign.

    At each discrete extremum of the samples the true extremum is located with a
    bounded scalar minimisation; if its value has the opposite sign, both roots
    are bracketed and refined. Returns (roots, touches), where touches are
    extrema within ``touch`` of zero: double roots, or pairs closer than
    rounding can separate.
    """
    out, touches = [], []
    d = np.diff(vals)
    for i in np.nonzero(d[:-1] * d[1:] < 0)[0] + 1:
        if not (np.sign(vals[i - 1]) == np.sign(vals[i]) == np.sign(vals[i + 1]) != 0):
            continue
        sgn = np.sign(vals[i])
        a, b = float(xs[i - 1]), float(xs[i + 1])
        res = minimize_scalar(lambda x: sgn * g(x), bounds=(a, b), method="bounded",
                              options={"xatol": xtol(b)})
        c, gc = float(res.x), float(g(res.x))
        if abs(gc) <= touch:
            touches.append(c)
            continue
        if np.sign(gc) == sgn:
            continue
        out.append(brentq(g, a, c, xtol=xtol(c)))
        out.append(brentq(g, c, b, xtol=xtol(c)))
    return out, touches


def near_any(x: float, points, width: float = 1e-8) -> bool:
    return any(abs(x - y) <= width * max(1.0, abs(x)) for y in points)


def _step(opts: ScanOptions, length: float) -> float:
    return opts.step_factor / max(length, 1e-300)


def _merge(entries, tol_fn) -> tuple[QuasiEigenvalue, ...]:
    entries = sorted(entries, key=lambda e: e[0])
    out: list[list] = []
    for s, m, prov in entries:
        if out and s - out[-1][0] <= tol_fn(s):
            out[-1][1] += m
            if prov not in out[-1][2].split("+"):
                out[-1][2] += "+" + prov
        else:
            out.append([s, m, prov])
    res, idx = [], 1
    for s, m, prov in out:
        res.append(QuasiEigenvalue(float(s), int(m), prov, idx))
        idx += m
    return tuple(res)


def polygon_spectrum(p: PolygonSpec, opts: ScanOptions = ScanOptions()) -> Spectrum:
    L = p.perimeter
    tol = lambda x: 100 * opts.refine_tol * max(1.0, abs(x))
    entries = []
    if not p.is_exceptional:
        fp = polygon_char_poly(p)
        F, _ = f_pair(p.angles, p.lengths)
        fodd = F.imag_part()
        scale = polygon_amplitude_scale(p)
        if abs(float(fp.eval_real(0.0))) <= TOUCH_TOL * scale:
            entries.append((0.0, 1, "boundary"))
        for x, _ in scan_real_roots(fp, (0.0, opts.sigma_max), _step(opts, L), opts.refine_tol,
                                    opts.double_root_tol, scale):
            if x <= tol(0.0):
                continue
            mult = 2 if _shared_root(fodd, x, opts.double_root_tol * scale) else 1
            entries.append((x, mult, "boundary"))
        return Spectrum(_merge(entries, tol), opts.sigma_max)
    dec = decompose(p)
    if dec.n_odd:
        entries.append((0.0, dec.n_odd // 2, "odd-components"))
    for kappa, comp in enumerate(dec.components, start=1):
        f = component_char_poly(comp)
        scale = f.amplitude_sum() or 1.0
        for x, _ in scan_real_roots(f, (0.0, opts.sigma_max), _step(opts, comp.length),
                                    opts.refine_tol, opts.double_root_tol, scale):
            if x > tol(0.0):
                entries.append((x, 1, f"component{kappa}"))
    return Spectrum(_merge(entries, tol), opts.sigma_max)


def zigzag_polynomials(z: ZigzagSpec):
    """(label, polynomial) pairs whose roots make up the zigzag quasi-spectrum."""
    if not z.is_exceptional:
        return [("zigzag", zigzag_char_poly(z))]
    first, middle, last = zigzag_components(z)
    polys = [("endpoint-start", endpoint_condition_poly(first[0], first[1], bc_vector(z.bc_start),
                                                        special_vector(first[2])))]
    for k, comp in enumerate(middle, start=2):
        polys.append((f"component{k}", component_char_poly(comp)))
    polys.append(("endpoint-end", endpoint_condition_poly(last[0], last[1], special_vector(last[2]),
                                                          perp(bc_vector(z.bc_end)))))
    return polys


def zigzag_spectrum(z: ZigzagSpec, opts: ScanOptions = ScanOptions(), count_at_zero: int | None = None):
    """Zigzag quasi-eigenvalues in natural enumeration.

    The count at sigma = 0 comes from the universal-cover counting function; a
    positive count pulls in the non-positive roots closest to zero, a negative
    one drops the first positive roots.
    """
    from .enumeration import zigzag_count

    n0 = zigzag_count(z, 0.0) if count_at_zero is None else count_at_zero
    tol = lambda x: 100 * opts.refine_tol * max(1.0, abs(x))
    pos, nonpos = [], []
    L = z.length
    for label, f in zigzag_polynomials(z):
        scale = f.amplitude_sum() or 1.0
        step = _step(opts, L)
        for x, _ in scan_real_roots(f, (0.0, opts.sigma_max), step, opts.refine_tol,
                                    opts.double_root_tol, scale):
            (nonpos if x <= tol(0.0) else pos).append((0.0 if x <= tol(0.0) else x, label))
        if n0 > 0:
            lo, got = 0.0, []
            while len(got) < n0 and lo > -200.0 * math.pi / L:
                hi, lo = lo, lo - 4.0 * math.pi / L
                got = [r for r, _ in scan_real_roots(f, (lo, hi), step, opts.refine_tol,
                                                     opts.double_root_tol, scale) if r < -tol(0.0)] + got
            nonpos.extend((r, label) for r in got)
    pos.sort()
    nonpos.sort(key=lambda e: -e[0])
    if n0 >= 0:
        if len(nonpos) < n0:
            raise GeometryError("not enough non-positive roots for the natural enumeration")
        seq = sorted(nonpos[:n0]) + pos
    else:
        seq = pos[-n0:]
    values = tuple(QuasiEigenvalue(float(s), 1, label, i + 1) for i, (s, label) in enumerate(seq))
    return Spectrum(values, opts.sigma_max)


def spectrum_from_values(values, sigma_max: float, provenance: str = "reference",
                         tol: float = 1e-11) -> Spectrum:
    """Group a flat list of values (with repeats) into a Spectrum."""
    entries = [(float(v), 1, provenance) for v in values if v <= sigma_max + tol]
    return Spectrum(_merge(entries, lambda x: tol * max(1.0, abs(x))), sigma_max)


def transfer_trace_spectrum(p: PolygonSpec, opts: ScanOptions = ScanOptions()) -> Spectrum:
    """Matrix route: roots of Tr T - 2, multiplicity 2 where T is the identity."""
    from .transfer import polygon_transfer, vertex_matrix

    if p.is_exceptional:
        raise GeometryError("trace route needs non-exceptional angles")
    L = p.perimeter
    g = lambda s: polygon_transfer(p, s).trace - 2.0
    off = lambda s: np.imag(polygon_transfer(p, s).p)
    tol = lambda x: opts.refine_tol * max(1.0, abs(x))
    xs = np.linspace(0.0, opts.sigma_max, int(math.ceil(opts.sigma_max / _step(opts, L))) + 1)
    T = polygon_transfer(p, xs)
    gs = T.trace - 2.0
    os_ = np.imag(T.p)
    scale = float(np.max(np.abs(T.p)))
    touch = TOUCH_TOL * max(1.0, scale)
    entries = []
    if abs(gs[0]) <= touch:
        entries.append((0.0, 1, "trace"))
    gf = lambda s: float(g(s))
    of = lambda s: float(off(s))
    for i in np.nonzero(np.sign(gs[:-1]) * np.sign(gs[1:]) < 0)[0]:
        entries.append((brentq(gf, xs[i], xs[i + 1], xtol=tol(xs[i])), 1, "trace"))
    # doubles: T = Id, found where Im p changes sign while Tr T - 2 stays put
    # T is a product with large cancellations near exceptional angles
    rounding = 1e-12 * math.prod(np.linalg.norm(vertex_matrix(a).sharp, 2) for a in p.angles)
    doubles = []
    for i in np.nonzero(np.sign(os_[:-1]) * np.sign(os_[1:]) < 0)[0]:
        if np.sign(gs[i]) * np.sign(gs[i + 1]) < 0:
            continue
        x = brentq(of, xs[i], xs[i + 1], xtol=tol(xs[i]))
        M = polygon_transfer(p, x)
        if x > 1e-9 and abs(complex(M.p) - 1.0) + abs(complex(M.q)) < 1e-6 * max(1.0, abs(M.p)) + rounding:
            doubles.append(x)
    entries += [(x, 2, "trace") for x in doubles]
    pairs, touches = hidden_pair_roots(gf, xs, gs, tol, touch)
    entries += [(x, 1, "trace") for x in pairs if not near_any(x, doubles)]
    entries += [(x, 2, "trace") for x in touches if not near_any(x, doubles)]
    return Spectrum(_merge(entries, lambda x: 100 * tol(x)), opts.sigma_max)
