"""Closed-form reference spectra and exact Steklov eigenvalues used as ground truth."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .geometry import GeometryError, PolygonSpec, classify_angle, decompose
from .trigpoly import p_coefficient, sign_vectors

PI = math.pi


@dataclass(frozen=True)
class ReferenceSpectrum:
    """Sorted values, each repeated by its multiplicity."""

    values: np.ndarray
    source: str

    @classmethod
    def build(cls, pairs, source: str, sigma_max: float | None = None, tol: float = 1e-12):
        """From (value, multiplicity) pairs; equal values are merged."""
        vals = []
        for v, m in pairs:
            if sigma_max is None or v <= sigma_max + tol:
                vals.extend([float(v)] * int(m))
        return cls(np.sort(np.array(vals, float)), source)

    def __len__(self):
        return self.values.size

    def upto(self, sigma_max: float) -> np.ndarray:
        return self.values[self.values <= sigma_max]


def _progression(start: float, step: float, sigma_max: float):
    m = 0
    while start + m * step <= sigma_max + 1e-12:
        yield start + m * step
        m += 1


def all_special_spectrum(p: PolygonSpec, sigma_max: float = 60.0) -> ReferenceSpectrum:
    if not all(a.is_special for a in p.angles):
        raise GeometryError("all angles must be special")
    L = p.perimeter
    if sum(a.k for a in p.angles) % 2 == 0:
        pairs = [(0.0, 1)] + [(v, 2) for v in _progression(2 * PI / L, 2 * PI / L, sigma_max)]
    else:
        pairs = [(v, 2) for v in _progression(PI / L, 2 * PI / L, sigma_max)]
    return ReferenceSpectrum.build(pairs, "all-special", sigma_max)


def special_exceptional_spectrum(p: PolygonSpec, sigma_max: float = 60.0) -> ReferenceSpectrum:
    """Every angle special or exceptional, at least one exceptional."""
    if not all(a.is_special or a.is_exceptional for a in p.angles):
        raise GeometryError("angles must be special or exceptional")
    dec = decompose(p)
    pairs = [(0.0, dec.n_odd // 2)] if dec.n_odd else []
    for comp in dec.components:
        L = comp.length
        start = PI / L if comp.odd else PI / (2 * L)
        pairs += [(v, 1) for v in _progression(start, PI / L, sigma_max)]
    return ReferenceSpectrum.build(pairs, "special-exceptional", sigma_max)


def regular_polygon_spectrum(n: int, alpha: float, ell: float, sigma_max: float = 60.0) -> ReferenceSpectrum:
    """Quasi-regular n-gon: all angles alpha, all sides ell."""
    a = classify_angle(alpha)
    if a.is_exceptional:
        pairs = [(v, n) for v in _progression(PI / (2 * ell), PI / ell, sigma_max)]
        return ReferenceSpectrum.build(pairs, "regular-exceptional", sigma_max)
    found: dict[float, int] = {}
    keys: list[float] = []

    def add(v, mult):
        for k in keys:
            if abs(k - v) <= 1e-11 * max(1.0, v):
                return
        keys.append(v)
        found[v] = mult

    for q in range(n // 2 + 1):
        base = math.acos(max(-1.0, min(1.0, a.sin_mu * math.cos(2 * PI * q / n))))
        m = 0
        while (2 * PI * m - base) / ell <= sigma_max + 1e-12:
            for sgn in (1, -1):
                v = (sgn * base + 2 * PI * m) / ell
                if v < -1e-12 or v > sigma_max + 1e-12:
                    continue
                v = max(v, 0.0)
                single = ((not a.is_special and q == 0)
                          or (not a.is_special and n % 2 == 0 and q == n // 2)
                          or (a.is_special and a.parity == 1 and q == 0 and m == 0)
                          or (a.is_special and a.parity == -1 and n % 2 == 0 and q == n // 2 and m == 0))
                add(v, 1 if single else 2)
            m += 1
    return ReferenceSpectrum.build(sorted(found.items()), "regular", sigma_max)


def droplet_spectrum(alpha: float, sigma_max: float = 60.0) -> ReferenceSpectrum:
    """One-gon of perimeter one: +-(pi/2 - pi^2/(2 alpha)) + 2 pi m, single."""
    c = PI / 2 - PI ** 2 / (2 * alpha)
    pairs = []
    m = 0
    while 2 * PI * m - abs(c) <= sigma_max + 1e-12:
        for v in {c + 2 * PI * m, -c + 2 * PI * m}:
            if -1e-12 <= v <= sigma_max + 1e-12:
                pairs.append((max(v, 0.0), 1))
        m += 1
    return ReferenceSpectrum.build(pairs, "droplet", sigma_max)


def sector_spectrum(alpha: float, sigma_max: float = 60.0) -> ReferenceSpectrum:
    """Circular sector of radius one and opening alpha.

    The arc gives pi(m - 1/2)/alpha. The two radii with the corner between them
    give +-arccos(cos mu)/2 shifted by multiples of pi (not 2 pi: the pair of
    radii has total length two).
    """
    if not 0 < alpha < 2 * PI:
        raise GeometryError("sector opening must lie in (0, 2pi)")
    half = 0.5 * math.acos(math.cos(PI ** 2 / (2 * alpha)))
    pairs = [(v, 1) for v in _progression(PI / (2 * alpha), PI / alpha, sigma_max)]
    pairs += [(v, 1) for v in _progression(half, PI, sigma_max)]
    pairs += [(v, 1) for v in _progression(PI - half, PI, sigma_max)]
    return ReferenceSpectrum.build(pairs, "sector", sigma_max)


def t1_spectrum(sigma_max: float = 60.0) -> ReferenceSpectrum:
    pairs = [(0.0, 1)] + [(v, 2) for v in _progression(PI, PI, sigma_max)]
    pairs += [(v, 1) for v in _progression(PI / (2 * math.sqrt(2)), PI / math.sqrt(2), sigma_max)]
    return ReferenceSpectrum.build(pairs, "T1", sigma_max)


def t2_spectrum(sigma_max: float = 60.0) -> ReferenceSpectrum:
    pairs = [(v, 1) for v in _progression(PI / 6, PI / 3, sigma_max)]
    pairs += [(v, 1) for v in _progression(PI / (2 * math.sqrt(3)), PI / math.sqrt(3), sigma_max)]
    return ReferenceSpectrum.build(pairs, "T2", sigma_max)


# --- exact Steklov eigenvalues ---------------------------------------------

# each equation tan t = g(t) written without poles, scaled by 1/cosh
_SQUARE_BRANCHES = (
    ("tanh", lambda t: math.sin(t) + math.cos(t) * math.tanh(t)),      # tan t = -tanh t
    ("tanh", lambda t: math.sin(t) * math.tanh(t) - math.cos(t)),      # tan t = coth t
    ("coth", lambda t: math.sin(t) - math.cos(t) * math.tanh(t)),      # tan t = tanh t
    ("coth", lambda t: math.sin(t) * math.tanh(t) + math.cos(t)),      # tan t = -coth t
)


def _square_family_roots(g, k_max: int):
    out = []
    for k in range(k_max + 1):
        a, b = max((k - 0.5) * PI, 0.0), (k + 0.5) * PI
        lo, hi = a + 1e-13 * max(1.0, a) if a > 0 else 1e-9, b
        ga, gb = g(lo), g(hi)
        if ga == 0.0:
            continue
        if ga * gb < 0:
            out.append(brentq(g, lo, hi, xtol=1e-15, maxiter=200))
    return out


def square_exact_steklov(count: int) -> ReferenceSpectrum:
    """First ``count`` Steklov eigenvalues of the unit square, with multiplicity.

    In centred coordinates the families come from the separated solutions
    cosh(Tx)cos(Ty), sinh(Tx)sin(Ty), sin(Tx)cosh(Ty), sinh(Tx)cos(Ty) with
    t = T/2. Each solution has an independent partner with x and y swapped, so
    every family value is double. 0 (constants) and 2 (the function xy) are
    simple.
    """
    if count < 1:
        raise ValueError("count must be positive")
    k_max = count // 4 + 4
    pairs = [(0.0, 1), (2.0, 1)]
    for kind, g in _SQUARE_BRANCHES:
        for t in _square_family_roots(g, k_max):
            lam = 2 * t * math.tanh(t) if kind == "tanh" else 2 * t / math.tanh(t)
            pairs.append((lam, 2))
    ref = ReferenceSpectrum.build(pairs, "square-exact")
    return ReferenceSpectrum(ref.values[:count], ref.source)


def disk_exact(count: int) -> ReferenceSpectrum:
    """0, 1, 1, 2, 2, ... for the unit disk."""
    vals = [0.0] + [float(m) for m in range(1, count) for _ in range(2)]
    return ReferenceSpectrum(np.array(vals[:count]), "disk-exact")


def bruteforce_F(angles, lengths, sigma) -> complex:
    """F_n(sigma) as the explicit sum over sign vectors (n <= 16)."""
    n = len(angles)
    if n > 16:
        raise GeometryError("brute force limited to n <= 16")
    if n != len(lengths):
        raise GeometryError("need as many lengths as angles")
    if n == 0:
        return 1.0 + 0j
    ell = np.asarray(lengths, float)
    total = 0j
    for z in sign_vectors(n):
        total += p_coefficient(angles, z) * np.exp(1j * float(np.dot(ell, z)) * sigma)
    return complex(total)


# --- presets ---------------------------------------------------------------

def _regular(n, alpha, ell=1.0):
    return PolygonSpec.from_values([alpha] * n, [ell] * n)


def preset_polygon(name: str) -> PolygonSpec:
    """Polygons of the worked examples; ``droplet:<alpha>`` and ``sector:<alpha>`` take an angle."""
    from .geometry import parse_angle_value

    if name == "triangle-equilateral":
        return _regular(3, PI / 3)
    if name == "square":
        return _regular(4, PI / 2)
    if name == "pentagon":
        return _regular(5, 3 * PI / 5)
    if name == "T1":
        return PolygonSpec.from_values([PI / 4, PI / 4, PI / 2], [1.0, math.sqrt(2), 1.0])
    if name == "T2":
        return PolygonSpec.from_values([PI / 3, PI / 6, PI / 2], [1.0, 2.0, math.sqrt(3)])
    if name.startswith("droplet:"):
        return PolygonSpec.from_values([parse_angle_value(name.split(":", 1)[1])], [1.0])
    if name.startswith("sector:"):
        a = parse_angle_value(name.split(":", 1)[1])
        return PolygonSpec.from_values([a, PI / 2, PI / 2], [1.0, 1.0, a])
    raise GeometryError(f"unknown preset {name!r}")


PRESET_NAMES = ("triangle-equilateral", "square", "pentagon", "T1", "T2", "droplet:<alpha>", "sector:<alpha>")


def preset_reference(name: str, sigma_max: float = 60.0) -> ReferenceSpectrum:
    from .geometry import parse_angle_value

    if name == "triangle-equilateral":
        return all_special_spectrum(preset_polygon(name), sigma_max)
    if name == "square":
        return regular_polygon_spectrum(4, PI / 2, 1.0, sigma_max)
    if name == "pentagon":
        return regular_polygon_spectrum(5, 3 * PI / 5, 1.0, sigma_max)
    if name == "T1":
        return t1_spectrum(sigma_max)
    if name == "T2":
        return t2_spectrum(sigma_max)
    if name.startswith("droplet:"):
        return droplet_spectrum(parse_angle_value(name.split(":", 1)[1]), sigma_max)
    if name.startswith("sector:"):
        return sector_spectrum(parse_angle_value(name.split(":", 1)[1]), sigma_max)
    raise GeometryError(f"unknown preset {name!r}")
