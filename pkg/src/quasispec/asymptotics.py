"""Counting function, first Riesz mean, heat trace and Weyl residual of a quasi-spectrum."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from .geometry import PolygonSpec
from .rootfind import Spectrum


class TruncationError(ValueError):
    """The computed spectrum does not reach far enough for the requested statistic."""


def _flat(spectrum) -> np.ndarray:
    if isinstance(spectrum, Spectrum):
        return spectrum.flat()
    return np.sort(np.asarray(spectrum, float))


def counting(spectrum, sigma):
    """#{sigma_m <= sigma}."""
    vals = _flat(spectrum)
    out = np.searchsorted(vals, np.asarray(sigma, float), side="right")
    return int(out) if np.ndim(out) == 0 else out


def riesz_mean(spectrum, lam: float) -> float:
    """R(lambda) = sum (lambda - sigma_m)_+ with multiplicity."""
    if isinstance(spectrum, Spectrum) and lam > spectrum.sigma_max:
        raise TruncationError(f"spectrum known up to {spectrum.sigma_max}, asked for {lam}")
    vals = _flat(spectrum)
    return math.fsum(lam - v for v in vals if v < lam)


def heat_tail_bound(perimeter: float, n: int, t: float, sigma_max: float) -> float:
    """Bound on sum_{sigma > S} e^{-t sigma} from N(sigma) <= L sigma/pi + n + 2."""
    L, S = perimeter, sigma_max
    return math.exp(-t * S) * (L * S / math.pi + L / (math.pi * t) + n + 2)


def heat_trace(spectrum: Spectrum, t: float, perimeter: float, n: int, check: bool = True):
    """(sum e^{-t sigma_m}, bound on the truncated tail)."""
    if not t > 0:
        raise ValueError("t must be positive")
    vals = _flat(spectrum)
    value = math.fsum(np.exp(-t * vals))
    tail = heat_tail_bound(perimeter, n, t, spectrum.sigma_max)
    if check and tail > 0.01 * value:
        raise TruncationError("heat-trace tail too large: increase sigma_max")
    return value, tail


def weyl_residual(spectrum: Spectrum, perimeter: float, sigma_max: float | None = None) -> float:
    """sup over [0, S] of |N(sigma) - L sigma/pi|, exact at the jumps."""
    S = spectrum.sigma_max if sigma_max is None else sigma_max
    vals = _flat(spectrum)
    vals = vals[vals <= S]
    pts, mult = np.unique(vals, return_counts=True)
    before = np.cumsum(np.concatenate([[0], mult[:-1]])) if pts.size else np.zeros(0)
    after = before + mult
    k = perimeter / math.pi
    cand = [abs(counting(vals, 0.0) - 0.0)]
    if pts.size:
        cand.append(float(np.max(np.abs(before - k * pts))))
        cand.append(float(np.max(np.abs(after - k * pts))))
    cand.append(abs(vals.size - k * S))
    return max(cand)


@dataclass(frozen=True)
class SpectrumStats:
    counting_grid: np.ndarray
    counting_values: np.ndarray
    riesz_grid: np.ndarray
    riesz_values: np.ndarray
    weyl_residual: float


def spectrum_stats(spectrum: Spectrum, p: PolygonSpec, grid) -> SpectrumStats:
    grid = np.asarray(grid, float)
    lam = grid[grid <= spectrum.sigma_max]
    return SpectrumStats(grid, counting(spectrum, grid), lam,
                         np.array([riesz_mean(spectrum, x) for x in lam]),
                         weyl_residual(spectrum, p.perimeter))


def detect_period(p: PolygonSpec, max_denominator: int = 10 ** 6):
    """(M, T) for commensurable side lengths: l_j = n_j u, T = 2 pi/u, M = L T/pi.

    Returns None when the reconstructed ratios do not reproduce the lengths.
    """
    l1 = p.lengths[0]
    fracs = [Fraction(l / l1).limit_denominator(max_denominator) for l in p.lengths]
    for f, l in zip(fracs, p.lengths):
        if abs(float(f) * l1 - l) > 1e-12 * max(1.0, l):
            return None
    den = math.lcm(*[f.denominator for f in fracs])
    nums = [f.numerator * (den // f.denominator) for f in fracs]
    g = math.gcd(*nums)
    u = l1 / den * g
    T = 2.0 * math.pi / u
    M = round(p.perimeter * T / math.pi)
    return M, T


def riesz_curve(spectrum, z):
    """Vectorised R(z) = N(z) z - sum_{sigma_m <= z} sigma_m."""
    vals = _flat(spectrum)
    csum = np.concatenate([[0.0], np.cumsum(vals)])
    k = np.searchsorted(vals, np.asarray(z, float), side="right")
    return k * np.asarray(z, float) - csum[k]


def heat_from_riesz(spectrum: Spectrum, t: float, step: float = 1e-3) -> float:
    """t^2 int_0^S R(z) e^{-zt} dz by the trapezoid rule, the heat trace rebuilt from R."""
    z = np.arange(0.0, spectrum.sigma_max + step / 2, step)
    return t * t * float(integrate.trapezoid(riesz_curve(spectrum, z) * np.exp(-t * z), z))
