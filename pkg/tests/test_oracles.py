import math

import numpy as np
import pytest

from quasispec.geometry import GeometryError, PolygonSpec
from quasispec.oracles import (all_special_spectrum, bruteforce_F, disk_exact, droplet_spectrum, preset_polygon,
                               preset_reference, regular_polygon_spectrum, sector_spectrum,
                               special_exceptional_spectrum, square_exact_steklov)
from quasispec.rootfind import ScanOptions, polygon_spectrum

PI = math.pi


def test_square_exact_first_values():
    vals = square_exact_steklov(12).values
    assert vals[0] == 0.0
    assert vals[1] == pytest.approx(vals[2])
    assert vals[3] == pytest.approx(2.0)
    # the four families settle near (m - 1/2) pi in clusters of four
    assert np.allclose(vals[4:8], 1.5 * PI, atol=0.1)


def _separated(kind, T):
    """u, u_x, u_y of the separated harmonic functions in centred coordinates."""
    c, s, ch, sh = math.cos, math.sin, math.cosh, math.sinh
    return {
        "cosh-cos": (lambda x, y: ch(T * x) * c(T * y), lambda x, y: T * sh(T * x) * c(T * y),
                     lambda x, y: -T * ch(T * x) * s(T * y)),
        "sinh-sin": (lambda x, y: sh(T * x) * s(T * y), lambda x, y: T * ch(T * x) * s(T * y),
                     lambda x, y: T * sh(T * x) * c(T * y)),
        "sin-cosh": (lambda x, y: s(T * x) * ch(T * y), lambda x, y: T * c(T * x) * ch(T * y),
                     lambda x, y: T * s(T * x) * sh(T * y)),
        "sinh-cos": (lambda x, y: sh(T * x) * c(T * y), lambda x, y: T * ch(T * x) * c(T * y),
                     lambda x, y: -T * sh(T * x) * s(T * y)),
    }[kind]


def _steklov_defect(kind, T, lam):
    u, ux, uy = _separated(kind, T)
    pts = np.linspace(-0.5, 0.5, 11)
    # right side x = 1/2 and top side y = 1/2; the other two follow by parity
    defect = max(abs(ux(0.5, t) - lam * u(0.5, t)) for t in pts)
    defect = max(defect, max(abs(uy(t, 0.5) - lam * u(t, 0.5)) for t in pts))
    scale = max(abs(u(0.5, t)) + abs(u(t, 0.5)) for t in pts)
    return defect / (lam * scale)


def test_square_exact_values_are_steklov_eigenvalues():
    """Every family value admits an explicit separated eigenfunction."""
    from scipy.optimize import brentq

    vals = np.unique(np.round(square_exact_steklov(60).values, 10))
    assert vals[0] == 0.0
    for lam in vals[1:]:
        if lam == 2.0:
            # u = xy: u_x = y = 2u on x = 1/2
            continue
        best = math.inf
        for kind, tanh_form in (("cosh-cos", True), ("sin-cosh", True), ("sinh-sin", False), ("sinh-cos", False)):
            g = (lambda t: 2 * t * math.tanh(t) - lam) if tanh_form else (lambda t: 2 * t / math.tanh(t) - lam)
            if g(1e-8) * g(lam) > 0:
                continue
            t = brentq(g, 1e-8, lam, xtol=1e-15)
            best = min(best, _steklov_defect(kind, 2 * t, lam))
        assert best < 1e-8, lam


def test_square_multiplicities_pair_with_quasi_values():
    exact = square_exact_steklov(40).values
    quasi = polygon_spectrum(preset_polygon("square"), ScanOptions(sigma_max=11 * PI)).flat()[:40]
    assert np.all(np.abs(exact[19:] - quasi[19:]) < 1e-4)


def test_disk_exact():
    assert disk_exact(5).values.tolist() == [0, 1, 1, 2, 2]
    with pytest.raises(ValueError):
        square_exact_steklov(0)


def test_all_special_branches():
    even = PolygonSpec.from_values([PI / 5, PI / 5], [1, 1])  # k sum 4
    ref = all_special_spectrum(even, 10).values
    assert ref[0] == 0 and ref[1] == ref[2] == pytest.approx(PI)
    odd = PolygonSpec.from_values([PI / 3, PI / 5], [1, 1])
    assert all_special_spectrum(odd, 10).values[0] == pytest.approx(PI / 2)
    with pytest.raises(GeometryError):
        all_special_spectrum(PolygonSpec.from_values([1.0], [1.0]))


def test_special_exceptional_matches_rootfind():
    p = PolygonSpec.from_values([PI / 2, PI / 3, PI / 4, PI / 5], [1.0, 0.7, 1.2, 0.4])
    ref = special_exceptional_spectrum(p, 30).values
    got = polygon_spectrum(p, ScanOptions(sigma_max=30)).flat()
    assert ref.size == got.size and np.allclose(ref, got, atol=1e-9)


@pytest.mark.parametrize("n, alpha", [(3, 2.0), (4, 1.3), (6, 2.5), (2, 0.9), (5, 3 * PI / 5), (4, PI / 4)])
def test_regular_polygon_formula(n, alpha):
    p = PolygonSpec.from_values([alpha] * n, [0.8] * n)
    ref = regular_polygon_spectrum(n, alpha, 0.8, 30).values
    got = polygon_spectrum(p, ScanOptions(sigma_max=30)).flat()
    ref, got = ref[ref < 30 - 1e-6], got[got < 30 - 1e-6]
    assert ref.size == got.size and np.allclose(ref, got, atol=1e-9)


def test_droplet_and_sector():
    assert droplet_spectrum(2.0, 20).values.size == polygon_spectrum(
        preset_polygon("droplet:2"), ScanOptions(sigma_max=20)).flat().size
    with pytest.raises(GeometryError):
        sector_spectrum(7.0)


def test_bruteforce_limits():
    with pytest.raises(GeometryError):
        bruteforce_F([1.0] * 17, [1.0] * 17, 1.0)
    assert bruteforce_F([], [], 1.0) == 1.0


def test_unknown_preset():
    with pytest.raises(GeometryError):
        preset_polygon("hexagon")
    with pytest.raises(GeometryError):
        preset_reference("hexagon")
