"""End-to-end acceptance suite. Each check prints one PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) for the summary alone.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import multiset_gap, random_polygons, trim_to_common  # noqa: E402
from quasispec.asymptotics import heat_trace, riesz_mean, weyl_residual  # noqa: E402
from quasispec.boundarywaves import (edge_mass_distribution, polygon_waves, transfer_residual,  # noqa: E402
                                     wave_inner_product)
from quasispec.enumeration import (delta_functions, phi_zigzag, polygon_counting, psi_functions,  # noqa: E402
                                   zigzag_count)
from quasispec.geometry import PolygonSpec, ZigzagSpec  # noqa: E402
from quasispec.oracles import bruteforce_F, preset_polygon, square_exact_steklov  # noqa: E402
from quasispec.quantumgraph import graph_laplacian_spectrum, secular_residual  # noqa: E402
from quasispec.rootfind import (ScanOptions, polygon_spectrum, transfer_trace_spectrum,  # noqa: E402
                                zigzag_spectrum)
from quasispec.trigpoly import f_pair, f_pair_direct, polygon_amplitude_scale  # noqa: E402

PI = math.pi
RESULTS = {}
PRESETS = ("triangle-equilateral", "square", "pentagon", "T1", "T2", "droplet:2", "sector:2")


def record(number, title, ok, detail):
    line = f"[{number}] {title}: {'PASS' if ok else 'FAIL'} ({detail})"
    RESULTS[number] = line
    print(line)
    return ok


def _progression(start, step, top, mult=1, first=0):
    out, m = [], first
    while start + m * step <= top + 1e-12:
        if start + m * step >= -1e-12:
            out += [max(start + m * step, 0.0)] * mult
        m += 1
    return out


# --- closed-form spectra ---------------------------------------------------

def closed_form_references(top):
    """Formulas of the worked examples, written out independently of the library."""
    refs = {
        "triangle-equilateral": _progression(PI / 3, 2 * PI / 3, top, 2),
        "square": _progression(PI / 2, PI, top, 4),
        "T1": [0.0] + _progression(PI, PI, top, 2)
        + _progression(PI / (2 * math.sqrt(2)), PI / math.sqrt(2), top),
        "T2": _progression(PI / 6, PI / 3, top) + _progression(PI / (2 * math.sqrt(3)), PI / math.sqrt(3), top),
    }
    pent = []
    for sgn in (1, -1):
        base = math.acos((sgn * math.sqrt(5) - 1) / 8)
        pent += _progression(base, 2 * PI, top, 2) + _progression(-base, 2 * PI, top, 2, first=1)
    pent += _progression(PI / 3, 2 * PI, top) + _progression(-PI / 3, 2 * PI, top, first=1)
    refs["pentagon"] = pent
    for alpha in (2.0, PI / 3, PI / 2, 0.7, 3 * PI / 4, 2.9):
        c = PI / 2 - PI ** 2 / (2 * alpha)
        vals = [c + 2 * PI * m for m in range(int(top / (2 * PI)) + 3)]
        vals += [-c + 2 * PI * m for m in range(int(top / (2 * PI)) + 3)]
        refs[f"droplet:{alpha!r}"] = [v for v in vals if -1e-12 <= v <= top]
    return refs


def check_closed_forms():
    top = 60.0
    start = time.perf_counter()
    worst, bad = 0.0, []
    for name, ref in closed_form_references(top).items():
        p = preset_polygon(name)
        got = polygon_spectrum(p, ScanOptions(sigma_max=top)).flat()
        a, b = trim_to_common(got, ref, 1e-6, top)
        gap = multiset_gap(a, b)
        worst = max(worst, gap)
        if not gap < 1e-9:
            bad.append(name)
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 5.0
    return ok, f"max gap {worst:.2e}, {elapsed:.2f}s" + (f", mismatched {bad}" if bad else "")


# --- three routes ------------------------------------------------------------

def acceptance_polygons():
    return (random_polygons(11, 25, n_max=8)
            + random_polygons(12, 25, n_max=8, exceptional=True))


def check_three_routes():
    top = 50.0
    worst, bad = 0.0, 0
    for p in acceptance_polygons():
        opts = ScanOptions(sigma_max=top)
        base = polygon_spectrum(p, opts).flat()
        others = [graph_laplacian_spectrum(p, top, opts).flat()]
        if not p.is_exceptional:
            others.append(transfer_trace_spectrum(p, opts).flat())
        for other in others:
            a, b = trim_to_common(base, other, 1e-6, top)
            gap = multiset_gap(a, b)
            worst = max(worst, gap)
            bad += not gap < 1e-8
    return bad == 0, f"50 polygons, max gap {worst:.2e}, {bad} disagreements"


def check_secular_identity():
    grid = np.arange(0.0, 50.0 + 1e-9, 0.01)
    worst = 0.0
    for p in acceptance_polygons():
        worst = max(worst, secular_residual(p, grid) / polygon_amplitude_scale(p))
    return worst < 1e-9, f"max residual / sum|p| = {worst:.2e}"


def check_recurrence():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 11))
        p = PolygonSpec.from_values(rng.uniform(0.2, PI - 0.1, n), rng.uniform(0.3, 2.0, n))
        sigma = float(rng.uniform(0.0, 50.0))
        rec = complex(f_pair(p.angles, p.lengths)[0](sigma))
        direct = complex(f_pair_direct(p.angles, p.lengths)[0](sigma))
        brute = bruteforce_F(p.angles, p.lengths, sigma)
        worst = max(worst, abs(rec - direct), abs(rec - brute))
    return worst < 1e-11, f"max |recurrence - direct| = {worst:.2e}"


# --- enumeration ----------------------------------------------------------

def _grid_away_from(roots, top, step=0.01, gap=1e-9):
    xs = np.arange(0.005, top, step)
    if len(roots):
        r = np.asarray(roots)
        near = np.min(np.abs(xs[:, None] - r[None, :]), axis=1) < gap
        xs = xs[~near]
    return xs


def check_enumeration():
    top = 20.0
    failures = []
    for k, p in enumerate(random_polygons(21, 20, n_max=6)):
        flat = polygon_spectrum(p, ScanOptions(sigma_max=top + 1)).flat()
        xs = _grid_away_from(flat, top)
        if np.any(polygon_counting(p, xs) != np.searchsorted(flat, xs, side="right")):
            failures.append(f"polygon{k}")
    rng = np.random.default_rng(22)
    for k in range(12):
        n = int(rng.integers(1, 5))
        angles, lengths = rng.uniform(0.2, PI - 0.1, n - 1), rng.uniform(0.3, 2.0, n)
        for bc in ("NN", "ND", "DN", "DD"):
            z = ZigzagSpec.from_values(angles, lengths, bc[0], bc[1])
            flat = zigzag_spectrum(z, ScanOptions(sigma_max=top + 1)).flat()
            xs = _grid_away_from(flat, top)
            # a negative count at zero lists nothing until it climbs back to zero
            listed = np.maximum(zigzag_count(z, xs), 0)
            if np.any(listed != np.searchsorted(flat, xs, side="right")):
                failures.append(f"zigzag{k}{bc}")
    for ell in (1.0, 0.7, 2.3):
        xs = np.arange(0.003, top, 0.01)
        x = ell * xs / PI
        one_side = {"NN": np.floor(x) + 1, "DD": np.floor(x), "ND": np.floor(x + 0.5), "DN": np.floor(x + 0.5)}
        for bc, ref in one_side.items():
            if np.any(zigzag_count(ZigzagSpec.from_values([], [ell], bc[0], bc[1]), xs) != ref):
                failures.append(f"segment{ell}{bc}")
    for alpha in (0.4 * PI, 0.7 * PI, 1.3, PI / 3, 2.5):
        c = PI ** 2 / (2 * alpha) / (2 * PI)
        for ell in (1.0, 0.6):
            xs = np.arange(0.003, top, 0.01)
            t = 2 * ell * xs / (2 * PI)
            nn = np.floor(t + 0.75 - c) + np.floor(t + 0.75 + c)
            dd = np.floor(t + 0.25 - c) + np.floor(t + 0.25 + c)
            if np.any(zigzag_count(ZigzagSpec.from_values([alpha], [ell, ell], "N", "N"), xs) != nn):
                failures.append(f"two-sided NN {alpha:.3f}")
            if np.any(zigzag_count(ZigzagSpec.from_values([alpha], [ell, ell], "D", "D"), xs) != dd):
                failures.append(f"two-sided DD {alpha:.3f}")
    return not failures, "all counts agree" if not failures else f"mismatches: {failures[:6]}"


# --- square benchmark -----------------------------------------------------

def square_differences(count=200):
    quasi = polygon_spectrum(preset_polygon("square"), ScanOptions(sigma_max=(count / 4 + 1) * PI)).flat()
    exact = square_exact_steklov(count).values
    return np.abs(exact - quasi[:count])


def check_square_benchmark():
    start = time.perf_counter()
    diff = square_differences(200)
    elapsed = time.perf_counter() - start
    window = diff[19:]  # m = 20 .. 200
    trailing = np.maximum.accumulate(window[::-1])[::-1]
    monotone = bool(np.all(np.diff(trailing) <= 0))
    ok = float(window.max()) < 1e-4 and monotone and elapsed < 10.0
    return ok, (f"max |diff| for m>=20 = {window.max():.2e}, at m=200 {diff[-1]:.1e}, "
                f"trailing max non-increasing={monotone}, {elapsed:.2f}s")


# --- Weyl, Riesz, heat ----------------------------------------------------

def check_weyl_riesz_heat():
    top = 200.0
    notes, ok = [], True
    for name in PRESETS:
        p = preset_polygon(name)
        L = p.perimeter
        spec = polygon_spectrum(p, ScanOptions(sigma_max=top))
        weyl = weyl_residual(spec, L)
        riesz = abs(riesz_mean(spec, top) / top ** 2 - L / (2 * PI)) / (L / (2 * PI))
        heat, tail = heat_trace(spec, 0.05, L, p.n, check=False)
        heat_err = abs(0.05 * heat * PI / L - 1)
        good = weyl <= p.n + 2 and riesz < 0.02 and heat_err < 0.05 and tail < 0.01 * heat
        ok &= good
        if not good:
            notes.append(f"{name}: weyl {weyl:.2f}, riesz {riesz:.3%}, heat {heat_err:.3%}, tail {tail:.1e}")
    return ok, f"{len(PRESETS)} presets" + (f"; {notes}" if notes else "")


# --- waves ----------------------------------------------------------------

def _preset_waves(name, count=100):
    p = preset_polygon(name)
    spec = polygon_spectrum(p, ScanOptions(sigma_max=60.0))
    waves = []
    for q in spec.values:
        if q.sigma == 0.0 or len(waves) >= count:
            continue
        waves += polygon_waves(p, q.sigma)
    return p, waves[:count]


def triangle_mass_constant(waves):
    """Smallest C with |mass_j - 1/3| <= C/sigma for every side and wave."""
    return max(float(np.max(np.abs(edge_mass_distribution(w) - 1 / 3))) * w.sigma for w in waves)


def check_waves():
    problems = []
    worst_res = worst_norm = worst_orth = 0.0
    for name in PRESETS:
        p, waves = _preset_waves(name)
        for w in waves:
            worst_res = max(worst_res, transfer_residual(p, w))
            worst_norm = max(worst_norm, abs(wave_inner_product(w, w) - 1))
        for i, w in enumerate(waves):
            for v in waves[i + 1:]:
                worst_orth = max(worst_orth, abs(wave_inner_product(w, v)) * (w.sigma + v.sigma))
        if name == "triangle-equilateral":
            C = triangle_mass_constant([w for w in waves if w.sigma <= 30])
            tail = [w for w in waves if w.sigma > 30]
            if not all(np.max(np.abs(edge_mass_distribution(w) - 1 / 3)) <= C / w.sigma + 1e-12 for w in tail):
                problems.append("triangle masses")
        if name == "square":
            for w in waves:
                if np.count_nonzero(edge_mass_distribution(w)) != 1:
                    problems.append("square support")
                    break
    ok = worst_res < 1e-9 and worst_norm < 1e-10 and worst_orth <= 8 and not problems
    detail = f"residual {worst_res:.1e}, norm {worst_norm:.1e}, max |<u,v>|(s+t) {worst_orth:.2f} (bound 8)"
    return ok, detail + (f", {problems}" if problems else "")


# --- monotonicity ---------------------------------------------------------

def check_monotonicity():
    problems = []
    xs = np.linspace(0.01, 30.0, 3001)
    polys = random_polygons(31, 10, n_max=6) + [preset_polygon("pentagon"), preset_polygon("triangle-equilateral")]
    for k, p in enumerate(polys):
        d = delta_functions(p, xs)
        if not np.all(np.diff(d, axis=0) > 0):
            problems.append(f"delta{k}")
        if not np.all(np.diff(psi_functions(p, xs), axis=0) > 0):
            problems.append(f"psi{k}")
    rng = np.random.default_rng(32)
    for k in range(10):
        n = int(rng.integers(1, 5))
        for bc in ("NN", "ND", "DN", "DD"):
            z = ZigzagSpec.from_values(rng.uniform(0.2, PI - 0.1, n - 1), rng.uniform(0.3, 2.0, n), bc[0], bc[1])
            if not np.all(np.diff(phi_zigzag(z, xs)) > 0):
                problems.append(f"phi{k}{bc}")
    top = 25.0
    for name in PRESETS:
        p = preset_polygon(name)
        base = polygon_spectrum(p, ScanOptions(sigma_max=top)).flat()
        for _ in range(20):
            lengths = list(p.lengths)
            j = int(rng.integers(0, p.n))
            lengths[j] *= 1 + float(rng.uniform(0.01, 0.3))
            bigger = polygon_spectrum(p.with_lengths(lengths), ScanOptions(sigma_max=top)).flat()
            if bigger.size < base.size or np.any(bigger[:base.size] > base + 1e-9):
                problems.append(f"domain {name}")
                break
    return not problems, "all increments positive" if not problems else f"failures: {problems[:6]}"


CHECKS = {
    1: ("closed-form spectra", check_closed_forms),
    2: ("three computation routes agree", check_three_routes),
    3: ("secular determinant identity", check_secular_identity),
    4: ("recurrence vs direct sum", check_recurrence),
    5: ("counting functions vs root lists", check_enumeration),
    6: ("square against exact eigenvalues", check_square_benchmark),
    7: ("Weyl, Riesz and heat asymptotics", check_weyl_riesz_heat),
    8: ("boundary quasi-wave properties", check_waves),
    9: ("monotonicity", check_monotonicity),
}


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_acceptance(number):
    title, fn = CHECKS[number]
    ok, detail = fn()
    record(number, title, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    results = [record(k, t, *fn()) for k, (t, fn) in sorted(CHECKS.items())]
    sys.exit(0 if all(results) else 1)
