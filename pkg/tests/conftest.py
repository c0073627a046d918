import math

import numpy as np
import pytest

from quasispec.geometry import PolygonSpec

PI = math.pi


def random_polygon(rng, n_max=8, exceptional=False, lo=0.2, hi=PI - 0.1):
    n = int(rng.integers(1, n_max + 1))
    angles = list(rng.uniform(lo, hi, n))
    lengths = list(rng.uniform(0.3, 2.0, n))
    if exceptional:
        for _ in range(int(rng.integers(1, 3))):
            angles[int(rng.integers(0, n))] = PI / (2 * int(rng.integers(1, 4)))
    return PolygonSpec.from_values(angles, lengths)


def random_polygons(seed, count, **kw):
    rng = np.random.default_rng(seed)
    return [random_polygon(rng, **kw) for _ in range(count)]


def multiset_close(a, b, tol):
    a, b = np.sort(np.asarray(a, float)), np.sort(np.asarray(b, float))
    return a.size == b.size and (a.size == 0 or float(np.max(np.abs(a - b))) <= tol)


def multiset_gap(a, b):
    a, b = np.sort(np.asarray(a, float)), np.sort(np.asarray(b, float))
    if a.size != b.size:
        return math.inf
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def trim_to_common(a, b, edge, sigma_max):
    """Drop values within ``edge`` of sigma_max from both lists, so scan-boundary roots don't decide."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    return a[a < sigma_max - edge], b[b < sigma_max - edge]


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    import sys

    results = getattr(sys.modules.get("test_acceptance"), "RESULTS", None)
    if results:
        terminalreporter.section("acceptance summary")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
