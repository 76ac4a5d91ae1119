"""Shared fixtures.

Optimal-design solves dominate the suite's runtime, so they are cached
per session and shared between test modules.  Each cache entry records
the wall time of the original solve; tests with runtime budgets charge
that time, not the (free) cache hit.
"""

import time

import pytest

from optdesign import d_optimal, disk, gaussian_weight, interval, unit_weight


@pytest.fixture(scope="session")
def cheb_interval():
    return interval(a=1.0, grid=401, spacing="chebyshev")


@pytest.fixture(scope="session")
def gauss_disk():
    return disk()


@pytest.fixture(scope="session")
def cached_solve(cheb_interval, gauss_disk):
    """solve(kind, s, epsilon) -> (OptimalResult, seconds of the original solve)."""
    problems = {
        "interval": (cheb_interval, unit_weight()),
        "disk": (gauss_disk, gaussian_weight()),
    }
    cache = {}

    def solve(kind, s, epsilon=1e-5):
        key = (kind, s, epsilon)
        if key not in cache:
            space, weight = problems[kind]
            start = time.perf_counter()
            result = d_optimal(space, weight, s, epsilon=epsilon)
            cache[key] = (result, time.perf_counter() - start)
        return cache[key]

    return solve
