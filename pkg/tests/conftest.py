"""Shared fixtures: the expensive sieve tables and series are built once
per session and shared across test modules."""

import pytest

from gbavg.goldbach import r2_direct, r2_fft
from gbavg.mangoldt import build_mangoldt
from gbavg.zeros import load_zeros


@pytest.fixture(scope="session")
def zeros():
    return load_zeros()


@pytest.fixture(scope="session")
def table600():
    return build_mangoldt(600)


@pytest.fixture(scope="session")
def small_series(table600):
    return r2_direct(table600, 210)


@pytest.fixture(scope="session")
def big_table():
    # large enough for the widest scan grid (2^23) and every psi-drift
    # integral the suite touches
    return build_mangoldt(1 << 23)


@pytest.fixture(scope="session")
def big_series(big_table):
    return r2_fft(big_table, 1 << 23)


@pytest.fixture(scope="session")
def series_100k(big_table):
    return r2_fft(big_table, 100_000)
