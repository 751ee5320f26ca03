import math
import shutil

import numpy as np
import pytest

from outage_io.fixtures import data_dir, two_region_table, two_sector_table


def random_economy(rng, n=None, max_col_sum=0.9, spread=3.0):
    """Random productive economy with positive output, balanced by construction.

    Column sums of A are at most ``max_col_sum`` so the spectral radius is too.
    Returns ``(A, F, x, v)``.
    """
    if n is None:
        n = int(rng.integers(1, 21))
    A = rng.random((n, n)) * (rng.random((n, n)) < 0.7)
    col = A.sum(axis=0)
    target = rng.uniform(0.05, max_col_sum, size=n)
    A = np.where(col > 0, A / np.where(col > 0, col, 1.0) * target, 0.0)
    F = 10.0 ** rng.uniform(0, spread, size=n)
    x = np.linalg.solve(np.eye(n) - A, F)
    v = x * (1.0 - A.sum(axis=0))
    return A, F, x, v


def neumann_inverse(A, rho_bound, tol=1e-10):
    """Truncated power series sum_k A^k, long enough that rho^K < tol."""
    K = max(1, math.ceil(math.log(tol) / math.log(rho_bound))) if rho_bound > 0 else 1
    n = A.shape[0]
    total = np.eye(n)
    term = np.eye(n)
    for _ in range(K):
        term = term @ A
        total += term
    return total


@pytest.fixture
def two_sector():
    return two_sector_table()


@pytest.fixture
def two_region():
    return two_region_table(coupled=True)


@pytest.fixture
def two_region_block():
    return two_region_table(coupled=False)


@pytest.fixture
def data():
    return data_dir()


@pytest.fixture
def data_copy(tmp_path, data):
    dst = tmp_path / "data"
    shutil.copytree(data, dst)
    return dst


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
