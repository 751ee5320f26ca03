import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from outage_io import _kernels as k

pytestmark = pytest.mark.skipif(k.numba is None, reason="numba not installed")

ND = -9999.0

cells = arrays(
    float,
    st.tuples(st.integers(1, 12), st.integers(1, 12)),
    elements=st.one_of(st.floats(-50, 1e4), st.just(ND), st.just(float("nan"))),
)


def same(a, b):
    np.testing.assert_array_equal(np.asarray(a), np.asarray(b))


@settings(max_examples=100, deadline=None)
@given(cells)
def test_clamp(g):
    a, b = g.copy(), g.copy()
    assert k.clamp_negative_nb(a, ND) == k.clamp_negative_np(b, ND)
    same(a, b)


@settings(max_examples=100, deadline=None)
@given(cells)
def test_valid_max_and_scale(g):
    assert k.valid_max_nb(g, ND) == k.valid_max_np(g, ND)
    same(k.scale_valid_nb(g, ND, 0.37), k.scale_valid_np(g, ND, 0.37))


@settings(max_examples=100, deadline=None)
@given(cells, st.data(), st.booleans())
def test_difference_and_totals(b, data, signed):
    e = data.draw(arrays(float, b.shape, elements=st.one_of(st.floats(0, 1e4), st.just(ND))))
    same(k.clamped_difference_nb(b, e, ND, signed), k.clamped_difference_np(b, e, ND, signed))
    nb, npy = k.loss_totals_nb(b, e, ND, signed), k.loss_totals_np(b, e, ND, signed)
    assert nb[2] == npy[2]
    # same cells, same row order; only the within-row summation order may differ
    assert nb[0] == pytest.approx(npy[0], rel=1e-12, abs=1e-9)
    assert nb[1] == pytest.approx(npy[1], rel=1e-12, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 100), min_size=1, max_size=30), st.data())
def test_integration(gaps, data):
    t = np.cumsum([0] + gaps[:-1]).astype(float)
    c = np.array(data.draw(st.lists(st.integers(0, 10**6), min_size=len(t), max_size=len(t))), dtype=float)
    end = float(t[-1] + gaps[-1])
    assert k.step_hours_nb(t, c, end) == pytest.approx(k.step_hours_np(t, c, end), rel=1e-14)
    assert k.trapezoid_hours_nb(t, c, end) == pytest.approx(k.trapezoid_hours_np(t, c, end), rel=1e-14)


def test_loss_totals_thread_count_invariant():
    rng = np.random.default_rng(0)
    b, e = rng.random((500, 300)), rng.random((500, 300))
    before = k.numba.get_num_threads()
    try:
        results = set()
        for n in sorted({1, min(2, k.numba.config.NUMBA_NUM_THREADS), k.numba.config.NUMBA_NUM_THREADS}):
            k.numba.set_num_threads(n)
            results.add(k.loss_totals_nb(b, e, ND, False))
    finally:
        k.numba.set_num_threads(before)
    assert len(results) == 1


@pytest.mark.parametrize("flag, expected", [("1", "numpy"), ("0", "numba")])
def test_env_flag_selects_backend(flag, expected):
    env = dict(os.environ, OUTAGE_IO_NO_JIT=flag)
    out = subprocess.run(
        [sys.executable, "-c", "from outage_io import _kernels as k; print(k.backend(), k.loss_totals.__name__)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    ).stdout.split()
    assert out[0] == expected
    assert out[1].endswith("_np" if expected == "numpy" else "_nb")


def test_numpy_path_end_to_end(data, tmp_path):
    """The full grid gives identical CSVs with and without JIT."""
    args = ["grid", "--bundle", str(data / "bundles" / "two_sector"), "--scenario", str(data / "scenarios" / "fixture.json"), "--formats", "csv"]
    outs = []
    for flag in ("0", "1"):
        d = tmp_path / flag
        subprocess.run(
            [sys.executable, "-m", "outage_io", *args, "--out", str(d)],
            env=dict(os.environ, OUTAGE_IO_NO_JIT=flag),
            check=True,
            capture_output=True,
        )
        outs.append({p.name: p.read_bytes() for p in d.iterdir()})
    assert outs[0] == outs[1]
