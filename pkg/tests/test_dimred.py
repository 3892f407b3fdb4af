import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hydrosense.arrays import ArrayConfig, steering_vector
from hydrosense.csisim import CsiCapture, PathParams, SamplingConfig, synth_capture
from hydrosense.dimred import ReducedSeries, doppler_reduce, range_profile, range_reduce, reduce_capture, reduce_series

SMP = SamplingConfig(k=32, l=40)


def test_range_profile_matches_dft_sum(rng, array4):
    smp = SamplingConfig(k=8, l=3)
    data = rng.standard_normal((8, 3, 4)) + 1j * rng.standard_normal((8, 3, 4))
    prof = range_profile(CsiCapture(data, 0.0, array4, smp))
    k = np.arange(8)
    for q in range(8):
        ref = (data.reshape(8, -1) * np.exp(2j * np.pi * k * q / 8)[:, None]).sum(axis=0)
        assert np.allclose(prof[q], ref)


@given(st.integers(0, 31), st.integers(0, 39))
def test_grid_aligned_path_lands_in_its_bins(q, p):
    arr = ArrayConfig(4)
    delay = q / (SMP.k * SMP.delta_f)
    doppler = p / (SMP.l * SMP.delta_t)
    cap = synth_capture([PathParams(1.0, delay, doppler, 20.0)], arr, SMP)
    col, rb, db = reduce_capture(cap)
    assert (rb, db) == (q, p)
    # the reduced column keeps the spatial signature
    a = steering_vector(arr, 20.0)
    assert abs(abs(np.vdot(a, col)) / (np.linalg.norm(a) * np.linalg.norm(col)) - 1) < 1e-9


def test_ties_pick_lowest_bin(array4):
    cap = CsiCapture(np.zeros((SMP.k, SMP.l, 4), dtype=complex), 0.0, array4, SMP)
    _, rb = range_reduce(cap)
    _, db = doppler_reduce(np.zeros(SMP.l * 4), 4)
    assert rb == db == 0


def test_reduce_series_shape_and_preprocess(array4):
    caps = [synth_capture([PathParams(1.0, 0.0, 0.0, 10.0)], array4, SMP, index=i) for i in range(5)]
    s = reduce_series(caps)
    assert s.h.shape == (4, 5) and s.range_bins == (0,) * 5
    doubled = reduce_series(caps, preprocess=lambda c: CsiCapture(2 * c.data, c.timestamp, c.array, c.sampling))
    assert np.allclose(doubled.h, 2 * s.h)


def test_reduce_series_rejects_mixed_configs(array4):
    a = synth_capture([PathParams(1.0, 0.0, 0.0, 0.0)], array4, SMP)
    b = synth_capture([PathParams(1.0, 0.0, 0.0, 0.0)], array4, SamplingConfig(k=32, l=40, delta_t_cap=1.0))
    with pytest.raises(ValueError, match="inconsistent"):
        reduce_series([a, b])
    with pytest.raises(ValueError):
        reduce_series([])


def test_reduced_series_validation():
    with pytest.raises(ValueError):
        ReducedSeries(np.zeros(3), 1.0)
    with pytest.raises(ValueError):
        ReducedSeries(np.full((2, 2), np.inf), 1.0)
