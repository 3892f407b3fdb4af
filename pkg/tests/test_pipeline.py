import numpy as np
import pytest

from hydrosense import calib, pipeline
from hydrosense.arrays import ArrayConfig, steering_vector
from hydrosense.csisim import RpoModel, SamplingConfig, Scenario, linear_ramp, noise_sigma_for_snr, synth_snapshot
from hydrosense.dimred import ReducedSeries
from hydrosense.errors import ConfigError, UnwrapError
from hydrosense.scene import SETUP1, SETUP2, los_aoa

ARR = ArrayConfig(4)
ERR = calib.ArrayErrorModel((1, 1.2, 0.8, 1.1), np.radians([0, 10, -20, 5]), np.radians(30), (2, 3))


def run(geom, change, seed, smp, f_max=None, theta_step=0.5):
    sc = Scenario(geom, linear_ramp(0.0, change, smp.n), ARR, smp, RpoModel(), noise_sigma_for_snr(20),
                  errors=ERR, seed=seed)
    th0 = los_aoa(geom)
    est = calib.estimate_errors(synth_snapshot(ARR, [th0], 10_000, 30, errors=ERR, seed=seed), th0, ARR)
    settings = pipeline.SenseSettings(geom.theta_inc, th0, theta_step=theta_step, f_points=101, f_max=f_max)
    res = pipeline.sense(lambda: iter(sc), ARR, settings, est)
    return res, pipeline.level_errors(res, sc.ground_truth().delta_w)


def test_falling_level_small_record():
    res, err = run(SETUP1, -1.0, 0, SamplingConfig(k=32, l=32, n=120))
    assert res.water.doppler < 0 and res.los.doppler == 0
    assert res.level.delta_w[-1] < -0.9
    assert np.mean(np.abs(err)) < 0.03


def test_rising_level_positive_doppler():
    res, err = run(SETUP2, 1.0, 1, SamplingConfig(k=32, l=32, n=200, delta_t_cap=40.0), f_max=1e-3)
    assert res.water.doppler > 0
    assert np.mean(np.abs(err)) < 0.05


def test_thread_count_is_transparent(monkeypatch):
    smp = SamplingConfig(k=16, l=16, n=60)
    a, _ = run(SETUP1, -1.0, 2, smp)
    monkeypatch.setenv(pipeline.THREADS_ENV, "4")
    b, _ = run(SETUP1, -1.0, 2, smp)
    assert np.array_equal(a.level.delta_w, b.level.delta_w)


def test_parallel_map_preserves_order(monkeypatch):
    monkeypatch.setenv(pipeline.THREADS_ENV, "3")
    assert list(pipeline.parallel_map(lambda x: x * x, range(20))) == [x * x for x in range(20)]


@pytest.mark.parametrize("raw", ["0", "x"])
def test_thread_env_validation(monkeypatch, raw):
    monkeypatch.setenv(pipeline.THREADS_ENV, raw)
    with pytest.raises(ConfigError):
        pipeline.thread_count()


def test_fast_phase_raises_unwrap_error():
    n, dtc = 100, 90.0
    a0, a1 = steering_vector(ARR, 47.5), steering_vector(ARR, 20.0)
    t = np.arange(n)
    # 0.3 cycles per capture: steps of 1.9 rad cannot be unwrapped reliably
    h = np.outer(a0, np.ones(n)) + 0.5 * np.outer(a1, np.exp(2j * np.pi * 0.3 * t))
    settings = pipeline.SenseSettings(42.0, 47.5, cutoff_fraction=0.5, theta_step=0.5)
    with pytest.raises(UnwrapError):
        pipeline.sense_series(ReducedSeries(h, dtc), ARR, settings)
