import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hydrosense.arrays import ArrayConfig, steering_vector
from hydrosense.dimred import ReducedSeries
from hydrosense.errors import GeometryError, IllConditionedError, UnwrapError
from hydrosense.extract import (beamform, lcmv_weights, lowpass, path_delta, phase_series, remove_static, sind,
                                water_level)
from hydrosense.scene import SETUP1, reflected_path

ARR = ArrayConfig(4)


def noise_series(seed, m=4, n=50):
    rng = np.random.default_rng(seed)
    return ReducedSeries(rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)), 90.0)


def test_unit_conversions_exact():
    assert water_level(np.array([-1.0]), 30.0).delta_w[0] == 1.0
    assert path_delta(np.array([-2 * np.pi]), ARR.wavelength)[0] == ARR.wavelength


def test_sind_exact_points():
    assert sind(30.0) == 0.5 and sind(-30.0) == -0.5 and sind(390.0) == 0.5
    assert sind(12.3) == pytest.approx(math.sin(math.radians(12.3)))


def test_geometry_round_trip():
    # path change from the forward model, inverted with the mean grazing angle
    p0, p1 = reflected_path(SETUP1, 0.0), reflected_path(SETUP1, -0.01)
    alpha = 0.5 * (p0.reflection_angle + p1.reflection_angle)
    dw = water_level(np.array([p1.length - p0.length]), alpha).delta_w[0]
    assert dw == pytest.approx(-0.01, rel=1e-3)


def test_grazing_alpha_rejected():
    with pytest.raises(GeometryError):
        water_level(np.zeros(3), 0.05)


@given(st.integers(0, 2**31), st.floats(-70, 70), st.floats(5, 60))
def test_lcmv_constraints(seed, theta1, sep):
    theta0 = theta1 + sep if theta1 + sep < 85 else theta1 - sep
    w = lcmv_weights(noise_series(seed), theta1, theta0, ARR)
    assert abs(w.response(steering_vector(ARR, theta1)) - 1) < 1e-9
    assert abs(w.response(steering_vector(ARR, theta0))) < 1e-9


def test_lcmv_coincident_directions():
    with pytest.raises(IllConditionedError):
        lcmv_weights(noise_series(0), 20.0, 20.0, ARR)


def test_lcmv_close_directions():
    with pytest.warns(UserWarning, match="collinear"):
        lcmv_weights(noise_series(0), 20.0, 20.01, ARR)
    with pytest.raises(IllConditionedError):
        lcmv_weights(noise_series(0), 20.0, 20.00001, ARR)


def test_beamform_is_w_hermitian_h():
    s = noise_series(1)
    w = np.array([1, 1j, -1, 2])
    assert np.allclose(beamform(s, w), w.conj() @ s.h)
    with pytest.raises(ValueError):
        beamform(s, np.ones(3))


def test_phase_series_unwraps():
    psi_true = np.linspace(0, 20, 200)
    ps = phase_series(3 * np.exp(1j * (psi_true + 1.0)))
    assert ps.valid and np.allclose(ps.psi, psi_true)


def test_phase_series_flags_large_steps():
    assert not phase_series(np.exp(1j * np.array([0.0, 2.0, 4.0]))).valid


def test_phase_series_zero_magnitude():
    with pytest.raises(UnwrapError):
        phase_series(np.array([1.0, 0.0, 1.0]))


def test_remove_static_zero_mean():
    out = remove_static(noise_series(2))
    assert np.allclose(out.h.mean(axis=1), 0)
    with pytest.raises(ValueError):
        remove_static(ReducedSeries(np.ones((4, 1)), 1.0))


def test_lowpass_keeps_slow_and_rejects_fast():
    n = np.arange(400)
    slow = np.exp(2j * np.pi * 0.01 * n)
    fast = np.exp(2j * np.pi * 0.3 * n)
    out = lowpass(ReducedSeries(np.vstack([slow, fast]), 1.0), 0.1)
    mid = slice(50, 350)
    assert np.allclose(out.h[0, mid], slow[mid], atol=1e-3)  # zero phase: no delay
    assert np.max(np.abs(out.h[1, mid])) < 1e-3


def test_lowpass_nyquist_is_identity_and_short_rejected():
    s = noise_series(3)
    assert np.array_equal(lowpass(s, 0.5).h, s.h)
    with pytest.raises(ValueError, match="too short"):
        lowpass(noise_series(3, n=12), 0.1)
    with pytest.raises(ValueError):
        lowpass(s, 0.0)
