import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hydrosense.arrays import ArrayConfig, doppler_vector, steering_vector


@given(st.floats(-89.9, 89.9), st.integers(2, 8))
def test_steering_vector_matches_elementwise_formula(theta, m):
    arr = ArrayConfig(m)
    a = steering_vector(arr, theta)
    for i in range(m):
        ref = np.exp(-2j * np.pi * arr.kappa * i * np.sin(np.radians(theta)) / arr.wavelength)
        assert a[i] == pytest.approx(ref, abs=1e-12)
    assert np.allclose(np.abs(a), 1.0)


def test_broadside_is_all_ones(array4):
    assert np.allclose(steering_vector(array4, 0.0), 1.0)


def test_half_wavelength_endfire_phase_step(array4):
    a = steering_vector(array4, 30.0)
    # kappa = lambda/2, sin 30 = 1/2: step of -pi/2 per element
    assert np.allclose(a[1] / a[0], np.exp(-1j * np.pi / 2))


def test_vectorized_shape(array4):
    assert steering_vector(array4, np.array([0.0, 10.0, 20.0])).shape == (3, 4)
    assert steering_vector(array4, 10.0, m=2).shape == (2,)


@pytest.mark.parametrize("bad", [90.0, -90.0, 120.0])
def test_out_of_range_angle(array4, bad):
    with pytest.raises(ValueError):
        steering_vector(array4, bad)


def test_wide_spacing_warns():
    with pytest.warns(UserWarning, match="grating"):
        ArrayConfig(4, kappa=0.2)


def test_invalid_array():
    with pytest.raises(ValueError):
        ArrayConfig(1)


def test_doppler_vector():
    v = doppler_vector(50.0, 0.5e-3, 4)
    assert np.allclose(v, np.exp(2j * np.pi * 50 * 0.5e-3 * np.arange(4)))
