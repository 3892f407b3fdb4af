"""ULA configuration and response vectors."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0
DEFAULT_FC = 2659.8e6


@dataclass(frozen=True)
class ArrayConfig:
    """Receive ULA: ``m`` elements spaced ``kappa`` metres, carrier ``fc`` Hz."""

    m: int = 4
    kappa: float | None = None
    fc: float = DEFAULT_FC

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"array needs at least 2 elements, got m={self.m}")
        if self.fc <= 0:
            raise ValueError("fc must be > 0")
        if self.kappa is None:
            object.__setattr__(self, "kappa", self.wavelength / 2)
        if self.kappa <= 0:
            raise ValueError("kappa must be > 0")
        if self.kappa > self.wavelength / 2 * (1 + 1e-12):
            warnings.warn(f"element spacing {self.kappa:.4g} m exceeds half a wavelength; "
                          "grating lobes possible", stacklevel=2)

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.fc


def _check_angle(aoa):
    aoa = np.asarray(aoa, dtype=float)
    if np.any(np.abs(aoa) >= 90.0):
        raise ValueError(f"AoA must satisfy |aoa| < 90 deg, got {aoa}")
    return aoa


def steering_vector(array: ArrayConfig, aoa, m: int | None = None) -> np.ndarray:
    """Spatial response ``exp(-j 2 pi kappa i sin(theta) / lambda)``, i = 0..m-1.

    ``aoa`` may be a scalar (returns shape ``(m,)``) or an array of angles
    (returns shape ``(len(aoa), m)``). ``m`` defaults to the full array.
    """
    aoa = _check_angle(aoa)
    m = array.m if m is None else m
    idx = np.arange(m)
    phase = -2j * np.pi * array.kappa / array.wavelength * np.multiply.outer(np.sin(np.radians(aoa)), idx)
    return np.exp(phase)


def doppler_vector(f_d, delta_t: float, length: int) -> np.ndarray:
    """Fast-time Doppler response ``exp(+j 2 pi delta_t i f_d)``, i = 0..length-1."""
    if length < 1:
        raise ValueError("length must be >= 1")
    return np.exp(2j * np.pi * delta_t * np.multiply.outer(np.asarray(f_d, dtype=float), np.arange(length)))
