"""Water-path isolation and conversion of its phase into water-level change."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import signal

from .arrays import ArrayConfig, steering_vector
from .beams import CONSTRAINT_TOL, BeamWeights, hermitize, relative_loading
from .dimred import ReducedSeries
from .errors import GeometryError, IllConditionedError, UnwrapError

MIN_REFLECTION_DEG = 0.1
UNWRAP_STEP_LIMIT = np.pi / 2
COND_WARN = 1e6
COND_MAX = 1e12


@dataclass(frozen=True)
class PhaseSeries:
    """Unwrapped beam phase (rad) referenced to capture 0.

    ``valid`` is False when some capture-to-capture step exceeds
    ``UNWRAP_STEP_LIMIT``; the unwrap is then not trustworthy.
    """

    psi: np.ndarray
    valid: bool = True


@dataclass(frozen=True)
class WaterLevelSeries:
    delta_w: np.ndarray
    alpha_used: float
    lambda_used: float
    path_delta: np.ndarray
    phase: np.ndarray | None = None


def remove_static(series: ReducedSeries) -> ReducedSeries:
    """Subtract the per-antenna mean over captures (LOS and static clutter)."""
    if series.n < 2:
        raise ValueError("need at least 2 captures")
    return series.with_h(series.h - series.h.mean(axis=1, keepdims=True))


def lowpass(series: ReducedSeries, cutoff_fraction: float = 0.1, order: int = 4) -> ReducedSeries:
    """Zero-phase Butterworth low-pass along the capture axis.

    ``cutoff_fraction`` is relative to the capture rate (0.5 = Nyquist).
    """
    if not 0 < cutoff_fraction <= 0.5:
        raise ValueError("cutoff_fraction must lie in (0, 0.5]")
    if cutoff_fraction == 0.5:
        return series.with_h(series.h.copy())
    sos = signal.butter(order, 2 * cutoff_fraction, output="sos")
    padlen = 3 * (2 * len(sos) + 1)
    if series.n <= padlen:
        raise ValueError(f"series of {series.n} captures is too short for an order-{order} "
                         f"forward-backward filter (need > {padlen})")
    return series.with_h(signal.sosfiltfilt(sos, series.h, axis=1, padlen=padlen))


def lcmv_weights(series: ReducedSeries, theta1: float, theta0: float, array: ArrayConfig,
                 rho: float | None = None) -> BeamWeights:
    """Unit gain toward ``theta1``, null toward ``theta0``:
    ``w = R^-1 C (C^H R^-1 C)^-1 f`` with ``C = [a(theta1), a(theta0)]``, ``f = [1, 0]``.
    """
    if theta1 == theta0:
        raise IllConditionedError("desired and null directions coincide")
    h = series.h
    r = hermitize(h @ h.conj().T / series.n)
    rho = relative_loading(r) if rho is None else rho
    r = r + max(rho, np.finfo(float).tiny) * np.eye(series.m)
    c = steering_vector(array, np.array([theta1, theta0])).T
    ric = np.linalg.solve(r, c)
    gram = c.conj().T @ ric
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > COND_MAX:
        raise IllConditionedError(f"constraint matrix condition number {cond:.3g} exceeds {COND_MAX:g}")
    if cond > COND_WARN:
        warnings.warn(f"LCMV constraints nearly collinear (cond {cond:.3g}); "
                      "directions may be within one beamwidth", stacklevel=2)
    w = ric @ np.linalg.solve(gram, np.array([1.0, 0.0]))
    resid = np.abs(w.conj() @ c - np.array([1.0, 0.0]))
    if np.any(resid > CONSTRAINT_TOL):
        raise IllConditionedError(f"LCMV constraint residuals {resid} exceed {CONSTRAINT_TOL}")
    return BeamWeights(w, ((float(theta1), 1.0 + 0j), (float(theta0), 0j)))


def beamform(series, w) -> np.ndarray:
    """``w^H H``: one complex sample per capture."""
    h = series.h if isinstance(series, ReducedSeries) else np.asarray(series)
    w = w.w if isinstance(w, BeamWeights) else np.asarray(w)
    if w.shape[0] != h.shape[0]:
        raise ValueError(f"weights have {w.shape[0]} elements, data has {h.shape[0]} antennas")
    return w.conj() @ h


def phase_series(h_bf: np.ndarray) -> PhaseSeries:
    h_bf = np.asarray(h_bf)
    if np.any(np.abs(h_bf) == 0):
        raise UnwrapError("beam output has zero-magnitude samples; phase undefined")
    psi = np.unwrap(np.angle(h_bf))
    psi = psi - psi[0]
    valid = bool(np.all(np.abs(np.diff(psi)) < UNWRAP_STEP_LIMIT))
    return PhaseSeries(psi, valid)


def path_delta(psi, wavelength: float) -> np.ndarray:
    """Reflected path-length change (m); phase falls as the path grows."""
    if wavelength <= 0:
        raise ValueError("wavelength must be > 0")
    psi = psi.psi if isinstance(psi, PhaseSeries) else np.asarray(psi, dtype=float)
    return -(psi / (2 * np.pi)) * wavelength


def sind(deg: float) -> float:
    """Sine of an angle in degrees, exact at multiples of 30."""
    r = math.fmod(deg, 360.0)
    exact = {0.0: 0.0, 30.0: 0.5, 90.0: 1.0, 150.0: 0.5, 180.0: 0.0, 210.0: -0.5,
             270.0: -1.0, 330.0: -0.5}
    key = r % 360.0
    if key in exact:
        return exact[key]
    return math.sin(math.radians(deg))


def water_level(delta_d, alpha_deg: float, wavelength: float = float("nan"), phase=None) -> WaterLevelSeries:
    """``delta_w = -delta_d / (2 sin(alpha))``: a longer path means lower water."""
    s = sind(alpha_deg)
    if s <= sind(MIN_REFLECTION_DEG):
        raise GeometryError(f"reflection angle {alpha_deg:.4f} deg is too close to grazing")
    delta_d = np.asarray(delta_d, dtype=float)
    return WaterLevelSeries(-delta_d / (2 * s), float(alpha_deg), float(wavelength), delta_d, phase)
