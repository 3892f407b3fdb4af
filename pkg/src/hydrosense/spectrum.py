"""Joint AoA / slow-time Doppler estimation with spatial-temporal smoothing and 2D MUSIC.

Slow-time Doppler follows the fast-time convention ``exp(+j 2 pi f t)``: a
shrinking water path (rising level) advances the phase and shows up at
positive Doppler.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .arrays import ArrayConfig, steering_vector
from .beams import hermitize
from .dimred import ReducedSeries
from .errors import PeakFindingError

LOS, WATER, OTHER = "LOS", "water", "other"


@dataclass(frozen=True)
class SmoothingConfig:
    """Spatial subarray count ``m_s`` and temporal subwindow count ``n_s``."""

    m_s: int
    n_s: int

    @classmethod
    def default_for(cls, m: int, n: int) -> "SmoothingConfig":
        m_s = min(m, math.ceil(m / 2) + 1)
        n_s = max(1, n - round(n / 2) + 1)
        return cls(m_s, n_s)

    def dims(self, m: int, n: int) -> tuple[int, int]:
        """``(M - m_s + 1, N - n_s + 1)``."""
        return m - self.m_s + 1, n - self.n_s + 1

    def validate(self, m: int, n: int) -> None:
        if not 1 <= self.m_s <= m:
            raise ValueError(f"m_s={self.m_s} must lie in [1, {m}]")
        if not 1 <= self.n_s <= n:
            raise ValueError(f"n_s={self.n_s} must lie in [1, {n}]")
        mt, nt = self.dims(m, n)
        if self.m_s * self.n_s < mt * nt:
            warnings.warn(f"{self.m_s * self.n_s} virtual snapshots for a {mt * nt}-dim covariance; "
                          "smoothed covariance is rank deficient", stacklevel=3)


@dataclass(frozen=True)
class SpectrumGrid:
    """``power[i, j]`` is the spectrum at ``(theta_axis[i], f_axis[j])``."""

    theta_axis: np.ndarray
    f_axis: np.ndarray
    power: np.ndarray
    eigenvalues: np.ndarray | None = None  # descending, from the covariance used

    def __post_init__(self):
        if self.power.shape != (len(self.theta_axis), len(self.f_axis)):
            raise ValueError("power shape does not match axes")


@dataclass(frozen=True)
class PeakEstimate:
    aoa: float
    doppler: float
    power: float
    label: str = OTHER


def default_theta_grid(step: float = 0.5) -> np.ndarray:
    """Uniform grid over (-90, 90) degrees; -90 itself is excluded."""
    count = int(round(180.0 / step))
    return np.round(-90.0 + step * np.arange(1, count), 10)


def default_f_grid(delta_t_cap: float, points: int = 201, f_max: float | None = None) -> np.ndarray:
    f_max = 1.0 / (2 * delta_t_cap) if f_max is None else f_max
    return np.linspace(-f_max, f_max, points)


def smooth(series, cfg: SmoothingConfig) -> np.ndarray:
    """Stack overlapping ``(M~, N~)`` sub-blocks as virtual snapshots.

    Column ``j * m_s + i`` is ``vec(h[i:i+M~, j:j+N~])`` with antennas fastest.
    """
    h = series.h if isinstance(series, ReducedSeries) else np.asarray(series)
    m, n = h.shape
    cfg.validate(m, n)
    mt, nt = cfg.dims(m, n)
    cols = [h[i:i + mt, j:j + nt].reshape(-1, order="F")
            for j in range(cfg.n_s) for i in range(cfg.m_s)]
    return np.stack(cols, axis=1)


def smoothed_cov(h_s: np.ndarray) -> np.ndarray:
    return hermitize(h_s @ h_s.conj().T / h_s.shape[1])


def slow_time_vector(f, delta_t_cap: float, n_tilde: int) -> np.ndarray:
    return np.exp(2j * np.pi * delta_t_cap * np.multiply.outer(np.asarray(f, dtype=float), np.arange(n_tilde)))


def joint_steering(theta: float, f: float, m_tilde: int, n_tilde: int, array: ArrayConfig,
                   delta_t_cap: float) -> np.ndarray:
    """``a_f(f) kron a_theta(theta)``, length ``m_tilde * n_tilde``, element ``n*m_tilde + m``."""
    return np.kron(slow_time_vector(f, delta_t_cap, n_tilde), steering_vector(array, theta, m_tilde))


def music2d(r_s: np.ndarray, p: int, theta_grid, f_grid, *, m_tilde: int, array: ArrayConfig,
            delta_t_cap: float) -> SpectrumGrid:
    """2D MUSIC pseudo-spectrum ``1 / ||E_n^H a(theta, f)||^2``.

    The noise-subspace norm is evaluated as ``||a||^2 - ||E_s^H a||^2`` (the
    eigenvectors are orthonormal), using the Kronecker structure of ``a``.
    """
    dim = r_s.shape[0]
    if not 0 <= p < dim:
        raise ValueError(f"source count p={p} must lie in [0, {dim})")
    if dim % m_tilde:
        raise ValueError("covariance size is not a multiple of m_tilde")
    n_tilde = dim // m_tilde
    theta_grid = np.asarray(theta_grid, dtype=float)
    f_grid = np.asarray(f_grid, dtype=float)
    try:
        vals, vecs = np.linalg.eigh(hermitize(r_s))
    except np.linalg.LinAlgError as exc:
        raise PeakFindingError(f"eigendecomposition failed: {exc}") from exc
    es = vecs[:, ::-1][:, :p]
    a_th = steering_vector(array, theta_grid, m_tilde)          # (T, m~)
    a_f = slow_time_vector(f_grid, delta_t_cap, n_tilde)        # (F, n~)
    signal = np.zeros((len(theta_grid), len(f_grid)))
    for i in range(p):
        e = es[:, i].reshape(n_tilde, m_tilde).conj()
        proj = a_th @ e.T @ a_f.T                               # (T, F)
        signal += np.abs(proj) ** 2
    denom = np.maximum(dim - signal, dim * 1e-15)
    return SpectrumGrid(theta_grid, f_grid, 1.0 / denom, vals[::-1].copy())


def music2d_series(series: ReducedSeries, cfg: SmoothingConfig, p: int, theta_grid, f_grid,
                   array: ArrayConfig) -> SpectrumGrid:
    """Smoothing, covariance and MUSIC in one call."""
    r_s = smoothed_cov(smooth(series, cfg))
    mt, _ = cfg.dims(series.m, series.n)
    return music2d(r_s, p, theta_grid, f_grid, m_tilde=mt, array=array, delta_t_cap=series.delta_t_cap)


def _local_maxima(power: np.ndarray) -> list[tuple[int, int]]:
    t, f = power.shape
    pad = np.pad(power, 1, constant_values=-np.inf)
    centre = pad[1:-1, 1:-1]
    is_peak = np.ones_like(centre, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            nb = pad[1 + di:1 + di + t, 1 + dj:1 + dj + f]
            # equal neighbours earlier in (theta, f) order win the plateau
            earlier = di < 0 or (di == 0 and dj < 0)
            is_peak &= (centre > nb) if earlier else (centre >= nb)
    return [tuple(ix) for ix in np.argwhere(is_peak)]


def find_peaks(grid: SpectrumGrid, p: int) -> list[PeakEstimate]:
    """The ``p`` strongest local maxima (8-neighbourhood), strongest first.

    Peaks within one Doppler grid step of zero are labelled LOS; the strongest
    remaining peak is labelled water.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    idx = _local_maxima(grid.power)
    idx.sort(key=lambda ij: (-grid.power[ij], ij))
    if len(idx) < p:
        found = [(float(grid.theta_axis[i]), float(grid.f_axis[j])) for i, j in idx]
        raise PeakFindingError(f"found {len(idx)} local maxima, need {p}: {found}")
    f_step = float(np.min(np.diff(grid.f_axis))) if len(grid.f_axis) > 1 else np.inf
    peaks, have_water = [], False
    for i, j in idx[:p]:
        f = float(grid.f_axis[j])
        if abs(f) <= f_step * (1 + 1e-9):
            label = LOS
        elif not have_water:
            label, have_water = WATER, True
        else:
            label = OTHER
        peaks.append(PeakEstimate(float(grid.theta_axis[i]), f, float(grid.power[i, j]), label))
    return peaks


def pick_paths(peaks: list[PeakEstimate]) -> tuple[PeakEstimate, PeakEstimate]:
    """Return ``(los, water)`` from a labelled peak list."""
    los = next((pk for pk in peaks if pk.label == LOS), None)
    water = next((pk for pk in peaks if pk.label == WATER), None)
    if los is None or water is None:
        raise PeakFindingError(f"could not identify LOS and water peaks among {peaks}")
    return los, water
