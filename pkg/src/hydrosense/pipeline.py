"""End-to-end sensing chain: calibrate, remove RPO, reduce, estimate, extract."""

from __future__ import annotations

import logging
import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import calib, dimred, extract, rpo, spectrum
from .arrays import ArrayConfig
from .errors import ConfigError, UnwrapError

log = logging.getLogger(__name__)

THREADS_ENV = "HYDROSENSE_THREADS"


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(THREADS_ENV, f"not an integer: {raw!r}") from None
    if n < 1:
        raise ConfigError(THREADS_ENV, "must be >= 1")
    return n


def parallel_map(fn, items):
    """Ordered lazy map over ``HYDROSENSE_THREADS`` workers.

    At most ``2 * threads`` results are in flight, so streaming a long record
    never holds more than a handful of captures in memory.
    """
    n = thread_count()
    if n == 1:
        yield from map(fn, items)
        return
    with ThreadPoolExecutor(max_workers=n) as pool:
        pending = deque()
        for item in items:
            pending.append(pool.submit(fn, item))
            if len(pending) >= 2 * n:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


@dataclass(frozen=True)
class SenseSettings:
    """Processing parameters for :func:`sense`.

    ``theta0`` is the LOS direction used as the RPO reference (from geometry
    or survey); the LCMV null uses the LOS peak found by MUSIC instead.
    """

    theta_inc: float
    theta0: float
    smoothing: spectrum.SmoothingConfig | None = None
    n_paths: int = 2
    theta_step: float = 0.1
    f_points: int = 201
    f_max: float | None = None
    cutoff_fraction: float = 0.1
    filter_order: int = 4
    rho: float | None = None
    rho_lcmv: float | None = None
    pool_rpo_covariance: bool = True


@dataclass(frozen=True)
class SenseResult:
    series: dimred.ReducedSeries
    grid: spectrum.SpectrumGrid
    peaks: list
    los: spectrum.PeakEstimate
    water: spectrum.PeakEstimate
    alpha: float
    weights: object
    phase: extract.PhaseSeries
    level: extract.WaterLevelSeries


def reduce_record(open_captures, theta0: float, calibration=None, rho: float | None = None,
                  pool: bool = True) -> dimred.ReducedSeries:
    """Calibrate, RPO-compensate and reduce every capture of a record.

    ``open_captures`` is a zero-argument callable returning a fresh capture
    iterator; with ``pool`` the record is read twice (covariance pass, then
    compensation pass).
    """
    def cal(cap):
        return calib.calibrate(cap, calibration) if calibration is not None else cap

    cov = rpo.pooled_covariances(parallel_map(cal, open_captures())) if pool else None

    def one(cap):
        cap = cal(cap)
        cap = rpo.compensate(cap, rpo.estimate_rpo(cap, theta0, rho, cov=cov))
        return cap

    return dimred.reduce_series(parallel_map(one, open_captures()))


def estimate_paths(series: dimred.ReducedSeries, array: ArrayConfig, settings: SenseSettings):
    cfg = settings.smoothing or spectrum.SmoothingConfig.default_for(series.m, series.n)
    grid = spectrum.music2d_series(
        series, cfg, settings.n_paths,
        spectrum.default_theta_grid(settings.theta_step),
        spectrum.default_f_grid(series.delta_t_cap, settings.f_points, settings.f_max),
        array)
    peaks = spectrum.find_peaks(grid, settings.n_paths)
    los, water = spectrum.pick_paths(peaks)
    return grid, peaks, los, water


def sense_series(series: dimred.ReducedSeries, array: ArrayConfig, settings: SenseSettings) -> SenseResult:
    """Water-level change from an already reduced ``(M, N)`` series."""
    grid, peaks, los, water = estimate_paths(series, array, settings)
    alpha = settings.theta_inc - water.aoa
    log.info("LOS peak %.2f deg / %.3g Hz; water peak %.2f deg / %.3g Hz; alpha %.2f deg",
             los.aoa, los.doppler, water.aoa, water.doppler, alpha)
    filtered = extract.lowpass(extract.remove_static(series), settings.cutoff_fraction, settings.filter_order)
    weights = extract.lcmv_weights(filtered, water.aoa, los.aoa, array, settings.rho_lcmv)
    phase = extract.phase_series(extract.beamform(filtered, weights))
    if not phase.valid:
        raise UnwrapError("beam phase changes by more than pi/2 between captures; unwrap unreliable")
    delta_d = extract.path_delta(phase, array.wavelength)
    level = extract.water_level(delta_d, alpha, array.wavelength, phase.psi)
    return SenseResult(series, grid, peaks, los, water, alpha, weights, phase, level)


def sense(open_captures, array: ArrayConfig, settings: SenseSettings, calibration=None) -> SenseResult:
    series = reduce_record(open_captures, settings.theta0, calibration, settings.rho,
                           settings.pool_rpo_covariance)
    if series.range_bins:
        log.info("range bins %s, Doppler bins %s",
                 sorted(set(series.range_bins)), sorted(set(series.doppler_bins)))
    return sense_series(series, array, settings)


def level_errors(result: SenseResult, truth_delta_w) -> np.ndarray:
    return result.level.delta_w - np.asarray(truth_delta_w)
