"""Collapse each ``(K, L, M)`` capture to one antenna vector.

The strongest delay bin keeps the LOS and water paths (they differ by far
less than one range cell) and the strongest Doppler bin keeps everything that
is static within a capture. Transforms use no zero padding and no window;
ties go to the lowest bin index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .csisim import CsiCapture


@dataclass(frozen=True)
class ReducedSeries:
    """``h`` is ``(M, N)``: one column per capture."""

    h: np.ndarray
    delta_t_cap: float
    range_bins: tuple[int, ...] = ()
    doppler_bins: tuple[int, ...] = ()

    def __post_init__(self):
        if self.h.ndim != 2:
            raise ValueError("series must be 2-D (M, N)")
        if not np.all(np.isfinite(self.h)):
            raise ValueError("series contains non-finite entries")

    @property
    def m(self) -> int:
        return self.h.shape[0]

    @property
    def n(self) -> int:
        return self.h.shape[1]

    def with_h(self, h) -> "ReducedSeries":
        return ReducedSeries(h, self.delta_t_cap, self.range_bins, self.doppler_bins)


def range_profile(capture: CsiCapture) -> np.ndarray:
    """Delay-domain transform over subcarriers, shape ``(K, L*M)``.

    ``exp(-j 2 pi delta_f k tau)`` with ``tau = q / (K delta_f)`` lands in bin ``q``.
    """
    k = capture.data.shape[0]
    return np.fft.ifft(capture.data.reshape(k, -1), axis=0, norm="forward")


def range_reduce(capture: CsiCapture) -> tuple[np.ndarray, int]:
    prof = range_profile(capture)
    power = np.sum(np.abs(prof) ** 2, axis=1)
    b = int(np.argmax(power))
    return prof[b], b


def doppler_reduce(v: np.ndarray, m: int) -> tuple[np.ndarray, int]:
    """Pick the strongest symbol-axis FFT bin of an ``L*M`` vector (symbol-major)."""
    mat = np.asarray(v).reshape(-1, m)
    spec = np.fft.fft(mat, axis=0)
    b = int(np.argmax(np.sum(np.abs(spec) ** 2, axis=1)))
    return spec[b], b


def reduce_capture(capture: CsiCapture) -> tuple[np.ndarray, int, int]:
    v, rb = range_reduce(capture)
    col, db = doppler_reduce(v, capture.array.m)
    return col, rb, db


def reduce_series(captures, preprocess=None) -> ReducedSeries:
    """Reduce an iterable of captures to an ``(M, N)`` series.

    ``preprocess`` (e.g. calibration plus RPO compensation) is applied to each
    capture first; captures are consumed one at a time.
    """
    cols, rbins, dbins = [], [], []
    ref = None
    for cap in captures:
        if ref is None:
            ref = (cap.array, cap.sampling)
        elif (cap.array, cap.sampling) != ref:
            raise ValueError("captures have inconsistent array/sampling configuration")
        if preprocess is not None:
            cap = preprocess(cap)
        col, rb, db = reduce_capture(cap)
        cols.append(col)
        rbins.append(rb)
        dbins.append(db)
    if ref is None:
        raise ValueError("no captures to reduce")
    return ReducedSeries(np.stack(cols, axis=1), ref[1].delta_t_cap, tuple(rbins), tuple(dbins))
