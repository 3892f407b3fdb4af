"""Pilot-based subspace calibration of receive-array gain/phase errors.

The combined per-antenna error is ``e_m = gain_m * exp(-j (phase_m + rco * [m in rco_subset]))``
with antenna 0 as the reference (``e_0 = 1``).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .arrays import ArrayConfig, steering_vector
from .errors import CalibrationError

UNITY_TOLERANCE = 0.1
MIN_ELEMENT_MAGNITUDE = 1e-6
MIN_EIGEN_RATIO = 2.0  # weakest signal eigenvalue over mean noise eigenvalue


def default_rco_subset(m: int) -> tuple[int, ...]:
    """Antennas driven by the second transceiver pair onwards (pairs of two)."""
    return tuple(range(2, m))


@dataclass(frozen=True)
class ArrayErrorModel:
    gains: tuple[float, ...]
    phases: tuple[float, ...]
    rco: float = 0.0
    rco_subset: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gains", tuple(float(g) for g in self.gains))
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))
        object.__setattr__(self, "rco_subset", tuple(int(i) for i in self.rco_subset))
        if len(self.gains) != len(self.phases):
            raise ValueError("gains and phases must have the same length")
        if any(g <= 0 for g in self.gains):
            raise ValueError("gains must be > 0")
        if self.gains[0] != 1.0 or self.phases[0] != 0.0:
            raise ValueError("antenna 0 is the reference: gain 1, phase 0")
        if 0 in self.rco_subset or any(not 0 <= i < self.m for i in self.rco_subset):
            raise ValueError(f"invalid rco_subset {self.rco_subset}")

    @property
    def m(self) -> int:
        return len(self.gains)

    @property
    def total_phases(self) -> np.ndarray:
        """Per-antenna phase error including the clock offset (rad)."""
        tot = np.array(self.phases)
        tot[list(self.rco_subset)] += self.rco
        return tot

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.gains) * np.exp(-1j * self.total_phases)

    @classmethod
    def identity(cls, m: int) -> "ArrayErrorModel":
        return cls((1.0,) * m, (0.0,) * m)

    @classmethod
    def from_vector(cls, e) -> "ArrayErrorModel":
        """Fold an arbitrary complex error vector into a model (RCO merged into phases)."""
        e = np.asarray(e, dtype=complex)
        if abs(e[0]) < MIN_ELEMENT_MAGNITUDE:
            raise CalibrationError("reference element of error vector is ~0")
        e = e / e[0]
        phases = -np.angle(e)
        phases[0] = 0.0
        gains = np.abs(e)
        gains[0] = 1.0
        return cls(tuple(gains), tuple(phases))

    def inverse(self) -> "ArrayErrorModel":
        return ArrayErrorModel.from_vector(1.0 / self.vector)


@dataclass(frozen=True)
class BasebandSnapshot:
    """Raw narrowband samples, ``data`` shaped ``(M, G)``."""

    data: np.ndarray
    sources: int = 1
    antenna_axis = 0

    def __post_init__(self):
        if self.data.ndim != 2:
            raise ValueError("snapshot data must be 2-D (M, G)")
        if self.data.shape[1] <= self.data.shape[0]:
            raise ValueError("snapshot needs more samples than antennas (G > M)")


def _error_vector(err) -> np.ndarray:
    vec = err.vector if isinstance(err, ArrayErrorModel) else np.asarray(err, dtype=complex)
    return vec


def _scale_antennas(obj, vec, axis=-1):
    wrapped = dataclasses.is_dataclass(obj)
    data = obj.data if wrapped else np.asarray(obj)
    axis = obj.antenna_axis if wrapped else axis
    if data.shape[axis] != vec.shape[0]:
        raise ValueError(f"antenna count mismatch: data has {data.shape[axis]}, model has {vec.shape[0]}")
    shape = [1] * data.ndim
    shape[axis] = -1
    out = data * vec.reshape(shape)
    if wrapped:
        return dataclasses.replace(obj, data=out)
    return out


def apply_errors(obj, err: ArrayErrorModel, axis: int = -1):
    """Multiply each antenna by its error factor. ``obj`` is a capture, snapshot or array."""
    return _scale_antennas(obj, _error_vector(err), axis)


def estimate_errors(snapshot: BasebandSnapshot, pilot_aoa: float, array: ArrayConfig,
                    n_sources: int | None = None, tol: float = UNITY_TOLERANCE) -> ArrayErrorModel:
    """Estimate the array error vector from a snapshot containing a pilot at a known AoA.

    The signal subspace of the sample covariance is spanned by ``E a(pilot)``;
    with ``A0 = diag(a(pilot))`` the error vector is the eigenvector of
    ``A0^H Es Es^H A0`` whose eigenvalue is closest to one.

    ``A0`` is unitary, so that matrix is a projector and the unity test only
    guards against numerical breakdown. A wrong pilot AoA is not detectable
    from the snapshot alone; it yields a consistent but wrong estimate.
    """
    b = snapshot.data
    m, g = b.shape
    if m != array.m:
        raise ValueError(f"snapshot has {m} antennas, array has {array.m}")
    s = snapshot.sources if n_sources is None else n_sources
    if not 1 <= s < m:
        raise ValueError(f"source count must be in [1, {m - 1}]")
    cov = b @ b.conj().T / g
    lam_r, vecs = np.linalg.eigh(cov)
    noise = lam_r[:-s].mean()
    if not lam_r[-s] > MIN_EIGEN_RATIO * noise:
        raise CalibrationError(
            f"signal subspace not separable from noise (eigenvalue ratio "
            f"{lam_r[-s] / max(noise, np.finfo(float).tiny):.3g} < {MIN_EIGEN_RATIO}); snapshot SNR too low")
    es = vecs[:, -s:]
    a0 = steering_vector(array, pilot_aoa)
    q = (a0.conj()[:, None] * es) @ (es.conj().T * a0[None, :])
    lam, v = np.linalg.eigh(q)
    best = int(np.argmin(np.abs(lam - 1.0)))
    if abs(lam[best] - 1.0) > tol:
        raise CalibrationError(
            f"no eigenvalue within {tol} of unity (closest {lam[best]:.4f}); "
            "check pilot AoA and snapshot SNR")
    return ArrayErrorModel.from_vector(v[:, best])


def calibrate(capture, estimate, axis: int = -1):
    """Undo estimated array errors: divide antenna ``m`` by ``estimate[m]``."""
    vec = _error_vector(estimate)
    if np.any(np.abs(vec) < MIN_ELEMENT_MAGNITUDE):
        raise CalibrationError("calibration vector has a (near-)zero element")
    return _scale_antennas(capture, 1.0 / vec, axis)
