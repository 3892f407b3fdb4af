"""Forward model for downlink CSI captures received on a ULA.

``h(k, l, m) = exp(j phi[k, l]) * sum_p gain_p exp(-j 2 pi f_k tau_p)
exp(+j 2 pi t_l fd_p) a_m(theta_p) + n(k, l, m)``
with ``f_k = fc + delta_f k`` and ``t_l = delta_t l`` (zero-based k, l).

Randomness comes from numpy's PCG64 seeded with ``(seed, capture_index, stream)``
so every capture is reproducible on its own.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .arrays import SPEED_OF_LIGHT, ArrayConfig, doppler_vector, steering_vector
from .calib import ArrayErrorModel, BasebandSnapshot, apply_errors
from .scene import Geometry, los_path, reflected_path

DEFAULT_REFLECTED_GAIN = 0.5 * np.exp(1j * np.pi / 4)

_STREAM_RPO = 1
_STREAM_NOISE = 2


@dataclass(frozen=True)
class SamplingConfig:
    """Subcarriers ``k``, symbols per capture ``l``, captures ``n`` and their spacings."""

    k: int = 200
    l: int = 200
    delta_f: float = 90e3
    delta_t: float = 0.5e-3
    delta_t_cap: float = 90.0
    n: int = 180

    def __post_init__(self):
        for name in ("k", "l", "n"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        for name in ("delta_f", "delta_t", "delta_t_cap"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class PathParams:
    gain: complex
    delay: float
    doppler: float
    aoa: float

    def __post_init__(self):
        if self.delay < 0:
            raise ValueError("delay must be >= 0")
        if abs(self.aoa) >= 90:
            raise ValueError("|aoa| must be < 90 deg")


class RpoMode(str, Enum):
    DETERMINISTIC = "deterministic"
    RANDOM_WALK = "random-walk"
    IID_UNIFORM = "iid-uniform"


@dataclass(frozen=True)
class RpoModel:
    """Clock-asynchronism phase offsets.

    ``cfo`` (Hz) rotates every subcarrier alike; ``to`` (s per symbol) is a
    timing drift whose phase grows with subcarrier index. In random-walk mode
    both accumulate Gaussian increments (``walk_std`` rad, ``to_walk_std`` s
    per symbol). ``init_phase=None`` draws a uniform initial phase per capture.
    """

    cfo: float = 137.0
    to: float = 0.0
    init_phase: float | None = None
    mode: RpoMode = RpoMode.RANDOM_WALK
    walk_std: float = 0.05
    to_walk_std: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "mode", RpoMode(self.mode))

    def phases(self, sampling: SamplingConfig, rng: np.random.Generator) -> np.ndarray:
        """Draw a ``(K, L)`` phase matrix wrapped to ``(-pi, pi]``."""
        k_idx = np.arange(sampling.k)[:, None]
        l_idx = np.arange(sampling.l)
        if self.mode is RpoMode.IID_UNIFORM:
            phi = rng.uniform(-np.pi, np.pi, size=(sampling.k, sampling.l))
            return wrap(phi)
        init = rng.uniform(-np.pi, np.pi) if self.init_phase is None else self.init_phase
        if self.mode is RpoMode.DETERMINISTIC:
            cfo_phase = 2 * np.pi * self.cfo * sampling.delta_t * l_idx
            timing = self.to * l_idx
        else:
            steps = 2 * np.pi * self.cfo * sampling.delta_t + rng.normal(0, self.walk_std, sampling.l - 1)
            cfo_phase = np.concatenate([[0.0], np.cumsum(steps)])
            tsteps = self.to + rng.normal(0, self.to_walk_std, sampling.l - 1)
            timing = np.concatenate([[0.0], np.cumsum(tsteps)])
        phi = init + cfo_phase[None, :] - 2 * np.pi * sampling.delta_f * k_idx * timing[None, :]
        return wrap(phi)


def wrap(phi):
    """Wrap to ``(-pi, pi]``."""
    out = np.angle(np.exp(1j * np.asarray(phi)))
    return np.where(out == -np.pi, np.pi, out)


@dataclass(frozen=True)
class CsiCapture:
    """One ``(K, L, M)`` CSI tensor."""

    data: np.ndarray
    timestamp: float
    array: ArrayConfig
    sampling: SamplingConfig
    antenna_axis = -1

    def __post_init__(self):
        expected = (self.sampling.k, self.sampling.l, self.array.m)
        if self.data.shape != expected:
            raise ValueError(f"capture shape {self.data.shape} != {expected}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("capture contains non-finite entries")


def _rng(seed, index, stream):
    return np.random.default_rng([int(seed), int(index), stream])


def noise_sigma_for_snr(snr_db: float, los_gain: complex = 1.0) -> float:
    """Per-component noise std so that ``|los_gain|^2 / (2 sigma^2)`` equals the SNR."""
    return float(np.sqrt(abs(los_gain) ** 2 / (2 * 10 ** (snr_db / 10))))


def path_tensor(paths, array: ArrayConfig, sampling: SamplingConfig) -> np.ndarray:
    """Noise- and RPO-free sum of paths, shape ``(K, L, M)``."""
    k_idx = np.arange(sampling.k)
    freq = np.empty((sampling.k, len(paths)), dtype=complex)
    dopp = np.empty((sampling.l, len(paths)), dtype=complex)
    steer = np.empty((array.m, len(paths)), dtype=complex)
    for p, path in enumerate(paths):
        # carrier term reduced mod one cycle before scaling to keep phase precision
        cycles = np.mod(array.fc * path.delay, 1.0) + sampling.delta_f * k_idx * path.delay
        freq[:, p] = path.gain * np.exp(-2j * np.pi * cycles)
        dopp[:, p] = doppler_vector(path.doppler, sampling.delta_t, sampling.l)
        steer[:, p] = steering_vector(array, path.aoa)
    return np.einsum("kp,lp,mp->klm", freq, dopp, steer)


def synth_capture(paths, array: ArrayConfig, sampling: SamplingConfig, rpo: RpoModel | None = None,
                  errors: ArrayErrorModel | None = None, noise_sigma: float = 0.0, seed: int = 0,
                  index: int = 0, timestamp: float | None = None) -> CsiCapture:
    """Synthesize one capture. Same ``(seed, index)`` gives bitwise-identical output."""
    if len(paths) < 1:
        raise ValueError("need at least one path")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    h = path_tensor(paths, array, sampling)
    if rpo is not None:
        phi = rpo.phases(sampling, _rng(seed, index, _STREAM_RPO))
        h = h * np.exp(1j * phi)[:, :, None]
    if errors is not None:
        h = apply_errors(h, errors)
    if noise_sigma > 0:
        rng = _rng(seed, index, _STREAM_NOISE)
        h = h + noise_sigma * (rng.standard_normal(h.shape) + 1j * rng.standard_normal(h.shape))
    ts = index * sampling.delta_t_cap if timestamp is None else timestamp
    return CsiCapture(h, ts, array, sampling)


@dataclass(frozen=True)
class GroundTruth:
    time_s: np.ndarray
    water_m: np.ndarray
    d1_m: np.ndarray
    aoa_deg: np.ndarray
    alpha_deg: np.ndarray
    los_aoa_deg: float

    @property
    def delta_w(self) -> np.ndarray:
        return self.water_m - self.water_m[0]


@dataclass(frozen=True)
class Scenario:
    """Water-level scenario: LOS plus one specular water path per capture.

    Captures are produced lazily by :meth:`capture` so long records never
    have to sit in memory at once.
    """

    geometry: Geometry
    water: np.ndarray
    array: ArrayConfig = field(default_factory=ArrayConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    rpo: RpoModel | None = field(default_factory=RpoModel)
    noise_sigma: float = 0.0
    los_gain: complex = 1.0
    reflected_gain: complex = DEFAULT_REFLECTED_GAIN
    errors: ArrayErrorModel | None = None
    extra_paths: tuple = ()
    seed: int = 0

    def __post_init__(self):
        water = np.asarray(self.water, dtype=float)
        if water.shape != (self.sampling.n,):
            raise ValueError(f"water trajectory length {water.shape} != n={self.sampling.n}")
        object.__setattr__(self, "water", water)
        lengths = np.array([reflected_path(self.geometry, w).length for w in water])
        rate = np.gradient(lengths, self.sampling.delta_t_cap) if len(water) > 1 else np.zeros(1)
        object.__setattr__(self, "_length_rate", rate)

    def __len__(self):
        return self.sampling.n

    def paths(self, i: int) -> list[PathParams]:
        los = los_path(self.geometry)
        refl = reflected_path(self.geometry, self.water[i])
        # in-capture Doppler of the water path from the local slope of its length
        rate = self._length_rate[i]
        return [
            PathParams(self.los_gain, los.length / SPEED_OF_LIGHT, 0.0, los.aoa),
            PathParams(self.reflected_gain, refl.length / SPEED_OF_LIGHT,
                       -rate / self.array.wavelength, refl.aoa),
            *self.extra_paths,
        ]

    def capture(self, i: int) -> CsiCapture:
        return synth_capture(self.paths(i), self.array, self.sampling, self.rpo, self.errors,
                             self.noise_sigma, self.seed, i)

    def __iter__(self):
        return (self.capture(i) for i in range(len(self)))

    def ground_truth(self) -> GroundTruth:
        refl = [reflected_path(self.geometry, w) for w in self.water]
        return GroundTruth(
            time_s=np.arange(self.sampling.n) * self.sampling.delta_t_cap,
            water_m=self.water.copy(),
            d1_m=np.array([r.length for r in refl]),
            aoa_deg=np.array([r.aoa for r in refl]),
            alpha_deg=np.array([r.reflection_angle for r in refl]),
            los_aoa_deg=los_path(self.geometry).aoa,
        )


def gen_scenario(geom: Geometry, water_traj, array: ArrayConfig, sampling: SamplingConfig,
                 rpo: RpoModel | None = None, noise_sigma: float = 0.0,
                 gains: tuple[complex, complex] = (1.0, DEFAULT_REFLECTED_GAIN),
                 errors: ArrayErrorModel | None = None, seed: int = 0):
    """Materialize every capture of a scenario. Returns ``(captures, ground_truth)``."""
    sc = Scenario(geom, water_traj, array, sampling, rpo, noise_sigma, gains[0], gains[1], errors, seed=seed)
    return list(sc), sc.ground_truth()


def linear_ramp(start: float, total_change: float, n: int) -> np.ndarray:
    return start + total_change * np.linspace(0.0, 1.0, n)


def synth_snapshot(array: ArrayConfig, aoas, g: int, snr_db: float, powers=None,
                   errors: ArrayErrorModel | None = None, seed: int = 0) -> BasebandSnapshot:
    """Narrowband ``B = E A S + N`` with independent complex Gaussian sources.

    SNR is the first source's power over the total noise power per antenna.
    """
    aoas = np.atleast_1d(np.asarray(aoas, dtype=float))
    powers = np.ones(len(aoas)) if powers is None else np.asarray(powers, dtype=float)
    rng = np.random.default_rng([int(seed), 0, 3])
    src = np.sqrt(powers / 2)[:, None] * (rng.standard_normal((len(aoas), g)) + 1j * rng.standard_normal((len(aoas), g)))
    a = steering_vector(array, aoas).T
    b = a @ src
    if errors is not None:
        b = apply_errors(b, errors, axis=0)
    sigma = np.sqrt(powers[0] / (2 * 10 ** (snr_db / 10)))
    b = b + sigma * (rng.standard_normal(b.shape) + 1j * rng.standard_normal(b.shape))
    return BasebandSnapshot(b, sources=len(aoas))
