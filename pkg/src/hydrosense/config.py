"""Run configuration: an INI-style key-value file loaded into typed settings.

Every section is optional; missing keys take the defaults below. Values are
validated at load time, and any problem surfaces as :class:`ConfigError`
naming ``section.key``.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .arrays import DEFAULT_FC, ArrayConfig
from .calib import ArrayErrorModel, default_rco_subset
from .csisim import DEFAULT_REFLECTED_GAIN, RpoMode, RpoModel, SamplingConfig, Scenario, linear_ramp, noise_sigma_for_snr
from .errors import ConfigError, HydroSenseError
from .pipeline import SenseSettings
from .scene import SETUPS, Geometry, los_aoa
from .spectrum import SmoothingConfig

GEOMETRY_KEYS = ("d_tr", "d_rw", "d_tw", "h_t", "h_r", "h_w0", "theta_inc")


@dataclass(frozen=True)
class CalibrationSettings:
    path: str | None = None
    snapshot_samples: int = 10_000
    snapshot_snr_db: float = 30.0
    pilot_aoa: float | None = None  # None: LOS direction from geometry


@dataclass(frozen=True)
class StudySettings:
    delta_w: float = 1.0
    d_min: float = 100.0
    d_max: float = 1000.0
    d_step: float = 10.0

    def distances(self) -> np.ndarray:
        count = int(math.floor((self.d_max - self.d_min) / self.d_step + 1e-9)) + 1
        return self.d_min + self.d_step * np.arange(count)


@dataclass(frozen=True)
class RunConfig:
    geometry: Geometry
    array: ArrayConfig = field(default_factory=ArrayConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    water_change: float = -1.0
    los_gain: complex = 1.0
    reflected_gain: complex = DEFAULT_REFLECTED_GAIN
    rpo: RpoModel | None = field(default_factory=RpoModel)
    snr_db: float | None = 20.0
    errors: ArrayErrorModel | None = None
    calibration: CalibrationSettings = field(default_factory=CalibrationSettings)
    sense: SenseSettings | None = None
    study: StudySettings = field(default_factory=StudySettings)
    seed: int = 0

    @property
    def theta0(self) -> float:
        return self.sense.theta0

    @property
    def pilot_aoa(self) -> float:
        p = self.calibration.pilot_aoa
        return los_aoa(self.geometry) if p is None else p

    def noise_sigma(self) -> float:
        return 0.0 if self.snr_db is None else noise_sigma_for_snr(self.snr_db, self.los_gain)

    def scenario(self, seed: int | None = None) -> Scenario:
        water = linear_ramp(self.geometry.h_w0, self.water_change, self.sampling.n)
        return Scenario(self.geometry, water, self.array, self.sampling, self.rpo, self.noise_sigma(),
                        self.los_gain, self.reflected_gain, self.errors,
                        seed=self.seed if seed is None else seed)


class _Section:
    """Typed accessors over one config section that report ``section.key`` on failure."""

    def __init__(self, parser: configparser.ConfigParser, name: str):
        self.name = name
        self.items = dict(parser[name]) if parser.has_section(name) else {}
        self.used: set[str] = set()

    def _raw(self, key):
        self.used.add(key)
        raw = self.items.get(key)
        if raw is None or raw.strip().lower() in ("", "none", "auto"):
            return None
        return raw.strip()

    def fail(self, key, msg):
        return ConfigError(f"{self.name}.{key}", msg)

    def float(self, key, default=None, *, positive=False, nonneg=False):
        raw = self._raw(key)
        if raw is None:
            return default
        try:
            val = float(raw)
        except ValueError:
            raise self.fail(key, f"not a number: {raw!r}") from None
        if not math.isfinite(val):
            raise self.fail(key, "must be finite")
        if positive and val <= 0:
            raise self.fail(key, f"must be > 0, got {val}")
        if nonneg and val < 0:
            raise self.fail(key, f"must be >= 0, got {val}")
        return val

    def int(self, key, default=None, *, minimum=None):
        raw = self._raw(key)
        if raw is None:
            return default
        try:
            val = int(raw)
        except ValueError:
            raise self.fail(key, f"not an integer: {raw!r}") from None
        if minimum is not None and val < minimum:
            raise self.fail(key, f"must be >= {minimum}, got {val}")
        return val

    def bool(self, key, default):
        raw = self._raw(key)
        if raw is None:
            return default
        try:
            return configparser.ConfigParser.BOOLEAN_STATES[raw.lower()]
        except KeyError:
            raise self.fail(key, f"not a boolean: {raw!r}") from None

    def str(self, key, default=None):
        raw = self._raw(key)
        return default if raw is None else raw

    def floats(self, key, default=None):
        raw = self._raw(key)
        if raw is None:
            return default
        try:
            return tuple(float(v) for v in raw.split(","))
        except ValueError:
            raise self.fail(key, f"not a comma-separated number list: {raw!r}") from None

    def ints(self, key, default=None):
        raw = self._raw(key)
        if raw is None:
            return default
        try:
            return tuple(int(v) for v in raw.split(",") if v.strip())
        except ValueError:
            raise self.fail(key, f"not a comma-separated integer list: {raw!r}") from None

    def check_unknown(self):
        extra = set(self.items) - self.used
        if extra:
            key = sorted(extra)[0]
            raise self.fail(key, "unknown key")


def _build(section: _Section, key: str, fn):
    """Run a constructor, turning its validation errors into a config error."""
    try:
        return fn()
    except ConfigError:
        raise
    except (ValueError, HydroSenseError) as exc:
        raise section.fail(key, str(exc)) from None


def _geometry(s: _Section) -> Geometry:
    preset = s.str("preset")
    base = None
    if preset is not None:
        base = SETUPS.get(preset.lower())
        if base is None:
            raise s.fail("preset", f"unknown preset {preset!r}; choose from {sorted(SETUPS)}")
    vals = {}
    for key in GEOMETRY_KEYS:
        v = s.float(key, None if base is None else getattr(base, key))
        if v is None:
            raise s.fail(key, "required when no preset is given")
        vals[key] = v
    return _build(s, "preset" if base else "d_tr", lambda: Geometry(**vals))


def _rpo(s: _Section) -> RpoModel | None:
    if not s.bool("enabled", True):
        for key in ("mode", "cfo", "to", "init_phase", "walk_std", "to_walk_std"):
            s._raw(key)
        return None
    mode = s.str("mode", RpoMode.RANDOM_WALK.value)
    if mode not in {m.value for m in RpoMode}:
        raise s.fail("mode", f"unknown mode {mode!r}; choose from {[m.value for m in RpoMode]}")
    d = RpoModel()
    return RpoModel(cfo=s.float("cfo", d.cfo), to=s.float("to", d.to), init_phase=s.float("init_phase"),
                    mode=RpoMode(mode), walk_std=s.float("walk_std", d.walk_std, nonneg=True),
                    to_walk_std=s.float("to_walk_std", d.to_walk_std, nonneg=True))


def _errors(s: _Section, m: int) -> ArrayErrorModel | None:
    enabled = s.bool("enabled", False)
    gains = s.floats("gains", (1.0,) * m)
    phases = s.floats("phases_deg", (0.0,) * m)
    rco = s.float("rco_deg", 0.0)
    subset = s.ints("rco_subset", default_rco_subset(m))
    if not enabled:
        return None
    for key, vals in (("gains", gains), ("phases_deg", phases)):
        if len(vals) != m:
            raise s.fail(key, f"needs {m} values (one per antenna), got {len(vals)}")
    return _build(s, "gains", lambda: ArrayErrorModel(gains, np.radians(phases), np.radians(rco), subset))


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(source, f"unparseable: {exc}") from None
    known = {"geometry", "array", "sampling", "scenario", "rpo", "noise", "errors", "calibration",
             "smoothing", "spectrum", "filter", "sense", "study", "run"}
    for name in parser.sections():
        if name not in known:
            raise ConfigError(name, "unknown section")
    sec = {name: _Section(parser, name) for name in known}

    geom = _geometry(sec["geometry"])

    a = sec["array"]
    m = a.int("m", 4, minimum=2)
    array = _build(a, "kappa", lambda: ArrayConfig(m, a.float("kappa", positive=True), a.float("fc", DEFAULT_FC, positive=True)))

    s = sec["sampling"]
    d = SamplingConfig()
    sampling = SamplingConfig(
        k=s.int("k", d.k, minimum=1), l=s.int("l", d.l, minimum=2),
        delta_f=s.float("delta_f", d.delta_f, positive=True), delta_t=s.float("delta_t", d.delta_t, positive=True),
        delta_t_cap=s.float("delta_t_cap", d.delta_t_cap, positive=True), n=s.int("n", d.n, minimum=1))

    sc = sec["scenario"]
    water_change = sc.float("water_change", -1.0)
    los_gain = sc.float("los_gain", 1.0, positive=True)
    refl = sc.float("reflected_gain", abs(DEFAULT_REFLECTED_GAIN), positive=True) * np.exp(
        1j * np.radians(sc.float("reflected_phase_deg", np.degrees(np.angle(DEFAULT_REFLECTED_GAIN)))))
    if geom.h_w0 + max(0.0, water_change) >= min(geom.h_t, geom.h_r):
        raise sc.fail("water_change", "water would reach the antennas")

    rpo = _rpo(sec["rpo"])
    noise = sec["noise"]
    snr_db = noise.float("snr_db", 20.0)
    if not noise.bool("enabled", True):
        snr_db = None
    errors = _errors(sec["errors"], m)

    c = sec["calibration"]
    calibration = CalibrationSettings(
        path=c.str("path"), snapshot_samples=c.int("snapshot_samples", 10_000, minimum=m + 1),
        snapshot_snr_db=c.float("snapshot_snr_db", 30.0), pilot_aoa=c.float("pilot_aoa"))

    sm = sec["smoothing"]
    m_s, n_s = sm.int("m_s", minimum=1), sm.int("n_s", minimum=1)
    if (m_s is None) != (n_s is None):
        raise sm.fail("m_s" if m_s is None else "n_s", "set both m_s and n_s, or neither")
    smoothing = None
    if m_s is not None:
        smoothing = SmoothingConfig(m_s, n_s)
        if m_s > m:
            raise sm.fail("m_s", f"must be <= M={m}")
        if n_s > sampling.n:
            raise sm.fail("n_s", f"must be <= N={sampling.n}")

    sp = sec["spectrum"]
    n_paths = sp.int("n_paths", 2, minimum=2)
    theta_step = sp.float("theta_step", 0.1, positive=True)
    f_points = sp.int("f_points", 201, minimum=3)
    f_max = sp.float("f_max", positive=True)

    fl = sec["filter"]
    cutoff = fl.float("cutoff_fraction", 0.1, positive=True)
    if cutoff > 0.5:
        raise fl.fail("cutoff_fraction", "must be <= 0.5 (Nyquist)")
    order = fl.int("order", 4, minimum=1)

    se = sec["sense"]
    sense = SenseSettings(
        theta_inc=geom.theta_inc, theta0=se.float("theta0", los_aoa(geom)), smoothing=smoothing,
        n_paths=n_paths, theta_step=theta_step, f_points=f_points, f_max=f_max,
        cutoff_fraction=cutoff, filter_order=order, rho=se.float("rho", nonneg=True),
        rho_lcmv=se.float("rho_lcmv", nonneg=True), pool_rpo_covariance=se.bool("pool_rpo_covariance", True))

    st = sec["study"]
    dd = StudySettings()
    study = StudySettings(st.float("delta_w", dd.delta_w), st.float("d_min", dd.d_min, positive=True),
                          st.float("d_max", dd.d_max, positive=True), st.float("d_step", dd.d_step, positive=True))
    if study.d_max < study.d_min:
        raise st.fail("d_max", "must be >= d_min")

    seed = sec["run"].int("seed", 0, minimum=0)

    for section in sec.values():
        section.check_unknown()
    return RunConfig(geom, array, sampling, water_change, los_gain, refl, rpo, snr_db, errors,
                     calibration, sense, study, seed)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read: {exc.strerror}") from None
    return parse_config(text, str(path))
