"""On-disk formats: CSI capture files, CSV exports, calibration and snapshot files.

CSI file layout (little-endian)::

    magic   4s   b"CSIW"
    version u16  1
    K L M N u32 x4
    delta_f delta_t delta_t_cap fc kappa  f64 x5
    payload N captures of K*L*M complex64, k fastest, then l, then m

All writers go through a temporary file in the target directory followed by
an atomic rename.
"""

from __future__ import annotations

import contextlib
import csv
import json
import os
import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .arrays import ArrayConfig
from .calib import ArrayErrorModel, BasebandSnapshot
from .csisim import CsiCapture, GroundTruth, SamplingConfig
from .errors import CsiFormatError
from .extract import WaterLevelSeries
from .spectrum import SpectrumGrid

MAGIC = b"CSIW"
VERSION = 1
HEADER = struct.Struct("<4sH4I5d")
SAMPLE = np.dtype("<c8")

_UMASK = os.umask(0)
os.umask(_UMASK)


@contextlib.contextmanager
def atomic_path(path):
    """Yield a temporary path next to ``path``; rename over it on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    os.close(fd)
    try:
        yield Path(tmp)
        os.chmod(tmp, 0o666 & ~_UMASK)  # mkstemp creates 0600
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


@dataclass(frozen=True)
class CsiHeader:
    k: int
    l: int
    m: int
    n: int
    delta_f: float
    delta_t: float
    delta_t_cap: float
    fc: float
    kappa: float
    version: int = VERSION

    @property
    def capture_bytes(self) -> int:
        return self.k * self.l * self.m * SAMPLE.itemsize

    @property
    def array(self) -> ArrayConfig:
        return ArrayConfig(self.m, self.kappa, self.fc)

    @property
    def sampling(self) -> SamplingConfig:
        return SamplingConfig(self.k, self.l, self.delta_f, self.delta_t, self.delta_t_cap, self.n)

    @classmethod
    def from_configs(cls, array: ArrayConfig, sampling: SamplingConfig) -> "CsiHeader":
        return cls(sampling.k, sampling.l, array.m, sampling.n, sampling.delta_f, sampling.delta_t,
                   sampling.delta_t_cap, array.fc, array.kappa)

    def pack(self) -> bytes:
        return HEADER.pack(MAGIC, self.version, self.k, self.l, self.m, self.n, self.delta_f,
                           self.delta_t, self.delta_t_cap, self.fc, self.kappa)


class CsiWriter:
    """Streaming writer; use as a context manager and call :meth:`write` N times."""

    def __init__(self, path, array: ArrayConfig, sampling: SamplingConfig):
        self.path = Path(path)
        self.header = CsiHeader.from_configs(array, sampling)
        self.count = 0
        self._ctx = None
        self._fh = None

    def __enter__(self):
        self._ctx = atomic_path(self.path)
        tmp = self._ctx.__enter__()
        self._fh = open(tmp, "wb")
        self._fh.write(self.header.pack())
        return self

    def write(self, capture) -> None:
        data = capture.data if isinstance(capture, CsiCapture) else np.asarray(capture)
        h = self.header
        if data.shape != (h.k, h.l, h.m):
            raise CsiFormatError(f"capture shape {data.shape} != {(h.k, h.l, h.m)}")
        if self.count >= h.n:
            raise CsiFormatError(f"file declares {h.n} captures; refusing to write more")
        self._fh.write(np.ascontiguousarray(data.transpose(2, 1, 0), dtype=SAMPLE).tobytes())
        self.count += 1

    def __exit__(self, exc_type, exc, tb):
        self._fh.close()
        if exc_type is None and self.count != self.header.n:
            exc = CsiFormatError(f"wrote {self.count} captures, header declares {self.header.n}")
            self._ctx.__exit__(type(exc), exc, None)
            raise exc
        return self._ctx.__exit__(exc_type, exc, tb)


def write_csi(path, captures, array: ArrayConfig, sampling: SamplingConfig) -> None:
    with CsiWriter(path, array, sampling) as w:
        for cap in captures:
            w.write(cap)


def read_header(path) -> CsiHeader:
    path = Path(path)
    with open(path, "rb") as fh:
        raw = fh.read(HEADER.size)
    if len(raw) < HEADER.size:
        raise CsiFormatError(f"{path}: truncated header")
    magic, version, *rest = HEADER.unpack(raw)
    if magic != MAGIC:
        raise CsiFormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise CsiFormatError(f"{path}: unsupported version {version}")
    hdr = CsiHeader(*rest, version=version)
    if min(hdr.k, hdr.l, hdr.m, hdr.n) < 1:
        raise CsiFormatError(f"{path}: zero dimension in header")
    expected = HEADER.size + hdr.n * hdr.capture_bytes
    actual = path.stat().st_size
    if actual != expected:
        raise CsiFormatError(f"{path}: size {actual} bytes, header implies {expected}")
    return hdr


def _payload(path, hdr: CsiHeader) -> np.ndarray:
    return np.memmap(path, dtype=SAMPLE, mode="r", offset=HEADER.size,
                     shape=(hdr.n, hdr.m, hdr.l, hdr.k))


def iter_captures(path):
    """Yield each capture as a complex128 :class:`CsiCapture`."""
    hdr = read_header(path)
    payload = _payload(path, hdr)
    array, sampling = hdr.array, hdr.sampling
    for i in range(hdr.n):
        data = np.asarray(payload[i]).transpose(2, 1, 0).astype(np.complex128)
        yield CsiCapture(data, i * hdr.delta_t_cap, array, sampling)


def read_csi(path) -> tuple[CsiHeader, np.ndarray]:
    """Whole file as ``(header, complex64 array shaped (N, K, L, M))``."""
    hdr = read_header(path)
    return hdr, np.array(_payload(path, hdr)).transpose(0, 3, 2, 1)


def _write_rows(path, header, rows) -> None:
    with atomic_path(path) as tmp:
        with open(tmp, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)


def write_truth_csv(path, truth: GroundTruth) -> None:
    rows = ((i, repr(float(t)), repr(float(w)), repr(float(d)), repr(float(a)))
            for i, (t, w, d, a) in enumerate(zip(truth.time_s, truth.water_m, truth.d1_m, truth.aoa_deg)))
    _write_rows(path, ["capture_index", "time_s", "water_m", "d1_m", "aoa_deg"], rows)


def read_truth_csv(path) -> dict[str, np.ndarray]:
    data = np.genfromtxt(path, delimiter=",", names=True)
    return {name: np.atleast_1d(data[name]) for name in data.dtype.names}


def write_level_csv(path, level: WaterLevelSeries, time_s) -> None:
    phase = level.phase if level.phase is not None else np.full(len(level.delta_w), np.nan)
    rows = ((i, repr(float(t)), repr(float(w)), repr(float(d)), repr(float(p)))
            for i, (t, w, d, p) in enumerate(zip(time_s, level.delta_w, level.path_delta, phase)))
    _write_rows(path, ["capture_index", "time_s", "delta_w_m", "path_delta_m", "phase_rad"], rows)


def read_level_csv(path) -> dict[str, np.ndarray]:
    return read_truth_csv(path)


def write_spectrum_csv(path, grid: SpectrumGrid) -> None:
    """Rows are AoAs, columns Doppler bins; the header row carries the Doppler axis."""
    header = ["theta_deg\\f_hz", *(repr(float(f)) for f in grid.f_axis)]
    rows = ([repr(float(t)), *(repr(float(p)) for p in row)] for t, row in zip(grid.theta_axis, grid.power))
    _write_rows(path, header, rows)


def read_spectrum_csv(path) -> SpectrumGrid:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    f_axis = np.array([float(v) for v in rows[0][1:]])
    body = np.array([[float(v) for v in r] for r in rows[1:]])
    return SpectrumGrid(body[:, 0], f_axis, body[:, 1:])


def write_curve_csv(path, d_tr, delta_aoa) -> None:
    rows = ((repr(float(d)), repr(float(a))) for d, a in zip(d_tr, delta_aoa))
    _write_rows(path, ["d_tr_m", "delta_aoa_deg"], rows)


def write_calibration(path, model: ArrayErrorModel) -> None:
    """JSON mapping antenna index to ``gain`` and total ``phase_deg`` (RCO folded in)."""
    phases = np.degrees(model.total_phases)
    doc = {str(i): {"gain": float(g), "phase_deg": float(p)} for i, (g, p) in enumerate(zip(model.gains, phases))}
    with atomic_path(path) as tmp:
        tmp.write_text(json.dumps(doc, indent=2) + "\n")


def read_calibration(path) -> ArrayErrorModel:
    try:
        doc = json.loads(Path(path).read_text())
        idx = sorted(int(k) for k in doc)
        if idx != list(range(len(idx))):
            raise ValueError(f"antenna indices {idx} are not 0..M-1")
        gains = [float(doc[str(i)]["gain"]) for i in idx]
        phases = [np.radians(float(doc[str(i)]["phase_deg"])) for i in idx]
        return ArrayErrorModel(gains, phases)
    except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise CsiFormatError(f"{path}: invalid calibration file: {exc}") from exc


def save_snapshot(path, snapshot: BasebandSnapshot) -> None:
    with atomic_path(path) as tmp:
        with open(tmp, "wb") as fh:
            np.save(fh, snapshot.data.astype(np.complex128), allow_pickle=False)


def load_snapshot(path, sources: int = 1) -> BasebandSnapshot:
    try:
        data = np.load(path, allow_pickle=False)
    except (ValueError, OSError) as exc:
        raise CsiFormatError(f"{path}: unreadable snapshot: {exc}") from exc
    if data.ndim != 2 or not np.iscomplexobj(data):
        raise CsiFormatError(f"{path}: snapshot must be a 2-D complex array (M, G)")
    return BasebandSnapshot(data, sources)
