"""Scenario geometry for a bistatic link across a water body.

Angle convention (used everywhere in the package):

* The receive ULA is tilted ``theta_inc`` degrees from vertical, so a ray
  arriving horizontally sits at ``theta_inc`` from broadside.
* A ray arriving with elevation ``e`` (positive from above the horizon)
  has AoA ``theta_inc + e``. The LOS from an elevated transmitter arrives
  from above; the water-reflected ray arrives from below at depression
  equal to the grazing angle ``alpha``, hence ``aoa = theta_inc - alpha``.
* ``alpha`` is measured from the water surface, so that a small vertical
  water change ``dw`` changes the reflected path by ``-2 dw sin(alpha)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError

MIN_GRAZING_DEG = 0.1


@dataclass(frozen=True)
class Geometry:
    """Tx/Rx/water layout. Distances and heights in metres, angles in degrees."""

    d_tr: float
    d_rw: float
    d_tw: float
    h_t: float
    h_r: float
    h_w0: float
    theta_inc: float

    def __post_init__(self):
        for name in ("d_tr", "d_rw", "d_tw", "h_t", "h_r", "h_w0"):
            if getattr(self, name) < 0:
                raise GeometryError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.d_tr <= 0:
            raise GeometryError("d_tr must be > 0")
        if self.h_w0 >= min(self.h_t, self.h_r):
            raise GeometryError("h_w0 must lie below both antennas")
        if self.d_tw + self.d_rw > self.d_tr:
            raise GeometryError("d_tw + d_rw exceeds d_tr")

    def with_distance(self, d_tr):
        scale = d_tr / self.d_tr
        return Geometry(d_tr, self.d_rw * scale, self.d_tw * scale,
                        self.h_t, self.h_r, self.h_w0, self.theta_inc)


@dataclass(frozen=True)
class PathGeometry:
    length: float
    aoa: float
    reflection_angle: float
    is_los: bool


# Reference deployments. Only level changes matter, so the water datum is
# placed at 0 m.
SETUP1 = Geometry(d_tr=423.0, d_rw=0.75, d_tw=160.0, h_t=45.0, h_r=4.0, h_w0=0.0, theta_inc=42.0)
SETUP2 = Geometry(d_tr=465.0, d_rw=34.0, d_tw=151.0, h_t=45.0, h_r=10.0, h_w0=0.0, theta_inc=27.0)
SETUP3 = Geometry(d_tr=423.0, d_rw=0.75, d_tw=160.0, h_t=45.0, h_r=4.0, h_w0=0.0, theta_inc=27.0)
SETUPS = {"setup1": SETUP1, "setup2": SETUP2, "setup3": SETUP3}


def reflected_path(geom: Geometry, w: float) -> PathGeometry:
    """Specular water-reflected path for water surface height ``w``.

    Uses the mirror-image transmitter: the unfolded path spans ``d_tr``
    horizontally and ``h_t + h_r - 2w`` vertically.
    """
    if w >= min(geom.h_t, geom.h_r):
        raise GeometryError(f"water height {w} m is not below both antennas")
    vertical = geom.h_t + geom.h_r - 2.0 * w
    alpha = math.degrees(math.atan2(vertical, geom.d_tr))
    if alpha < MIN_GRAZING_DEG:
        raise GeometryError(f"grazing angle {alpha:.4f} deg is below {MIN_GRAZING_DEG} deg")
    aoa = geom.theta_inc - alpha
    if abs(aoa) >= 90.0:
        raise GeometryError(f"reflected AoA {aoa:.2f} deg is outside the array field of view")
    return PathGeometry(math.hypot(geom.d_tr, vertical), aoa, alpha, False)


def los_aoa(geom: Geometry) -> float:
    return geom.theta_inc + math.degrees(math.atan2(geom.h_t - geom.h_r, geom.d_tr))


def los_path(geom: Geometry) -> PathGeometry:
    aoa = los_aoa(geom)
    if abs(aoa) >= 90.0:
        raise GeometryError(f"LOS AoA {aoa:.2f} deg is outside the array field of view")
    elevation = math.degrees(math.atan2(geom.h_t - geom.h_r, geom.d_tr))
    return PathGeometry(math.hypot(geom.d_tr, geom.h_t - geom.h_r), aoa, elevation, True)


def aoa_variation_study(geom: Geometry, delta_w: float, d_tr_range) -> tuple[np.ndarray, np.ndarray]:
    """|AoA change| of the reflected path for a ``delta_w`` water rise, per Tx-Rx distance.

    Returns ``(d_tr, delta_aoa_deg)`` arrays.
    """
    if delta_w < 0:
        raise GeometryError("delta_w must be >= 0")
    distances = np.atleast_1d(np.asarray(d_tr_range, dtype=float))
    out = np.empty_like(distances)
    for i, d in enumerate(distances):
        g = geom.with_distance(d)
        before = reflected_path(g, g.h_w0).aoa
        after = reflected_path(g, g.h_w0 + delta_w).aoa
        out[i] = abs(after - before)
    return distances, out
