"""Random phase offset (RPO) removal using an MVDR beam on the static LOS path.

Per subcarrier the MVDR beam toward the LOS gives a reference whose phase
over symbols tracks the common clock-offset rotation; de-rotating every
antenna by that phase leaves all paths with a time-invariant residue.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .arrays import steering_vector
from .beams import RELATIVE_LOADING, BeamWeights, hermitize
from .csisim import CsiCapture
from .errors import IllConditionedError


@dataclass(frozen=True)
class RpoEstimate:
    """Per-(subcarrier, symbol) reference phase in ``(-pi, pi]``, shape ``(K, L)``.

    A constant offset per subcarrier remains after compensation and cannot be
    identified from the data.
    """

    phases: np.ndarray


def subcarrier_cov(h_k: np.ndarray, rho: float) -> np.ndarray:
    """``(1/L) H H^H + rho I`` for an ``(M, L)`` slice (or a stack ``(..., M, L)``)."""
    if rho < 0:
        raise ValueError("rho must be >= 0")
    m, l = h_k.shape[-2:]
    r = h_k @ np.swapaxes(h_k.conj(), -1, -2) / l
    return hermitize(r) + rho * np.eye(m)


def mvdr_weights(r: np.ndarray, a0: np.ndarray) -> BeamWeights:
    """Distortionless toward ``a0``: ``w = R^-1 a0 / (a0^H R^-1 a0)``."""
    w = _mvdr(r[None], a0)[0]
    return BeamWeights(w, ((np.nan, 1.0),))


def _mvdr(r: np.ndarray, a0: np.ndarray) -> np.ndarray:
    ria = np.linalg.solve(r, np.broadcast_to(a0, r.shape[:-1])[..., None])[..., 0]
    denom = ria @ a0.conj()
    w = ria / denom[..., None]
    if not np.all(np.isfinite(w)):
        raise IllConditionedError("MVDR solve produced non-finite weights")
    return w


def capture_covariances(capture: CsiCapture) -> np.ndarray:
    """Unloaded per-subcarrier covariances ``(K, M, M)``; the RPO cancels in them."""
    return subcarrier_cov(np.swapaxes(capture.data, 1, 2), 0.0)


def pooled_covariances(captures) -> np.ndarray:
    """Average of :func:`capture_covariances` over a record.

    Within one capture the LOS and water paths are mutually coherent, so an
    MVDR beam built from that capture alone cannot null the water path. Over
    a record the water path rotates against the LOS and decorrelates from it.
    """
    total, count = None, 0
    for cap in captures:
        r = capture_covariances(cap)
        total = r if total is None else total + r
        count += 1
    if count == 0:
        raise ValueError("no captures to pool")
    return total / count


def estimate_rpo(capture: CsiCapture, theta0: float, rho: float | None = None,
                 cov: np.ndarray | None = None) -> RpoEstimate:
    """Reference phases from an MVDR beam toward ``theta0`` on every subcarrier.

    ``cov`` overrides the per-capture ``(K, M, M)`` covariances, e.g. with
    :func:`pooled_covariances`. ``rho`` defaults to ``1e-3 * trace(R_k) / M``
    per subcarrier.
    """
    if capture.array.m < 2:
        raise ValueError("RPO compensation needs M >= 2")
    h = np.swapaxes(capture.data, 1, 2)  # (K, M, L)
    r = subcarrier_cov(h, 0.0) if cov is None else np.asarray(cov)
    if r.shape != (h.shape[0], h.shape[1], h.shape[1]):
        raise ValueError(f"covariance stack shape {r.shape} does not match capture")
    m = capture.array.m
    if rho is None:
        load = RELATIVE_LOADING * np.real(np.trace(r, axis1=1, axis2=2)) / m
    else:
        load = np.full(r.shape[0], float(rho))
    # an all-zero subcarrier gets unit loading: any scale yields w = a0 / M
    load = np.where(load > 0, load, 1.0)
    r = r + load[:, None, None] * np.eye(m)
    a0 = steering_vector(capture.array, theta0)
    w = _mvdr(r, a0)
    ref = np.einsum("km,kml->kl", w.conj(), h)
    return RpoEstimate(np.angle(ref))


def compensate(capture: CsiCapture, est: RpoEstimate) -> CsiCapture:
    """De-rotate each ``(k, l)`` by the estimated phase; magnitudes are untouched."""
    if est.phases.shape != capture.data.shape[:2]:
        raise ValueError(f"RPO estimate shape {est.phases.shape} != capture {capture.data.shape[:2]}")
    data = capture.data * np.exp(-1j * est.phases)[:, :, None]
    return dataclasses.replace(capture, data=data)
