"""Beamformer weight container and shared covariance helpers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RELATIVE_LOADING = 1e-3
CONSTRAINT_TOL = 1e-9


@dataclass(frozen=True)
class BeamWeights:
    """Weight vector ``w`` (output is ``w^H x``) and the ``(aoa_deg, gain)`` constraints it meets."""

    w: np.ndarray
    constraints: tuple[tuple[float, complex], ...] = ()

    def response(self, steering: np.ndarray) -> np.ndarray:
        return self.w.conj() @ steering


def relative_loading(cov: np.ndarray) -> float:
    """Scale-free diagonal loading: ``1e-3 * trace(R) / M``."""
    m = cov.shape[-1]
    return RELATIVE_LOADING * float(np.real(np.trace(cov, axis1=-2, axis2=-1)).mean()) / m


def hermitize(r: np.ndarray) -> np.ndarray:
    return 0.5 * (r + np.swapaxes(r.conj(), -1, -2))
