"""Water-level change estimation from bistatic downlink CSI."""

from .arrays import ArrayConfig, steering_vector
from .calib import ArrayErrorModel, calibrate, estimate_errors
from .csisim import CsiCapture, RpoModel, SamplingConfig, Scenario
from .errors import (CalibrationError, ConfigError, CsiFormatError, GeometryError, HydroSenseError,
                     IllConditionedError, PeakFindingError, UnwrapError)
from .pipeline import SenseSettings, sense, sense_series
from .scene import SETUP1, SETUP2, SETUP3, Geometry, los_aoa, reflected_path

__version__ = "0.1.0"

__all__ = [
    "ArrayConfig", "ArrayErrorModel", "CalibrationError", "ConfigError", "CsiCapture", "CsiFormatError",
    "Geometry", "GeometryError", "HydroSenseError", "IllConditionedError", "PeakFindingError", "RpoModel",
    "SETUP1", "SETUP2", "SETUP3", "SamplingConfig", "Scenario", "SenseSettings", "UnwrapError",
    "calibrate", "estimate_errors", "los_aoa", "reflected_path", "sense", "sense_series", "steering_vector",
]
