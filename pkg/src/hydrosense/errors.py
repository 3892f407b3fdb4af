"""Exception types shared across the package."""


class HydroSenseError(Exception):
    """Base class for all package errors."""

    exit_code = 1
    kind = "error"


class GeometryError(HydroSenseError, ValueError):
    exit_code = 8
    kind = "geometry"


class ConfigError(HydroSenseError, ValueError):
    exit_code = 3
    kind = "config"

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class CsiFormatError(HydroSenseError, ValueError):
    exit_code = 4
    kind = "format"


class PeakFindingError(HydroSenseError, RuntimeError):
    exit_code = 5
    kind = "peaks"


class CalibrationError(HydroSenseError, RuntimeError):
    exit_code = 6
    kind = "calibration"


class UnwrapError(HydroSenseError, ValueError):
    exit_code = 7
    kind = "unwrap"


class IllConditionedError(HydroSenseError, ArithmeticError):
    exit_code = 9
    kind = "conditioning"
