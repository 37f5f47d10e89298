"""Exception hierarchy shared by every mhdq module."""

from typing import Optional, Tuple

import numpy as np


class MHDQError(Exception):
    """Base class for all mhdq failures"""


class EOSDomainError(MHDQError):
    """Equation of state evaluated outside its domain (polytropic p <= 0)"""


class HyperbolicityError(MHDQError):
    """rho <= 0 or rho_p <= 0 at a state or grid cell"""

    def __init__(self, message: str, location: Optional[Tuple[int, ...]] = None,
                 state: Optional[np.ndarray] = None):
        super().__init__(message)
        self.location = location
        self.state = None if state is None else np.array(state, dtype=float)

    def __str__(self):
        text = super().__str__()
        if self.location is not None:
            text += f" at cell {self.location}"
        if self.state is not None:
            text += f" (U={np.array2string(self.state, precision=6)})"
        return text


class PreconditionError(MHDQError):
    """Arguments violate the trace or admissibility precondition of an operation"""


class CFLError(MHDQError):
    """Time step above the CFL bound"""


class DatumError(MHDQError):
    """Invalid preset recipe or an initial datum rejected by the compatibility checks"""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ConfigError(MHDQError):
    """Scenario configuration could not be read or validated"""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        super().__init__(message)
        self.key = key
        self.line = line

    def __str__(self):
        text = super().__str__()
        if self.line is not None:
            text = f"line {self.line}: {text}"
        return text


class SnapshotError(MHDQError):
    """Malformed snapshot file"""
