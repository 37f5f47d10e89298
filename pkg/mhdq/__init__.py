"""
mhdq: ideal compressible MHD on the quarter space.

Symmetric quasilinear assembly, structure checks, admissibility of initial
data, odd/even reflection across x3 = 0 and a method-of-lines solver whose
quarter-box and reflected half-box runs agree bit for bit.
"""

from .errors import (
    CFLError, ConfigError, DatumError, EOSDomainError, HyperbolicityError, MHDQError,
    PreconditionError, SnapshotError,
)
from .grid import Field, Grid
from .mhd_core import COMPONENTS, EquationOfState, MatrixSet, assemble, density, rhs, wave_speed_bound

__version__ = "0.1.0"

__all__ = [
    "COMPONENTS", "EquationOfState", "MatrixSet", "assemble", "density", "rhs", "wave_speed_bound",
    "Field", "Grid",
    "MHDQError", "EOSDomainError", "HyperbolicityError", "PreconditionError", "CFLError",
    "DatumError", "ConfigError", "SnapshotError",
]
