"""Per-output monitors: divergence, energy, Sobolev norms, wall traces and parity."""

import itertools
import math
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from .grid import Field, Grid
from .mhd_core import H1, H2, H3, NVAR, P, S, U3, EquationOfState
from .reductions import SlabPool, pairwise_sum
from .reflection import parity_defect
from .stencils import central_derivative, face_interpolate, face_trace

COLUMNS = ["step", "t", "dt", "divH_max", "energy", "H0", "H1", "H2", "H3",
           "trace_u3", "trace_H3", "parity_defect"]

# cells next to an x1 wall see the even H1 ghosts
WALL_LAYERS = 2


@dataclass
class DiagnosticRecord:
    step: int
    t: float
    dt: float
    divH_max: float
    energy: float
    H0: float
    H1: float
    H2: float
    H3: float
    trace_u3: float
    trace_H3: float
    parity_defect: float

    def to_dict(self) -> Dict:
        return asdict(self)

    @property
    def sobolev(self) -> Tuple[float, float, float, float]:
        return (self.H0, self.H1, self.H2, self.H3)


def history_frame(records: List[DiagnosticRecord]) -> pd.DataFrame:
    return pd.DataFrame([r.to_dict() for r in records], columns=COLUMNS)


def divergence_max(field: Field) -> float:
    """max |div H| with the fourth-order central stencil over cells clear of the x1 walls"""
    h = field.grid.spacing
    div = central_derivative(field.data[H1:H1 + 1], 1, h[0])
    div = div + central_derivative(field.data[H2:H2 + 1], 2, h[1])
    div = div + central_derivative(field.data[H3:H3 + 1], 3, h[2])
    if not field.grid.periodic[0] and div.shape[1] > 2 * WALL_LAYERS:
        div = div[:, WALL_LAYERS:-WALL_LAYERS]
    return float(np.max(np.abs(div)))


def total_energy(eos: EquationOfState, field: Field, pool: Optional[SlabPool] = None) -> float:
    """sum over cells of (rho |u|^2 / 2 + |H|^2 / 2) times the cell volume"""
    U = field.interior
    rho, _ = eos.density(U[P], U[S])
    kinetic = (U[1] * U[1] + U[2] * U[2]) + U[3] * U[3]
    magnetic = (U[4] * U[4] + U[5] * U[5]) + U[6] * U[6]
    density = (0.5 * rho * kinetic + 0.5 * magnetic) * field.grid.cell_volume
    return pool.pairwise_sum(density) if pool is not None else pairwise_sum(density)


def sobolev_norms(values: np.ndarray, grid: Grid, k_max: int = 3,
                  pool: Optional[SlabPool] = None) -> List[float]:
    """
    Discrete H^k norms, k = 0..k_max, of an (8, m1, m2, m3) array.

    Mixed derivatives come from repeated second-order np.gradient (one-sided
    at the ends) and are cached by their sorted multi-index.
    """
    spacing = grid.spacing
    cache = {(): values}

    def partial(alpha):
        if alpha not in cache:
            base = partial(alpha[:-1])
            axis = alpha[-1]
            cache[alpha] = np.gradient(base, spacing[axis], axis=axis + 1, edge_order=2)
        return cache[alpha]

    summer = pool.pairwise_sum if pool is not None else pairwise_sum
    norms = []
    total = 0.0
    for order in range(k_max + 1):
        for alpha in itertools.combinations_with_replacement(range(3), order):
            d = partial(alpha)
            total += summer(d * d) * grid.cell_volume
        norms.append(math.sqrt(total))
    return norms


def wall_traces(field: Field) -> Tuple[float, float]:
    """
    max |u3| and |H3| on the x3 = 0 face.

    The quarter box reads its four nearest cell centers one-sidedly, so the
    mirrored ghosts play no part. The half box interpolates symmetrically
    across its interior face; ghosts must be filled there.
    """
    grid = field.grid
    if grid.kind == "periodic" or grid.cells[2] < 4:
        return math.nan, math.nan
    if grid.kind == "half":
        trace = face_trace(field.data[[U3, H3]], 3, grid.cells[2])
    else:
        trace = face_interpolate(field.interior[[U3, H3]], 3, "lower")
    return float(np.max(np.abs(trace[0]))), float(np.max(np.abs(trace[1])))


def diagnostics(eos: EquationOfState, field: Field, background: np.ndarray, step: int = 0,
                t: float = 0.0, dt: float = 0.0, pool: Optional[SlabPool] = None) -> DiagnosticRecord:
    """Monitors of a ghost-filled field relative to the constant background"""
    grid = field.grid
    pert = field.interior - np.asarray(background).reshape(NVAR, 1, 1, 1)
    norms = sobolev_norms(pert, grid, 3, pool)
    trace_u3, trace_h3 = wall_traces(field)
    defect = float(np.max(parity_defect(field))) if grid.kind == "half" else math.nan
    return DiagnosticRecord(
        step=step,
        t=t,
        dt=dt,
        divH_max=divergence_max(field),
        energy=total_energy(eos, field, pool),
        H0=norms[0],
        H1=norms[1],
        H2=norms[2],
        H3=norms[3],
        trace_u3=trace_u3,
        trace_H3=trace_h3,
        parity_defect=defect,
    )
