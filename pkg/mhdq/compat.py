"""
Formal time derivatives of initial data and the admissibility checks on them.

All checks run on gridded data without ghost cells: spatial derivatives use
the fourth-order stencils of ``stencils.derivative`` (one-sided next to walls)
and wall values come from one-sided face extrapolation.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from .autodiff import rhs_state_derivative
from .errors import DatumError
from .grid import Field, Grid
from .mhd_core import (
    MAGNETIC, NVAR, P, VELOCITY, H1, H3, U3, EquationOfState, check_hyperbolic,
    max_characteristic_speed, quasilinear_rhs,
)
from .reflection import interface_smoothness, parity_defect
from .stencils import (
    ONE_SIDED_MIN_CELLS, derivative, face_normal_derivative, face_second_derivative, face_value,
)

logger = logging.getLogger(__name__)

EVEN_AT_GAMMA0 = (0, 1, 2, 4, 5, 7)
ODD_AT_GAMMA0 = (U3, H3)
MAX_SCALE_ORDER = 5


def background_state(c: float, pressure: float = 0.0) -> np.ndarray:
    """(p0, 0, 0, 0, c, 0, 0, 0)"""
    bg = np.zeros(NVAR)
    bg[P] = pressure
    bg[H1] = c
    return bg


@dataclass
class InitialDatum:
    """Gridded U0 together with the constant background it perturbs"""
    field: Field
    background: np.ndarray
    recipe: str = "custom"
    amplitude: float = 0.0

    @property
    def grid(self) -> Grid:
        return self.field.grid

    @property
    def values(self) -> np.ndarray:
        return self.field.interior

    def perturbation(self) -> np.ndarray:
        return self.values - self.background.reshape(NVAR, 1, 1, 1)


@dataclass
class CompatTolerances:
    """Knobs of the discrete admissibility checks"""
    tol_factor: float = 10.0
    h1_threshold: float = 0.1
    roundoff: float = 1e-12
    smoothness_limit: float = 4.0


@dataclass
class ConditionRecord:
    name: str
    violation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.violation <= self.tolerance)

    def to_dict(self) -> Dict:
        return {"name": self.name, "violation": self.violation,
                "tolerance": self.tolerance, "passed": self.passed}


@dataclass
class CompatReport:
    kind: str
    records: List[ConditionRecord] = field(default_factory=list)

    def add(self, name: str, violation: float, tolerance: float):
        self.records.append(ConditionRecord(name, float(violation), float(tolerance)))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> List[ConditionRecord]:
        return [r for r in self.records if not r.passed]

    def get(self, name: str) -> ConditionRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_text(self) -> str:
        width = max((len(r.name) for r in self.records), default=4)
        lines = [f"{r.name:<{width}}  {r.violation:.6e}  {r.tolerance:.6e}  "
                 f"{'PASS' if r.passed else 'FAIL'}" for r in self.records]
        return "\n".join(lines)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.to_dict() for r in self.records])


def spatial_gradients(values: np.ndarray, grid: Grid) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Fourth-order dU/dx_j of an (8, m1, m2, m3) array"""
    return tuple(derivative(values, axis + 1, grid.spacing[axis], grid.periodic[axis])
                 for axis in range(3))


def time_derivatives(eos: EquationOfState, d: InitialDatum, k_max: int = 2) -> List[Field]:
    """dt^k U0 for k = 0..k_max (k_max <= 2) from the equations themselves"""
    if not 0 <= k_max <= 2:
        raise ValueError("time derivatives are available up to order 2")
    U = np.ascontiguousarray(d.values)
    check_hyperbolic(eos, U)
    grid = d.grid
    out = [Field.from_interior(grid, U)]
    if k_max == 0:
        return out
    grads = spatial_gradients(U, grid)
    dt1 = quasilinear_rhs(eos, U, grads)
    out.append(Field.from_interior(grid, dt1))
    if k_max == 1:
        return out
    dt2 = rhs_state_derivative(eos, U, grads, dt1) + quasilinear_rhs(eos, U, spatial_gradients(dt1, grid))
    out.append(Field.from_interior(grid, dt2))
    return out


def derivative_scales(values: np.ndarray, grid: Grid, max_order: int = MAX_SCALE_ORDER) -> List[float]:
    """S_r = largest r-th undivided difference over h^r, r = 0..max_order"""
    scales = [float(np.max(np.abs(values)))]
    for r in range(1, max_order + 1):
        s = 0.0
        for axis in range(3):
            if values.shape[axis + 1] > r:
                diff = np.diff(values, n=r, axis=axis + 1)
                s = max(s, float(np.max(np.abs(diff))) / grid.spacing[axis] ** r)
        scales.append(s)
    return scales


class _Tolerance:
    """tol = factor * h_max^2 * S_{3+r} * V^k plus a round-off floor"""

    def __init__(self, eos: EquationOfState, d: InitialDatum, knobs: CompatTolerances):
        grid = d.grid
        self.knobs = knobs
        self.scales = derivative_scales(d.perturbation(), grid)
        self.h_max = max(grid.spacing)
        self.h_min = min(grid.spacing)
        self.speed = float(np.max(max_characteristic_speed(eos, d.values)))
        self.floor = knobs.roundoff * max(1.0, float(np.max(np.abs(d.background))), self.scales[0])

    def __call__(self, extra_orders: int = 0, time_order: int = 0) -> float:
        r = min(3 + extra_orders, MAX_SCALE_ORDER)
        truncation = self.knobs.tol_factor * self.h_max ** 2 * self.scales[r] * self.speed ** time_order
        return truncation + self.floor * max(1.0, self.speed / self.h_min) ** time_order


def _faces(axis: int):
    return ((axis, "lower"), (axis, "upper"))


def _face_max(values: np.ndarray, comps, faces) -> float:
    worst = 0.0
    for axis, side in faces:
        worst = max(worst, float(np.max(np.abs(face_value(values[list(comps)], axis, side)))))
    return worst


def _divergence(values: np.ndarray, grid: Grid) -> np.ndarray:
    div = derivative(values[MAGNETIC[0]], 0, grid.spacing[0], grid.periodic[0])
    div = div + derivative(values[MAGNETIC[1]], 1, grid.spacing[1], grid.periodic[1])
    return div + derivative(values[MAGNETIC[2]], 2, grid.spacing[2], grid.periodic[2])


def _require_stencil_room(grid: Grid):
    for axis in range(3):
        if not grid.periodic[axis] and grid.shape[axis] < ONE_SIDED_MIN_CELLS:
            raise DatumError(f"x{axis + 1} has {grid.shape[axis]} cells; the checks need at least "
                             f"{ONE_SIDED_MIN_CELLS} along a walled axis")


def _common(eos: EquationOfState, d: InitialDatum, report: CompatReport, tol: _Tolerance):
    report.add("div_free", float(np.max(np.abs(_divergence(d.values, d.grid)))), tol())
    if eos.kind == "polytropic":
        report.add("pressure_positive", max(0.0, -float(np.min(d.values[P]))), 0.0)


def _gamma1(d: InitialDatum, derivs: List[Field], report: CompatReport, tol: _Tolerance,
            knobs: CompatTolerances):
    x1_faces = _faces(1)
    threshold = knobs.h1_threshold * abs(float(d.background[H1]))
    smallest = min(float(np.min(np.abs(face_value(d.values[H1], 0, side)))) for side in ("lower", "upper"))
    report.add("gamma1_H1_nonzero", max(0.0, threshold - smallest), 0.0)
    for k, f in enumerate(derivs):
        report.add(f"gamma1_u_k{k}", _face_max(f.interior, VELOCITY, x1_faces), tol(k, k))


def check_all(eos: EquationOfState, d: InitialDatum,
              tolerances: Optional[CompatTolerances] = None) -> CompatReport:
    """Every admissibility hypothesis on the datum's grid, one record per condition"""
    knobs = tolerances or CompatTolerances()
    _require_stencil_room(d.grid)
    if d.grid.kind == "half":
        return check_extended(eos, d, knobs)
    tol = _Tolerance(eos, d, knobs)
    report = CompatReport(kind=d.grid.kind)
    _common(eos, d, report, tol)
    if d.grid.kind == "periodic":
        logger.info("compat (periodic): %d conditions, passed=%s", len(report.records), report.passed)
        return report

    derivs = time_derivatives(eos, d, 2)
    _gamma1(d, derivs, report, tol, knobs)

    x3_faces = _faces(3)
    for k, f in enumerate(derivs):
        report.add(f"gamma0_auto_k{k}", _face_max(f.interior, ODD_AT_GAMMA0, x3_faces), tol(k, k))

    pert = d.perturbation()
    h3 = d.grid.spacing[2]
    report.add("trace_N_value", _face_max(pert, ODD_AT_GAMMA0, x3_faces), tol())
    normal = max(float(np.max(np.abs(face_normal_derivative(pert[list(EVEN_AT_GAMMA0)], 3, side, h3))))
                 for side in ("lower", "upper"))
    report.add("trace_Nperp_normal_derivative", normal, tol())
    second = max(float(np.max(np.abs(face_second_derivative(pert[list(ODD_AT_GAMMA0)], 3, side, h3))))
                 for side in ("lower", "upper"))
    report.add("trace_N_second_derivative", second, tol(1))

    _log_report(report)
    return report


def check_extended(eos: EquationOfState, d: InitialDatum,
                   tolerances: Optional[CompatTolerances] = None) -> CompatReport:
    """Hypotheses of the half-space problem for an x3-reflected datum"""
    knobs = tolerances or CompatTolerances()
    if d.grid.kind != "half":
        raise ValueError("check_extended needs a half-box datum")
    _require_stencil_room(d.grid)
    tol = _Tolerance(eos, d, knobs)
    report = CompatReport(kind="half")
    _common(eos, d, report, tol)
    _gamma1(d, time_derivatives(eos, d, 2), report, tol, knobs)
    report.add("parity_exact", float(np.max(parity_defect(d.field))), 0.0)
    for r, ratio in interface_smoothness(d.field).items():
        report.add(f"interface_smoothness_r{r}", ratio, knobs.smoothness_limit)
    _log_report(report)
    return report


def _log_report(report: CompatReport):
    failed = report.failures()
    if failed:
        logger.info("compat (%s): %d of %d conditions failed: %s", report.kind, len(failed),
                    len(report.records), ", ".join(r.name for r in failed))
    else:
        logger.info("compat (%s): all %d conditions passed", report.kind, len(report.records))
    for r in report.records:
        logger.debug("  %s violation=%.3e tol=%.3e", r.name, r.violation, r.tolerance)
