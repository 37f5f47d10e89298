"""
Method-of-lines solver for the quasilinear MHD system on boxed domains.

Spatial terms use fourth-order central differences plus a five-point
fourth-difference dissipation scaled by the local fast speed; time stepping is
classical RK4. Walls are closed by ghost cells: signed mirrors with u3, H3 odd
across x3 walls and the whole velocity odd across x1 walls. x2 always wraps.
Every kernel is elementwise with a fixed operation order, so a run on the
half box from reflected data equals the quarter-box run bit for bit.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .compat import InitialDatum, check_all, check_extended
from .diagnostics import DiagnosticRecord, diagnostics, history_frame
from .errors import CFLError, DatumError
from .grid import GHOST, Field, Grid, window
from .mhd_core import NVAR, EquationOfState, check_hyperbolic, max_characteristic_speed, quasilinear_rhs
from .reductions import SlabPool
from .reflection import GAMMA0_PARITY, GAMMA1_PARITY, ParitySignature, extend, restrict
from .stencils import central_derivative, ko_difference

logger = logging.getLogger(__name__)

CFL_SLACK = 1e-12


def _index(ndim: int, axis: int, i: int) -> Tuple:
    idx = [slice(None)] * ndim
    idx[axis] = i
    return tuple(idx)


def _wrap(data: np.ndarray, axis: int):
    m = data.shape[axis] - 2 * GHOST
    for k in range(1, GHOST + 1):
        data[_index(data.ndim, axis, GHOST - k)] = data[_index(data.ndim, axis, GHOST + m - k)]
        data[_index(data.ndim, axis, GHOST + m - 1 + k)] = data[_index(data.ndim, axis, GHOST + k - 1)]


def _reflect(data: np.ndarray, axis: int, parity: ParitySignature):
    m = data.shape[axis] - 2 * GHOST
    signs = parity.signs.reshape((NVAR,) + (1,) * (data.ndim - 2))
    for k in range(1, GHOST + 1):
        data[_index(data.ndim, axis, GHOST - k)] = signs * data[_index(data.ndim, axis, GHOST + k - 1)]
        data[_index(data.ndim, axis, GHOST + m - 1 + k)] = signs * data[_index(data.ndim, axis, GHOST + m - k)]


def apply_bc(f: Field) -> Field:
    """Fill ghost cells in place (x1, then x2, then x3) and return the field"""
    grid = f.grid
    if grid.periodic[0]:
        _wrap(f.data, 1)
    else:
        _reflect(f.data, 1, GAMMA1_PARITY)
    _wrap(f.data, 2)
    if grid.periodic[2]:
        _wrap(f.data, 3)
    else:
        _reflect(f.data, 3, GAMMA0_PARITY)
    return f


def semidiscrete_rhs(eos: EquationOfState, padded: np.ndarray, spacing: Sequence[float],
                     epsilon: float, x1_range: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """dU/dt on the interior cells of an x1 slab of a ghost-filled array"""
    lo = 0 if x1_range is None else x1_range[0]
    U = np.ascontiguousarray(window(padded, 1, 0, x1_range))
    check_hyperbolic(eos, U, offset=(lo, 0, 0))
    grads = tuple(central_derivative(padded, axis + 1, spacing[axis], x1_range) for axis in range(3))
    out = quasilinear_rhs(eos, U, grads)
    if epsilon > 0.0:
        speed = max_characteristic_speed(eos, U)
        damp = ko_difference(padded, 1, x1_range) / spacing[0]
        damp = damp + ko_difference(padded, 2, x1_range) / spacing[1]
        damp = damp + ko_difference(padded, 3, x1_range) / spacing[2]
        out = out - (epsilon * speed) * damp
    return out


@dataclass
class RunState:
    t: float
    field: Field
    steps: int = 0
    history: List[DiagnosticRecord] = field(default_factory=list)
    dts: List[float] = field(default_factory=list)

    def history_frame(self) -> pd.DataFrame:
        return history_frame(self.history)


class MHDSolver:
    """RK4 integrator bound to one closure, grid and dissipation setting"""

    def __init__(self, eos: EquationOfState, grid: Grid, cfl: float = 0.5, epsilon: float = 0.02,
                 pool: Optional[SlabPool] = None):
        if not 0.0 < cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")
        if epsilon < 0.0:
            raise ValueError("epsilon must be non-negative")
        self.eos = eos
        self.grid = grid
        self.cfl = cfl
        self.epsilon = epsilon
        self.pool = pool if pool is not None else SlabPool(0)

    def apply_bc(self, f: Field) -> Field:
        return apply_bc(f)

    def rhs(self, f: Field) -> np.ndarray:
        apply_bc(f)
        spacing = self.grid.spacing
        ranges = self.pool.slab_ranges(self.grid.shape[0])
        parts = self.pool.map(lambda r: semidiscrete_rhs(self.eos, f.data, spacing, self.epsilon, r),
                              ranges)
        return parts[0] if len(parts) == 1 else np.concatenate(parts, axis=1)

    def max_speed(self, f: Field) -> float:
        return float(np.max(max_characteristic_speed(self.eos, np.ascontiguousarray(f.interior))))

    def stable_dt(self, f: Field) -> float:
        return self.cfl * min(self.grid.spacing) / self.max_speed(f)

    def _stage(self, base: Field, k: np.ndarray, scale: float) -> Field:
        out = Field(base.grid, np.zeros_like(base.data))
        out.interior[...] = base.interior + scale * k
        return out

    def step(self, rs: RunState, dt: float, check_cfl: bool = True) -> RunState:
        """One RK4 step; the returned state has its ghosts filled"""
        if check_cfl:
            bound = self.stable_dt(rs.field)
            if dt > bound * (1.0 + CFL_SLACK):
                raise CFLError(f"dt={dt:.6e} exceeds the CFL bound {bound:.6e}")
        U0 = rs.field.copy()
        k1 = self.rhs(U0)
        k2 = self.rhs(self._stage(U0, k1, 0.5 * dt))
        k3 = self.rhs(self._stage(U0, k2, 0.5 * dt))
        k4 = self.rhs(self._stage(U0, k3, dt))
        new = Field(U0.grid, np.zeros_like(U0.data))
        new.interior[...] = U0.interior + (dt / 6.0) * ((k1 + k4) + 2.0 * (k2 + k3))
        apply_bc(new)
        logger.debug("step %d: t=%.6e dt=%.6e", rs.steps + 1, rs.t + dt, dt)
        return RunState(t=rs.t + dt, field=new, steps=rs.steps + 1, history=rs.history,
                        dts=rs.dts + [dt])

    def evolve(self, f: Field, background: np.ndarray, t_end: float, max_steps: int = 0,
               dt_sequence: Optional[Sequence[float]] = None, output_every: int = 0,
               record: bool = True, on_output: Optional[Callable[[RunState], None]] = None) -> RunState:
        """
        Step to t_end (or max_steps, or the end of dt_sequence).

        Without a dt_sequence dt follows the CFL rule each step, clipped to
        land on t_end. Diagnostics are recorded at step 0, every
        ``output_every`` steps and at the end.
        """
        start = f.copy()
        apply_bc(start)
        rs = RunState(t=0.0, field=start)

        def emit(state: RunState):
            if record:
                dt_last = state.dts[-1] if state.dts else 0.0
                state.history.append(diagnostics(self.eos, state.field, background, state.steps,
                                                 state.t, dt_last, self.pool))
            if on_output is not None:
                on_output(state)

        emit(rs)
        last_emitted = 0
        while True:
            if max_steps and rs.steps >= max_steps:
                break
            if dt_sequence is not None:
                if rs.steps >= len(dt_sequence):
                    break
                dt = float(dt_sequence[rs.steps])
            else:
                remaining = t_end - rs.t
                if remaining <= CFL_SLACK * max(1.0, t_end):
                    break
                dt = min(self.stable_dt(rs.field), remaining)
            rs = self.step(rs, dt, check_cfl=dt_sequence is None)
            if output_every and rs.steps % output_every == 0:
                emit(rs)
                last_emitted = rs.steps
        if last_emitted != rs.steps:
            emit(rs)
        logger.info("evolved %s: %d steps to t=%.6g", self.grid.describe(), rs.steps, rs.t)
        return rs


def step(eos: EquationOfState, rs: RunState, dt: float, cfl: float = 0.5,
         epsilon: float = 0.02) -> RunState:
    return MHDSolver(eos, rs.field.grid, cfl, epsilon).step(rs, dt)


def _pool_for(config) -> SlabPool:
    return SlabPool(0) if config.serial_reductions else SlabPool()


def integrate(eos: EquationOfState, config, datum: Optional[InitialDatum] = None,
              dt_sequence: Optional[Sequence[float]] = None, output_dir: Optional[Path] = None,
              pool: Optional[SlabPool] = None) -> RunState:
    """Run the scenario described by ``config`` (or the given datum) and return the final state"""
    from .presets import make_admissible_datum
    from .snapshot import write_diagnostics_csv, write_snapshot

    if datum is None:
        datum = make_admissible_datum(config.recipe(), config.grid(), eos)
    report = check_all(eos, datum, config.tolerances())
    if not report.passed:
        names = ", ".join(r.name for r in report.failures())
        if config.require_compat:
            raise DatumError(f"initial datum fails compatibility: {names}", report)
        logger.warning("running a datum that fails compatibility: %s", names)

    own_pool = pool is None
    pool = pool if pool is not None else _pool_for(config)
    solver = MHDSolver(eos, datum.grid, config.cfl, config.epsilon, pool)

    on_output = None
    if output_dir is not None:
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)

        def on_output(state: RunState):
            path = output_dir / f"snapshot_{datum.grid.kind}_{state.steps:06d}.mhdq"
            write_snapshot(path, state.field, state.t)

    try:
        rs = solver.evolve(datum.field, datum.background, config.t_end, config.max_steps,
                           dt_sequence, config.output_every, on_output=on_output)
    finally:
        if own_pool:
            pool.close()
    if output_dir is not None:
        write_diagnostics_csv(output_dir / f"diagnostics_{datum.grid.kind}.csv", rs.history)
    return rs


def _largest_trace(history: List[DiagnosticRecord]) -> float:
    return max((max(r.trace_u3, r.trace_H3) for r in history), default=0.0)


@dataclass
class ReflectionComparison:
    steps: int
    max_discrepancy: float
    relative_discrepancy: float
    bitwise_equal: bool
    amplitude: float
    quarter: RunState
    half: RunState

    def trace_max(self) -> float:
        """Largest x3 = 0 trace of u3 or H3 on the half run's interior face"""
        return _largest_trace(self.half.history)

    def quarter_trace_max(self) -> float:
        """Same on the quarter run's wall, read one-sidedly from the cells"""
        return _largest_trace(self.quarter.history)

    def parity_max(self) -> float:
        return max((r.parity_defect for r in self.half.history), default=0.0)


def compare_reflection(eos: EquationOfState, config, output_dir: Optional[Path] = None,
                       pool: Optional[SlabPool] = None) -> ReflectionComparison:
    """Quarter run against the restricted half run from the extended datum, same dt sequence"""
    from .presets import make_admissible_datum

    grid = config.grid()
    if grid.kind == "periodic":
        raise DatumError("reflection comparison needs a quarter or half domain")
    quarter_datum = make_admissible_datum(config.recipe(), grid.quarter(), eos)
    half_datum = InitialDatum(extend(quarter_datum.field), quarter_datum.background,
                              quarter_datum.recipe, quarter_datum.amplitude)
    if config.require_compat:
        report = check_extended(eos, half_datum, config.tolerances())
        if not report.passed:
            names = ", ".join(r.name for r in report.failures())
            raise DatumError(f"extended datum fails the half-space hypotheses: {names}", report)

    quarter = integrate(eos, config, quarter_datum, output_dir=output_dir, pool=pool)
    half = integrate(eos, config, half_datum, dt_sequence=quarter.dts, output_dir=output_dir,
                     pool=pool)

    restricted = restrict(half.field).interior
    mine = quarter.field.interior
    discrepancy = float(np.max(np.abs(restricted - mine)))
    scale = max(quarter_datum.amplitude, float(np.max(np.abs(quarter_datum.perturbation()))))
    relative = discrepancy / scale if scale > 0 else discrepancy
    bitwise = bool(np.array_equal(restricted, mine))
    logger.info("reflection comparison after %d steps: max |diff| = %.3e, bitwise=%s",
                quarter.steps, discrepancy, bitwise)
    return ReflectionComparison(quarter.steps, discrepancy, relative, bitwise,
                                quarter_datum.amplitude, quarter, half)


@dataclass
class ConvergenceResult:
    cells: List[int]
    errors: List[float]
    orders: List[float]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"n": self.cells[:-1], "error": self.errors,
                             "order": self.orders + [math.nan]})


def _low_modes(values: np.ndarray, k_max: int) -> np.ndarray:
    """Fourier coefficients k <= k_max along x1 of the x2/x3 average, referred to x1 = 0"""
    line = values.mean(axis=(2, 3))
    n = line.shape[1]
    k = np.arange(k_max + 1)
    coeffs = np.fft.rfft(line, axis=1)[:, :k_max + 1] / n
    return coeffs * np.exp(-1j * np.pi * k / n)


def self_convergence(eos: EquationOfState, cells: Sequence[int] = (32, 64, 128), t_end: float = 0.25,
                     base_steps: int = 32, amplitude: float = 0.01, transverse: int = 4,
                     extents: Tuple[float, float, float] = (1.0, 1.0, 1.0),
                     k_max: int = 4) -> ConvergenceResult:
    """
    Periodic sound-wave self-convergence without dissipation.

    The step count doubles with each refinement so dt/h stays fixed; the error
    of level n is the largest difference of its low Fourier modes from level 2n.
    """
    from .presets import DatumRecipe, make_admissible_datum

    modes = []
    for level, n in enumerate(cells):
        grid = Grid("periodic", extents, (n, transverse, transverse))
        datum = make_admissible_datum(DatumRecipe("sound-periodic", amplitude=amplitude), grid, eos)
        steps = base_steps * (n // cells[0])
        solver = MHDSolver(eos, grid, cfl=1.0, epsilon=0.0)
        rs = solver.evolve(datum.field, datum.background, t_end,
                           dt_sequence=[t_end / steps] * steps, record=False)
        modes.append(_low_modes(rs.field.interior, k_max))
    errors = [float(np.max(np.abs(a - b))) for a, b in zip(modes[:-1], modes[1:])]
    orders = [math.log2(e1 / e2) for e1, e2 in zip(errors[:-1], errors[1:])]
    logger.info("self-convergence errors %s orders %s", errors, orders)
    return ConvergenceResult(list(cells), errors, orders)
