import math

import numpy as np
import pytest

from mhdq.compat import background_state
from mhdq.diagnostics import (
    COLUMNS, DiagnosticRecord, diagnostics, divergence_max, history_frame, sobolev_norms,
    total_energy, wall_traces,
)
from mhdq.grid import Field, Grid
from mhdq.presets import DatumRecipe, make_admissible_datum
from mhdq.reductions import SlabPool
from mhdq.reflection import extend
from mhdq.solver import apply_bc

GRID = Grid("quarter", (1.0, 1.0, 1.0), (16, 8, 16))


def _record(step=0, **overrides):
    values = dict(step=step, t=0.1 * step, dt=0.1, divH_max=0.0, energy=1.0, H0=0.0, H1=0.0,
                  H2=0.0, H3=0.0, trace_u3=0.0, trace_H3=0.0, parity_defect=math.nan)
    values.update(overrides)
    return DiagnosticRecord(**values)


def _ramp_field(grid=GRID):
    """Background plus smooth perturbations with u3, H3 odd about x3 = 0"""
    X1, X2, X3 = grid.mesh()
    values = np.broadcast_to(background_state(1.0).reshape(8, 1, 1, 1), (8,) + grid.shape).copy()
    values[0] += 0.01 * np.cos(np.pi * X1) * np.cos(np.pi * X3)
    values[3] += 0.02 * np.sin(np.pi * X3) * np.sin(np.pi * X1)
    values[6] += 0.03 * np.sin(2 * np.pi * X3)
    return apply_bc(Field.from_interior(grid, values))


def test_history_frame_columns():
    frame = history_frame([_record(0), _record(1, energy=2.0)])
    assert list(frame.columns) == COLUMNS
    assert frame["energy"].tolist() == [1.0, 2.0]
    assert _record(3).sobolev == (0.0, 0.0, 0.0, 0.0)


def test_divergence_of_a_constant_field_is_zero():
    f = apply_bc(Field.constant(GRID, background_state(1.0)))
    assert divergence_max(f) == 0.0


def test_divergence_sees_a_compressive_field():
    X1, _, _ = GRID.mesh()
    values = np.zeros((8,) + GRID.shape)
    values[4] = 1.0 + 0.1 * np.cos(np.pi * X1)
    f = apply_bc(Field.from_interior(GRID, values))
    assert divergence_max(f) == pytest.approx(0.1 * np.pi, rel=0.05)


def test_divergence_skips_the_cells_next_to_x1_walls():
    X1, _, _ = GRID.mesh()
    values = np.zeros((8,) + GRID.shape)
    values[4] = 1.0 + 0.1 * X1
    f = apply_bc(Field.from_interior(GRID, values))
    # the even H1 ghosts would flatten the slope in the two wall layers
    assert divergence_max(f) == pytest.approx(0.1, rel=1e-10)


def test_divergence_of_the_curl_bump_is_fourth_order(exp_eos):
    recipe = DatumRecipe("interior-bump", amplitude=0.01, width=0.4)
    values = []
    for n in (32, 64):
        grid = Grid("periodic", (1.0, 1.0, 1.0), (n, n, n))
        datum = make_admissible_datum(recipe, grid, exp_eos)
        values.append(divergence_max(apply_bc(datum.field)))
    assert values[1] > 0.0
    assert values[0] / values[1] >= 10.0


def test_total_energy_of_a_rigid_motion(exp_eos):
    grid = Grid("quarter", (1.0, 0.5, 2.0), (4, 4, 4))
    state = np.array([0.5, 0.3, 0.4, 0.0, 0.0, 0.0, 0.0, 0.0])
    f = Field.constant(grid, state)
    # rho = e^0.5, |u|^2 = 0.25, unit volume
    assert total_energy(exp_eos, f) == pytest.approx(0.5 * np.exp(0.5) * 0.25, rel=1e-14)


def test_total_energy_of_the_background(exp_eos):
    f = Field.constant(GRID, background_state(2.0))
    # rho = 1, |H|^2 / 2 = 2 over a unit box
    assert total_energy(exp_eos, f) == pytest.approx(2.0, rel=1e-14)


def test_parallel_energy_is_bitwise_serial(exp_eos):
    f = _ramp_field(Grid("quarter", (1.0, 1.0, 1.0), (32, 16, 32)))
    serial = total_energy(exp_eos, f)
    with SlabPool(4) as pool:
        assert total_energy(exp_eos, f, pool) == serial


def test_sobolev_norms_of_a_linear_profile():
    grid = Grid("quarter", (1.0, 1.0, 1.0), (64, 4, 4))
    X1, _, _ = grid.mesh()
    values = np.zeros((8,) + grid.shape)
    values[0] = X1
    norms = sobolev_norms(values, grid)
    assert len(norms) == 4
    assert norms[0] == pytest.approx(math.sqrt(1 / 3), rel=1e-3)
    assert norms[1] == pytest.approx(math.sqrt(1 / 3 + 1), rel=1e-3)
    assert norms[2] == pytest.approx(norms[1], rel=1e-9)
    assert norms[3] == pytest.approx(norms[1], rel=1e-9)
    assert sobolev_norms(np.zeros_like(values), grid) == [0.0, 0.0, 0.0, 0.0]


def test_quarter_wall_traces_read_the_cells_not_the_ghosts():
    u3, h3 = wall_traces(_ramp_field())
    # odd profiles interpolate to zero up to fourth-order truncation
    assert 0.0 < u3 < 1e-4
    assert 0.0 < h3 < 1e-3
    values = np.zeros((8,) + GRID.shape)
    values[3] = 1.0
    values[6] = -2.0
    f = apply_bc(Field.from_interior(GRID, values))
    # the odd ghosts alone would interpolate to zero
    assert wall_traces(f) == pytest.approx((1.0, 2.0), rel=1e-14)


def test_one_sided_trace_is_fourth_order():
    errors = []
    for n in (16, 32):
        grid = Grid("quarter", (1.0, 1.0, 1.0), (8, 4, n))
        _, _, X3 = grid.mesh()
        values = np.zeros((8,) + grid.shape)
        values[3] = np.sin(np.pi * X3 + 1.0)
        errors.append(abs(wall_traces(Field.from_interior(grid, values))[0] - np.sin(1.0)))
    assert errors[0] / errors[1] > 12.0


def test_half_box_traces_vanish_for_reflected_fields():
    half = apply_bc(extend(_ramp_field()))
    assert wall_traces(half) == (0.0, 0.0)
    periodic = Field.zeros(Grid("periodic", (1, 1, 1), (4, 4, 4)))
    assert all(math.isnan(v) for v in wall_traces(periodic))


def test_diagnostics_record(exp_eos):
    f = _ramp_field()
    bg = background_state(1.0)
    record = diagnostics(exp_eos, f, bg, step=3, t=0.5, dt=0.01)
    assert record.step == 3 and record.t == 0.5 and record.dt == 0.01
    assert 0.0 < record.H0 <= record.H1 <= record.H2 <= record.H3
    assert 0.0 < record.trace_u3 < 1e-4
    assert math.isnan(record.parity_defect)

    half = apply_bc(extend(f))
    half_record = diagnostics(exp_eos, half, bg)
    assert half_record.parity_defect == 0.0
    assert half_record.energy == pytest.approx(2 * record.energy, rel=1e-12)
