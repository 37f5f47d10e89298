"""End-to-end scenarios on realistic grids."""

import numpy as np
import pytest

from mhdq.cli import persistence_checks
from mhdq.compat import check_all
from mhdq.config import parse_config_text
from mhdq.grid import Grid
from mhdq.presets import DatumRecipe, make_admissible_datum
from mhdq.reductions import THREADS_ENV
from mhdq.solver import compare_reflection, integrate, self_convergence

FLAGSHIP = """
domain = quarter
L1 = 1.0
L2 = 0.5
L3 = 1.0
n1 = 32
n2 = 16
n3 = 32
datum = interior-bump
amplitude = 0.01
width = 0.2
max_steps = 100
t_end = 10.0
output_every = 20
"""


def test_flagship_reflection_is_bitwise(exp_eos):
    result = compare_reflection(exp_eos, parse_config_text(FLAGSHIP))
    assert result.steps == 100
    assert result.bitwise_equal
    assert result.max_discrepancy == 0.0
    assert result.trace_max() <= 1e-12 * result.amplitude
    # the quarter wall read one-sidedly sees truncation error only
    assert 0.0 < result.quarter_trace_max() <= result.amplitude
    assert result.parity_max() <= 1e-13 * result.amplitude
    # the pulse has reached the reflection plane by the end
    assert np.any(result.quarter.field.interior[3, :, :, 0])


def test_flagship_with_four_workers(exp_eos, monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "4")
    config = parse_config_text(FLAGSHIP + "serial_reductions = false\n")
    result = compare_reflection(exp_eos, config)
    assert result.bitwise_equal or result.relative_discrepancy <= 1e-13
    serial = compare_reflection(exp_eos, parse_config_text(FLAGSHIP))
    assert np.array_equal(result.quarter.field.interior, serial.quarter.field.interior)


def test_h3_persistence_of_an_interior_bump(exp_eos):
    config = parse_config_text("""
        L1 = 2.0
        L2 = 1.0
        L3 = 1.0
        n1 = 64
        n2 = 32
        n3 = 32
        width = 0.4
        t_end = 0.5
        output_every = 5
    """)
    rs = integrate(exp_eos, config)
    assert rs.t == pytest.approx(0.5, rel=1e-12)
    h3 = [r.H3 for r in rs.history]
    assert all(0.5 <= v / h3[0] <= 2.0 for v in h3)
    assert all(ok for *_, ok in persistence_checks(config, rs.history))
    growth = max(r.divH_max for r in rs.history) - rs.history[0].divH_max
    assert growth <= 10 * (1 / 32) ** 2


def test_self_convergence_of_a_sound_wave(exp_eos):
    result = self_convergence(exp_eos)
    assert result.cells == [32, 64, 128]
    assert result.orders[0] >= 3.8


def test_long_run_stays_bounded(exp_eos):
    config = parse_config_text("""
        L2 = 0.5
        n1 = 16
        n2 = 8
        n3 = 16
        t_end = 100.0
        max_steps = 500
        output_every = 100
    """)
    rs = integrate(exp_eos, config)
    assert rs.steps == 500
    assert np.all(np.isfinite(rs.field.interior))
    energies = [r.energy for r in rs.history]
    assert all(abs(e / energies[0] - 1.0) < 0.05 for e in energies)
    assert all(max(r.trace_u3, r.trace_H3) <= 10 * 0.01 for r in rs.history)


def test_symmetric_perturbation_wall_conditions_converge(exp_eos):
    recipe = DatumRecipe("symmetric-perturbation", amplitude=0.01, width=0.4)
    worst = []
    for cells in ((16, 16, 32), (32, 32, 64)):
        datum = make_admissible_datum(recipe, Grid("quarter", (1.0, 1.0, 1.0), cells), exp_eos)
        report = check_all(exp_eos, datum)
        assert report.passed, report.to_text()
        auto = [report.get(f"gamma0_auto_k{k}") for k in range(3)]
        assert all(r.passed for r in auto)
        worst.append(max(r.violation for r in auto))
    assert worst[1] > 0.0
    assert worst[0] / worst[1] >= 3.5


def test_bump_divergence_decays_under_refinement(exp_eos):
    recipe = DatumRecipe("interior-bump", amplitude=0.01, width=0.4)
    records = []
    for n in (32, 64):
        grid = Grid("periodic", (1.0, 1.0, 1.0), (n, n, n))
        records.append(check_all(exp_eos, make_admissible_datum(recipe, grid, exp_eos)).get("div_free"))
    assert all(r.passed for r in records)
    assert records[0].violation / records[1].violation >= 3.5
