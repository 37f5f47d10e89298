import numpy as np
import pytest

from mhdq.errors import PreconditionError
from mhdq.grid import Field, Grid
from mhdq.reflection import (
    GAMMA0_PARITY, GAMMA1_PARITY, extend, interface_smoothness, mirror, parity_defect,
    parity_witness, restrict,
)


@pytest.fixture
def quarter_field():
    grid = Grid("quarter", (1.0, 1.0, 1.0), (4, 3, 8))
    values = np.random.default_rng(11).normal(size=(8,) + grid.shape)
    return Field.from_interior(grid, values)


def _smooth_quarter(n3=16):
    grid = Grid("quarter", (1.0, 1.0, 1.0), (4, 4, n3))
    X1, X2, X3 = grid.mesh()
    values = np.zeros((8,) + grid.shape)
    for c in range(8):
        values[c] = np.cos(X3) * (1.0 + 0.1 * c + 0.1 * X1)
    values[3] = np.sin(2.0 * X3) * (1.0 + X2)
    values[6] = np.sin(X3) ** 3 + X3
    return Field.from_interior(grid, values)


def test_parity_signatures():
    assert list(GAMMA0_PARITY.signs) == [1, 1, 1, -1, 1, 1, -1, 1]
    assert list(GAMMA1_PARITY.signs) == [1, -1, -1, -1, 1, 1, 1, 1]
    values = np.ones((8, 2))
    assert np.array_equal(GAMMA0_PARITY.apply(values)[:, 0], GAMMA0_PARITY.signs)


def test_extend_then_restrict_is_identity(quarter_field):
    half = extend(quarter_field)
    assert half.grid.kind == "half"
    assert half.grid.shape == (4, 3, 16)
    back = restrict(half)
    assert back.grid == quarter_field.grid
    assert np.array_equal(back.interior, quarter_field.interior)


def test_extended_field_has_exact_parity(quarter_field):
    half = extend(quarter_field)
    assert not np.any(parity_defect(half))
    assert parity_witness(half) is None
    lower = half.interior[..., :8]
    assert np.array_equal(lower[3], -quarter_field.interior[3][..., ::-1])
    assert np.array_equal(lower[0], quarter_field.interior[0][..., ::-1])


def test_parity_defect_and_witness_locate_a_mismatch(quarter_field):
    half = extend(quarter_field)
    half.interior[0, 1, 2, 9] += 0.25
    defect = parity_defect(half)
    assert defect[0] == pytest.approx(0.25)
    assert not np.any(defect[1:])
    assert parity_witness(half) in {(0, 1, 2, 6), (0, 1, 2, 9)}


def test_mirror_is_an_involution(quarter_field):
    half = extend(quarter_field).interior
    assert np.array_equal(mirror(mirror(half)), half)


def test_kind_preconditions(quarter_field):
    with pytest.raises(PreconditionError):
        extend(extend(quarter_field))
    with pytest.raises(PreconditionError):
        restrict(quarter_field)
    with pytest.raises(PreconditionError):
        parity_defect(quarter_field)
    with pytest.raises(PreconditionError):
        interface_smoothness(quarter_field)
    periodic = Field.zeros(Grid("periodic", (1, 1, 1), (4, 4, 4)))
    with pytest.raises(PreconditionError):
        extend(periodic)


def test_smooth_reflection_has_no_interface_kink():
    ratios = interface_smoothness(extend(_smooth_quarter()))
    assert set(ratios) == {1, 2, 3}
    assert all(r <= 4.0 for r in ratios.values()), ratios


def test_nonvanishing_odd_trace_shows_a_jump():
    f = _smooth_quarter()
    f.interior[3] += 1.0
    ratios = interface_smoothness(extend(f))
    assert ratios[1] > 4.0
