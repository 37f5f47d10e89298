import numpy as np
import pytest

from mhdq.grid import GHOST, Field, Grid, window
from mhdq.stencils import (
    central_derivative, derivative, face_interpolate, face_normal_derivative, face_second_derivative,
    face_trace, face_value, ko_difference,
)


def test_grid_shapes_and_spacing():
    g = Grid("quarter", (1.0, 0.5, 1.0), (32, 16, 32))
    assert g.spacing == (1 / 32, 0.5 / 16, 1 / 32)
    assert g.shape == (32, 16, 32)
    assert g.padded_shape == (8, 36, 20, 36)
    assert g.periodic == (False, True, False)

    h = g.half()
    assert h.shape == (32, 16, 64)
    assert h.spacing == g.spacing
    assert h.quarter() == g
    assert Grid("periodic", (1, 1, 1), (8, 8, 8)).periodic == (True, True, True)


def test_half_grid_coordinates_mirror_the_quarter():
    g = Grid("quarter", (1.0, 1.0, 2.0), (4, 4, 8))
    x3q = g.axis_coords(2)
    x3h = g.half().axis_coords(2)
    np.testing.assert_allclose(x3h[8:], x3q, rtol=0, atol=1e-15)
    np.testing.assert_allclose(x3h[:8], -x3q[::-1], rtol=0, atol=1e-15)
    assert x3q[0] == pytest.approx(0.125)


@pytest.mark.parametrize("kind,extents,cells", [
    ("octant", (1, 1, 1), (4, 4, 4)),
    ("quarter", (1, 0, 1), (4, 4, 4)),
    ("quarter", (1, 1, 1), (4, 0, 4)),
])
def test_grid_rejects_bad_arguments(kind, extents, cells):
    with pytest.raises(ValueError):
        Grid(kind, extents, cells)


def test_field_constructors():
    g = Grid("quarter", (1, 1, 1), (4, 3, 2))
    state = np.arange(8.0)
    f = Field.constant(g, state)
    assert f.data.shape == g.padded_shape
    assert np.all(f.interior[5] == 5.0)
    assert np.all(f.data[7] == 7.0)

    values = np.random.default_rng(0).normal(size=(8,) + g.shape)
    f = Field.from_interior(g, values)
    assert np.array_equal(f.interior, values)
    assert not np.any(f.data[:, :GHOST])
    copy = f.copy()
    copy.interior[0] += 1.0
    assert np.array_equal(f.interior, values)

    with pytest.raises(ValueError):
        Field.from_interior(g, values[:, :2])


def test_window_shifts_and_slabs():
    padded = np.arange(1 * 8 * 6 * 6, dtype=float).reshape(1, 8, 6, 6)
    base = window(padded, 1, 0)
    assert base.shape == (1, 4, 2, 2)
    assert np.array_equal(window(padded, 1, 1)[:, :-1], base[:, 1:])
    slab = window(padded, 2, -1, x1_range=(1, 3))
    assert slab.shape == (1, 2, 2, 2)
    assert np.array_equal(slab, padded[:, 3:5, 1:3, 2:4])


def _padded_polynomial(n, h, degree):
    x = (np.arange(-GHOST, n + GHOST) + 0.5) * h
    f = x ** degree
    return np.broadcast_to(f[None, :, None, None], (1, n + 4, 5, 5)).copy(), x


def test_central_derivative_exact_on_quartics():
    h = 0.1
    padded, x = _padded_polynomial(10, h, 4)
    d = central_derivative(padded, 1, h)
    np.testing.assert_allclose(d[0, :, 0, 0], 4 * x[GHOST:-GHOST] ** 3, rtol=1e-11, atol=1e-12)


def test_ko_difference_annihilates_cubics():
    padded, _ = _padded_polynomial(10, 0.1, 3)
    assert np.max(np.abs(ko_difference(padded, 1))) <= 1e-13
    padded, _ = _padded_polynomial(10, 1.0, 4)
    # fourth difference of x^4 is 4! h^4
    np.testing.assert_allclose(ko_difference(padded, 1), 24.0, rtol=1e-12)


def test_stencils_commute_with_signed_mirror():
    rng = np.random.default_rng(3)
    padded = rng.normal(size=(2, 6, 5, 12))
    mirrored = -padded[:, :, :, ::-1]
    d = central_derivative(padded, 3, 0.25)
    dm = central_derivative(mirrored, 3, 0.25)
    # d/dx of an odd reflection is the even reflection of d/dx
    assert np.array_equal(dm, d[:, :, :, ::-1])
    k = ko_difference(padded, 3)
    assert np.array_equal(ko_difference(mirrored, 3), -k[:, :, :, ::-1])


def test_face_trace_of_odd_data_is_zero():
    rng = np.random.default_rng(5)
    upper = rng.normal(size=(1, 5, 5, 6))
    odd = np.concatenate([-upper[:, :, :, ::-1], upper], axis=3)
    padded = np.zeros((1, 5, 5, 16))
    padded[:, :, :, GHOST:-GHOST] = odd
    trace = face_trace(padded, 3, 6)
    assert trace.shape == (1, 1, 1)
    assert trace[0, 0, 0] == 0.0


def test_face_trace_interpolates_cubics():
    h = 0.2
    x = (np.arange(-GHOST, 8 + GHOST) + 0.5) * h
    f = (x - 0.3) ** 3
    padded = np.broadcast_to(f[None, None, None, :], (1, 5, 5, 12)).copy()
    trace = face_trace(padded, 3, 4)
    assert trace[0, 0, 0] == pytest.approx((4 * h - 0.3) ** 3, abs=1e-14)


@pytest.mark.parametrize("periodic", [False, True])
def test_derivative_kills_constants(periodic):
    f = np.full((3, 7, 4), 2.5)
    assert not np.any(derivative(f, 1, 0.1, periodic))


def test_derivative_fourth_order_on_walled_axis():
    n, h = 12, 0.1
    x = (np.arange(n) + 0.5) * h
    f = x ** 4 - x
    d = derivative(f, 0, h)
    np.testing.assert_allclose(d, 4 * x ** 3 - 1, rtol=0, atol=1e-11)
    with pytest.raises(ValueError):
        derivative(np.zeros(4), 0, h)


def test_periodic_derivative_of_sine_converges():
    errors = []
    for n in (16, 32):
        h = 1.0 / n
        x = (np.arange(n) + 0.5) * h
        d = derivative(np.sin(2 * np.pi * x), 0, h, periodic=True)
        errors.append(np.max(np.abs(d - 2 * np.pi * np.cos(2 * np.pi * x))))
    assert errors[0] / errors[1] > 14.0


def test_face_extrapolations_on_polynomials():
    h = 0.1
    x = (np.arange(8) + 0.5) * h
    quad = 2.0 + 3.0 * x - x ** 2
    assert face_value(quad, 0, "lower") == pytest.approx(2.0, abs=1e-14)
    L = 8 * h
    assert face_value(quad, 0, "upper") == pytest.approx(2.0 + 3.0 * L - L ** 2, abs=1e-13)
    assert face_normal_derivative(quad, 0, "lower", h) == pytest.approx(3.0, abs=1e-12)
    assert face_normal_derivative(quad, 0, "upper", h) == pytest.approx(3.0 - 2 * L, abs=1e-12)
    cubic = x ** 3 - 2 * x ** 2
    assert face_second_derivative(cubic, 0, "lower", h) == pytest.approx(-4.0, abs=1e-10)
    assert face_second_derivative(cubic, 0, "upper", h) == pytest.approx(6 * L - 4.0, abs=1e-10)


def test_face_interpolate_is_exact_for_cubics():
    h = 0.1
    L = 8 * h
    x = (np.arange(8) + 0.5) * h
    cubic = (x - 0.3) ** 3 + 2.0 * x
    assert face_interpolate(cubic, 0, "lower") == pytest.approx((-0.3) ** 3, abs=1e-14)
    assert face_interpolate(cubic, 0, "upper") == pytest.approx((L - 0.3) ** 3 + 2.0 * L, abs=1e-13)
    # a constant comes back exactly
    assert np.all(face_interpolate(np.full((3, 6), 1.5), 1, "lower") == 1.5)
