"""
Finite-difference stencils.

Ghosted stencils (``central_derivative``, ``ko_difference``, ``face_trace``)
are written as antisymmetric or symmetric pairs so that they commute exactly
with a signed mirror of their input. Ghost-free stencils serve the
compatibility checks on initial data, where no boundary closure exists yet.
"""

from typing import Optional, Tuple

import numpy as np

from .grid import GHOST, window

# a walled axis needs this many cells for the one-sided end formulas
ONE_SIDED_MIN_CELLS = 5


def central_derivative(padded: np.ndarray, axis: int, h: float,
                       x1_range: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """Fourth-order central first derivative on the interior of a ghost-filled array"""
    def f(k):
        return window(padded, axis, k, x1_range)
    return (8.0 * (f(1) - f(-1)) - (f(2) - f(-2))) / (12.0 * h)


def ko_difference(padded: np.ndarray, axis: int,
                  x1_range: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """Undivided five-point fourth difference"""
    def f(k):
        return window(padded, axis, k, x1_range)
    return (f(-2) + f(2)) - 4.0 * (f(-1) + f(1)) + 6.0 * f(0)


def face_trace(padded: np.ndarray, axis: int, upper_cell: int) -> np.ndarray:
    """
    Fourth-order value on the face below interior cell ``upper_cell`` along ``axis``.

    Odd data mirrored across the face interpolate to exactly zero.
    """
    def f(k):
        return np.take(padded, GHOST + upper_cell + k, axis=axis)
    trace = (9.0 * (f(-1) + f(0)) - (f(-2) + f(1))) / 16.0
    # drop the ghost layers of the remaining spatial axes
    inner = [slice(None)] + [slice(GHOST, -GHOST)] * (padded.ndim - 2)
    return trace[tuple(inner)]


def _take(f: np.ndarray, axis: int, index) -> np.ndarray:
    return np.take(f, index, axis=axis)


def derivative(f: np.ndarray, axis: int, h: float, periodic: bool = False) -> np.ndarray:
    """
    Fourth-order first derivative of an unghosted array.

    Periodic axes wrap; otherwise the two cells next to each end use one-sided
    five-point formulas, grouped as differences so constants give exact zeros.
    """
    n = f.shape[axis]
    if periodic:
        def r(k):
            return np.roll(f, -k, axis=axis)
        return (8.0 * (r(1) - r(-1)) - (r(2) - r(-2))) / (12.0 * h)
    if n < ONE_SIDED_MIN_CELLS:
        raise ValueError(f"need at least {ONE_SIDED_MIN_CELLS} cells along a walled axis, got {n}")

    out = np.empty_like(f)
    idx = [slice(None)] * f.ndim

    def put(where, value):
        idx[axis] = where
        out[tuple(idx)] = value

    def c(k):
        return _take(f, axis, k)

    put(slice(2, n - 2), (8.0 * (_take(f, axis, np.arange(3, n - 1)) - _take(f, axis, np.arange(1, n - 3)))
                          - (_take(f, axis, np.arange(4, n)) - _take(f, axis, np.arange(0, n - 4))))
        / (12.0 * h))
    put(0, (48.0 * (c(1) - c(0)) - 36.0 * (c(2) - c(0)) + 16.0 * (c(3) - c(0))
            - 3.0 * (c(4) - c(0))) / (12.0 * h))
    put(1, (-3.0 * (c(0) - c(1)) + 18.0 * (c(2) - c(1)) - 6.0 * (c(3) - c(1))
            + (c(4) - c(1))) / (12.0 * h))
    e = n - 1
    put(e, -(48.0 * (c(e - 1) - c(e)) - 36.0 * (c(e - 2) - c(e)) + 16.0 * (c(e - 3) - c(e))
             - 3.0 * (c(e - 4) - c(e))) / (12.0 * h))
    put(e - 1, -(-3.0 * (c(e) - c(e - 1)) + 18.0 * (c(e - 2) - c(e - 1))
                 - 6.0 * (c(e - 3) - c(e - 1)) + (c(e - 4) - c(e - 1))) / (12.0 * h))
    return out


def _face_cells(f: np.ndarray, axis: int, side: str, count: int):
    n = f.shape[axis]
    order = range(count) if side == "lower" else range(n - 1, n - 1 - count, -1)
    return [_take(f, axis, k) for k in order]


def face_value(f: np.ndarray, axis: int, side: str) -> np.ndarray:
    """Third-order one-sided extrapolation to the lower or upper face"""
    f0, f1, f2 = _face_cells(f, axis, side, 3)
    return f0 + (-10.0 * (f1 - f0) + 3.0 * (f2 - f0)) / 8.0


def face_interpolate(f: np.ndarray, axis: int, side: str) -> np.ndarray:
    """Fourth-order one-sided value at the lower or upper face from four cell centers"""
    f0, f1, f2, f3 = _face_cells(f, axis, side, 4)
    return (35.0 * f0 - 35.0 * f1 + 21.0 * f2 - 5.0 * f3) / 16.0


def face_normal_derivative(f: np.ndarray, axis: int, side: str, h: float) -> np.ndarray:
    """Second-order one-sided d/dx_axis at the face (sign of the +x direction)"""
    f0, f1, f2 = _face_cells(f, axis, side, 3)
    d = (3.0 * (f1 - f0) - (f2 - f0)) / h
    return d if side == "lower" else -d


def face_second_derivative(f: np.ndarray, axis: int, side: str, h: float) -> np.ndarray:
    """Second-order one-sided d2/dx_axis2 at the face"""
    f0, f1, f2, f3 = _face_cells(f, axis, side, 4)
    return (-6.5 * (f1 - f0) + 5.5 * (f2 - f0) - 1.5 * (f3 - f0)) / (h * h)
