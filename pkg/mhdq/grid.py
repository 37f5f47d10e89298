"""
Cell-centered boxes with a two-cell ghost layer.

``extents`` and ``cells`` always describe the quarter box; a ``half`` grid
stores 2*n3 cells covering [-L3, L3] with the same spacing, so the quarter
and half runs share h bit for bit.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .mhd_core import NVAR

GHOST = 2
KINDS = ("quarter", "half", "periodic")


@dataclass(frozen=True)
class Grid:
    kind: str
    extents: Tuple[float, float, float]
    cells: Tuple[int, int, int]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown domain kind '{self.kind}'")
        if any(not L > 0 for L in self.extents):
            raise ValueError("extents must be positive")
        if any(n < 1 for n in self.cells):
            raise ValueError("cell counts must be positive")
        object.__setattr__(self, "extents", tuple(float(L) for L in self.extents))
        object.__setattr__(self, "cells", tuple(int(n) for n in self.cells))

    @property
    def spacing(self) -> Tuple[float, float, float]:
        return tuple(L / n for L, n in zip(self.extents, self.cells))

    @property
    def shape(self) -> Tuple[int, int, int]:
        n1, n2, n3 = self.cells
        return (n1, n2, 2 * n3) if self.kind == "half" else (n1, n2, n3)

    @property
    def padded_shape(self) -> Tuple[int, int, int, int]:
        return (NVAR,) + tuple(m + 2 * GHOST for m in self.shape)

    @property
    def cell_volume(self) -> float:
        h1, h2, h3 = self.spacing
        return h1 * h2 * h3

    @property
    def periodic(self) -> Tuple[bool, bool, bool]:
        """x2 always wraps; the periodic kind wraps every axis"""
        every = self.kind == "periodic"
        return (every, True, every)

    def axis_coords(self, axis: int) -> np.ndarray:
        """Cell centers along axis 0, 1 or 2"""
        h = self.spacing[axis]
        m = self.shape[axis]
        x = (np.arange(m) + 0.5) * h
        if axis == 2 and self.kind == "half":
            x = x - self.extents[2]
        return x

    def mesh(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(*(self.axis_coords(a) for a in range(3)), indexing="ij"))

    def half(self) -> "Grid":
        return Grid("half", self.extents, self.cells)

    def quarter(self) -> "Grid":
        return Grid("quarter", self.extents, self.cells)

    def describe(self) -> str:
        shape = "x".join(str(m) for m in self.shape)
        return f"{self.kind} {shape} h={tuple(round(h, 6) for h in self.spacing)}"


@dataclass
class Field:
    """States on a grid, stored with ghosts as an (8, m1+4, m2+4, m3+4) array"""
    grid: Grid
    data: np.ndarray

    def __post_init__(self):
        if self.data.shape != self.grid.padded_shape:
            raise ValueError(f"field data shape {self.data.shape} != {self.grid.padded_shape}")

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.padded_shape))

    @classmethod
    def from_interior(cls, grid: Grid, values: np.ndarray) -> "Field":
        values = np.asarray(values, dtype=float)
        if values.shape != (NVAR,) + grid.shape:
            raise ValueError(f"interior shape {values.shape} != {(NVAR,) + grid.shape}")
        f = cls.zeros(grid)
        f.interior[...] = values
        return f

    @classmethod
    def constant(cls, grid: Grid, state: np.ndarray) -> "Field":
        state = np.asarray(state, dtype=float).reshape(NVAR, 1, 1, 1)
        return cls(grid, np.broadcast_to(state, grid.padded_shape).copy())

    @property
    def interior(self) -> np.ndarray:
        g = GHOST
        return self.data[:, g:-g, g:-g, g:-g]

    def copy(self) -> "Field":
        return Field(self.grid, self.data.copy())


def window(padded: np.ndarray, axis: int, shift: int,
           x1_range: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """Interior-shaped view of a padded array shifted by ``shift`` cells along ``axis`` (1..3)"""
    idx = [slice(None)]
    for ax in (1, 2, 3):
        m = padded.shape[ax] - 2 * GHOST
        lo, hi = x1_range if (ax == 1 and x1_range is not None) else (0, m)
        off = shift if ax == axis else 0
        idx.append(slice(GHOST + lo + off, GHOST + hi + off))
    return padded[tuple(idx)]
