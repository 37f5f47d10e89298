"""Odd/even extension across x3 = 0 between the quarter box and the half box."""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import PreconditionError
from .grid import Field
from .mhd_core import H3, NVAR, U1, U2, U3

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParitySignature:
    """Components that change sign under a reflection; all others are even"""
    odd: Tuple[int, ...]

    @property
    def signs(self) -> np.ndarray:
        s = np.ones(NVAR)
        s[list(self.odd)] = -1.0
        return s

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Multiply component axis 0 by the signs"""
        return self.signs.reshape((NVAR,) + (1,) * (values.ndim - 1)) * values


# x3 mirror: u3 and H3 odd
GAMMA0_PARITY = ParitySignature(odd=(U3, H3))
# ghost closure across x1 walls: the whole velocity odd
GAMMA1_PARITY = ParitySignature(odd=(U1, U2, U3))


def mirror(values: np.ndarray) -> np.ndarray:
    """Signed mirror in x3 of an (8, m1, m2, m3) half-box array"""
    return GAMMA0_PARITY.apply(values[..., ::-1])


def extend(f: Field) -> Field:
    """Quarter-box field to the half box: upper half copied, lower half the signed mirror"""
    if f.grid.kind != "quarter":
        raise PreconditionError(f"extend needs a cell-centered quarter-box field, got '{f.grid.kind}'")
    upper = f.interior
    values = np.concatenate([mirror(upper), upper], axis=3)
    return Field.from_interior(f.grid.half(), values)


def restrict(f: Field) -> Field:
    """x3 >= 0 part of a half-box field, bit for bit"""
    if f.grid.kind != "half":
        raise PreconditionError(f"restrict needs a half-box field, got '{f.grid.kind}'")
    n3 = f.grid.cells[2]
    return Field.from_interior(f.grid.quarter(), f.interior[..., n3:].copy())


def parity_defect(f: Field) -> np.ndarray:
    """Per-component max |f - mirror(f)|; zero iff f has exact x3 parity"""
    if f.grid.kind != "half":
        raise PreconditionError("parity defect is defined on half-box fields")
    values = f.interior
    diff = np.abs(values - mirror(values))
    return diff.reshape(NVAR, -1).max(axis=1)


def parity_witness(f: Field) -> Optional[Tuple[int, int, int, int]]:
    """(component, i1, i2, i3) of the largest parity mismatch, or None when exact"""
    values = f.interior
    diff = np.abs(values - mirror(values))
    if not diff.any():
        return None
    return tuple(int(i) for i in np.unravel_index(np.argmax(diff), diff.shape))


def interface_smoothness(f: Field, orders=(1, 2, 3)) -> Dict[int, float]:
    """
    For each order r, the largest r-th x3 difference straddling x3 = 0 over
    the largest one that does not, maximized over components.

    A bounded ratio means no O(1/h) jump appears at the reflection plane.
    """
    if f.grid.kind != "half":
        raise PreconditionError("interface smoothness is defined on half-box fields")
    values = f.interior
    n3 = f.grid.cells[2]
    ratios = {}
    for r in orders:
        d = np.abs(np.diff(values, n=r, axis=3))
        start = np.arange(d.shape[3])
        straddles = (start <= n3 - 1) & (start + r >= n3)
        worst = 0.0
        for c in range(NVAR):
            across = float(d[c][..., straddles].max()) if straddles.any() else 0.0
            inside = float(d[c][..., ~straddles].max()) if (~straddles).any() else 0.0
            floor = 1e-14 * max(1.0, float(np.abs(values[c]).max()))
            if across <= floor:
                continue
            worst = max(worst, across / max(inside, floor))
        ratios[r] = worst
    return ratios
