"""
Initial data factory.

Magnetic perturbations are sampled from the analytic curl of a vector
potential, H' = curl(psi d) = grad(psi) x d, so the continuum field is
divergence free. Bumps use psi(r) = (1 - r^2/R^2)^6 for r < R, which is C^5.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .compat import InitialDatum, background_state
from .errors import DatumError
from .grid import Field, Grid
from .mhd_core import H1, H2, NVAR, P, S, U1, U2, U3, EquationOfState
from .reflection import extend

logger = logging.getLogger(__name__)

BUMP_POWER = 6
RECIPES = ("constant", "interior-bump", "symmetric-perturbation", "alfven-periodic", "sound-periodic")
BUMP_DIRECTION = np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0)


@dataclass
class DatumRecipe:
    """Preset name plus its parameters; ``width`` is the support radius of bumps"""
    name: str = "interior-bump"
    amplitude: float = 0.01
    width: float = 0.2
    c: float = 1.0
    pressure: Optional[float] = None
    center: Optional[Tuple[float, float, float]] = None

    def background_pressure(self, eos: EquationOfState) -> float:
        if self.pressure is not None:
            return float(self.pressure)
        return 0.0 if eos.kind == "exponential" else 1.0

    def to_dict(self) -> Dict:
        return {"datum": self.name, "amplitude": self.amplitude, "width": self.width, "c": self.c}


def bump(X, center, radius) -> Tuple[np.ndarray, Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """psi and grad(psi) for psi = (1 - r^2/R^2)^6 inside the ball"""
    dx = [X[a] - center[a] for a in range(3)]
    s = (dx[0] ** 2 + dx[1] ** 2 + dx[2] ** 2) / radius ** 2
    inside = s < 1.0
    base = np.where(inside, 1.0 - s, 0.0)
    psi = base ** BUMP_POWER
    slope = -2.0 * BUMP_POWER * base ** (BUMP_POWER - 1) / radius ** 2
    return psi, tuple(slope * dx[a] for a in range(3))


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _require_inside(grid: Grid, center, radius, free_axes=()):
    for axis in range(3):
        if axis in free_axes:
            continue
        lo, hi = center[axis] - radius, center[axis] + radius
        if not (lo > 0.0 and hi < grid.extents[axis]):
            raise DatumError(f"bump support [{lo:.4g}, {hi:.4g}] touches a wall or wraps along "
                             f"x{axis + 1} (extent {grid.extents[axis]:.4g})")


def _require_kind(recipe: DatumRecipe, grid: Grid, kinds):
    if grid.kind not in kinds:
        raise DatumError(f"preset '{recipe.name}' needs a {' or '.join(kinds)} grid, got '{grid.kind}'")


def make_admissible_datum(recipe: DatumRecipe, grid: Grid,
                          eos: Optional[EquationOfState] = None) -> InitialDatum:
    """Sample a preset on ``grid``; half grids get the odd/even extension of the quarter datum"""
    eos = eos or EquationOfState.exponential()
    if recipe.name not in RECIPES:
        raise DatumError(f"unknown preset '{recipe.name}' (choose from {', '.join(RECIPES)})")
    if recipe.c == 0:
        raise DatumError("background field c must be nonzero")
    if recipe.amplitude < 0 or not recipe.width > 0:
        raise DatumError("preset needs amplitude >= 0 and width > 0")
    if grid.kind == "half":
        quarter = make_admissible_datum(recipe, grid.quarter(), eos)
        return InitialDatum(extend(quarter.field), quarter.background, quarter.recipe,
                            quarter.amplitude)

    bg = background_state(recipe.c, recipe.background_pressure(eos))
    values = np.broadcast_to(bg.reshape(NVAR, 1, 1, 1), (NVAR,) + grid.shape).copy()
    amp = recipe.amplitude
    X = grid.mesh()

    if recipe.name == "interior-bump":
        _require_kind(recipe, grid, ("quarter", "periodic"))
        center = recipe.center or tuple(0.5 * L for L in grid.extents)
        _require_inside(grid, center, recipe.width)
        psi, grad = bump(X, center, recipe.width)
        values[P] += amp * psi
        curl = _cross(grad, BUMP_DIRECTION)
        for a in range(3):
            values[H1 + a] += amp * recipe.width * curl[a]

    elif recipe.name == "symmetric-perturbation":
        _require_kind(recipe, grid, ("quarter",))
        L1, L2, _ = grid.extents
        center = recipe.center or (0.5 * L1, 0.5 * L2, 0.0)
        if center[2] != 0.0:
            raise DatumError("symmetric-perturbation must be centered on x3 = 0")
        _require_inside(grid, center, recipe.width, free_axes=(2,))
        if not recipe.width < grid.extents[2]:
            raise DatumError("symmetric-perturbation support reaches the x3 = L3 wall")
        R = recipe.width
        psi, grad = bump(X, center, R)
        q = X[2] / R
        values[P] += amp * psi
        values[U1] += 0.5 * amp * psi
        values[U2] -= 0.3 * amp * psi
        values[U3] += amp * q * psi
        values[S] += 0.2 * amp * psi
        # potential A = R*(q*psi*(1, 0.5, 0) + psi*e3): A1, A2 odd and A3 even in x3
        grad_qpsi = (q * grad[0], q * grad[1], q * grad[2] + psi / R)
        odd_part = _cross(grad_qpsi, (1.0, 0.5, 0.0))
        even_part = _cross(grad, (0.0, 0.0, 1.0))
        for a in range(3):
            values[H1 + a] += amp * R * (odd_part[a] + even_part[a])

    elif recipe.name in ("alfven-periodic", "sound-periodic"):
        _require_kind(recipe, grid, ("periodic",))
        rho, rho_p = eos.density(bg[P], bg[S])
        wave = amp * np.sin(2.0 * np.pi * X[0] / grid.extents[0])
        if recipe.name == "alfven-periodic":
            values[H2] += wave
            values[U2] -= np.sign(recipe.c) * wave / np.sqrt(rho)
        else:
            sound = 1.0 / np.sqrt(rho_p)
            values[P] += wave
            values[U1] += wave / (rho * sound)

    logger.info("datum '%s' on %s (amplitude %g)", recipe.name, grid.describe(), amp)
    return InitialDatum(Field.from_interior(grid, values), bg, recipe.name, amp)
