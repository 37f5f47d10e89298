"""
State layout, equations of state and the symmetric quasilinear MHD system.

The state vector is U = (p, u1, u2, u3, H1, H2, H3, S) and the system reads

    A0(U) dU/dt + sum_j A_j(U) dU/dx_j = 0,

with A0 = diag(rho_p/rho, rho, rho, rho, 1, 1, 1, 1). Every array routine here
takes the state on axis 0 and broadcasts over the remaining axes, and the
``xp`` argument selects numpy or jax.numpy so the same algebra feeds the
solver kernels and the forward-mode derivatives.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from .errors import EOSDomainError, HyperbolicityError

logger = logging.getLogger(__name__)

COMPONENTS = ("p", "u1", "u2", "u3", "H1", "H2", "H3", "S")
P, U1, U2, U3, H1, H2, H3, S = range(8)
VELOCITY = (U1, U2, U3)
MAGNETIC = (H1, H2, H3)
NVAR = 8


@dataclass(frozen=True)
class EquationOfState:
    """Closure rho(p, S): exponential (all p) or polytropic (p > 0)"""
    kind: str = "exponential"
    kappa: float = 1.0
    gamma: float = 5.0 / 3.0
    cv: float = 1.0

    def __post_init__(self):
        if self.kind not in ("exponential", "polytropic"):
            raise ValueError(f"unknown equation of state '{self.kind}'")
        if self.kind == "exponential" and not self.kappa > 0:
            raise ValueError("exponential closure needs kappa > 0")
        if self.kind == "polytropic" and not (self.gamma > 1 and self.cv > 0):
            raise ValueError("polytropic closure needs gamma > 1 and cv > 0")

    @classmethod
    def exponential(cls, kappa: float = 1.0) -> "EquationOfState":
        return cls(kind="exponential", kappa=kappa)

    @classmethod
    def polytropic(cls, gamma: float = 5.0 / 3.0, cv: float = 1.0) -> "EquationOfState":
        return cls(kind="polytropic", gamma=gamma, cv=cv)

    def density(self, p, S, xp=np):
        """(rho, rho_p) without domain checks; works on numpy or jax arrays"""
        if self.kind == "exponential":
            rho = xp.exp((p - S) / self.kappa)
            return rho, rho / self.kappa
        rho = (p * xp.exp(-S / self.cv)) ** (1.0 / self.gamma)
        return rho, rho / (self.gamma * p)

    def to_dict(self) -> Dict:
        if self.kind == "exponential":
            return {"eos": self.kind, "kappa": self.kappa}
        return {"eos": self.kind, "gamma": self.gamma, "cv": self.cv}


@dataclass
class MatrixSet:
    """A0, A_1..A_3 and Ahat_j = A0^{-1} A_j at one state"""
    A0: np.ndarray
    A: Tuple[np.ndarray, np.ndarray, np.ndarray]
    Ahat: Tuple[np.ndarray, np.ndarray, np.ndarray]

    def boundary_matrix(self, normal: Sequence[float]) -> np.ndarray:
        """-sum_j nu_j A_j for outward normal nu"""
        out = np.zeros((NVAR, NVAR))
        for nu, A in zip(normal, self.A):
            if nu != 0.0:
                out -= nu * A
        return out


def density(eos: EquationOfState, p: float, S: float) -> Tuple[float, float]:
    """rho and rho_p at a single (p, S)"""
    if eos.kind == "polytropic" and not p > 0:
        raise EOSDomainError(f"polytropic closure needs p > 0, got p={p!r}")
    rho, rho_p = eos.density(float(p), float(S))
    return float(rho), float(rho_p)


def _require_hyperbolic(eos: EquationOfState, U: np.ndarray) -> Tuple[float, float]:
    if eos.kind == "polytropic" and not U[P] > 0:
        raise HyperbolicityError("polytropic closure needs p > 0", state=U)
    rho, rho_p = eos.density(float(U[P]), float(U[S]))
    if not (np.isfinite(rho) and np.isfinite(rho_p) and rho > 0 and rho_p > 0):
        raise HyperbolicityError(f"hyperbolicity lost (rho={rho}, rho_p={rho_p})", state=U)
    return rho, rho_p


def assemble(eos: EquationOfState, U: np.ndarray) -> MatrixSet:
    """Assemble A0, A_j and Ahat_j at the state U"""
    U = np.asarray(U, dtype=float)
    rho, rho_p = _require_hyperbolic(eos, U)
    u = U[1:4]
    H = U[4:7]

    A0 = np.diag([rho_p / rho, rho, rho, rho, 1.0, 1.0, 1.0, 1.0])
    A = []
    for j in range(3):
        M = np.zeros((NVAR, NVAR))
        M[P, P] = rho_p / rho * u[j]
        M[P, 1 + j] = M[1 + j, P] = 1.0
        for k in range(3):
            M[1 + k, 1 + k] = rho * u[j]
            M[4 + k, 4 + k] = u[j]
            for i in range(3):
                value = (H[i] if j == k else 0.0) - (H[j] if k == i else 0.0)
                M[1 + k, 4 + i] = M[4 + i, 1 + k] = value
        M[S, S] = u[j]
        A.append(M)

    # A0 is diagonal, so A0^{-1} A_j is a row scaling
    inv_diag = 1.0 / np.diag(A0)
    Ahat = tuple(inv_diag[:, None] * M for M in A)
    return MatrixSet(A0=A0, A=tuple(A), Ahat=Ahat)


def ahat_apply(eos: EquationOfState, U, g, j: int, xp=np):
    """Ahat_j(U) g in closed form; j is 0-based, U and g share shape (8, ...)"""
    rho, rho_p = eos.density(U[P], U[S], xp)
    uj = U[1 + j]
    Hj = U[4 + j]
    gp = g[P]
    # (p, H.g_H) enters only the u_j row
    magnetic = (U[H1] * g[H1] + U[H2] * g[H2]) + U[H3] * g[H3]

    rows = [uj * gp + (rho / rho_p) * g[1 + j]]
    for k in range(3):
        lorentz = -(Hj * g[4 + k])
        if k == j:
            lorentz = (gp + magnetic) + lorentz
        rows.append(uj * g[1 + k] + lorentz / rho)
    for k in range(3):
        rows.append((U[4 + k] * g[1 + j] - Hj * g[1 + k]) + uj * g[4 + k])
    rows.append(uj * g[S])
    return xp.stack(rows)


def ahat_matrix(eos: EquationOfState, U, j: int, xp=np):
    """Ahat_j(U) as an (8, 8, ...) array built column by column from ahat_apply"""
    basis = np.eye(NVAR)
    cols = []
    for i in range(NVAR):
        e = xp.asarray(basis[i].reshape((NVAR,) + (1,) * (U.ndim - 1)))
        cols.append(ahat_apply(eos, U, e * xp.ones_like(U), j, xp))
    return xp.stack(cols, axis=1)


def quasilinear_rhs(eos: EquationOfState, U, grads, xp=np):
    """dU/dt = -(Ahat_1 g_1 + Ahat_2 g_2 + Ahat_3 g_3)"""
    total = ahat_apply(eos, U, grads[0], 0, xp)
    total = total + ahat_apply(eos, U, grads[1], 1, xp)
    total = total + ahat_apply(eos, U, grads[2], 2, xp)
    return -total


def rhs(eos: EquationOfState, U: np.ndarray, gradU: np.ndarray) -> np.ndarray:
    """dU/dt at one state; gradU has shape (3, 8) with row j holding dU/dx_j"""
    U = np.asarray(U, dtype=float)
    gradU = np.asarray(gradU, dtype=float)
    _require_hyperbolic(eos, U)
    return quasilinear_rhs(eos, U, (gradU[0], gradU[1], gradU[2]))


def spectral_radius(eos: EquationOfState, U: np.ndarray, direction: Sequence[float],
                    matrices: Optional[MatrixSet] = None) -> float:
    """Largest |lambda| of sum_j nu_j Ahat_j via the symmetric pencil (sum nu_j A_j, A0)"""
    ms = matrices if matrices is not None else assemble(eos, U)
    M = sum(nu * A for nu, A in zip(direction, ms.A))
    return float(np.max(np.abs(linalg.eigh(M, ms.A0, eigvals_only=True))))


def wave_speed_bound(eos: EquationOfState, U: np.ndarray) -> float:
    """max_j spectral radius of Ahat_j(U)"""
    ms = assemble(eos, U)
    return max(spectral_radius(eos, U, np.eye(3)[j], ms) for j in range(3))


def max_characteristic_speed(eos: EquationOfState, U: np.ndarray) -> np.ndarray:
    """
    Closed-form max_j (|u_j| + c_f,j) over an (8, ...) array of states.

    c_f,j is the fast magnetosonic speed along x_j; it equals the spectral
    radius of Ahat_j up to the advection shift and is invariant under sign
    flips of u_j and H_j.
    """
    rho, rho_p = eos.density(U[P], U[S])
    a2 = 1.0 / rho_p
    b2 = ((U[H1] * U[H1] + U[H2] * U[H2]) + U[H3] * U[H3]) / rho
    total = a2 + b2
    speed = None
    for j in range(3):
        bj2 = U[4 + j] * U[4 + j] / rho
        disc = np.maximum(total * total - 4.0 * a2 * bj2, 0.0)
        cf = np.sqrt(0.5 * (total + np.sqrt(disc)))
        candidate = np.abs(U[1 + j]) + cf
        speed = candidate if speed is None else np.maximum(speed, candidate)
    return speed


def check_hyperbolic(eos: EquationOfState, U: np.ndarray, offset: Sequence[int] = (0, 0, 0)):
    """Raise HyperbolicityError naming the first bad cell of an (8, n1, n2, n3) block"""
    if eos.kind == "polytropic":
        bad = ~(U[P] > 0)
        if bad.any():
            _raise_at(U, bad, offset, "polytropic closure needs p > 0")
        rho, rho_p = eos.density(U[P], U[S])
    else:
        rho, rho_p = eos.density(U[P], U[S])
    bad = ~((rho > 0) & (rho_p > 0) & np.isfinite(rho) & np.isfinite(rho_p))
    if bad.any():
        _raise_at(U, bad, offset, "hyperbolicity lost (rho or rho_p not positive)")


def _raise_at(U: np.ndarray, bad: np.ndarray, offset: Sequence[int], message: str):
    index = tuple(int(i) for i in np.argwhere(bad)[0])
    location = tuple(i + o for i, o in zip(index, offset))
    state = U[(slice(None),) + index]
    logger.error("%s at cell %s", message, location)
    raise HyperbolicityError(message, location=location, state=state)
