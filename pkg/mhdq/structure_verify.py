"""
Sampled checks of the algebraic structure of the quasilinear MHD system:
symmetry, hyperbolicity, boundary-matrix rank on the two walls, the boundary
quadratic form on N, and the block pattern of Ahat_j relative to N and N-perp.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from .autodiff import ahat_derivative
from .errors import PreconditionError
from .mhd_core import (
    H3, NVAR, U1, U2, U3, EquationOfState, ahat_matrix, assemble, rhs, spectral_radius,
    wave_speed_bound,
)

logger = logging.getLogger(__name__)

N_INDICES = (0, 1, 2, 4, 5, 7)
NPERP_INDICES = (U3, H3)


@dataclass(frozen=True)
class SubspaceProjector:
    """Coordinate projection onto N = {u3 = H3 = 0} or its complement N-perp"""
    which: str

    def __post_init__(self):
        if self.which not in ("N", "Nperp"):
            raise ValueError(f"unknown subspace '{self.which}'")

    @property
    def indices(self) -> Tuple[int, ...]:
        return N_INDICES if self.which == "N" else NPERP_INDICES

    @property
    def matrix(self) -> np.ndarray:
        P = np.zeros((NVAR, NVAR))
        for i in self.indices:
            P[i, i] = 1.0
        return P

    def contains(self, v: np.ndarray, atol: float = 0.0) -> bool:
        other = NPERP_INDICES if self.which == "N" else N_INDICES
        return bool(np.all(np.abs(np.asarray(v)[list(other)]) <= atol))


N = SubspaceProjector("N")
NPERP = SubspaceProjector("Nperp")


@dataclass(frozen=True)
class BoundaryDescriptor:
    """Wall type with its outward unit normal"""
    which: str

    def __post_init__(self):
        if self.which not in ("Gamma0", "Gamma1"):
            raise ValueError(f"unknown boundary '{self.which}'")

    @property
    def normal(self) -> Tuple[float, float, float]:
        return (0.0, 0.0, -1.0) if self.which == "Gamma0" else (-1.0, 0.0, 0.0)


GAMMA0 = BoundaryDescriptor("Gamma0")
GAMMA1 = BoundaryDescriptor("Gamma1")

TRACE_ATOL = 1e-12


def _require_trace(U: np.ndarray, b: BoundaryDescriptor):
    if b.which == "Gamma0":
        if abs(U[U3]) > TRACE_ATOL or abs(U[H3]) > TRACE_ATOL:
            raise PreconditionError("Gamma0 states need u3 = H3 = 0")
    elif np.any(np.abs(U[[U1, U2, U3]]) > TRACE_ATOL):
        raise PreconditionError("Gamma1 states need u = 0")


def check_boundary_rank(eos: EquationOfState, U: np.ndarray, b: BoundaryDescriptor,
                        tol: float = 1e-10) -> int:
    """Numerical rank of the boundary matrix -sum_j nu_j A_j(U)"""
    U = np.asarray(U, dtype=float)
    _require_trace(U, b)
    sigma = linalg.svdvals(assemble(eos, U).boundary_matrix(b.normal))
    if sigma[0] == 0.0:
        return 0
    return int(np.sum(sigma > tol * sigma[0]))


def boundary_signature(eos: EquationOfState, U: np.ndarray, b: BoundaryDescriptor,
                       tol: float = 1e-10) -> Tuple[int, int, int]:
    """(positive, zero, negative) eigenvalue counts of the boundary matrix"""
    U = np.asarray(U, dtype=float)
    _require_trace(U, b)
    lam = linalg.eigvalsh(assemble(eos, U).boundary_matrix(b.normal))
    cutoff = tol * max(1.0, float(np.max(np.abs(lam))))
    return (int(np.sum(lam > cutoff)), int(np.sum(np.abs(lam) <= cutoff)),
            int(np.sum(lam < -cutoff)))


def check_boundary_form(eos: EquationOfState, U: np.ndarray, v: np.ndarray) -> float:
    """<A3(U) v, v> for a Gamma0-admissible U and v in N"""
    U = np.asarray(U, dtype=float)
    v = np.asarray(v, dtype=float)
    _require_trace(U, GAMMA0)
    if not N.contains(v):
        raise PreconditionError("boundary form is only defined for v in N")
    M = assemble(eos, U).boundary_matrix(GAMMA0.normal)
    return float(v @ (M @ v))


@dataclass
class InvarianceReport:
    """Block-norm residuals of Ahat_j (or its state derivative) relative to N / N-perp"""
    j: int
    t_deriv: bool
    residuals: Dict[str, float]

    @property
    def worst(self) -> float:
        return max(self.residuals.values())

    def passed(self, tol: float = 1e-12) -> bool:
        return self.worst <= tol


def _block_norm(M: np.ndarray, rows: Sequence[int], cols: Sequence[int]) -> float:
    return float(np.max(np.abs(M[np.ix_(rows, cols)])))


def invariance_residuals(M: np.ndarray, j: int) -> Dict[str, float]:
    """Off-pattern block norms; j=1,2 keep N and N-perp, j=3 swaps them"""
    if j in (1, 2):
        return {
            "Nperp<-N": _block_norm(M, NPERP_INDICES, N_INDICES),
            "N<-Nperp": _block_norm(M, N_INDICES, NPERP_INDICES),
        }
    return {
        "N<-N": _block_norm(M, N_INDICES, N_INDICES),
        "Nperp<-Nperp": _block_norm(M, NPERP_INDICES, NPERP_INDICES),
    }


def check_geometric_invariance(eos: EquationOfState, U: np.ndarray, j: int,
                               t_deriv: bool = False, W: Optional[np.ndarray] = None,
                               seed: int = 0) -> InvarianceReport:
    """
    Block pattern of Ahat_j(U) for U in N (j is 1-based).

    With t_deriv the same pattern is checked on D_U Ahat_j(U)[W] for an
    increment W in N (drawn from ``seed`` when not given).
    """
    U = np.asarray(U, dtype=float)
    if j not in (1, 2, 3):
        raise ValueError("direction index j must be 1, 2 or 3")
    if not N.contains(U):
        raise PreconditionError("geometric invariance needs U in N (u3 = H3 = 0)")
    if t_deriv:
        if W is None:
            W = np.random.default_rng(seed).uniform(-1.0, 1.0, NVAR)
            W[list(NPERP_INDICES)] = 0.0
        W = np.asarray(W, dtype=float)
        if not N.contains(W):
            raise PreconditionError("derivative direction W must lie in N")
        M = ahat_derivative(eos, U, W, j - 1)
    else:
        assemble(eos, U)
        M = ahat_matrix(eos, U, j - 1)
    return InvarianceReport(j=j, t_deriv=t_deriv, residuals=invariance_residuals(M, j))


@dataclass
class SuiteResult:
    """One line of the structure suite table"""
    name: str
    eos: str
    samples: int
    worst: float
    tolerance: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "eos": self.eos,
            "samples": self.samples,
            "worst": self.worst,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "detail": self.detail,
        }


def random_states(eos: EquationOfState, rng: np.random.Generator, count: int) -> np.ndarray:
    """(count, 8) states with components in [-1, 1]; polytropic p drawn from (0.1, 2)"""
    X = rng.uniform(-1.0, 1.0, (count, NVAR))
    if eos.kind == "polytropic":
        X[:, 0] = rng.uniform(0.1, 2.0, count)
    return X


def _gamma0_states(eos, rng, count):
    X = random_states(eos, rng, count)
    X[:, [U3, H3]] = 0.0
    return X


def _gamma1_states(eos, rng, count, min_h1=0.1):
    X = random_states(eos, rng, count)
    X[:, [U1, U2, U3]] = 0.0
    # keep |H1| >= min_h1 so the rank stays maximal
    X[:, 4] = rng.choice([-1.0, 1.0], count) * rng.uniform(min_h1, 1.0, count)
    return X


def _suite_for(eos: EquationOfState, samples: int, rng: np.random.Generator) -> List[SuiteResult]:
    label = eos.kind
    results = []

    states = random_states(eos, rng, samples)
    sym_worst = 0.0
    a0_min = np.inf
    consistency = 0.0
    bound_excess = -np.inf
    for U in states:
        ms = assemble(eos, U)
        sym_worst = max(sym_worst, max(float(np.max(np.abs(A - A.T))) for A in ms.A))
        a0_min = min(a0_min, float(np.min(linalg.eigvalsh(ms.A0))))
        g = rng.uniform(-1.0, 1.0, (3, NVAR))
        dU = rhs(eos, U, g)
        residual = ms.A0 @ dU + sum(A @ gj for A, gj in zip(ms.A, g))
        scale = max(1.0, float(np.max(np.abs(ms.A0 @ dU))))
        consistency = max(consistency, float(np.max(np.abs(residual))) / scale)
        nu = rng.normal(size=3)
        nu /= np.linalg.norm(nu)
        excess = spectral_radius(eos, U, nu, ms) - np.sqrt(3.0) * wave_speed_bound(eos, U)
        bound_excess = max(bound_excess, excess)
    results.append(SuiteResult("symmetry A_j", label, samples, sym_worst, 0.0, sym_worst == 0.0))
    results.append(SuiteResult("A0 positive definite", label, samples, -a0_min, 0.0, a0_min > 0.0,
                               f"min eigenvalue {a0_min:.3e}"))
    results.append(SuiteResult("rhs consistency", label, samples, consistency, 1e-13,
                               consistency <= 1e-13))
    results.append(SuiteResult("eigenvalue bound sqrt(3)", label, samples, max(bound_excess, 0.0),
                               1e-12, bound_excess <= 1e-12))

    half = max(1, samples // 2)
    ranks0 = [check_boundary_rank(eos, U, GAMMA0) for U in _gamma0_states(eos, rng, half)]
    bad0 = sum(r != 2 for r in ranks0)
    results.append(SuiteResult("boundary rank Gamma0 == 2", label, half, float(bad0), 0.0,
                               bad0 == 0, f"ranks seen {sorted(set(ranks0))}"))
    ranks1 = [check_boundary_rank(eos, U, GAMMA1) for U in _gamma1_states(eos, rng, half)]
    bad1 = sum(r != 6 for r in ranks1)
    results.append(SuiteResult("boundary rank Gamma1 == 6", label, half, float(bad1), 0.0,
                               bad1 == 0, f"ranks seen {sorted(set(ranks1))}"))

    degenerate = _gamma1_states(eos, rng, 1)[0]
    degenerate[4:7] = 0.0
    drop = check_boundary_rank(eos, degenerate, GAMMA1)
    if drop < 6:
        logger.warning("degenerate Gamma1 state (u = H = 0) has boundary rank %d", drop)
    results.append(SuiteResult("Gamma1 degenerate H=0 detected", label, 1, float(drop), 5.0,
                               drop < 6, f"rank {drop}"))

    form_worst = 0.0
    sig = None
    for U in _gamma0_states(eos, rng, half):
        v = rng.uniform(-1.0, 1.0, NVAR)
        v[list(NPERP_INDICES)] = 0.0
        form_worst = max(form_worst, abs(check_boundary_form(eos, U, v)))
        sig = boundary_signature(eos, U, GAMMA0)
    results.append(SuiteResult("boundary form on N", label, half, form_worst, 1e-14,
                               form_worst <= 1e-14, f"signature (+,0,-) {sig}"))

    inv_count = max(1, samples // 5)
    U_n = random_states(eos, rng, inv_count)
    U_n[:, list(NPERP_INDICES)] = 0.0
    W_n = rng.uniform(-1.0, 1.0, (inv_count, NVAR))
    W_n[:, list(NPERP_INDICES)] = 0.0
    for j in (1, 2, 3):
        plain = max(check_geometric_invariance(eos, U, j).worst for U in U_n)
        results.append(SuiteResult(f"invariance Ahat_{j}", label, inv_count, plain, 1e-12,
                                   plain <= 1e-12))
        # one batched derivative for all sampled states
        D = ahat_derivative(eos, U_n.T, W_n.T, j - 1)
        deriv = max(max(invariance_residuals(D[:, :, s], j).values()) for s in range(inv_count))
        results.append(SuiteResult(f"invariance D Ahat_{j}", label, inv_count, deriv, 1e-12,
                                   deriv <= 1e-12))
    return results


def run_structure_suite(samples: int = 1000, seed: int = 0,
                        closures: Optional[Sequence[EquationOfState]] = None) -> List[SuiteResult]:
    """Every structure check over seeded random states, for each closure"""
    closures = closures or (EquationOfState.exponential(), EquationOfState.polytropic())
    rng = np.random.default_rng(seed)
    results = []
    for eos in closures:
        results.extend(_suite_for(eos, samples, rng))
    failed = [r for r in results if not r.passed]
    logger.info("structure suite: %d checks, %d failed", len(results), len(failed))
    return results
