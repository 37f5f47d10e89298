"""Forward-mode derivatives of the quasilinear assembly in its state argument."""

from functools import partial
from typing import Sequence

import jax
import jax.numpy as jnp
import numpy as np

from .mhd_core import EquationOfState, ahat_matrix, quasilinear_rhs

jax.config.update("jax_enable_x64", True)


# eos (frozen, hashable) and j are static arguments
@partial(jax.jit, static_argnums=(0, 3))
def _ahat_tangent(eos: EquationOfState, U, W, j: int):
    return jax.jvp(lambda V: ahat_matrix(eos, V, j, jnp), (U,), (W,))[1]


@partial(jax.jit, static_argnums=0)
def _rhs_tangent(eos: EquationOfState, U, grads, W):
    return jax.jvp(lambda V: quasilinear_rhs(eos, V, grads, jnp), (U,), (W,))[1]


def ahat_derivative(eos: EquationOfState, U: np.ndarray, W: np.ndarray, j: int) -> np.ndarray:
    """D_U Ahat_j(U)[W]; U and W of shape (8, ...), result (8, 8, ...)"""
    tangent = _ahat_tangent(eos, jnp.asarray(U, dtype=jnp.float64),
                            jnp.asarray(W, dtype=jnp.float64), int(j))
    return np.asarray(tangent)


def rhs_state_derivative(eos: EquationOfState, U: np.ndarray, grads: Sequence[np.ndarray],
                         W: np.ndarray) -> np.ndarray:
    """Directional derivative of -sum_j Ahat_j(U) g_j in U along W, gradients held fixed"""
    fixed = tuple(jnp.asarray(g, dtype=jnp.float64) for g in grads)
    tangent = _rhs_tangent(eos, jnp.asarray(U, dtype=jnp.float64), fixed,
                           jnp.asarray(W, dtype=jnp.float64))
    return np.asarray(tangent)
