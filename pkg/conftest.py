import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from mhdq.mhd_core import EquationOfState  # noqa: E402


@pytest.fixture
def exp_eos():
    return EquationOfState.exponential(1.0)


@pytest.fixture
def poly_eos():
    return EquationOfState.polytropic(5.0 / 3.0, 1.0)


@pytest.fixture
def aligned_state():
    """p = 0, u = 0, H = (1, 0, 0), S = 0"""
    return np.array([0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
