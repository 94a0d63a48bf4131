"""Shared helpers for the test suite."""

import numpy as np
import pytest

ALL_DTYPES = (np.float32, np.float64, np.complex64, np.complex128)
REAL_DTYPES = (np.float32, np.float64)


def random_matrix(m, n, dtype=np.float64, seed=0, order="F"):
    """Uniform [0,1) test matrix; complex dtypes get independent re/im parts."""
    rng = np.random.default_rng(seed)
    a = rng.random((m, n))
    if np.dtype(dtype).kind == "c":
        a = a + 1j * rng.random((m, n))
    return np.asarray(a, dtype=dtype, order=order)


def random_hermitian(n, dtype=np.float64, seed=0):
    a = random_matrix(n, n, dtype, seed)
    h = a + a.conj().T
    return np.asfortranarray(h)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
