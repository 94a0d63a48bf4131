"""Kernel backend selection.

Two interchangeable kernel sets exist: a numba-compiled one (default when
numba imports cleanly) and a pure-numpy one. The environment variable
``BSVD_BACKEND`` picks the initial backend:

* ``auto`` (or unset): numba when available, numpy otherwise.
* ``numba``: require the compiled kernels; raise if numba is missing.
* ``numpy``: force the vectorized fallback.

``select()`` switches at runtime and ``use()`` scopes a switch to a block,
which is how the benchmark compares both on identical inputs. Both backends
implement the same sweep semantics (same guard decisions, same rotation
order within an iteration's disjoint pairs) but are not bitwise identical
to each other.
"""

from __future__ import annotations

import contextlib
import os
from dataclasses import dataclass
from typing import Callable

from . import _kernels_numpy

_VALID = ("auto", "numba", "numpy")


@dataclass(frozen=True)
class Backend:
    name: str
    eig_sweeps: Callable
    onesided_sweeps: Callable
    fused_pair_update: Callable


_NUMPY_BACKEND = Backend(
    name="numpy",
    eig_sweeps=_kernels_numpy.eig_sweeps,
    onesided_sweeps=_kernels_numpy.onesided_sweeps,
    fused_pair_update=_kernels_numpy.fused_pair_update,
)

_numba_backend: Backend | None = None
_numba_error: Exception | None = None
_active: Backend | None = None


def _load_numba() -> Backend | None:
    global _numba_backend, _numba_error
    if _numba_backend is not None:
        return _numba_backend
    if _numba_error is not None:
        return None
    try:
        from . import _kernels_numba
    except Exception as exc:  # pragma: no cover - depends on install
        _numba_error = exc
        return None
    _numba_backend = Backend(
        name="numba",
        eig_sweeps=_kernels_numba.eig_sweeps,
        onesided_sweeps=_kernels_numba.onesided_sweeps,
        fused_pair_update=_kernels_numba.fused_pair_update,
    )
    return _numba_backend


def _resolve(name: str) -> Backend:
    if name not in _VALID:
        raise ValueError(
            f"unknown backend {name!r}; expected one of {', '.join(_VALID)}"
        )
    if name == "numpy":
        return _NUMPY_BACKEND
    nb = _load_numba()
    if nb is not None:
        return nb
    if name == "numba":
        raise RuntimeError(f"numba backend unavailable: {_numba_error!r}")
    return _NUMPY_BACKEND


def active() -> Backend:
    """Return the backend in effect, initializing from BSVD_BACKEND."""
    global _active
    if _active is None:
        _active = _resolve(os.environ.get("BSVD_BACKEND", "auto").lower())
    return _active


def select(name: str) -> Backend:
    """Switch the process-wide backend and return it."""
    global _active
    _active = _resolve(name)
    return _active


@contextlib.contextmanager
def use(name: str):
    """Temporarily switch backends within a with-block."""
    global _active
    previous = active()
    _active = _resolve(name)
    try:
        yield _active
    finally:
        _active = previous
