"""Cyclic Jacobi eigensolver for small Hermitian matrices.

The solver repeatedly annihilates off-diagonal entries with unitary plane
rotations, visiting pairs in a round-robin order so that every iteration
works on disjoint pairs. It is used both standalone and as the inner
eigensolver of the blocked SVD, where it is typically run for a single
sweep per outer pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .core import DomainError, ShapeError, check_dtype, real_dtype, unit_roundoff
from .ordering import schedule_arrays

__all__ = ["Rotation", "compute_rotation", "EigInfo", "jacobi_hermitian_eig"]


@dataclass(frozen=True)
class Rotation:
    """Plane rotation J = [[c, -phase*s], [conj(phase)*s, c]].

    ``c`` and ``s`` are real; ``phase`` is the unit-magnitude factor of the
    annihilated entry (1.0 for real input). ``t`` is the tangent, kept so
    the rotated diagonal can be formed in closed form:
    d_i + t*|a_ij| and d_j - t*|a_ij|.
    """

    c: float
    s: float
    phase: complex
    t: float
    i: int | None = None
    j: int | None = None

    def as_matrix(self, dtype=None) -> np.ndarray:
        j = np.array(
            [
                [self.c, -self.phase * self.s],
                [np.conj(self.phase) * self.s, self.c],
            ]
        )
        if dtype is not None:
            j = j.astype(dtype)
        return j


def compute_rotation(a_ii, a_jj, a_ij) -> Rotation:
    """Rotation annihilating the off-diagonal of [[a_ii, a_ij], [conj(a_ij), a_jj]].

    ``a_ii`` and ``a_jj`` must be real (a Hermitian matrix has a real
    diagonal); ``a_ij`` is the upper off-diagonal entry and may be complex.
    A zero ``a_ij`` yields the identity rotation.
    """
    if np.iscomplexobj(a_ii) and np.imag(a_ii) != 0:
        raise DomainError("diagonal entry a_ii must be real")
    if np.iscomplexobj(a_jj) and np.imag(a_jj) != 0:
        raise DomainError("diagonal entry a_jj must be real")
    dii = float(np.real(a_ii))
    djj = float(np.real(a_jj))
    g = complex(a_ij) if np.iscomplexobj(a_ij) else float(a_ij)
    absg = abs(g)
    if absg == 0.0:
        return Rotation(c=1.0, s=0.0, phase=1.0, t=0.0)
    if absg < 2.0**-966:
        # subnormal range: |g| loses precision, so normalize a scaled copy
        # (power-of-two scaling is exact)
        gs = g * 2.0**1022
        phase = gs / abs(gs)
    else:
        phase = g / absg
    tau = (dii - djj) / (2.0 * absg)
    sgn = 1.0 if tau >= 0.0 else -1.0
    t = sgn / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    return Rotation(c=float(c), s=float(t * c), phase=phase, t=float(t))


@dataclass(frozen=True)
class EigInfo:
    sweeps_run: int
    rotations: int
    converged: bool


def jacobi_hermitian_eig(
    g: np.ndarray,
    k: float = 30.0,
    max_sweeps: int = 30,
    eigvecs: np.ndarray | None = None,
):
    """Diagonalize a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(d, m, info)`` with ``g ~= m @ diag(d) @ m.conj().T``. A pair
    is rotated only when its off-diagonal magnitude exceeds
    ``k * u * sqrt(|d_i| * |d_j|)``; a sweep that applies no rotation ends
    the iteration (that quiet sweep is included in ``sweeps_run``).

    When ``eigvecs`` is given, rotations are accumulated into its columns
    in place instead of a fresh identity; it must have n columns and the
    same dtype as ``g``.
    """
    a = np.asarray(g)
    check_dtype(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if k <= 0:
        raise DomainError(f"guard multiplier k must be positive, got {k}")
    if max_sweeps < 1:
        raise DomainError(f"max_sweeps must be at least 1, got {max_sweeps}")

    u = unit_roundoff(a.dtype)
    normf = float(np.linalg.norm(a))
    herm_tol = 4.0 * u * normf
    asym = float(np.max(np.abs(a - a.conj().T))) if n else 0.0
    if asym > herm_tol:
        raise DomainError(
            f"matrix is not Hermitian: max asymmetry {asym:.3e} exceeds {herm_tol:.3e}"
        )

    d = np.ascontiguousarray(np.real(np.diag(a)), dtype=real_dtype(a.dtype))
    if eigvecs is not None:
        m = eigvecs
        if m.dtype != a.dtype or m.ndim != 2 or m.shape[1] != n:
            raise ShapeError("eigvecs must be 2-d with n columns and matching dtype")
        if not m.flags.f_contiguous:
            raise ShapeError("eigvecs must be F-contiguous")
    else:
        m = np.eye(n, dtype=a.dtype, order="F")

    if n < 2:
        return d, m, EigInfo(sweeps_run=1, rotations=0, converged=True)

    # authoritative working copy: exact Hermitian from the upper triangle
    w = np.triu(a, 1)
    w = np.asfortranarray(w + w.conj().T)

    pairs, starts = schedule_arrays(n)
    kern = backend.active()
    sweeps, rotations, converged = kern.eig_sweeps(
        w, d, m, pairs, starts, float(k) * u, int(max_sweeps)
    )
    return d, m, EigInfo(sweeps_run=int(sweeps), rotations=int(rotations), converged=bool(converged))


def _eig_delta(g: np.ndarray, k: float, max_sweeps: int):
    """Inner solve for the block path.

    Same iteration as jacobi_hermitian_eig, but the rotation product P is
    returned as mdelta = P - I accumulated from zero. A near-identity P
    stored directly would round its diagonal back to 1 and lose the
    second-order norm shrink of every small rotation; the caller applies
    the update as W + W @ mdelta to keep that correction. Trusts g to be
    square and exactly Hermitian (fresh Gram output).
    """
    n = g.shape[0]
    u = unit_roundoff(g.dtype)
    d = np.ascontiguousarray(np.real(np.diag(g)), dtype=real_dtype(g.dtype))
    mdelta = np.zeros((n, n), dtype=g.dtype, order="F")
    if n < 2:
        return d, mdelta, EigInfo(sweeps_run=1, rotations=0, converged=True)
    w = np.triu(g, 1)
    w = np.asfortranarray(w + w.conj().T)
    pairs, starts = schedule_arrays(n)
    kern = backend.active()
    sweeps, rotations, converged = kern.eig_sweeps(
        w, d, mdelta, pairs, starts, float(k) * u, int(max_sweeps), True
    )
    return d, mdelta, EigInfo(sweeps_run=int(sweeps), rotations=int(rotations), converged=bool(converged))
