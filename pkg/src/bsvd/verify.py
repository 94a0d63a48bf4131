"""Accuracy metrics, pass thresholds, and the reference oracle.

The four metrics follow the usual backward-error recipe: e1 is the scaled
1-norm reconstruction residual, e2/e3 measure orthonormality of U and V,
e4 compares computed singular values against a reference spectrum. A
result passes at multiplier k when each metric is below k*u of the input
precision (u = 2^-24 single, 2^-53 double).

The oracle solver replaces an external reference implementation: the
unblocked solver run in double precision at tolerance multiplier k=1 with
a 100-sweep budget, self-checked on e1-e3 after every call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DomainError, ShapeError, check_dtype, one_norm, unit_roundoff
from .svd import JacobiOptions, SvdResult, svd_unblocked

__all__ = [
    "OracleError",
    "ErrorReport",
    "threshold",
    "residual_e1",
    "orthogonality_e2_e3",
    "sigma_error_e4",
    "oracle_svd",
    "error_report",
]


class OracleError(RuntimeError):
    """The reference solver failed its own accuracy self-check."""


def threshold(dtype, k: float = 30.0) -> float:
    """Pass bound k*u for the given element type."""
    return float(k) * unit_roundoff(dtype)


def residual_e1(a: np.ndarray, result: SvdResult) -> float:
    """|A - U diag(sigma) V^H|_1 / (n |A|_1); 0 for an exact match."""
    a = np.asarray(a)
    if result.v is None:
        raise DomainError("e1 needs right singular vectors; solve with "
                          "compute_right_vectors=True")
    n = a.shape[1]
    recon = (result.u * result.sigma) @ result.v.conj().T
    num = one_norm(a - recon)
    den = n * one_norm(a)
    if den == 0.0:
        return 0.0 if num == 0.0 else float("inf")
    return num / den


def orthogonality_e2_e3(result: SvdResult) -> tuple[float, float]:
    """(|I - U^H U|_1 / m, |I - V^H V|_1 / n)."""
    if result.v is None:
        raise DomainError("e3 needs right singular vectors; solve with "
                          "compute_right_vectors=True")
    u = result.u
    v = result.v
    r = u.shape[1]
    eye = np.eye(r, dtype=u.dtype)
    m = u.shape[0]
    n = v.shape[0]
    e2 = one_norm(eye - u.conj().T @ u) / m if m else 0.0
    e3 = one_norm(eye - v.conj().T @ v) / n if n else 0.0
    return e2, e3


def sigma_error_e4(sigma, sigma_ref, m: int, n: int) -> float:
    """|sigma - sigma_ref|_F / min(m, n); both inputs descending."""
    s = np.asarray(sigma, dtype=np.float64)
    r = np.asarray(sigma_ref, dtype=np.float64)
    if s.shape != r.shape:
        raise ShapeError(f"length mismatch: {s.shape} vs {r.shape}")
    md = min(m, n)
    if md == 0:
        return 0.0
    return float(np.linalg.norm(s - r)) / md


_ORACLE_U = unit_roundoff(np.float64)


def oracle_svd(a: np.ndarray) -> np.ndarray:
    """Reference singular values (float64, descending).

    Runs the unblocked solver in double precision with tolerance
    multiplier 1 and a 100-sweep budget, then verifies its own factors:
    e1, e2, e3 must all be below 30u(double), else OracleError. At
    multiplier 1 the rotation guard sits at the rounding floor of the
    column dot products, so the quiet-sweep flag is not a usable
    convergence signal; the self-check is the authoritative gate.
    """
    a = np.asarray(a)
    check_dtype(a.dtype)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got ndim={a.ndim}")
    wide = np.complex128 if np.iscomplexobj(a) else np.float64
    b = np.asfortranarray(a, dtype=wide)
    if b.shape[0] < b.shape[1]:
        b = b.conj().T.copy(order="F")
    opts = JacobiOptions(k=1.0, max_nsweeps=100, compute_right_vectors=True)
    res = svd_unblocked(b, opts)
    bound = 30.0 * _ORACLE_U
    e1 = residual_e1(b, res)
    e2, e3 = orthogonality_e2_e3(res)
    if not (e1 <= bound and e2 <= bound and e3 <= bound):
        raise OracleError(
            f"oracle self-check failed on shape {a.shape}: "
            f"e1={e1:.3e} e2={e2:.3e} e3={e3:.3e} bound={bound:.3e}"
        )
    return np.asarray(res.sigma, dtype=np.float64)


@dataclass(frozen=True)
class ErrorReport:
    """Metrics and verdicts for one solved problem.

    e4 is None when no reference spectrum was supplied; its pass flag is
    then vacuously True. e3 may be held to a looser bound than the others
    (the documented double-precision logrand/geo exception).
    """

    e1: float
    e2: float
    e3: float
    e4: float | None
    threshold: float
    e3_threshold: float
    passes: tuple[bool, bool, bool, bool]
    family: str | None = None
    n: int = 0
    m: int = 0
    dtype: str = ""
    batch_index: int | None = None

    @property
    def all_pass(self) -> bool:
        return all(self.passes)


def error_report(
    a: np.ndarray,
    result: SvdResult,
    sigma_ref=None,
    k: float = 30.0,
    e3_threshold: float | None = None,
    family: str | None = None,
    batch_index: int | None = None,
) -> ErrorReport:
    """Evaluate all four metrics for one (matrix, result) pair."""
    a = np.asarray(a)
    m, n = a.shape
    thr = threshold(a.dtype, k)
    e3_thr = thr if e3_threshold is None else float(e3_threshold)
    e1 = residual_e1(a, result)
    e2, e3 = orthogonality_e2_e3(result)
    if sigma_ref is not None:
        e4 = sigma_error_e4(result.sigma, sigma_ref, m, n)
        p4 = e4 < thr
    else:
        e4 = None
        p4 = True
    return ErrorReport(
        e1=e1,
        e2=e2,
        e3=e3,
        e4=e4,
        threshold=thr,
        e3_threshold=e3_thr,
        passes=(e1 < thr, e2 < thr, e3 < e3_thr, p4),
        family=family,
        n=n,
        m=m,
        dtype=str(a.dtype),
        batch_index=batch_index,
    )
