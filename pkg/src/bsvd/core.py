"""Dense column-major kernels shared by the whole solver stack.

Matrices are numpy arrays kept in Fortran (column-major) order so that
block-column views are contiguous. Four element types are supported:
float32, float64, complex64, complex128. All accumulation happens in the
working precision of the inputs; there is no extended-precision path.
"""

from __future__ import annotations

import numpy as np


class ShapeError(ValueError):
    """Operand dimensions do not conform."""


class DomainError(ValueError):
    """Input lies outside an operation's mathematical domain."""


_REAL_OF = {
    np.dtype(np.float32): np.dtype(np.float32),
    np.dtype(np.float64): np.dtype(np.float64),
    np.dtype(np.complex64): np.dtype(np.float32),
    np.dtype(np.complex128): np.dtype(np.float64),
}

SUPPORTED_DTYPES = tuple(_REAL_OF)


def check_dtype(dtype) -> np.dtype:
    dt = dtype.dtype if isinstance(dtype, np.ndarray) else np.dtype(dtype)
    if dt not in _REAL_OF:
        raise DomainError(f"unsupported element type {dt}; "
                          f"expected one of {[str(d) for d in SUPPORTED_DTYPES]}")
    return dt


def real_dtype(dtype) -> np.dtype:
    """The real field underlying `dtype` (float32 for the single fields)."""
    return _REAL_OF[check_dtype(dtype)]


def is_complex(dtype) -> bool:
    return np.dtype(dtype).kind == "c"


def unit_roundoff(dtype) -> float:
    """u = 2**-24 for single-precision fields, 2**-53 for double."""
    return 2.0 ** -24 if real_dtype(dtype) == np.dtype(np.float32) else 2.0 ** -53


def fmatrix(a, dtype=None) -> np.ndarray:
    """Copy `a` into a 2-d Fortran-ordered array of a supported dtype."""
    arr = np.array(a, dtype=dtype, order="F")
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-d array, got ndim={arr.ndim}")
    check_dtype(arr.dtype)
    return arr


def gemm(alpha, a: np.ndarray, trans_a: str, b: np.ndarray, trans_b: str,
         beta, c: np.ndarray) -> np.ndarray:
    """c <- alpha * op(a) @ op(b) + beta * c, in place.

    `trans_a`/`trans_b` are "n" (as is) or "h" (conjugate transpose).
    With beta == 0 the prior contents of c are ignored, not read.
    """
    if trans_a not in ("n", "h") or trans_b not in ("n", "h"):
        raise DomainError("trans flags must be 'n' or 'h'")
    op_a = a if trans_a == "n" else a.conj().T
    op_b = b if trans_b == "n" else b.conj().T
    if op_a.shape[1] != op_b.shape[0]:
        raise ShapeError(f"inner dimensions disagree: {op_a.shape} x {op_b.shape}")
    if c.shape != (op_a.shape[0], op_b.shape[1]):
        raise ShapeError(f"output shape {c.shape} does not match product "
                         f"({op_a.shape[0]}, {op_b.shape[1]})")
    prod = op_a @ op_b
    if beta == 0:
        c[...] = alpha * prod if alpha != 1 else prod
    else:
        c[...] = alpha * prod + beta * c
    return c


def one_norm(a: np.ndarray) -> float:
    """Maximum absolute column sum; 0 for empty input."""
    if a.size == 0:
        return 0.0
    if a.ndim == 1:
        return float(np.abs(a).sum())
    return float(np.abs(a).sum(axis=0).max())


def frobenius_norm(a: np.ndarray) -> float:
    return float(np.sqrt((np.abs(a) ** 2).sum()))


def off_norm(g: np.ndarray) -> float:
    """Frobenius norm of the strictly off-diagonal part of a square matrix."""
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ShapeError(f"off_norm needs a square matrix, got {g.shape}")
    mags = np.abs(g).astype(np.float64) ** 2
    np.fill_diagonal(mags, 0.0)
    return float(np.sqrt(mags.sum()))


def conj_dot(x: np.ndarray, y: np.ndarray):
    """sum over p of conj(x_p) * y_p."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ShapeError(f"length mismatch: {x.shape} vs {y.shape}")
    return np.vdot(x, y)


def householder_qr(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reduced non-pivoted QR by Householder reflections.

    Returns (q, r) with q m-by-n (orthonormal columns), r n-by-n upper
    triangular with a real non-negative diagonal. Requires m >= n.
    """
    a = fmatrix(a)
    m, n = a.shape
    if m < n:
        raise ShapeError(f"householder_qr needs m >= n, got {m}x{n}")
    dtype = a.dtype
    r = a.copy(order="F")
    reflectors: list[tuple[int, np.ndarray]] = []
    for k in range(n):
        x = r[k:, k]
        norm_x = float(np.linalg.norm(x))
        if norm_x == 0.0:
            continue
        alpha = x[0]
        phase = alpha / abs(alpha) if alpha != 0 else dtype.type(1)
        v = x.copy()
        v[0] += phase * norm_x
        vn = float(np.linalg.norm(v))
        if vn == 0.0:
            continue
        v /= vn
        w = v.conj() @ r[k:, k:]
        r[k:, k:] -= 2.0 * np.outer(v, w)
        # the reflector sends x to a multiple of e1; store the exact value
        r[k, k] = -phase * norm_x
        r[k + 1:, k] = 0
        reflectors.append((k, v))

    q = np.zeros((m, n), dtype=dtype, order="F")
    for k in range(n):
        q[k, k] = 1
    for k, v in reversed(reflectors):
        w = v.conj() @ q[k:, :]
        q[k:, :] -= 2.0 * np.outer(v, w)

    # sign convention: rotate column/row phases so diag(r) is real >= 0
    for k in range(n):
        dkk = r[k, k]
        if dkk == 0:
            continue
        p = dkk / abs(dkk)
        if p != 1:
            r[k, k:] *= np.conj(p)
            q[:, k] *= p
        r[k, k] = abs(dkk)
    return q, np.asfortranarray(r[:n, :])
