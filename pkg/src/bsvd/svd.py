"""One-sided Jacobi SVD: unblocked and blocked solvers.

The unblocked solver orthogonalizes individual column pairs of a working
copy W; the blocked solver partitions columns into nb-wide blocks and, per
block pair, forms the Gram matrix, eigendecomposes it (optionally with a
single inner sweep), and applies the eigenvector matrix to the working
copy and to V with a fused tile update. As W's columns become orthogonal,
W converges to U*diag(sigma) and sigma is read off as column norms.

Both solvers advance through `_ProblemRun`, a one-sweep-at-a-time engine
that the batch driver steps in lockstep across many problems. A sweep that
applies zero rotations leaves the working copy untouched, which is what
makes masked and unmasked batch execution produce identical factors.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import ceil

import numpy as np

from . import backend
from .core import (
    DomainError,
    ShapeError,
    check_dtype,
    fmatrix,
    householder_qr,
    real_dtype,
    unit_roundoff,
)
from .eig import _eig_delta
from .ordering import schedule_arrays

__all__ = [
    "JacobiOptions",
    "SolveInfo",
    "SvdResult",
    "WorkCounters",
    "compute_gram",
    "fused_pair_update",
    "finalize",
    "svd_unblocked",
    "svd_blocked",
    "svd_qr_preprocessed",
    "svd_dispatch",
]

# dispatch thresholds; see svd_dispatch
SMALL_CUTOFF = 32
QR_RATIO = 3.0
# sweep budget standing in for "run the inner eigensolver to convergence"
INNER_BUDGET = 100


@dataclass(frozen=True)
class JacobiOptions:
    """Solver knobs shared by every entry point.

    ``inner_sweeps=1`` runs a single sweep of the inner eigensolver per
    block pair; ``inner_sweeps=0`` runs it to convergence. ``masking``
    only has an effect under ``batch_svd``, where converged problems stop
    receiving work. ``fused_updates`` selects the tiled update kernel over
    two sequential full-width multiplications; both compute the same
    product.
    """

    k: float = 30.0
    max_nsweeps: int = 30
    nb: int = 16
    inner_sweeps: int = 1
    masking: bool = False
    use_qr_preprocess: bool = False
    compute_right_vectors: bool = True
    fused_updates: bool = True
    row_block: int = 64

    def __post_init__(self):
        if self.k <= 0:
            raise DomainError(f"k must be positive, got {self.k}")
        if self.max_nsweeps < 1:
            raise DomainError(f"max_nsweeps must be >= 1, got {self.max_nsweeps}")
        if self.nb < 1:
            raise DomainError(f"nb must be >= 1, got {self.nb}")
        if self.inner_sweeps < 0:
            raise DomainError(f"inner_sweeps must be >= 0, got {self.inner_sweeps}")
        if self.row_block < 1:
            raise DomainError(f"row_block must be >= 1, got {self.row_block}")


@dataclass
class WorkCounters:
    """Work and stage-time accounting for one solve (or a whole batch).

    Times are wall seconds split into the four stage categories: aux
    (setup, QR, finalize), Gram formation, eigensolver, and vector
    updates. The unblocked solver's sweep kernel is accounted under the
    eig stage.
    """

    gram_calls: int = 0
    eig_calls: int = 0
    update_calls: int = 0
    masked_pair_skips: int = 0
    t_aux: float = 0.0
    t_gram: float = 0.0
    t_eig: float = 0.0
    t_vec: float = 0.0

    def add(self, other: "WorkCounters") -> None:
        self.gram_calls += other.gram_calls
        self.eig_calls += other.eig_calls
        self.update_calls += other.update_calls
        self.masked_pair_skips += other.masked_pair_skips
        self.t_aux += other.t_aux
        self.t_gram += other.t_gram
        self.t_eig += other.t_eig
        self.t_vec += other.t_vec

    def total_seconds(self) -> float:
        return self.t_aux + self.t_gram + self.t_eig + self.t_vec


@dataclass(frozen=True)
class SolveInfo:
    converged: bool
    outer_sweeps: int
    inner_rotations: int
    masked_pair_skips: int
    path: str
    counters: WorkCounters | None = None


@dataclass(frozen=True)
class SvdResult:
    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray | None
    info: SolveInfo


def compute_gram(ai: np.ndarray, aj: np.ndarray) -> np.ndarray:
    """Hermitian Gram matrix of two adjacent column blocks.

    Returns the (w_i+w_j)-square matrix [Ai Aj]^H [Ai Aj] assembled from
    three products. The result is exactly Hermitian: the strict lower
    triangle is mirrored from the upper one and the diagonal is forced
    real, so downstream symmetry checks never trip on accumulation order.
    """
    a_i = np.asarray(ai)
    a_j = np.asarray(aj)
    check_dtype(a_i)
    check_dtype(a_j)
    if a_i.ndim != 2 or a_j.ndim != 2:
        raise ShapeError("block views must be 2-d")
    if a_i.shape[0] != a_j.shape[0]:
        raise ShapeError(
            f"row-count mismatch: {a_i.shape[0]} vs {a_j.shape[0]}"
        )
    if a_i.dtype != a_j.dtype:
        raise DomainError(f"dtype mismatch: {a_i.dtype} vs {a_j.dtype}")
    wi = a_i.shape[1]
    wj = a_j.shape[1]
    if wi < 1 or wj < 1:
        raise ShapeError("block widths must be >= 1")
    wt = wi + wj
    g = np.empty((wt, wt), dtype=a_i.dtype, order="F")
    g[:wi, :wi] = a_i.conj().T @ a_i
    g21 = a_j.conj().T @ a_i
    g[wi:, :wi] = g21
    g[:wi, wi:] = g21.conj().T
    g[wi:, wi:] = a_j.conj().T @ a_j
    iu, ju = np.triu_indices(wt, 1)
    g[ju, iu] = np.conj(g[iu, ju])
    idx = np.arange(wt)
    g[idx, idx] = np.real(g[idx, idx])
    return g


def fused_pair_update(
    bi: np.ndarray, bj: np.ndarray, j: np.ndarray, row_block: int = 64
) -> None:
    """Apply [Bi Bj] <- [Bi Bj] @ J in place, one row tile at a time.

    Each tile of Bi and Bj is read once into a per-tile accumulator and
    written back once; no full-height temporary is formed.
    """
    b_i = np.asarray(bi)
    b_j = np.asarray(bj)
    jm = np.asarray(j)
    if b_i.ndim != 2 or b_j.ndim != 2 or jm.ndim != 2:
        raise ShapeError("fused_pair_update expects 2-d arrays")
    if b_i.shape[0] != b_j.shape[0]:
        raise ShapeError(
            f"row-count mismatch: {b_i.shape[0]} vs {b_j.shape[0]}"
        )
    wt = b_i.shape[1] + b_j.shape[1]
    if jm.shape != (wt, wt):
        raise ShapeError(f"J must be {wt}x{wt}, got {jm.shape}")
    if b_i.dtype != b_j.dtype:
        raise DomainError(f"dtype mismatch: {b_i.dtype} vs {b_j.dtype}")
    if row_block < 1:
        raise DomainError(f"row_block must be >= 1, got {row_block}")
    if jm.dtype != b_i.dtype:
        jm = jm.astype(b_i.dtype)
    if b_i.shape[0] == 0:
        return
    backend.active().fused_pair_update(b_i, b_j, jm, int(row_block))


def _pair_update_twostage(bi: np.ndarray, bj: np.ndarray, mdelta: np.ndarray) -> None:
    # reference update: two sequential full-width products with a
    # full-height temporary, used when fused_updates is off; mdelta holds
    # P - I of the rotation product, added onto the stored blocks
    wi = bi.shape[1]
    t = bi @ mdelta[:wi, :]
    t += bj @ mdelta[wi:, :]
    bi += t[:, :wi]
    bj += t[:, wi:]


def _orthogonal_completion(u: np.ndarray, formed: list[int], hole: int) -> None:
    """Fill u[:, hole] with a unit vector orthogonal to the formed columns."""
    m = u.shape[0]
    if formed:
        load = np.sum(np.abs(u[:, formed]) ** 2, axis=1)
    else:
        load = np.zeros(m)
    k = int(np.argmin(load))
    x = np.zeros(m, dtype=u.dtype)
    x[k] = 1
    for _ in range(2):  # one reorthogonalization pass is enough at unit scale
        for c in formed:
            x -= u[:, c] * np.vdot(u[:, c], x)
    nrm = np.linalg.norm(x)
    if nrm == 0:  # pragma: no cover - m > len(formed) guarantees nonzero
        raise DomainError("orthogonal completion failed")
    u[:, hole] = x / nrm


def _finalize_factors(w: np.ndarray, v: np.ndarray | None):
    """Column norms -> sigma; normalize W into U; stable descending sort."""
    m, n = w.shape
    if n > m:
        raise ShapeError(f"finalize expects m >= n, got {w.shape}")
    rdt = real_dtype(w.dtype)
    u_r = unit_roundoff(w.dtype)
    # norms accumulated in double regardless of storage precision
    wd = w.astype(np.complex128 if np.iscomplexobj(w) else np.float64, copy=False)
    sigma = np.sqrt(np.sum(np.abs(wd) ** 2, axis=0)).astype(rdt)
    dtiny = float(np.finfo(rdt).tiny) / u_r

    u = np.array(w, dtype=w.dtype, order="F", copy=True)
    zero_cols = []
    formed = []
    for i in range(n):
        if sigma[i] < dtiny:
            sigma[i] = 0
            zero_cols.append(i)
        else:
            u[:, i] = u[:, i] / sigma[i]
            formed.append(i)
    for i in zero_cols:
        _orthogonal_completion(u, formed, i)
        formed.append(i)

    order = np.argsort(-sigma, kind="stable")
    if not np.array_equal(order, np.arange(n)):
        sigma = sigma[order]
        u = u[:, order]
        if v is not None:
            v = np.asfortranarray(v[:, order])
    return u, np.ascontiguousarray(sigma), v


def finalize(work_a: np.ndarray, v: np.ndarray | None = None) -> SvdResult:
    """Turn a converged working copy into (U, sigma, V).

    sigma_i is the 2-norm of column i; columns are normalized into U, a
    column whose norm underflows the reliable range (below smallest-normal
    divided by the unit roundoff) yields sigma_i = 0 and an orthogonally
    completed U column. The descending sort is stable: equal singular
    values keep their original column order, and V is permuted identically.
    """
    w = np.asarray(work_a)
    check_dtype(w)
    if w.ndim != 2:
        raise ShapeError("finalize expects a 2-d working copy")
    vv = None
    if v is not None:
        vv = np.asarray(v)
        if vv.ndim != 2 or vv.shape[1] != w.shape[1]:
            raise ShapeError("V must be 2-d with the same column count as workA")
    u, sigma, vv = _finalize_factors(w, vv)
    info = SolveInfo(
        converged=True,
        outer_sweeps=0,
        inner_rotations=0,
        masked_pair_skips=0,
        path="finalize",
    )
    return SvdResult(u=u, sigma=sigma, v=vv, info=info)


def _block_ranges(n: int, nb: int) -> list[tuple[int, int]]:
    ell = ceil(n / nb)
    return [(i * nb, min((i + 1) * nb, n)) for i in range(ell)]


class _ProblemRun:
    """One SVD problem advanced sweep by sweep.

    Owns the working copy, the V accumulator, the schedule, and all
    telemetry. `sweep()` runs one outer sweep and reports whether it was
    quiet (zero rotations); once a problem has converged, further sweeps
    are exact no-ops on the factors, so batch drivers may keep stepping it
    (unmasked mode) without changing the result. `finish()` produces the
    SvdResult, undoing transpose/QR preprocessing.
    """

    def __init__(self, a, opts: JacobiOptions, force: str | None = None):
        t0 = time.perf_counter()
        self.opts = opts
        self.counters = WorkCounters()
        self.converged = False
        self.outer_sweeps = 0
        self.inner_rotations = 0
        self.masked_skips = 0
        # per-pair telemetry from the latest sweep: (converged, sweeps_run, rotations)
        self.pair_stats: list[tuple[bool, int, int]] = []

        a = np.asarray(a)
        check_dtype(a)
        if a.ndim != 2:
            raise ShapeError(f"expected a 2-d matrix, got ndim={a.ndim}")
        m, n = a.shape
        self.a_shape = (m, n)
        self.dtype = a.dtype

        if force is not None and m < n:
            raise ShapeError(
                f"{force} solver requires m >= n, got {m}x{n}; use svd_dispatch"
            )
        self.transposed = force is None and m < n
        b = a.conj().T if self.transposed else a
        bm, bn = b.shape
        self.bn = bn

        self.trivial = bn == 0 or bm == 0
        if self.trivial:
            self.w = np.zeros((bm, bn), dtype=a.dtype, order="F")
            self.v = np.zeros((bn, bn), dtype=a.dtype, order="F")
            self.q = None
            self.converged = True
            self.mode = "empty"
            self.path = "empty"
            self.pairs = None
            self.pairs_per_sweep = 0
            self.counters.t_aux += time.perf_counter() - t0
            return

        use_qr = force == "qr" or (
            force is None and opts.use_qr_preprocess and bm >= QR_RATIO * bn
        )
        if use_qr:
            q, r = householder_qr(b)
            self.q = q
            self.w = r  # bn x bn, F-order fresh from the factorization
        else:
            self.q = None
            self.w = fmatrix(b)

        if force in ("unblocked", "blocked"):
            self.mode = force
        else:
            self.mode = "unblocked" if bn <= SMALL_CUTOFF else "blocked"
        self.path = ("transpose+" if self.transposed else "") + (
            "qr+" if use_qr else ""
        ) + self.mode

        self.need_v = opts.compute_right_vectors or self.transposed
        if self.need_v:
            self.v = np.eye(bn, dtype=a.dtype, order="F")
        else:
            self.v = None
        # kernels take a 0-row stand-in when V is not accumulated
        self._v_arg = self.v if self.v is not None else np.zeros(
            (0, bn), dtype=a.dtype, order="F"
        )

        self.tol = float(opts.k) * unit_roundoff(a.dtype)
        self.inner_budget = opts.inner_sweeps if opts.inner_sweeps >= 1 else INNER_BUDGET

        if self.mode == "unblocked":
            if bn >= 2:
                self.pairs, self.starts = schedule_arrays(bn)
                self.pairs_per_sweep = len(self.pairs)
            else:
                self.pairs = None
                self.pairs_per_sweep = 0
            self.blocks = None
        else:
            self.blocks = _block_ranges(bn, opts.nb)
            ell = len(self.blocks)
            if ell >= 2:
                self.pairs, self.starts = schedule_arrays(ell)
                self.pairs_per_sweep = len(self.pairs)
            else:
                self.pairs = None
                self.pairs_per_sweep = 1  # single Gram eigenproblem per sweep
        self.counters.t_aux += time.perf_counter() - t0

    # -- sweeping ---------------------------------------------------------

    def sweep(self) -> bool:
        """One outer sweep; returns True when it applied no rotation."""
        if self.trivial:
            return True
        if self.mode == "unblocked":
            quiet = self._sweep_unblocked()
        elif self.blocks is not None and len(self.blocks) == 1:
            quiet = self._sweep_single_block()
        else:
            quiet = self._sweep_blocked()
        if not self.converged:
            self.outer_sweeps += 1
            if quiet:
                self.converged = True
        return quiet

    def _sweep_unblocked(self) -> bool:
        if self.pairs is None:
            self.pair_stats = [(True, 1, 0)]
            return True
        t0 = time.perf_counter()
        kern = backend.active()
        _, rotations, quiet = kern.onesided_sweeps(
            self.w, self._v_arg, self.pairs, self.starts, self.tol, 1
        )
        self.counters.t_eig += time.perf_counter() - t0
        self.counters.eig_calls += 1
        rotations = int(rotations)
        self.inner_rotations += rotations
        self.pair_stats = [(bool(quiet), 1, rotations)]
        return rotations == 0

    def _eig_pair(self, g):
        # mdelta = P - I of the inner rotation product; keeping the identity
        # implicit preserves the small-angle corrections that a near-1
        # stored diagonal would round away (they otherwise bias the large
        # singular values upward, a few ulp per visit)
        t0 = time.perf_counter()
        d, mdelta, einfo = _eig_delta(g, self.opts.k, self.inner_budget)
        self.counters.t_eig += time.perf_counter() - t0
        self.counters.eig_calls += 1
        self.inner_rotations += einfo.rotations
        return mdelta, einfo

    def _sweep_single_block(self) -> bool:
        t0 = time.perf_counter()
        g = self.w.conj().T @ self.w
        idx = np.arange(self.bn)
        g[idx, idx] = np.real(g[idx, idx])
        self.counters.t_gram += time.perf_counter() - t0
        self.counters.gram_calls += 1

        mdelta, einfo = self._eig_pair(g)
        self.pair_stats = [(einfo.converged, einfo.sweeps_run, einfo.rotations)]
        if einfo.rotations == 0:
            return True
        t0 = time.perf_counter()
        self.w += self.w @ mdelta
        if self.v is not None:
            self.v += self.v @ mdelta
        self.counters.t_vec += time.perf_counter() - t0
        self.counters.update_calls += 1
        return False

    def _sweep_blocked(self) -> bool:
        quiet = True
        stats = []
        w = self.w
        blocks = self.blocks
        for p in range(len(self.pairs)):
            bi = int(self.pairs[p, 0])
            bj = int(self.pairs[p, 1])
            i0, i1 = blocks[bi]
            j0, j1 = blocks[bj]
            wi_v = w[:, i0:i1]
            wj_v = w[:, j0:j1]

            t0 = time.perf_counter()
            g = compute_gram(wi_v, wj_v)
            self.counters.t_gram += time.perf_counter() - t0
            self.counters.gram_calls += 1

            mdelta, einfo = self._eig_pair(g)
            stats.append((einfo.converged, einfo.sweeps_run, einfo.rotations))
            if einfo.rotations == 0:
                continue
            quiet = False
            t0 = time.perf_counter()
            if self.opts.fused_updates:
                kern = backend.active()
                kern.fused_pair_update(
                    wi_v, wj_v, mdelta, int(self.opts.row_block), True
                )
                if self.v is not None:
                    kern.fused_pair_update(
                        self.v[:, i0:i1], self.v[:, j0:j1], mdelta,
                        int(self.opts.row_block), True,
                    )
            else:
                _pair_update_twostage(wi_v, wj_v, mdelta)
                if self.v is not None:
                    _pair_update_twostage(self.v[:, i0:i1], self.v[:, j0:j1], mdelta)
            self.counters.t_vec += time.perf_counter() - t0
            self.counters.update_calls += 1
        self.pair_stats = stats
        return quiet

    # -- assembly ---------------------------------------------------------

    def finish(self) -> SvdResult:
        t0 = time.perf_counter()
        u_fac, sigma, v_fac = _finalize_factors(self.w, self.v)
        if self.q is not None:
            u_fac = np.asfortranarray(self.q @ u_fac)
        if self.transposed:
            u_out = v_fac
            v_out = u_fac if self.opts.compute_right_vectors else None
        else:
            u_out = u_fac
            v_out = v_fac if self.opts.compute_right_vectors else None
        self.counters.masked_pair_skips = self.masked_skips
        self.counters.t_aux += time.perf_counter() - t0
        info = SolveInfo(
            converged=self.converged,
            outer_sweeps=self.outer_sweeps,
            inner_rotations=self.inner_rotations,
            masked_pair_skips=self.masked_skips,
            path=self.path,
            counters=self.counters,
        )
        return SvdResult(u=u_out, sigma=sigma, v=v_out, info=info)


def _run_standalone(a, opts: JacobiOptions | None, force: str | None) -> SvdResult:
    if opts is None:
        opts = JacobiOptions()
    run = _ProblemRun(a, opts, force=force)
    while not run.converged and run.outer_sweeps < opts.max_nsweeps:
        run.sweep()
    return run.finish()


def svd_unblocked(a, opts: JacobiOptions | None = None) -> SvdResult:
    """SVD by scalar column rotations; requires m >= n (n = 0 allowed)."""
    return _run_standalone(a, opts, force="unblocked")


def svd_blocked(a, opts: JacobiOptions | None = None) -> SvdResult:
    """SVD by block-column rotations with an inner eigensolver; m >= n."""
    return _run_standalone(a, opts, force="blocked")


def svd_qr_preprocessed(a, opts: JacobiOptions | None = None) -> SvdResult:
    """QR first, Jacobi SVD on the small R factor, then U = Q @ Uhat."""
    return _run_standalone(a, opts, force="qr")


def svd_dispatch(a, opts: JacobiOptions | None = None) -> SvdResult:
    """Shape-aware entry point.

    Wide matrices are solved through their conjugate transpose (factors
    swap). Then: the QR path when enabled and the aspect ratio is at least
    3; the unblocked solver when the minimum dimension is at most 32; the
    blocked solver otherwise. The chosen route is reported in info.path.
    """
    return _run_standalone(a, opts, force=None)
