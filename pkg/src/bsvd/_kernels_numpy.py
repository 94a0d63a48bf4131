"""Pure-numpy sweep kernels (fallback backend).

Within one schedule iteration the pairs touch disjoint indices, so the guard
tests and rotation parameters of the whole iteration can be computed at once
and the rotations applied with gathered fancy indexing. Guard decisions are
identical to a sequential pass; only the rounding of updated entries differs.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"


def _params(dii, djj, gij_abs):
    """Rotation parameters from real diagonals and |off-diagonal|.

    Returns (t, s, cm1) with cm1 = cos - 1 kept as its own quantity; for
    small angles the cosine rounds to 1 and folding the t^2/2 deficit into
    the update instead avoids a systematic norm inflation per rotation.
    """
    tau = (dii - djj) / (2.0 * gij_abs)
    sgn = np.ones_like(tau)
    sgn[tau < 0] = -1
    t = sgn / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
    h = np.sqrt(1.0 + t * t)
    cm1 = -(t * t) / (h * (1.0 + h))
    return t, t / h, cm1


def eig_sweeps(g, d, m, pairs, starts, tol, max_sweeps, delta=False):
    """Round-robin two-sided Jacobi sweeps on a Hermitian matrix.

    g holds the off-diagonal entries (modified in place); d is the real
    diagonal, authoritative throughout; m accumulates the rotations. In
    delta mode m holds P - I of the rotation product P (start it at zero)
    so small-angle terms are kept at their own scale rather than rounded
    into near-1 diagonal entries. Returns (sweeps, rotations, converged).
    """
    n_iter = len(starts) - 1
    sweeps = 0
    rotations = 0
    converged = False
    while not converged and sweeps < max_sweeps:
        converged = True
        sweeps += 1
        for it in range(n_iter):
            pp = pairs[starts[it]:starts[it + 1]]
            ii = pp[:, 0]
            jj = pp[:, 1]
            gij = g[ii, jj]
            absg = np.abs(gij)
            thr = tol * np.sqrt(np.abs(d[ii]) * np.abs(d[jj]))
            act = (absg >= thr) & (absg > 0)
            if not act.any():
                continue
            converged = False
            ii = ii[act]
            jj = jj[act]
            gij = gij[act]
            absg = absg[act]
            rotations += int(ii.size)
            w = gij / absg
            t, s, cm1 = _params(d[ii], d[jj], absg)
            ws = w * s
            wsc = np.conj(ws)

            # rows i and j of every active pair, transformed on both sides
            np_act = ii.size
            rows = np.concatenate([g[ii, :], g[jj, :]], axis=0)
            ri = rows[:np_act]
            rj = rows[np_act:]
            block = np.concatenate(
                [ri + (cm1[:, None] * ri + ws[:, None] * rj),
                 rj + (cm1[:, None] * rj - wsc[:, None] * ri)], axis=0)
            bi = block[:, ii].copy()
            bj = block[:, jj].copy()
            block[:, ii] = bi + (cm1[None, :] * bi + wsc[None, :] * bj)
            block[:, jj] = bj + (cm1[None, :] * bj - ws[None, :] * bi)
            g[ii, :] = block[:np_act]
            g[jj, :] = block[np_act:]
            g[:, ii] = block[:np_act].conj().T
            g[:, jj] = block[np_act:].conj().T

            # the 2x2 pivot blocks have closed-form results
            td = t * absg
            d[ii] += td
            d[jj] -= td
            g[ii, jj] = 0
            g[jj, ii] = 0

            mi = m[:, ii].copy()
            mj = m[:, jj].copy()
            m[:, ii] = mi + (cm1[None, :] * mi + wsc[None, :] * mj)
            m[:, jj] = mj + (cm1[None, :] * mj - ws[None, :] * mi)
            if delta:
                # contribution of the implicit identity columns; within one
                # iteration the pair indices are disjoint, so no collisions
                m[ii, ii] += cm1
                m[jj, ii] += wsc
                m[ii, jj] -= ws
                m[jj, jj] += cm1
    return sweeps, rotations, converged


def onesided_sweeps(a, v, pairs, starts, tol, max_sweeps):
    """One-sided Jacobi sweeps: orthogonalize the columns of `a` in place,
    accumulating the same rotations into the columns of `v` (pass a 0-row
    `v` to skip accumulation). Returns (sweeps_run, rotations, converged)."""
    n_iter = len(starts) - 1
    sweeps = 0
    rotations = 0
    converged = False
    while not converged and sweeps < max_sweeps:
        converged = True
        sweeps += 1
        for it in range(n_iter):
            pp = pairs[starts[it]:starts[it + 1]]
            ii = pp[:, 0]
            jj = pp[:, 1]
            ai = a[:, ii]
            aj = a[:, jj]
            gii = np.einsum("ij,ij->j", ai.conj(), ai).real
            gjj = np.einsum("ij,ij->j", aj.conj(), aj).real
            gji = np.einsum("ij,ij->j", aj.conj(), ai)
            absg = np.abs(gji)
            thr = tol * np.sqrt(gii * gjj)
            act = (absg >= thr) & (absg > 0)
            if not act.any():
                continue
            converged = False
            idx = np.nonzero(act)[0]
            rotations += int(idx.size)
            ii = ii[idx]
            jj = jj[idx]
            w = np.conj(gji[idx]) / absg[idx]
            _, s, cm1 = _params(gii[idx], gjj[idx], absg[idx])
            ws = w * s
            wsc = np.conj(ws)
            ci = ai[:, idx]
            cj = aj[:, idx]
            a[:, ii] = ci + (cm1[None, :] * ci + wsc[None, :] * cj)
            a[:, jj] = cj + (cm1[None, :] * cj - ws[None, :] * ci)
            if v.shape[0]:
                vi = v[:, ii].copy()
                vj = v[:, jj].copy()
                v[:, ii] = vi + (cm1[None, :] * vi + wsc[None, :] * vj)
                v[:, jj] = vj + (cm1[None, :] * vj - ws[None, :] * vi)
    return sweeps, rotations, converged


def fused_pair_update(bi, bj, j, row_block, delta=False):
    """[bi bj] <- [bi bj] @ j, one row tile at a time.

    Per tile, both halves accumulate into one tile-sized buffer before the
    single store back; no full-height temporary exists. In delta mode j
    holds P - I and the product is added onto the stored blocks instead.
    """
    m, wi = bi.shape
    r0 = 0
    while r0 < m:
        r1 = min(r0 + row_block, m)
        tile = bi[r0:r1, :] @ j[:wi, :]
        tile += bj[r0:r1, :] @ j[wi:, :]
        if delta:
            bi[r0:r1, :] += tile[:, :wi]
            bj[r0:r1, :] += tile[:, wi:]
        else:
            bi[r0:r1, :] = tile[:, :wi]
            bj[r0:r1, :] = tile[:, wi:]
        r0 = r1
