"""Numba-compiled sweep kernels (default backend).

Sequential rotation loops; each kernel specializes per element type on first
call and is cached on disk. Rotation parameters are computed in float64
scalars regardless of the element precision; stores round to the element
type, matching the closed-form update used for the pivot block.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True)
def eig_sweeps(g, d, m, pairs, starts, tol, max_sweeps, delta=False):
    # delta mode: m accumulates P - I of the rotation product P (start m at
    # zero). Small-angle terms then land at their own scale instead of being
    # absorbed into near-1 diagonal entries and rounded away.
    n = g.shape[0]
    n_iter = starts.shape[0] - 1
    mrows = m.shape[0]
    sweeps = 0
    rotations = 0
    converged = False
    while not converged and sweeps < max_sweeps:
        converged = True
        sweeps += 1
        for it in range(n_iter):
            for p in range(starts[it], starts[it + 1]):
                i = pairs[p, 0]
                j = pairs[p, 1]
                gij = g[i, j]
                absg = abs(gij)
                if absg <= 0.0:
                    continue
                if absg < tol * np.sqrt(abs(d[i]) * abs(d[j])):
                    continue
                converged = False
                rotations += 1
                w = gij / absg
                tau = (d[i] - d[j]) / (2.0 * absg)
                sgn = 1.0 if tau >= 0.0 else -1.0
                t = sgn / (abs(tau) + np.sqrt(1.0 + tau * tau))
                h = np.sqrt(1.0 + t * t)
                s = t / h
                # c - 1 carried separately: for small t the cosine rounds
                # to 1 and the lost t^2/2 shrink would inflate norms a bit
                # on every rotation, biasing the large singular values
                cm1 = -(t * t) / (h * (1.0 + h))
                ws = w * s
                wsc = np.conj(w) * s
                for q in range(n):
                    if q == i or q == j:
                        continue
                    riq = g[i, q]
                    rjq = g[j, q]
                    niq = riq + (cm1 * riq + ws * rjq)
                    njq = rjq + (cm1 * rjq - wsc * riq)
                    g[i, q] = niq
                    g[j, q] = njq
                    g[q, i] = np.conj(niq)
                    g[q, j] = np.conj(njq)
                g[i, j] = 0
                g[j, i] = 0
                td = t * absg
                d[i] = d[i] + td
                d[j] = d[j] - td
                for r in range(mrows):
                    vi = m[r, i]
                    vj = m[r, j]
                    m[r, i] = vi + (cm1 * vi + wsc * vj)
                    m[r, j] = vj + (cm1 * vj - ws * vi)
                if delta:
                    # contribution of the implicit identity columns
                    m[i, i] = m[i, i] + cm1
                    m[j, i] = m[j, i] + wsc
                    m[i, j] = m[i, j] - ws
                    m[j, j] = m[j, j] + cm1
    return sweeps, rotations, converged


@njit(cache=True)
def onesided_sweeps(a, v, pairs, starts, tol, max_sweeps):
    mrows = a.shape[0]
    vrows = v.shape[0]
    n_iter = starts.shape[0] - 1
    sweeps = 0
    rotations = 0
    converged = False
    while not converged and sweeps < max_sweeps:
        converged = True
        sweeps += 1
        for it in range(n_iter):
            for p in range(starts[it], starts[it + 1]):
                i = pairs[p, 0]
                j = pairs[p, 1]
                gii = 0.0
                gjj = 0.0
                gji = a[0, i] - a[0, i]
                for r in range(mrows):
                    ai = a[r, i]
                    aj = a[r, j]
                    ti = abs(ai)
                    tj = abs(aj)
                    gii += ti * ti
                    gjj += tj * tj
                    gji += np.conj(aj) * ai
                absg = abs(gji)
                if absg <= 0.0:
                    continue
                if absg < tol * np.sqrt(gii * gjj):
                    continue
                converged = False
                rotations += 1
                w = np.conj(gji) / absg
                tau = (gii - gjj) / (2.0 * absg)
                sgn = 1.0 if tau >= 0.0 else -1.0
                t = sgn / (abs(tau) + np.sqrt(1.0 + tau * tau))
                h = np.sqrt(1.0 + t * t)
                s = t / h
                # see eig_sweeps: keep the second-order cosine deficit
                cm1 = -(t * t) / (h * (1.0 + h))
                ws = w * s
                wsc = np.conj(w) * s
                for r in range(mrows):
                    ai = a[r, i]
                    aj = a[r, j]
                    a[r, i] = ai + (cm1 * ai + wsc * aj)
                    a[r, j] = aj + (cm1 * aj - ws * ai)
                for r in range(vrows):
                    vi = v[r, i]
                    vj = v[r, j]
                    v[r, i] = vi + (cm1 * vi + wsc * vj)
                    v[r, j] = vj + (cm1 * vj - ws * vi)
    return sweeps, rotations, converged


@njit(cache=True)
def fused_pair_update(bi, bj, j, row_block, delta=False):
    # delta mode: j holds P - I and the update is [bi bj] += [bi bj] @ j,
    # so the correction rounds once against each stored element
    m, wi = bi.shape
    wj = bj.shape[1]
    wt = wi + wj
    acc = np.empty((row_block, wt), dtype=bi.dtype)
    buf = np.empty(wt, dtype=bi.dtype)
    r0 = 0
    while r0 < m:
        h = min(row_block, m - r0)
        for rr in range(h):
            r = r0 + rr
            # each tile element is loaded once into the row buffer
            for kk in range(wi):
                buf[kk] = bi[r, kk]
            for kk in range(wj):
                buf[wi + kk] = bj[r, kk]
            for q in range(wt):
                z = buf[0] * j[0, q]
                for kk in range(1, wt):
                    z += buf[kk] * j[kk, q]
                if delta:
                    acc[rr, q] = buf[q] + z
                else:
                    acc[rr, q] = z
        # single store per element after both halves accumulated
        for rr in range(h):
            r = r0 + rr
            for q in range(wi):
                bi[r, q] = acc[rr, q]
            for q in range(wj):
                bj[r, q] = acc[rr, wi + q]
        r0 += h
