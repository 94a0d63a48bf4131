"""Round-robin (tournament) parallel ordering for Jacobi sweeps.

One sweep visits every unordered index pair exactly once, grouped into
iterations of mutually disjoint pairs. Even ell gives ell-1 iterations of
ell/2 pairs; odd ell is handled by a phantom index whose pairs are dropped,
giving ell iterations of floor(ell/2) pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import DomainError


@dataclass(frozen=True)
class Schedule:
    ell: int
    iterations: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def n_iterations(self) -> int:
        return len(self.iterations)

    def all_pairs(self) -> list[tuple[int, int]]:
        return [p for it in self.iterations for p in it]


def round_robin_schedule(ell: int) -> Schedule:
    """Tournament schedule on indices 0..ell-1.

    Index 0 is held fixed while the remaining indices rotate one position
    between iterations. Deterministic: same ell, same schedule.
    """
    if ell < 2:
        raise DomainError(f"need at least 2 indices to pair, got ell={ell}")
    size = ell if ell % 2 == 0 else ell + 1
    half = size // 2
    top = list(range(0, size, 2))
    bot = list(range(1, size, 2))
    iterations = []
    for _ in range(size - 1):
        pairs = []
        for t, b in zip(top, bot):
            i, j = (t, b) if t < b else (b, t)
            if j < ell:  # drop pairs that touch the phantom index
                pairs.append((i, j))
        iterations.append(tuple(pairs))
        if half > 1:
            # rotate every slot except top[0]
            top, bot = [top[0], bot[0]] + top[1:-1], bot[1:] + [top[-1]]
    return Schedule(ell=ell, iterations=tuple(iterations))


@lru_cache(maxsize=256)
def schedule_arrays(ell: int) -> tuple[np.ndarray, np.ndarray]:
    """Schedule flattened for the sweep kernels.

    Returns (pairs, starts): pairs is (P, 2) int64 with i < j; iteration t
    spans pairs[starts[t]:starts[t+1]].
    """
    sched = round_robin_schedule(ell)
    flat = []
    starts = [0]
    for it in sched.iterations:
        flat.extend(it)
        starts.append(len(flat))
    pairs = np.array(flat, dtype=np.int64).reshape(len(flat), 2)
    starts_arr = np.array(starts, dtype=np.int64)
    pairs.setflags(write=False)
    starts_arr.setflags(write=False)
    return pairs, starts_arr
