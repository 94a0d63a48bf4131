"""Batch driver: many independent SVD problems under shared options.

Problems advance in lockstep, one outer sweep per round. After every
round a convergence scan marks problems whose latest sweep applied zero
rotations; with ``opts.masking`` enabled those problems stop receiving
Gram/eig/update work entirely (the skipped work is tallied in
``masked_pair_skips``), while without masking they keep running no-op
sweeps until the whole batch is done. Either way the factors come out
identical, because a zero-rotation sweep never writes to the working copy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import DomainError
from .svd import JacobiOptions, SvdResult, WorkCounters, _ProblemRun

__all__ = ["BatchState", "batch_svd", "convergence_scan"]


@dataclass
class BatchState:
    """Observable batch telemetry.

    ``active[i]`` is True until problem i is masked off by the scan;
    ``pair_stats[i]`` holds the latest sweep's per-pair eigensolver
    telemetry as (converged, sweeps_run, rotations_applied) triples, or
    None before the first sweep. Problems that raise are recorded in
    ``errors`` by index and produce a None result; the batch itself never
    aborts.
    """

    active: np.ndarray
    outer_sweeps: np.ndarray
    pair_stats: list
    counters: WorkCounters = field(default_factory=WorkCounters)
    errors: dict = field(default_factory=dict)

    @classmethod
    def for_batch(cls, n_problems: int) -> "BatchState":
        return cls(
            active=np.ones(n_problems, dtype=bool),
            outer_sweeps=np.zeros(n_problems, dtype=np.int64),
            pair_stats=[None] * n_problems,
        )

    def _reset(self, n_problems: int) -> None:
        self.active = np.ones(n_problems, dtype=bool)
        self.outer_sweeps = np.zeros(n_problems, dtype=np.int64)
        self.pair_stats = [None] * n_problems
        self.counters = WorkCounters()
        self.errors = {}

    @property
    def n_problems(self) -> int:
        return len(self.pair_stats)


def convergence_scan(state: BatchState) -> bool:
    """Mask off problems whose latest sweep applied no rotation.

    Returns True when every problem is masked off (or failed), i.e. the
    batch is done.
    """
    all_done = True
    for i in range(state.n_problems):
        if i in state.errors:
            continue
        if not state.active[i]:
            continue
        stats = state.pair_stats[i]
        if stats is None:
            all_done = False
            continue
        if all(rot == 0 for (_, _, rot) in stats):
            state.active[i] = False
        else:
            all_done = False
    return all_done


def batch_svd(
    problems,
    opts: JacobiOptions | None = None,
    state: BatchState | None = None,
) -> list[SvdResult | None]:
    """Solve every problem in the batch; results align with the input order.

    A problem that raises yields None in its slot with the exception kept
    in ``state.errors``. Pass a ``state`` to read counters and masks after
    the call; it is reinitialized for this batch.
    """
    if opts is None:
        opts = JacobiOptions()
    problems = list(problems)
    if not problems:
        raise DomainError("batch must contain at least one problem")

    st = state if state is not None else BatchState.for_batch(len(problems))
    st._reset(len(problems))

    runs: list[_ProblemRun | None] = []
    for idx, a in enumerate(problems):
        try:
            runs.append(_ProblemRun(a, opts))
        except Exception as exc:
            runs.append(None)
            st.errors[idx] = exc

    for _round in range(opts.max_nsweeps):
        ran_any = False
        for i, run in enumerate(runs):
            if run is None:
                continue
            if not st.active[i]:
                if opts.masking:
                    run.masked_skips += run.pairs_per_sweep
                else:
                    # unmasked mode: converged problems still burn full
                    # sweeps (all no-ops) until the batch finishes
                    try:
                        run.sweep()
                    except Exception as exc:
                        st.errors[i] = exc
                        runs[i] = None
                continue
            try:
                run.sweep()
            except Exception as exc:
                st.errors[i] = exc
                runs[i] = None
                continue
            ran_any = True
            st.pair_stats[i] = run.pair_stats
            st.outer_sweeps[i] = run.outer_sweeps
        if not ran_any:
            break
        if convergence_scan(st):
            break

    results: list[SvdResult | None] = []
    for i, run in enumerate(runs):
        if run is None:
            results.append(None)
            continue
        try:
            res = run.finish()
        except Exception as exc:
            st.errors[i] = exc
            results.append(None)
            continue
        st.counters.add(run.counters)
        results.append(res)
    return results
