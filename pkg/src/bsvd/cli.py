"""Command-line harness: gen / solve / verify / bench.

gen writes deterministic matrix batches to a container file, solve runs
the batch solver over such a file, verify computes the e1-e4 metrics
against thresholds (exit 0 only when everything passes), and bench
compares the design variants (and optionally kernel backends) with
stage-level timing breakdowns, all as CSV.
"""

from __future__ import annotations

import argparse
import csv
import statistics
import sys
from dataclasses import replace

import numpy as np

from . import backend
from .batch import BatchState, batch_svd
from .core import DomainError, ShapeError, unit_roundoff
from .fileio import (
    FormatError,
    read_matrices,
    read_results,
    write_matrices,
    write_results,
)
from .matgen import FAMILIES, SpectrumSpec, gen_batch, make_sigma
from .svd import JacobiOptions, SolveInfo, SvdResult
from .verify import error_report, oracle_svd, threshold

__all__ = ["main", "design_options", "DESIGNS"]

DESIGNS = ("baseline", "design2", "design3", "design4")

_DTYPE_LETTERS = {
    "s": np.dtype(np.float32),
    "d": np.dtype(np.float64),
    "c": np.dtype(np.complex64),
    "z": np.dtype(np.complex128),
}


def design_options(name: str, base: JacobiOptions | None = None) -> JacobiOptions:
    """Map a design name onto solver options (cumulative variants)."""
    if base is None:
        base = JacobiOptions()
    if name == "baseline":
        return replace(base, inner_sweeps=0, fused_updates=False, masking=False)
    if name == "design2":
        return replace(base, inner_sweeps=1, fused_updates=False, masking=False)
    if name == "design3":
        return replace(base, inner_sweeps=1, fused_updates=True, masking=False)
    if name == "design4":
        return replace(base, inner_sweeps=1, fused_updates=True, masking=True)
    raise DomainError(f"unknown design {name!r}; expected one of {DESIGNS}")


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nb", type=int, default=16, help="block width")
    p.add_argument("--k", type=float, default=30.0, help="tolerance multiplier")
    p.add_argument("--max-sweeps", type=int, default=30, help="outer sweep budget")
    p.add_argument("--inner-sweeps", type=int, default=1,
                   help="inner eigensolver sweeps per pair (0 = to convergence)")
    p.add_argument("--design", choices=DESIGNS, default=None,
                   help="design variant; overrides inner-sweeps/fusion/masking")
    p.add_argument("--qr", action="store_true", help="enable QR preprocessing")
    p.add_argument("--no-right-vectors", action="store_true",
                   help="skip accumulating V")


def _add_gen_flags(p: argparse.ArgumentParser, for_gen: bool) -> None:
    p.add_argument("--family", choices=FAMILIES + (("mixed",) if not for_gen else ()),
                   required=for_gen, default=None if for_gen else "random")
    p.add_argument("--n", type=_int_list if not for_gen else int,
                   required=for_gen, default=None if for_gen else [64])
    p.add_argument("--m", type=int, default=None, help="rows (default: n)")
    p.add_argument("--kappa", type=float, default=1e5)
    p.add_argument("--batch", type=int, default=1 if for_gen else 8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dtype", choices=sorted(_DTYPE_LETTERS), default="d",
                   help="s=float32 d=float64 c=complex64 z=complex128")


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok]


def _opts_from_args(args) -> JacobiOptions:
    opts = JacobiOptions(
        k=args.k,
        max_nsweeps=args.max_sweeps,
        nb=args.nb,
        inner_sweeps=args.inner_sweeps,
        use_qr_preprocess=args.qr,
        compute_right_vectors=not args.no_right_vectors,
    )
    if args.design is not None:
        opts = design_options(args.design, opts)
    return opts


def _emit_csv(rows: list[dict], out_path: str | None) -> None:
    if not rows:
        return
    fields = list(rows[0].keys())
    if out_path:
        with open(out_path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=fields)
            w.writeheader()
            w.writerows(rows)
    else:
        w = csv.DictWriter(sys.stdout, fieldnames=fields)
        w.writeheader()
        w.writerows(rows)


def cmd_gen(args) -> int:
    if args.out is None:
        raise DomainError("gen requires --out")
    dtype = _DTYPE_LETTERS[args.dtype]
    m = args.m if args.m is not None else args.n
    spec = SpectrumSpec(family=args.family, n=args.n, kappa=args.kappa,
                        seed=args.seed)
    mats = gen_batch(m, spec, args.batch, dtype=dtype)
    write_matrices(args.out, mats)
    print(f"wrote {args.batch} {args.family} {m}x{args.n} "
          f"dtype={dtype.name} matrices to {args.out}")
    return 0


def _summarize_solve(results, state: BatchState) -> str:
    done = [r for r in results if r is not None]
    conv = sum(1 for r in done if r.info.converged)
    sweeps = [r.info.outer_sweeps for r in done]
    parts = [
        f"problems={len(results)}",
        f"converged={conv}",
        f"failed={len(state.errors)}",
    ]
    if sweeps:
        parts.append(f"sweeps(min/max)={min(sweeps)}/{max(sweeps)}")
    parts.append(f"masked_pair_skips={state.counters.masked_pair_skips}")
    parts.append(f"eig_calls={state.counters.eig_calls}")
    return " ".join(parts)


def cmd_solve(args) -> int:
    if args.input is None:
        raise DomainError("solve requires --in")
    mats = read_matrices(args.input)
    if not mats:
        raise DomainError("input file holds an empty batch")
    opts = _opts_from_args(args)
    state = BatchState.for_batch(len(mats))
    results = batch_svd(mats, opts, state)
    if args.out:
        write_results(args.out, mats, results)
    print(_summarize_solve(results, state))
    for idx, res in enumerate(results):
        if res is None:
            print(f"problem {idx}: failed: {state.errors[idx]}", file=sys.stderr)
        elif not res.info.converged:
            print(f"problem {idx}: did not converge in "
                  f"{res.info.outer_sweeps} sweeps", file=sys.stderr)
    return 0


def _results_as_svd(recs) -> list[SvdResult | None]:
    out = []
    for rec in recs:
        if rec.failed:
            out.append(None)
            continue
        info = SolveInfo(converged=rec.converged, outer_sweeps=0,
                         inner_rotations=0, masked_pair_skips=0, path="file")
        out.append(SvdResult(u=rec.u, sigma=rec.sigma, v=rec.v, info=info))
    return out


def cmd_verify(args) -> int:
    if args.input is None:
        raise DomainError("verify requires --in")
    mats = read_matrices(args.input)
    if not mats:
        raise DomainError("cannot verify an empty batch")
    dtype = mats[0].dtype
    if args.results:
        results = _results_as_svd(read_results(args.results))
        errors = {}
    else:
        opts = _opts_from_args(args)
        state = BatchState.for_batch(len(mats))
        results = batch_svd(mats, opts, state)
        errors = state.errors

    family = args.family
    kappa = args.kappa
    use_prescribed = family is not None and family not in ("random", "mixed")
    if not use_prescribed:
        print("verify: no prescribed spectrum for this batch; "
              "e4 references come from the oracle (slow path)", file=sys.stderr)

    u = unit_roundoff(dtype)
    thr = args.k * u
    is_double = dtype in (np.dtype(np.float64), np.dtype(np.complex128))
    e3_thr = max(thr, 100.0 * u) if (is_double and family in ("logrand", "geo")) else thr

    reports = []
    for idx, (a, res) in enumerate(zip(mats, results)):
        if res is None:
            continue
        m, n = a.shape
        if use_prescribed:
            spec = SpectrumSpec(family=family, n=n, kappa=kappa,
                                seed=args.seed + idx)
            sigma_ref = make_sigma(spec)
        else:
            sigma_ref = oracle_svd(a)
        reports.append(error_report(a, res, sigma_ref=sigma_ref, k=args.k,
                                    e3_threshold=e3_thr, family=family,
                                    batch_index=idx))

    all_pass = bool(reports) and all(r.all_pass for r in reports) and not errors
    ms = sorted({a.shape[0] for a in mats})
    ns = sorted({a.shape[1] for a in mats})
    row = {
        "family": family or "unknown",
        "dtype": dtype.name,
        "m": ms[0] if len(ms) == 1 else "mixed",
        "n": ns[0] if len(ns) == 1 else "mixed",
        "batch": len(mats),
        "e1_max": f"{max(r.e1 for r in reports):.4e}" if reports else "",
        "e2_max": f"{max(r.e2 for r in reports):.4e}" if reports else "",
        "e3_max": f"{max(r.e3 for r in reports):.4e}" if reports else "",
        "e4_max": f"{max(r.e4 for r in reports):.4e}" if reports else "",
        "threshold": f"{thr:.4e}",
        "e3_threshold": f"{e3_thr:.4e}",
        "pass": int(all_pass),
    }
    _emit_csv([row], args.out)
    for idx in sorted(errors):
        print(f"problem {idx}: failed: {errors[idx]}", file=sys.stderr)
    return 0 if all_pass else 1


def _bench_problems(family, n, m, batch, kappa, seed, dtype):
    m = m if m is not None else n
    if family == "mixed":
        # alternate instantly-converged diagonal problems with random ones
        probs = []
        diag_sigma = make_sigma(SpectrumSpec("arith", n, kappa, seed))
        for i in range(batch):
            if i % 2 == 0:
                probs.append(np.asfortranarray(np.diag(diag_sigma).astype(dtype)))
            else:
                probs.append(
                    gen_batch(m, SpectrumSpec("random", n, 1.0, seed + i), 1,
                              dtype=dtype)[0]
                )
        return probs
    spec = SpectrumSpec(family, n, kappa if family != "random" else 1.0, seed)
    return gen_batch(m, spec, batch, dtype=dtype)


def cmd_bench(args) -> int:
    designs = [d.strip() for d in args.designs.split(",") if d.strip()]
    for d in designs:
        if d not in DESIGNS:
            raise DomainError(f"unknown design {d!r}; expected one of {DESIGNS}")
    backends = [b.strip() for b in args.backends.split(",")] if args.backends \
        else [backend.active().name]
    dtype = _DTYPE_LETTERS[args.dtype]
    if args.serial:
        try:  # keep any threaded layers pinned while timing
            import numba

            numba.set_num_threads(1)
        except Exception:
            pass

    rows = []
    for n in args.n:
        problems = _bench_problems(args.family, n, args.m, args.batch,
                                   args.kappa, args.seed, dtype)
        for bname in backends:
            with backend.use(bname):
                for dname in designs:
                    opts = design_options(dname, _opts_from_args(args))
                    state = BatchState.for_batch(len(problems))
                    batch_svd(problems, opts, state)  # warmup (jit, caches)
                    samples = []
                    for _ in range(args.reps):
                        state = BatchState.for_batch(len(problems))
                        batch_svd(problems, opts, state)
                        c = state.counters
                        samples.append((c.t_aux, c.t_gram, c.t_eig, c.t_vec,
                                        c.total_seconds()))
                    med = [statistics.median(s[i] for s in samples)
                           for i in range(5)]
                    c = state.counters
                    rows.append({
                        "design": dname,
                        "backend": bname,
                        "family": args.family,
                        "dtype": dtype.name,
                        "m": args.m if args.m is not None else n,
                        "n": n,
                        "batch": args.batch,
                        "reps": args.reps,
                        "t_aux": f"{med[0]:.6f}",
                        "t_gram": f"{med[1]:.6f}",
                        "t_eig": f"{med[2]:.6f}",
                        "t_vec": f"{med[3]:.6f}",
                        "t_total": f"{med[4]:.6f}",
                        "gram_calls": c.gram_calls,
                        "eig_calls": c.eig_calls,
                        "update_calls": c.update_calls,
                        "masked_pair_skips": c.masked_pair_skips,
                    })
    _emit_csv(rows, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bsvd",
        description="Batched one-sided block Jacobi SVD: generate, solve, "
                    "verify, benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a deterministic matrix batch")
    _add_gen_flags(p_gen, for_gen=True)
    p_gen.add_argument("--out", required=True, help="output container path")
    p_gen.set_defaults(func=cmd_gen)

    p_solve = sub.add_parser("solve", help="solve a batch from a container file")
    p_solve.add_argument("--in", dest="input", required=True)
    p_solve.add_argument("--out", default=None, help="results container path")
    _add_solver_flags(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="check e1-e4 against thresholds")
    p_verify.add_argument("--in", dest="input", required=True)
    p_verify.add_argument("--results", default=None,
                          help="verify a solved results file instead of "
                               "solving in place")
    p_verify.add_argument("--out", default=None, help="CSV path (default stdout)")
    p_verify.add_argument("--family", choices=FAMILIES, default=None,
                          help="spectrum family used to generate the batch "
                               "(enables prescribed e4 references)")
    p_verify.add_argument("--kappa", type=float, default=1e5)
    p_verify.add_argument("--seed", type=int, default=0)
    _add_solver_flags(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_bench = sub.add_parser("bench", help="time design variants, CSV out")
    _add_gen_flags(p_bench, for_gen=False)
    p_bench.add_argument("--designs", default=",".join(DESIGNS),
                         help="comma-separated design list")
    p_bench.add_argument("--backends", default=None,
                         help="comma-separated kernel backends to compare "
                              "(numba,numpy)")
    p_bench.add_argument("--reps", type=int, default=10)
    p_bench.add_argument("--serial", action="store_true",
                         help="pin threaded layers to one thread")
    p_bench.add_argument("--out", default=None, help="CSV path (default stdout)")
    _add_solver_flags(p_bench)
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ShapeError, FormatError, ValueError, RuntimeError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
