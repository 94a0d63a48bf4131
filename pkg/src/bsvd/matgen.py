"""Deterministic test-matrix generation with prescribed singular spectra.

Five spectrum families cover the usual conditioning regimes (arithmetic
and geometric decay, clustered values, log-uniform draws) plus a plain
uniform-random family whose spectrum is data dependent. Non-random
matrices are built as A = U diag(sigma) V^H with orthonormal factors
drawn from QR of standard normal matrices, so the generated spectrum is
directly usable as an e4 reference.

Everything is reproducible: the same (m, spec, dtype) triple yields a
bit-identical matrix within one build of this package (PCG64 streams;
cross-library bit equality is not promised).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import DomainError, ShapeError, check_dtype, householder_qr, is_complex

__all__ = ["FAMILIES", "SpectrumSpec", "make_sigma", "gen_matrix", "gen_batch"]

FAMILIES = ("random", "arith", "cluster0", "cluster1", "logrand", "geo")

# independent child streams per use so sigma draws never shift the factors
_STREAM_ENTRIES = 1
_STREAM_FACTORS = 2


@dataclass(frozen=True)
class SpectrumSpec:
    family: str
    n: int
    kappa: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(
                f"unknown family {self.family!r}; expected one of {FAMILIES}"
            )
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if not self.kappa >= 1:
            raise DomainError(f"kappa must be >= 1, got {self.kappa}")
        if self.seed < 0:
            raise DomainError(f"seed must be non-negative, got {self.seed}")


def make_sigma(spec: SpectrumSpec) -> np.ndarray:
    """Prescribed singular values, descending, sigma_1 = 1, sigma_i >= 1/kappa.

    The random family has no prescription (its spectrum is data
    dependent), so asking for one is a domain error.
    """
    n = spec.n
    kappa = float(spec.kappa)
    if spec.family == "random":
        raise DomainError("the random family has no prescribed spectrum")
    if spec.family in ("arith", "geo") and n < 2:
        raise DomainError(f"{spec.family} needs n >= 2, got n={n}")

    if spec.family == "arith":
        i = np.arange(n, dtype=np.float64)
        sigma = 1.0 - (i / (n - 1)) * (1.0 - 1.0 / kappa)
    elif spec.family == "geo":
        i = np.arange(n, dtype=np.float64)
        sigma = kappa ** (-i / (n - 1))
    elif spec.family == "cluster0":
        sigma = np.full(n, 1.0 / kappa)
        sigma[0] = 1.0
    elif spec.family == "cluster1":
        sigma = np.ones(n)
        sigma[-1] = 1.0 / kappa
    else:  # logrand; sigma_1 pinned at 1 so the spectrum invariant holds
        rng = np.random.default_rng(spec.seed)
        sigma = np.empty(n)
        sigma[0] = 1.0
        if n > 1:
            sigma[1:] = np.exp(rng.uniform(np.log(1.0 / kappa), 0.0, size=n - 1))
        sigma[::-1].sort()
    return sigma


def _random_orthonormal(rng: np.random.Generator, m: int, n: int, complex_: bool):
    if complex_:
        z = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    else:
        z = rng.standard_normal((m, n))
    q, _ = householder_qr(np.asfortranarray(z))
    return q


def gen_matrix(m: int, spec: SpectrumSpec, dtype=np.float64) -> np.ndarray:
    """An m-by-spec.n matrix realizing the prescribed spectrum.

    random family: i.i.d. uniform [0,1] entries (real and imaginary parts
    separately for complex dtypes). Other families: A = U diag(sigma) V^H
    with U, V orthonormal factors from QR of standard normals, assembled
    in double precision and cast to the requested dtype last.
    """
    dt = check_dtype(dtype)
    n = spec.n
    if m < n:
        raise ShapeError(f"m must be >= n, got m={m}, n={n}")
    cplx = is_complex(dt)

    if spec.family == "random":
        rng = np.random.default_rng([spec.seed, _STREAM_ENTRIES])
        a = rng.random((m, n))
        if cplx:
            a = a + 1j * rng.random((m, n))
        return np.asfortranarray(a.astype(dt))

    sigma = make_sigma(spec)
    rng = np.random.default_rng([spec.seed, _STREAM_FACTORS])
    u = _random_orthonormal(rng, m, n, cplx)
    v = _random_orthonormal(rng, n, n, cplx)
    a = (u * sigma) @ v.conj().T
    return np.asfortranarray(a.astype(dt))


def gen_batch(m: int, spec: SpectrumSpec, count: int, dtype=np.float64):
    """count matrices from consecutive seeds spec.seed, spec.seed+1, ..."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    return [
        gen_matrix(m, replace(spec, seed=spec.seed + i), dtype=dtype)
        for i in range(count)
    ]
