"""Batched SVD of many small dense matrices by one-sided block Jacobi.

The solver orthogonalizes block columns with rotations obtained from
small Hermitian eigenproblems, visiting block pairs in a round-robin
parallel ordering. Accuracy/verification tooling (metrics e1-e4, a
self-checking oracle, spectrum-prescribed test matrices) and a CLI
harness (gen/solve/verify/bench) are included.

Hot kernels are numba-compiled by default with a pure-numpy fallback;
set BSVD_BACKEND=numpy|numba|auto to pick explicitly, or switch at
runtime through bsvd.backend.
"""

from .backend import Backend, active, select, use
from .batch import BatchState, batch_svd, convergence_scan
from .core import (
    SUPPORTED_DTYPES,
    DomainError,
    ShapeError,
    check_dtype,
    conj_dot,
    fmatrix,
    frobenius_norm,
    gemm,
    householder_qr,
    is_complex,
    off_norm,
    one_norm,
    real_dtype,
    unit_roundoff,
)
from .eig import EigInfo, Rotation, compute_rotation, jacobi_hermitian_eig
from .fileio import (
    DTYPE_CODES,
    FormatError,
    ResultRecord,
    read_matrices,
    read_results,
    write_matrices,
    write_results,
)
from .matgen import FAMILIES, SpectrumSpec, gen_batch, gen_matrix, make_sigma
from .ordering import Schedule, round_robin_schedule, schedule_arrays
from .svd import (
    JacobiOptions,
    SolveInfo,
    SvdResult,
    WorkCounters,
    compute_gram,
    finalize,
    fused_pair_update,
    svd_blocked,
    svd_dispatch,
    svd_qr_preprocessed,
    svd_unblocked,
)
from .verify import (
    ErrorReport,
    OracleError,
    error_report,
    oracle_svd,
    orthogonality_e2_e3,
    residual_e1,
    sigma_error_e4,
    threshold,
)

__version__ = "0.1.0"

__all__ = [
    "Backend",
    "BatchState",
    "DomainError",
    "DTYPE_CODES",
    "EigInfo",
    "ErrorReport",
    "FAMILIES",
    "FormatError",
    "JacobiOptions",
    "OracleError",
    "ResultRecord",
    "Rotation",
    "Schedule",
    "ShapeError",
    "SolveInfo",
    "SpectrumSpec",
    "SUPPORTED_DTYPES",
    "SvdResult",
    "WorkCounters",
    "active",
    "batch_svd",
    "check_dtype",
    "compute_gram",
    "compute_rotation",
    "conj_dot",
    "convergence_scan",
    "error_report",
    "finalize",
    "fmatrix",
    "frobenius_norm",
    "fused_pair_update",
    "gemm",
    "gen_batch",
    "gen_matrix",
    "householder_qr",
    "is_complex",
    "jacobi_hermitian_eig",
    "make_sigma",
    "off_norm",
    "one_norm",
    "oracle_svd",
    "orthogonality_e2_e3",
    "read_matrices",
    "read_results",
    "real_dtype",
    "residual_e1",
    "round_robin_schedule",
    "schedule_arrays",
    "select",
    "sigma_error_e4",
    "svd_blocked",
    "svd_dispatch",
    "svd_qr_preprocessed",
    "svd_unblocked",
    "threshold",
    "unit_roundoff",
    "use",
    "write_matrices",
    "write_results",
    "__version__",
]
