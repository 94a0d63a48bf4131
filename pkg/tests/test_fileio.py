"""Binary container round-trips and corruption handling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import bsvd
from bsvd import (
    DomainError,
    FormatError,
    JacobiOptions,
    batch_svd,
    read_matrices,
    read_results,
    write_matrices,
    write_results,
)

from conftest import ALL_DTYPES, random_matrix


class TestMatrixRoundTrip:
    @pytest.mark.parametrize("dt", ALL_DTYPES)
    def test_bit_exact(self, tmp_path, dt):
        path = tmp_path / "batch.bin"
        mats = [random_matrix(5, 3, dt, seed=i) for i in range(4)]
        write_matrices(path, mats)
        back = read_matrices(path)
        assert len(back) == 4
        for a, b in zip(mats, back):
            assert b.dtype == a.dtype
            assert b.flags.f_contiguous
            assert a.tobytes(order="F") == b.tobytes(order="F")

    def test_varied_shapes(self, tmp_path):
        path = tmp_path / "mixed.bin"
        mats = [random_matrix(1, 1, seed=1), random_matrix(7, 2, seed=2),
                random_matrix(3, 6, seed=3)]
        write_matrices(path, mats)
        back = read_matrices(path)
        assert [b.shape for b in back] == [(1, 1), (7, 2), (3, 6)]
        for a, b in zip(mats, back):
            assert np.array_equal(a, b)

    def test_mixed_dtypes_rejected(self, tmp_path):
        mats = [random_matrix(2, 2, np.float32), random_matrix(2, 2, np.float64)]
        with pytest.raises(DomainError):
            write_matrices(tmp_path / "x.bin", mats)

    def test_empty_batch_round_trips(self, tmp_path):
        path = tmp_path / "empty.bin"
        write_matrices(path, [])
        assert read_matrices(path) == []


class TestCorruption:
    def write_one(self, tmp_path):
        path = tmp_path / "one.bin"
        write_matrices(path, [random_matrix(4, 4, seed=9)])
        return path

    def test_bad_magic(self, tmp_path):
        path = self.write_one(tmp_path)
        raw = bytearray(path.read_bytes())
        raw[0] ^= 0xFF
        path.write_bytes(bytes(raw))
        with pytest.raises(FormatError):
            read_matrices(path)

    def test_truncated_payload(self, tmp_path):
        path = self.write_one(tmp_path)
        raw = path.read_bytes()
        path.write_bytes(raw[: len(raw) - 7])
        with pytest.raises(FormatError):
            read_matrices(path)

    def test_trailing_garbage(self, tmp_path):
        path = self.write_one(tmp_path)
        path.write_bytes(path.read_bytes() + b"xx")
        with pytest.raises(FormatError):
            read_matrices(path)

    def test_unknown_version(self, tmp_path):
        path = self.write_one(tmp_path)
        raw = bytearray(path.read_bytes())
        raw[4] = 99  # version byte
        path.write_bytes(bytes(raw))
        with pytest.raises(FormatError):
            read_matrices(path)


class TestResultsRoundTrip:
    @pytest.mark.parametrize("dt", [np.float64, np.complex64])
    def test_solve_and_reload(self, tmp_path, dt):
        path = tmp_path / "results.bin"
        mats = [random_matrix(8, 5, dt, seed=i + 20) for i in range(3)]
        results = batch_svd(mats, JacobiOptions())
        write_results(path, mats, results)
        recs = read_results(path)
        assert len(recs) == 3
        for res, rec in zip(results, recs):
            assert not rec.failed
            assert rec.converged == res.info.converged
            assert np.array_equal(rec.u, res.u)
            assert np.array_equal(rec.sigma, res.sigma)
            assert np.array_equal(rec.v, res.v)

    def test_failed_slot_preserved(self, tmp_path):
        path = tmp_path / "failed.bin"
        mats = [random_matrix(4, 4, seed=30)]
        write_results(path, mats, [None])
        recs = read_results(path)
        assert recs[0].failed
        assert recs[0].m == 4 and recs[0].n == 4
        assert recs[0].u is None

    def test_no_right_vectors_flagged(self, tmp_path):
        path = tmp_path / "nov.bin"
        mats = [random_matrix(6, 4, seed=31)]
        results = batch_svd(mats, JacobiOptions(compute_right_vectors=False))
        write_results(path, mats, results)
        rec = read_results(path)[0]
        assert rec.v is None
        assert np.array_equal(rec.u, results[0].u)


@settings(max_examples=25, deadline=None)
@given(
    count=st.integers(1, 6),
    m=st.integers(1, 12),
    n=st.integers(1, 12),
    dtype_idx=st.integers(0, 3),
    seed=st.integers(0, 2**16),
)
def test_property_round_trip(tmp_path_factory, count, m, n, dtype_idx, seed):
    dt = ALL_DTYPES[dtype_idx]
    path = tmp_path_factory.mktemp("rt") / "batch.bin"
    mats = [random_matrix(m, n, dt, seed=seed + i) for i in range(count)]
    write_matrices(path, mats)
    back = read_matrices(path)
    for a, b in zip(mats, back):
        assert a.tobytes(order="F") == b.tobytes(order="F")
        assert a.dtype == b.dtype and a.shape == b.shape
