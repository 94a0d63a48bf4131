"""Deterministic test-matrix generation with prescribed spectra."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsvd import (
    FAMILIES,
    DomainError,
    ShapeError,
    SpectrumSpec,
    gen_batch,
    gen_matrix,
    make_sigma,
    oracle_svd,
)

from conftest import ALL_DTYPES


class TestMakeSigma:
    def test_arith_known_values(self):
        s = make_sigma(SpectrumSpec("arith", 3, 10.0))
        assert np.allclose(s, [1.0, 0.55, 0.1])

    def test_geo_known_values(self):
        s = make_sigma(SpectrumSpec("geo", 3, 100.0))
        assert np.allclose(s, [1.0, 0.1, 0.01])

    def test_cluster0_puts_all_but_first_at_floor(self):
        s = make_sigma(SpectrumSpec("cluster0", 4, 100.0))
        assert np.allclose(s, [1.0, 0.01, 0.01, 0.01])

    def test_cluster1_puts_all_but_last_at_one(self):
        s = make_sigma(SpectrumSpec("cluster1", 4, 100.0))
        assert np.allclose(s, [1.0, 1.0, 1.0, 0.01])

    def test_logrand_pins_largest_and_bounds_rest(self):
        s = make_sigma(SpectrumSpec("logrand", 16, 1e6, seed=9))
        assert s[0] == 1.0
        assert np.all(s[1:] >= 1.0 / 1e6 - 1e-18)
        assert np.all(s[1:] <= 1.0)
        assert np.all(np.diff(s) <= 0)

    def test_logrand_depends_on_seed(self):
        a = make_sigma(SpectrumSpec("logrand", 8, 1e4, seed=1))
        b = make_sigma(SpectrumSpec("logrand", 8, 1e4, seed=2))
        assert not np.array_equal(a, b)

    def test_random_family_has_no_spectrum(self):
        with pytest.raises(DomainError):
            make_sigma(SpectrumSpec("random", 4))

    def test_n1_needs_no_ratio(self):
        with pytest.raises(DomainError):
            make_sigma(SpectrumSpec("arith", 1, 10.0))
        with pytest.raises(DomainError):
            make_sigma(SpectrumSpec("geo", 1, 10.0))

    def test_spec_validation(self):
        with pytest.raises(DomainError):
            SpectrumSpec("nope", 4)
        with pytest.raises(DomainError):
            SpectrumSpec("arith", 0)
        with pytest.raises(DomainError):
            SpectrumSpec("arith", 4, kappa=0.5)
        with pytest.raises(DomainError):
            SpectrumSpec("arith", 4, seed=-1)

    @settings(max_examples=60, deadline=None)
    @given(
        family=st.sampled_from([f for f in FAMILIES if f != "random"]),
        n=st.integers(2, 64),
        kappa=st.floats(1.0, 1e12),
        seed=st.integers(0, 2**16),
    )
    def test_property_spectrum_shape(self, family, n, kappa, seed):
        s = make_sigma(SpectrumSpec(family, n, kappa, seed))
        assert s.shape == (n,)
        assert s[0] == pytest.approx(1.0)
        assert np.all(np.diff(s) <= 1e-16)
        # the smallest value floats the floor by at most one rounding of 1
        assert s[-1] >= 1.0 / kappa - 4e-16
        assert s[-1] <= 1.0


class TestGenMatrix:
    @pytest.mark.parametrize("dt", ALL_DTYPES)
    def test_prescribed_spectrum_is_realized(self, dt):
        spec = SpectrumSpec("geo", 12, 1e3, seed=17)
        a = gen_matrix(12, spec, dtype=dt)
        assert a.dtype == np.dtype(dt)
        assert a.flags.f_contiguous
        got = np.linalg.svd(np.asarray(a, dtype=np.complex128), compute_uv=False)
        from bsvd import unit_roundoff
        assert np.allclose(got, make_sigma(spec), atol=50 * 12 * unit_roundoff(dt))

    def test_deterministic(self):
        spec = SpectrumSpec("arith", 8, 1e2, seed=5)
        a = gen_matrix(8, spec)
        b = gen_matrix(8, spec)
        assert np.array_equal(a, b)

    def test_random_family_deterministic_and_uniform(self):
        spec = SpectrumSpec("random", 8, seed=5)
        a = gen_matrix(8, spec)
        assert np.array_equal(a, gen_matrix(8, spec))
        assert np.all(a >= 0.0) and np.all(a < 1.0)

    def test_random_family_complex_parts(self):
        spec = SpectrumSpec("random", 8, seed=6)
        a = gen_matrix(8, spec, dtype=np.complex128)
        assert np.all(a.real >= 0) and np.all(a.real < 1)
        assert np.all(a.imag >= 0) and np.all(a.imag < 1)

    def test_tall_rectangular(self):
        spec = SpectrumSpec("cluster0", 3, 100.0, seed=3)
        a = gen_matrix(5, spec)
        assert a.shape == (5, 3)
        assert np.allclose(oracle_svd(a), [1.0, 0.01, 0.01], atol=1e-13)

    def test_wide_rejected(self):
        with pytest.raises(ShapeError):
            gen_matrix(2, SpectrumSpec("arith", 3, 10.0))

    def test_entry_stream_independent_of_factor_stream(self):
        # same seed, different families: the random family reads a
        # different substream than the factor builder, not the same one
        ra = gen_matrix(8, SpectrumSpec("random", 8, seed=11))
        ar = gen_matrix(8, SpectrumSpec("arith", 8, 10.0, seed=11))
        assert not np.allclose(ra, ar)


class TestGenBatch:
    def test_batch_seeds_advance(self):
        spec = SpectrumSpec("random", 6, seed=100)
        mats = gen_batch(6, spec, 4)
        assert len(mats) == 4
        for i, m in enumerate(mats):
            one = gen_matrix(6, SpectrumSpec("random", 6, seed=100 + i))
            assert np.array_equal(m, one)
        assert not np.array_equal(mats[0], mats[1])

    def test_count_validation(self):
        with pytest.raises(DomainError):
            gen_batch(4, SpectrumSpec("random", 4), 0)
