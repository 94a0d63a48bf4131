"""Plane rotations and the cyclic Jacobi Hermitian eigensolver."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsvd import (
    DomainError,
    EigInfo,
    Rotation,
    ShapeError,
    compute_rotation,
    jacobi_hermitian_eig,
    off_norm,
    unit_roundoff,
)

from conftest import ALL_DTYPES, random_hermitian


class TestComputeRotation:
    def test_known_real_case(self):
        r = compute_rotation(9.0, 41.0, 12.0)
        assert r.c == pytest.approx(3.0 / np.sqrt(10.0))
        assert r.s == pytest.approx(-1.0 / np.sqrt(10.0))
        assert r.t == pytest.approx(-1.0 / 3.0)
        assert r.phase == 1.0
        j = r.as_matrix()
        a = np.array([[9.0, 12.0], [12.0, 41.0]])
        d = j.conj().T @ a @ j
        assert np.allclose(d, np.diag([5.0, 45.0]), atol=1e-12)

    def test_zero_offdiagonal_is_identity(self):
        r = compute_rotation(3.0, 7.0, 0.0)
        assert (r.c, r.s, r.t) == (1.0, 0.0, 0.0)
        assert np.array_equal(r.as_matrix(), np.eye(2))

    def test_equal_diagonal_uses_quarter_rotation(self):
        r = compute_rotation(2.0, 2.0, 1.0)
        assert r.c == pytest.approx(np.sqrt(0.5))
        assert abs(r.s) == pytest.approx(np.sqrt(0.5))
        assert r.t == 1.0  # tau = 0 takes the positive branch

    def test_complex_offdiagonal(self):
        g = 3.0 + 4.0j
        r = compute_rotation(1.0, 2.0, g)
        assert abs(r.phase) == pytest.approx(1.0)
        a = np.array([[1.0, g], [np.conj(g), 2.0]])
        d = r.as_matrix().conj().T @ a @ r.as_matrix()
        assert abs(d[0, 1]) < 1e-14
        assert abs(d[1, 0]) < 1e-14

    def test_complex_diagonal_rejected(self):
        with pytest.raises(DomainError):
            compute_rotation(1.0 + 1.0j, 2.0, 1.0)

    @settings(max_examples=200, deadline=None)
    @given(
        dii=st.floats(-1e6, 1e6),
        djj=st.floats(-1e6, 1e6),
        re=st.floats(-1e6, 1e6),
        im=st.floats(-1e6, 1e6),
    )
    def test_property_annihilation(self, dii, djj, re, im):
        g = complex(re, im)
        r = compute_rotation(dii, djj, g)
        j = r.as_matrix()
        # unitary
        assert np.allclose(j.conj().T @ j, np.eye(2), atol=1e-12)
        a = np.array([[dii, g], [np.conj(g), djj]], dtype=np.complex128)
        d = j.conj().T @ a @ j
        scale = max(abs(dii), abs(djj), abs(g), 1.0)
        assert abs(d[0, 1]) <= 1e-12 * scale
        # closed-form diagonal update
        assert d[0, 0].real == pytest.approx(dii + r.t * abs(g), abs=1e-9 * scale)
        assert d[1, 1].real == pytest.approx(djj - r.t * abs(g), abs=1e-9 * scale)
        # trace preserved
        assert d[0, 0].real + d[1, 1].real == pytest.approx(dii + djj, abs=1e-9 * scale)

    def test_inner_cosine_bounded_below(self):
        # c = 1/sqrt(1+t^2) with |t| <= 1 keeps c >= 1/sqrt(2)
        for dii, djj, g in [(0.0, 0.0, 1.0), (5.0, -5.0, 1e-8), (1.0, 2.0, 1e6)]:
            r = compute_rotation(dii, djj, g)
            assert r.c >= 1.0 / np.sqrt(2.0) - 1e-15
            assert abs(r.t) <= 1.0 + 1e-15


class TestJacobiEig:
    @pytest.mark.parametrize("dt", ALL_DTYPES)
    def test_diagonalizes(self, dt):
        g = random_hermitian(12, dt, seed=3)
        d, m, info = jacobi_hermitian_eig(g)
        u = unit_roundoff(dt)
        gf = np.linalg.norm(g)
        assert info.converged
        assert np.linalg.norm(m @ np.diag(d).astype(dt) @ m.conj().T - g) < 50 * 12 * u * gf
        assert np.linalg.norm(m.conj().T @ m - np.eye(12)) < 50 * 12 * u
        ref = np.linalg.eigvalsh(g)
        assert np.allclose(np.sort(d), ref, atol=50 * 12 * u * gf)

    def test_known_two_by_two(self):
        g = np.asfortranarray([[9.0, 12.0], [12.0, 41.0]])
        d, m, info = jacobi_hermitian_eig(g)
        assert np.allclose(d, [5.0, 45.0])
        assert info.rotations == 1

    def test_already_diagonal_quiet_first_sweep(self):
        g = np.asfortranarray(np.diag([4.0, 1.0, 2.0]))
        d, m, info = jacobi_hermitian_eig(g)
        assert info == EigInfo(sweeps_run=1, rotations=0, converged=True)
        assert np.array_equal(d, [4.0, 1.0, 2.0])
        assert np.array_equal(m, np.eye(3))

    def test_trivial_sizes(self):
        d, m, info = jacobi_hermitian_eig(np.asfortranarray([[7.0]]))
        assert d[0] == 7.0 and info.converged

    def test_guard_scales_with_k(self):
        # under a huge k every off entry is below the guard, so nothing rotates
        g = random_hermitian(8, seed=9)
        d, m, info = jacobi_hermitian_eig(g, k=1e30)
        assert info.rotations == 0 and info.converged

    def test_max_sweeps_limits_work(self):
        g = random_hermitian(16, seed=4)
        d1, m1, i1 = jacobi_hermitian_eig(g, max_sweeps=1)
        assert i1.sweeps_run == 1
        assert not i1.converged
        dc, mc, ic = jacobi_hermitian_eig(g)
        assert ic.converged and ic.sweeps_run > 1

    def test_single_sweep_reduces_off_norm(self):
        g = random_hermitian(10, seed=5)
        d, m, info = jacobi_hermitian_eig(g, max_sweeps=1)
        assert off_norm(m.conj().T @ g @ m) < off_norm(g)

    def test_eigvecs_accumulate_in_place(self):
        g = random_hermitian(6, seed=6)
        pre = np.asfortranarray(np.eye(6))
        d0, m0, _ = jacobi_hermitian_eig(g)
        d1, m1, _ = jacobi_hermitian_eig(g, eigvecs=pre)
        assert m1 is pre
        assert np.array_equal(m0, m1)
        assert np.array_equal(d0, d1)

    def test_eigvecs_validation(self):
        g = random_hermitian(4, seed=7)
        with pytest.raises(ShapeError):
            jacobi_hermitian_eig(g, eigvecs=np.eye(4))  # C order
        with pytest.raises(ShapeError):
            jacobi_hermitian_eig(g, eigvecs=np.asfortranarray(np.eye(3)))
        with pytest.raises(ShapeError):
            jacobi_hermitian_eig(g, eigvecs=np.asfortranarray(np.eye(4, dtype=np.float32)))

    def test_rejects_non_hermitian(self):
        g = np.asfortranarray([[1.0, 2.0], [5.0, 1.0]])
        with pytest.raises(DomainError):
            jacobi_hermitian_eig(g)

    def test_rejects_non_square(self):
        with pytest.raises(ShapeError):
            jacobi_hermitian_eig(np.zeros((2, 3), order="F"))

    def test_rejects_bad_params(self):
        g = random_hermitian(4)
        with pytest.raises(DomainError):
            jacobi_hermitian_eig(g, k=0.0)
        with pytest.raises(DomainError):
            jacobi_hermitian_eig(g, max_sweeps=0)

    def test_input_not_mutated(self):
        g = random_hermitian(8, seed=8)
        keep = g.copy()
        jacobi_hermitian_eig(g)
        assert np.array_equal(g, keep)

    @settings(max_examples=25, deadline=None)
    @given(n=st.integers(2, 24), seed=st.integers(0, 2**16))
    def test_property_spectrum_matches_lapack(self, n, seed):
        g = random_hermitian(n, np.float64, seed=seed)
        d, m, info = jacobi_hermitian_eig(g)
        assert info.converged
        ref = np.linalg.eigvalsh(g)
        tol = 64 * n * 2.0**-53 * max(np.linalg.norm(g), 1.0)
        assert np.allclose(np.sort(d), ref, atol=tol)
