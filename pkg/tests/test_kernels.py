"""Differential tests: the numba kernels against the numpy fallbacks.

Both modules are imported directly (bypassing the env-flag dispatch) and
must produce bit-identical results.
"""

import numpy as np
import pytest

from gl2d import _kernels_numba as knb
from gl2d import _kernels_numpy as knp
from gl2d import field
from gl2d.od import RingParams


@pytest.fixture(scope="module")
def tables(f49):
    return f49


def test_gf_matmul_matches(f49):
    rng = np.random.default_rng(0)
    for (m, k, n) in ((3, 4, 5), (1, 16, 16), (16, 16, 1)):
        A = np.asarray(rng.integers(0, 49, (m, k)), dtype=np.int16)
        B = np.asarray(rng.integers(0, 49, (k, n)), dtype=np.int16)
        assert np.array_equal(
            knb.gf_matmul(A, B, f49.MUL, f49.ADD), knp.gf_matmul(A, B, f49.MUL, f49.ADD)
        )


def test_gf_rref_matches(f49):
    rng = np.random.default_rng(1)
    for (m, n) in ((6, 4), (4, 6), (8, 8), (5, 1)):
        M = np.asarray(rng.integers(0, 49, (m, n)), dtype=np.int16)
        R1, p1, r1 = knb.gf_rref(M.copy(), f49.MUL, f49.SUB, f49.INV)
        R2, p2, r2 = knp.gf_rref(M.copy(), f49.MUL, f49.SUB, f49.INV)
        assert r1 == r2
        assert np.array_equal(p1, p2)
        assert np.array_equal(R1, R2)


def test_apply_matrix_groups_matches(f49):
    rng = np.random.default_rng(2)
    T, D, G = 40, 16, 5
    C = np.asarray(rng.integers(0, 49, (T, D)), dtype=np.int16)
    gid = np.asarray(rng.integers(0, G, T), dtype=np.int64)
    MATS = np.asarray(rng.integers(0, 49, (G, D, D)), dtype=np.int16)
    a = knb.gf_apply_matrix_groups(C, gid, MATS, f49.MUL, f49.ADD)
    b = knp.gf_apply_matrix_groups(C, gid, MATS, f49.MUL, f49.ADD)
    assert np.array_equal(a, b)


def test_segment_sum_matches(f49):
    rng = np.random.default_rng(3)
    T, D = 60, 8
    C = np.asarray(rng.integers(0, 49, (T, D)), dtype=np.int16)
    seg = np.sort(np.asarray(rng.integers(0, 9, T), dtype=np.int64))
    a = knb.segment_sum_gf(C, seg, 9, f49.ADD)
    b = knp.segment_sum_gf(C, seg, 9, f49.ADD)
    assert np.array_equal(a, b)


@pytest.fixture(scope="module")
def tracked_ring():
    return RingParams.make(field(7, 1, 2), e=2, ndigits=8)


def test_tracked_batch_ops_match(tracked_ring):
    ring = tracked_ring
    F = ring.field
    rng = np.random.default_rng(4)
    T, N = 80, ring.ndigits
    da = np.asarray(rng.integers(0, 49, (T, N)), dtype=np.int16)
    db = np.asarray(rng.integers(0, 49, (T, N)), dtype=np.int16)
    va = np.asarray(rng.integers(1, N + 1, T), dtype=np.int64)
    vb = np.asarray(rng.integers(1, N + 1, T), dtype=np.int64)
    da[np.arange(N)[None, :] >= va[:, None]] = 0
    db[np.arange(N)[None, :] >= vb[:, None]] = 0
    args = (F.ADD, ring.P0, ring.kappa)
    d1, v1 = knb.tracked_add_batch(da, va, db, vb, *args)
    d2, v2 = knp.tracked_add_batch(da, va, db, vb, *args)
    assert np.array_equal(d1, d2) and np.array_equal(v1, v2)
    margs = (F.MUL, F.ADD, ring.P0, ring.TWIST_NEG, ring.kappa)
    d1, v1 = knb.tracked_mul_batch(da, va, db, vb, *margs)
    d2, v2 = knp.tracked_mul_batch(da, va, db, vb, *margs)
    assert np.array_equal(d1, d2) and np.array_equal(v1, v2)


def test_tracked_batch_matches_scalar(tracked_ring):
    ring = tracked_ring
    rng = np.random.default_rng(5)
    N = ring.ndigits
    T = 30
    da = np.asarray(rng.integers(0, 49, (T, N)), dtype=np.int16)
    db = np.asarray(rng.integers(0, 49, (T, N)), dtype=np.int16)
    va = np.full(T, N, dtype=np.int64)
    d_add, v_add = knb.tracked_add_batch(da, va, db, va, ring.field.ADD, ring.P0, ring.kappa)
    d_mul, v_mul = knb.tracked_mul_batch(
        da, va, db, va, ring.field.MUL, ring.field.ADD, ring.P0, ring.TWIST_NEG, ring.kappa
    )
    for t in range(T):
        a = ring.from_digits([int(v) for v in da[t]])
        b = ring.from_digits([int(v) for v in db[t]])
        s = a + b
        assert s.digits == tuple(d_add[t]) and s.valid_to == v_add[t]
        m = a * b
        assert m.digits == tuple(d_mul[t]) and m.valid_to == v_mul[t]


def test_exact_mul_batch_matches(space_b):
    ring = space_b.ring
    em = ring.exact_model
    rng = np.random.default_rng(6)
    T = 25
    A = np.asarray(rng.integers(0, em.pM, (T, em.w, em.deg)), dtype=np.int64)
    B = np.asarray(rng.integers(0, em.pM, (T, em.w, em.deg)), dtype=np.int64)
    a = knb.exact_mul_batch(A, B, em._red, em._phi_cycle, em.p, em.pM, em.w)
    b = knp.exact_mul_batch(A, B, em._red, em._phi_cycle, em.p, em.pM, em.w)
    assert np.array_equal(a, b)
    # and against the scalar model
    for t in range(5):
        assert np.array_equal(a[t], em.mul(A[t], B[t]))


def test_kernel_backend_flag(monkeypatch):
    import importlib
    import subprocess
    import sys

    code = (
        "import gl2d.accel as a; import os;"
        "print(a.kernel_backend_name())"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"GL2D_NUMBA": "0", "PATH": "/usr/bin:/bin"},
        capture_output=True,
        text=True,
        cwd="/root/pkg",
    )
    assert out.stdout.strip() == "numpy"
