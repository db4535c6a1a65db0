"""Exact dense linear algebra over the coded residue field."""

from __future__ import annotations

import numpy as np

from .accel import kernels
from .gf import FieldParams


def matmul(params: FieldParams, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A = np.ascontiguousarray(A, dtype=np.int16)
    B = np.ascontiguousarray(B, dtype=np.int16)
    return kernels().gf_matmul(A, B, params.MUL, params.ADD)


def rref(params: FieldParams, M: np.ndarray):
    """Reduced row echelon form of a copy; returns (R, pivot_cols, rank)."""
    work = np.ascontiguousarray(M, dtype=np.int16).copy()
    R, piv, r = kernels().gf_rref(work, params.MUL, params.SUB, params.INV)
    return R, piv, int(r)


def rank(params: FieldParams, M: np.ndarray) -> int:
    if M.size == 0:
        return 0
    return rref(params, M)[2]


def solve(params: FieldParams, A: np.ndarray, b: np.ndarray):
    """One exact solution of A x = b, or None if inconsistent.

    A is [m, n], b is [m]; returns x as an int16 vector of codes with
    free variables set to zero.
    """
    m, n = A.shape
    aug = np.zeros((m, n + 1), dtype=np.int16)
    aug[:, :n] = A
    aug[:, n] = b
    R, piv, r = rref(params, aug)
    if r and piv[-1] == n:
        return None
    x = np.zeros(n, dtype=np.int16)
    for k in range(r):
        x[piv[k]] = R[k, n]
    return x


def nullspace(params: FieldParams, A: np.ndarray) -> np.ndarray:
    """Columns form a basis of the right kernel of A."""
    m, n = A.shape
    if n == 0:
        return np.zeros((0, 0), dtype=np.int16)
    if m == 0:
        return np.eye(n, dtype=np.int16)
    R, piv, r = rref(params, A)
    pivset = set(int(c) for c in piv)
    free = [c for c in range(n) if c not in pivset]
    basis = np.zeros((n, len(free)), dtype=np.int16)
    NEG = params.NEG
    for idx, c in enumerate(free):
        basis[c, idx] = 1
        for k in range(r):
            coeff = R[k, c]
            if coeff:
                basis[int(piv[k]), idx] = NEG[coeff]
    return basis


def inverse(params: FieldParams, A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    aug = np.zeros((n, 2 * n), dtype=np.int16)
    aug[:, :n] = A
    aug[np.arange(n), n + np.arange(n)] = 1
    R, piv, r = rref(params, aug)
    if r < n or int(piv[n - 1]) != n - 1:
        raise np.linalg.LinAlgError("matrix is singular over the field")
    return R[:, n:].copy()


def in_span(params: FieldParams, vectors: np.ndarray, target: np.ndarray):
    """Coefficients expressing target as a combination of the columns, or None."""
    return solve(params, vectors, target)
