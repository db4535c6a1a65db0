"""Numba-compiled batch kernels (the default hot path).

Each function has a signature-identical twin in `_kernels_numpy`; the two
are differentially tested.  Conventions shared by both:

- field elements are int16 codes, tables are dense (ADD/SUB/MUL [Q,Q],
  INV [Q], P0 [Q,Q], TWNEG [N+1,Q]);
- tracked digit strings are int16 [T, N] with an int64 validity vector;
  digits at positions >= validity are stored as zero;
- exact-model ring elements are int64 [T, w, deg] coefficient stacks
  modulo p^M.
"""

from __future__ import annotations

import numpy as np
from numba import njit

BIG = 1 << 30


@njit(cache=True)
def gf_matmul(A, B, MUL, ADD):
    m, k = A.shape
    n = B.shape[1]
    out = np.zeros((m, n), dtype=np.int16)
    for i in range(m):
        for s in range(k):
            a = A[i, s]
            if a == 0:
                continue
            for j in range(n):
                b = B[s, j]
                if b != 0:
                    out[i, j] = ADD[out[i, j], MUL[a, b]]
    return out


@njit(cache=True)
def gf_rref(M, MUL, SUB, INV):
    """Reduced row echelon form in place; returns (M, pivot_cols, npiv)."""
    rows, cols = M.shape
    pivots = np.empty(cols, dtype=np.int64)
    r = 0
    for c in range(cols):
        pr = -1
        for i in range(r, rows):
            if M[i, c] != 0:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            for j in range(cols):
                tmp = M[r, j]
                M[r, j] = M[pr, j]
                M[pr, j] = tmp
        inv = INV[M[r, c]]
        for j in range(cols):
            M[r, j] = MUL[inv, M[r, j]]
        for i in range(rows):
            if i != r and M[i, c] != 0:
                f = M[i, c]
                for j in range(cols):
                    M[i, j] = SUB[M[i, j], MUL[f, M[r, j]]]
        pivots[r] = c
        r += 1
        if r == rows:
            break
    return M, pivots[:r], r


@njit(cache=True)
def gf_apply_matrix_groups(C, gid, MATS, MUL, ADD):
    """out[t] = MATS[gid[t]] @ C[t] over the coded field."""
    T, D = C.shape
    out = np.zeros((T, D), dtype=np.int16)
    for t in range(T):
        g = gid[t]
        for o in range(D):
            acc = np.int16(0)
            for i in range(D):
                c = C[t, i]
                if c != 0:
                    m = MATS[g, o, i]
                    if m != 0:
                        acc = ADD[acc, MUL[m, c]]
            out[t, o] = acc
    return out


@njit(cache=True)
def segment_sum_gf(C, seg, nseg, ADD):
    T, D = C.shape
    out = np.zeros((nseg, D), dtype=np.int16)
    for t in range(T):
        s = seg[t]
        for j in range(D):
            c = C[t, j]
            if c != 0:
                out[s, j] = ADD[out[s, j], c]
    return out


@njit(cache=True)
def tracked_add_batch(da, va, db, vb, ADD, P0, kappa):
    T, N = da.shape
    out = np.zeros((T, N), dtype=np.int16)
    vc = np.empty(T, dtype=np.int64)
    carry = np.zeros(N, dtype=np.int16)
    for t in range(T):
        v = min(va[t], vb[t])
        for i in range(N):
            carry[i] = 0
        for i in range(N):
            s = np.int16(0)
            for src in range(3):
                if src == 0:
                    x = da[t, i]
                elif src == 1:
                    x = db[t, i]
                else:
                    x = carry[i]
                if x == 0:
                    continue
                if s == 0:
                    s = x
                    continue
                if i + kappa + 1 < v:
                    v = i + kappa + 1
                if i + kappa < N:
                    c = P0[s, x]
                    if c != 0:
                        carry[i + kappa] = ADD[carry[i + kappa], c]
                s = ADD[s, x]
            out[t, i] = s
        for i in range(v, N):
            out[t, i] = 0
        vc[t] = v
    return out, vc


@njit(cache=True)
def tracked_mul_batch(da, va, db, vb, MUL, ADD, P0, TWNEG, kappa):
    T, N = da.shape
    out = np.zeros((T, N), dtype=np.int16)
    vc = np.empty(T, dtype=np.int64)
    carry = np.zeros(N, dtype=np.int16)
    for t in range(T):
        vat = va[t]
        vbt = vb[t]
        val_a = -1
        for i in range(vat):
            if da[t, i] != 0:
                val_a = i
                break
        val_b = -1
        for j in range(vbt):
            if db[t, j] != 0:
                val_b = j
                break
        if val_a < 0 and vat == N:
            vc[t] = N
            continue
        if val_b < 0 and vbt == N:
            vc[t] = N
            continue
        eff_a = vat if val_a < 0 else val_a
        eff_b = vbt if val_b < 0 else val_b
        vcap = N
        if vat + eff_b < vcap:
            vcap = vat + eff_b
        if vbt + eff_a < vcap:
            vcap = vbt + eff_a
        if val_a < 0 or val_b < 0:
            vc[t] = vcap
            continue
        for i in range(N):
            carry[i] = 0
        v = vcap
        for k in range(N):
            s = np.int16(0)
            for i in range(k + 1):
                j = k - i
                ai = da[t, i]
                if ai == 0:
                    continue
                bj = db[t, j]
                if bj == 0:
                    continue
                x = MUL[TWNEG[j, ai], bj]
                if x == 0:
                    continue
                if s == 0:
                    s = x
                    continue
                if k + kappa + 1 < v:
                    v = k + kappa + 1
                if k + kappa < N:
                    c = P0[s, x]
                    if c != 0:
                        carry[k + kappa] = ADD[carry[k + kappa], c]
                s = ADD[s, x]
            x = carry[k]
            if x != 0:
                if s == 0:
                    s = x
                else:
                    if k + kappa + 1 < v:
                        v = k + kappa + 1
                    if k + kappa < N:
                        c = P0[s, x]
                        if c != 0:
                            carry[k + kappa] = ADD[carry[k + kappa], c]
                    s = ADD[s, x]
            out[t, k] = s
        for i in range(v, N):
            out[t, i] = 0
        vc[t] = v
    return out, vc


@njit(cache=True)
def exact_mul_batch(A, B, RED, PHI, p, pM, w):
    """Product in W<pi>: C_k += A_i * phi^i(B_j) * p^((i+j)//w), k = (i+j)%w."""
    T = A.shape[0]
    deg = A.shape[2]
    ord_ = PHI.shape[0]
    out = np.zeros((T, w, deg), dtype=np.int64)
    conv = np.zeros(2 * deg - 1, dtype=np.int64)
    twisted = np.zeros(deg, dtype=np.int64)
    reduced = np.zeros(deg, dtype=np.int64)
    for t in range(T):
        for i in range(w):
            any_a = False
            for d in range(deg):
                if A[t, i, d] != 0:
                    any_a = True
                    break
            if not any_a:
                continue
            phi = PHI[i % ord_]
            for j in range(w):
                any_b = False
                for d in range(deg):
                    if B[t, j, d] != 0:
                        any_b = True
                        break
                if not any_b:
                    continue
                for r in range(deg):
                    acc = 0
                    for s in range(deg):
                        acc += phi[r, s] * B[t, j, s]
                    twisted[r] = acc % pM
                for r in range(2 * deg - 1):
                    conv[r] = 0
                for r in range(deg):
                    ar = A[t, i, r]
                    if ar != 0:
                        for s in range(deg):
                            conv[r + s] = (conv[r + s] + ar * twisted[s]) % pM
                for r in range(deg):
                    acc = 0
                    for s in range(2 * deg - 1):
                        acc += conv[s] * RED[s, r]
                    reduced[r] = acc % pM
                k = i + j
                if k >= w:
                    k -= w
                    for r in range(deg):
                        out[t, k, r] = (out[t, k, r] + reduced[r] * p) % pM
                else:
                    for r in range(deg):
                        out[t, k, r] = (out[t, k, r] + reduced[r]) % pM
    return out
