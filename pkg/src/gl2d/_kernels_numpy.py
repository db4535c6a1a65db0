"""Pure-numpy fallbacks for the batch kernels.

Signature-compatible with `_kernels_numba`; selected by ``GL2D_NUMBA=0``.
Same conventions (see the numba module).  These favour vectorized table
gathers over per-term loops; results are bit-identical to the compiled
kernels.
"""

from __future__ import annotations

import numpy as np

BIG = 1 << 30


def gf_matmul(A, B, MUL, ADD):
    m, k = A.shape
    n = B.shape[1]
    out = np.zeros((m, n), dtype=np.int16)
    for s in range(k):
        col = A[:, s]
        row = B[s]
        nz = col != 0
        if not nz.any():
            continue
        prod = MUL[np.ix_(col[nz], row)] if n else np.zeros((nz.sum(), 0), np.int16)
        out[nz] = ADD[out[nz], prod]
    return out


def gf_rref(M, MUL, SUB, INV):
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        col = M[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            M[[r, pr]] = M[[pr, r]]
        M[r] = MUL[INV[M[r, c]], M[r]]
        other = np.nonzero(M[:, c])[0]
        other = other[other != r]
        if other.size:
            factors = M[other, c]
            M[other] = SUB[M[other], MUL[factors[:, None], M[r][None, :]]]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, np.array(pivots, dtype=np.int64), r


def gf_apply_matrix_groups(C, gid, MATS, MUL, ADD):
    T, D = C.shape
    out = np.zeros((T, D), dtype=np.int16)
    rowmats = MATS[gid]  # [T, D, D]
    for i in range(D):
        col = C[:, i]
        nz = col != 0
        if not nz.any():
            continue
        contrib = MUL[rowmats[nz, :, i], col[nz, None]]
        out[nz] = ADD[out[nz], contrib]
    return out


def segment_sum_gf(C, seg, nseg, ADD):
    T, D = C.shape
    out = np.zeros((nseg, D), dtype=np.int16)
    remaining = np.arange(T)
    while remaining.size:
        u, first = np.unique(seg[remaining], return_index=True)
        rows = remaining[first]
        out[u] = ADD[out[u], C[rows]]
        mask = np.ones(remaining.size, dtype=bool)
        mask[first] = False
        remaining = remaining[mask]
    return out


def _chain_in(s, x, i, v, carry, ADD, P0, kappa, N):
    """One pairwise step of the positional carry chain, vectorized over T."""
    xnz = x != 0
    take = xnz & (s == 0)
    pair = xnz & (s != 0)
    if pair.any():
        v[pair] = np.minimum(v[pair], i + kappa + 1)
        if i + kappa < N:
            c = P0[s[pair], x[pair]]
            slot = carry[pair, i + kappa]
            carry[pair, i + kappa] = ADD[slot, c]
    s = np.where(take, x, s)
    s[pair] = ADD[s[pair], x[pair]]
    return s


def tracked_add_batch(da, va, db, vb, ADD, P0, kappa):
    T, N = da.shape
    out = np.zeros((T, N), dtype=np.int16)
    v = np.minimum(va, vb).astype(np.int64)
    carry = np.zeros((T, N), dtype=np.int16)
    for i in range(N):
        s = np.zeros(T, dtype=np.int16)
        s = _chain_in(s, da[:, i], i, v, carry, ADD, P0, kappa, N)
        s = _chain_in(s, db[:, i], i, v, carry, ADD, P0, kappa, N)
        s = _chain_in(s, carry[:, i].copy(), i, v, carry, ADD, P0, kappa, N)
        out[:, i] = s
    out[np.arange(N)[None, :] >= v[:, None]] = 0
    return out, v


def tracked_mul_batch(da, va, db, vb, MUL, ADD, P0, TWNEG, kappa):
    T, N = da.shape
    nz_a = da != 0
    nz_b = db != 0
    any_a = nz_a.any(axis=1)
    any_b = nz_b.any(axis=1)
    val_a = np.where(any_a, nz_a.argmax(axis=1), -1)
    val_b = np.where(any_b, nz_b.argmax(axis=1), -1)
    zero_a = ~any_a & (va == N)
    zero_b = ~any_b & (vb == N)
    eff_a = np.where(val_a < 0, va, val_a)
    eff_b = np.where(val_b < 0, vb, val_b)
    vcap = np.minimum(N, np.minimum(va + eff_b, vb + eff_a)).astype(np.int64)

    out = np.zeros((T, N), dtype=np.int16)
    v = vcap.copy()
    carry = np.zeros((T, N), dtype=np.int16)
    live = any_a & any_b
    for k in range(N):
        s = np.zeros(T, dtype=np.int16)
        for i in range(k + 1):
            j = k - i
            contrib = np.where(
                live & nz_a[:, i] & nz_b[:, j],
                MUL[TWNEG[j, da[:, i]], db[:, j]],
                0,
            ).astype(np.int16)
            s = _chain_in(s, contrib, k, v, carry, ADD, P0, kappa, N)
        s = _chain_in(s, carry[:, k].copy(), k, v, carry, ADD, P0, kappa, N)
        out[:, k] = s
    out[~live] = 0
    v[~live] = vcap[~live]
    v[zero_a | zero_b] = N
    out[zero_a | zero_b] = 0
    out[np.arange(N)[None, :] >= v[:, None]] = 0
    return out, v


def exact_mul_batch(A, B, RED, PHI, p, pM, w):
    T = A.shape[0]
    deg = A.shape[2]
    ord_ = PHI.shape[0]
    out = np.zeros((T, w, deg), dtype=np.int64)
    for i in range(w):
        Ai = A[:, i]
        if not Ai.any():
            continue
        phi = PHI[i % ord_]
        for j in range(w):
            Bj = B[:, j]
            if not Bj.any():
                continue
            twisted = Bj @ phi.T % pM  # [T, deg]
            conv = np.zeros((T, 2 * deg - 1), dtype=np.int64)
            for r in range(deg):
                conv[:, r : r + deg] = (conv[:, r : r + deg] + Ai[:, r : r + 1] * twisted) % pM
            reduced = conv @ RED % pM
            k = i + j
            if k >= w:
                out[:, k - w] = (out[:, k - w] + reduced * p) % pM
            else:
                out[:, k] = (out[:, k] + reduced) % pM
    return out
