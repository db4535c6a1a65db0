"""Batched ring arithmetic and tree-coset canonicalization.

The two engines expose the same small vocabulary over per-term state
arrays (tracked: digit matrices plus validity; exact: model coefficient
stacks), built on the primitive kernels selected in `accel`.  The
canonicalization driver is written once against that vocabulary and
handles both backends; branchy decisions (side, column swaps, variable
shifts) are mask-vectorized.
"""

from __future__ import annotations

import numpy as np

from .accel import kernels
from .errors import PrecisionExceeded, SingularMatrix
from .od import ODElement, RingParams

INF = np.int64(1 << 30)


class TrackedBatchEngine:
    """State: (digits int16 [T, N], valid int64 [T]); digits beyond valid are 0."""

    def __init__(self, ring: RingParams, T: int):
        self.ring = ring
        self.T = T
        self.N = ring.ndigits
        F = ring.field
        self.F = F
        self.ADD, self.MUL, self.NEG = F.ADD, F.MUL, F.NEG
        self.P0 = ring.P0
        self.TWNEG = ring.TWIST_NEG
        self.kappa = ring.kappa
        self._negone = None

    def const(self, el: ODElement):
        d = np.tile(np.array(el.digits, dtype=np.int16), (self.T, 1))
        v = np.full(self.T, el.valid_to, dtype=np.int64)
        return (d, v)

    def zero(self):
        return (
            np.zeros((self.T, self.N), dtype=np.int16),
            np.full(self.T, self.N, dtype=np.int64),
        )

    def from_digit_rows(self, rows: np.ndarray):
        d = np.zeros((self.T, self.N), dtype=np.int16)
        m = min(rows.shape[1], self.N)
        d[:, :m] = rows[:, :m]
        return (d, np.full(self.T, self.N, dtype=np.int64))

    def where(self, mask, a, b):
        return (
            np.where(mask[:, None], a[0], b[0]),
            np.where(mask, a[1], b[1]),
        )

    def mul(self, a, b):
        d, v = kernels().tracked_mul_batch(
            a[0], a[1], b[0], b[1], self.MUL, self.ADD, self.P0, self.TWNEG, self.kappa
        )
        return (d, v)

    def add(self, a, b):
        d, v = kernels().tracked_add_batch(
            a[0], a[1], b[0], b[1], self.ADD, self.P0, self.kappa
        )
        return (d, v)

    def neg(self, a):
        if self.F.p != 2:
            return (self.NEG[a[0]], a[1])
        if self._negone is None:
            self._negone = self.const(self.ring.neg_one)
        return self.mul(self._negone, a)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def val(self, a, mask=None):
        """First nonzero digit; INF for exact zero; error when undecidable."""
        d, v = a
        nz = d != 0
        any_nz = nz.any(axis=1)
        first = np.where(any_nz, nz.argmax(axis=1), INF)
        undecidable = ~any_nz & (v < self.N)
        if mask is not None:
            undecidable &= mask
        if undecidable.any():
            raise PrecisionExceeded("valuation undecidable within tracked validity")
        return first.astype(np.int64)

    def val_bound(self, a):
        """(values, determined): valuations or lower bounds from validity."""
        d, v = a
        nz = d != 0
        any_nz = nz.any(axis=1)
        det = any_nz | (v >= self.N)
        vals = np.where(any_nz, nz.argmax(axis=1), np.where(v >= self.N, INF, v))
        return vals.astype(np.int64), det

    def lead_nonzero(self, a):
        d, v = a
        if (v < 1).any():
            raise PrecisionExceeded("no valid digits to inspect")
        return d[:, 0] != 0

    def residue(self, a, mask=None):
        d, v = a
        bad = v < 1
        if mask is not None:
            bad &= mask
        if bad.any():
            raise PrecisionExceeded("residue requested with no valid digits")
        return d[:, 0].astype(np.int16)

    def inv(self, a, mask):
        """Unit inverse where mask; rows outside the mask yield garbage."""
        d, v = a
        F = self.F
        lead = d[:, 0].copy()
        if (mask & (lead == 0)).any():
            raise PrecisionExceeded("inverse of a non-unit in batch")
        lead[lead == 0] = 1
        da = d.copy()
        da[:, 0] = lead
        N = self.N
        x = np.zeros((self.T, N), dtype=np.int16)
        x[:, 0] = F.INV[lead]
        va = v.copy()
        limit = va.copy()
        xv = np.full(self.T, N, dtype=np.int64)
        for k in range(1, N):
            prod, pv = kernels().tracked_mul_batch(
                da, va, x, xv, self.MUL, self.ADD, self.P0, self.TWNEG, self.kappa
            )
            live = (k < limit) & (k < pv)
            limit = np.where((k >= pv) & (pv < limit), pv, limit)
            s = prod[:, k]
            upd = live & (s != 0)
            if upd.any():
                tw_lead = self.TWNEG[k, lead[upd]]
                x[upd, k] = F.MUL[F.NEG[s[upd]], F.INV[tw_lead]]
        prod, pv = kernels().tracked_mul_batch(
            da, va, x, xv, self.MUL, self.ADD, self.P0, self.TWNEG, self.kappa
        )
        good = pv.copy()
        for i in range(N):
            want = 1 if i == 0 else 0
            wrong = (prod[:, i] != want) & (i < good)
            good = np.where(wrong, i, good)
        x[np.arange(N)[None, :] >= good[:, None]] = 0
        return (x, good)

    def shift_down_var(self, a, kvec, mask=None):
        """pi^-k per term; requires the low digits to vanish (where mask)."""
        d, v = a
        N = self.N
        kvec = np.asarray(kvec, dtype=np.int64)
        idx = np.arange(N)[None, :] + kvec[:, None]
        bad_low = (np.arange(N)[None, :] < kvec[:, None]) & (d != 0)
        bad = bad_low.any(axis=1) | (v < kvec)
        if mask is not None:
            bad &= mask
        if bad.any():
            raise PrecisionExceeded("downshift through nonzero or unknown digits")
        gathered = np.where(idx < N, d[np.arange(self.T)[:, None], np.minimum(idx, N - 1)], 0)
        return (gathered.astype(np.int16), v - np.minimum(kvec, v))

    def shift_up1(self, a):
        d, v = a
        out = np.zeros_like(d)
        out[:, 1:] = d[:, :-1]
        return (out, np.minimum(v + 1, self.N))

    def twist_conj_var(self, a, kvec):
        """pi^k a pi^-k per term: digit-wise q^(t*k) Frobenius."""
        d, v = a
        F = self.F
        rows = (F.f * self.ring.twist * np.asarray(kvec, dtype=np.int64)) % F.deg
        tab = F.FROBP[rows]  # [T, Q]
        out = np.take_along_axis(tab, d.astype(np.int64), axis=1).astype(np.int16)
        return (out, v)

    def div_pi_right_var(self, a, kvec, mask=None):
        """a * pi^-k per term: downshift plus q^(t*k) digit twist."""
        return self.twist_conj_var(self.shift_down_var(a, kvec, mask), kvec)

    def digits_first(self, a, m, nvec=None, mask=None):
        """First m digits, rows zeroed from their nvec on; checks validity."""
        d, v = a
        need = np.full(self.T, m, dtype=np.int64) if nvec is None else np.asarray(nvec)
        bad = v < need
        if mask is not None:
            bad &= mask
        if bad.any():
            raise PrecisionExceeded("digit extraction beyond tracked validity")
        out = d[:, :m].astype(np.int16).copy()
        if nvec is not None:
            out[np.arange(m)[None, :] >= need[:, None]] = 0
        return out


class ExactBatchEngine:
    """State: int64 [T, w, deg] model stacks (left coefficients of pi powers)."""

    def __init__(self, ring: RingParams, T: int):
        self.ring = ring
        self.T = T
        self.N = ring.ndigits
        em = ring.exact_model
        self.em = em
        self.F = ring.field
        self.p, self.pM, self.w, self.deg = em.p, em.pM, em.w, em.deg
        self._ppow = self.p ** np.arange(self.deg, dtype=np.int64)

    def const(self, el: ODElement):
        m = self.em.from_digits(el.digits)
        return np.tile(m, (self.T, 1, 1))

    def zero(self):
        return np.zeros((self.T, self.w, self.deg), dtype=np.int64)

    def from_digit_rows(self, rows: np.ndarray):
        out = self.zero()
        m = rows.shape[1]
        for i in range(m - 1, -1, -1):
            out = self._lshift(out)
            out[:, 0] = (out[:, 0] + self.em.TEICH[rows[:, i].astype(np.int64)]) % self.pM
        return out

    def where(self, mask, a, b):
        return np.where(mask[:, None, None], a, b)

    def mul(self, a, b):
        return kernels().exact_mul_batch(
            a, b, self.em._red, self.em._phi_cycle, self.p, self.pM, self.w
        )

    def add(self, a, b):
        return (a + b) % self.pM

    def neg(self, a):
        return (-a) % self.pM

    def sub(self, a, b):
        return (a - b) % self.pM

    def _phi_apply(self, coeffs, k):
        mat = self.em._phi_cycle[k % self.em.phi_order]
        return coeffs @ mat.T % self.pM

    def _lshift(self, a):
        out = np.empty_like(a)
        shifted = self._phi_apply(a.reshape(-1, self.deg), 1).reshape(a.shape)
        out[:, 1:] = shifted[:, :-1]
        out[:, 0] = shifted[:, -1] * self.p % self.pM
        return out

    def _rdiv(self, a, mask):
        div = a[:, 0] % self.p
        bad = div.any(axis=1)
        if mask is not None:
            bad &= mask
        if bad.any():
            raise PrecisionExceeded("exact downshift through a unit coordinate")
        out = np.empty_like(a)
        safe0 = np.where(div.astype(bool), 0, a[:, 0])  # garbage rows masked out
        out[:, : self.w - 1] = a[:, 1:]
        out[:, self.w - 1] = safe0 // self.p
        return self._phi_apply(out.reshape(-1, self.deg), -1).reshape(a.shape)

    def val(self, a, mask=None):
        # p-valuation per coordinate, capped at M; pi-val = min(w*valp + i).
        M = self.em.M
        valp = np.zeros((self.T, self.w), dtype=np.int64)
        cur = a.copy()
        for _ in range(M):
            div = (cur % self.p == 0).all(axis=2)
            valp += div
            cur = np.where(div[:, :, None], cur // self.p, cur)
        vv = self.w * valp + np.arange(self.w, dtype=np.int64)[None, :]
        vv = np.where(valp >= M, INF, vv)
        return vv.min(axis=1)

    def val_bound(self, a):
        return self.val(a), np.ones(self.T, dtype=bool)

    def lead_nonzero(self, a):
        return self.residue(a) != 0

    def residue(self, a, mask=None):
        return ((a[:, 0] % self.p) @ self._ppow).astype(np.int16)

    def inv(self, a, mask):
        lead = self.residue(a)
        if (mask & (lead == 0)).any():
            raise PrecisionExceeded("inverse of a non-unit in batch")
        base = a.copy()
        fix = lead == 0
        if fix.any():
            base[fix] = 0
            base[fix, 0, 0] = 1
            lead = lead.copy()
            lead[fix] = 1
        x = self.zero()
        x[:, 0] = self.em.TEICH[self.F.INV[lead].astype(np.int64)]
        one = self.zero()
        one[:, 0, 0] = 1
        for _ in range(self.N.bit_length() + 2):
            err = self.sub(one, self.mul(base, x))
            x = self.add(x, self.mul(x, err))
        return x

    def shift_down_var(self, a, kvec, mask=None):
        kvec = np.asarray(kvec, dtype=np.int64)
        out = a.copy()
        kmax = int(kvec.max()) if kvec.size else 0
        for step in range(kmax):
            todo = kvec > step
            m = todo if mask is None else (todo & mask)
            if not m.any():
                continue
            shifted = self._rdiv(out, m)
            out = np.where(m[:, None, None], shifted, out)
        return out

    def shift_up1(self, a):
        return self._lshift(a)

    def twist_conj_var(self, a, kvec):
        """pi^k a pi^-k per term: coordinate-wise lifted Frobenius power."""
        kvec = np.asarray(kvec, dtype=np.int64) % self.em.phi_order
        out = a.copy()
        for kv in np.unique(kvec):
            if kv == 0:
                continue
            m = kvec == kv
            sub = out[m].reshape(-1, self.deg)
            out[m] = self._phi_apply(sub, int(kv)).reshape(out[m].shape)
        return out

    def div_pi_right_var(self, a, kvec, mask=None):
        """a * pi^-k per term: pre-conjugate each peeled uniformizer."""
        kvec = np.asarray(kvec, dtype=np.int64)
        out = a.copy()
        kmax = int(kvec.max()) if kvec.size else 0
        for step in range(kmax):
            todo = kvec > step
            m = todo if mask is None else (todo & mask)
            if not m.any():
                continue
            pre = self._phi_apply(out.reshape(-1, self.deg), 1).reshape(out.shape)
            shifted = self._rdiv(pre, m)
            out = np.where(m[:, None, None], shifted, out)
        return out

    def digits_first(self, a, m, nvec=None, mask=None):
        out = np.zeros((self.T, m), dtype=np.int16)
        cur = a.copy()
        for i in range(m):
            d = self.residue(cur)
            out[:, i] = d
            cur[:, 0] = (cur[:, 0] - self.em.TEICH[d.astype(np.int64)]) % self.pM
            cur = self._rdiv(cur, None)
        if nvec is not None:
            out[np.arange(m)[None, :] >= np.asarray(nvec)[:, None]] = 0
        return out


def make_engine(ring: RingParams, T: int):
    if ring.backend == "exact":
        return ExactBatchEngine(ring, T)
    return TrackedBatchEngine(ring, T)


# ---------------------------------------------------------------------------
# Canonicalization.
# ---------------------------------------------------------------------------

def canonicalize_batch(eng, A, B, C, D, pi_in, ncap: int):
    """Factor each 2x2 matrix as rep(side, n, mu) * k * pi^zz.

    The pi-power is normalized on the right (the coset quotient is by
    right KZZ'), so the input left pi-power is conjugated into the
    entries and the minimal valuation divided out by a right pi-division,
    both of which twist digits by q-Frobenius powers.  Returns (side, n,
    mu [T, ncap], kbar [T, 4], zz); kbar is the residue matrix of the
    K-part.  Raises SingularMatrix when some term is not invertible,
    PrecisionExceeded when validity runs out.
    """
    T = eng.T
    pi_in = np.asarray(pi_in, dtype=np.int64)
    if pi_in.any():
        A, B, C, D = (eng.twist_conj_var(x, pi_in) for x in (A, B, C, D))
    vb = [eng.val_bound(x) for x in (A, B, C, D)]
    vals = np.stack([v for v, _ in vb])
    dets = np.stack([d for _, d in vb])
    vmin = np.where(dets, vals, INF).min(axis=0)
    if (vmin >= INF).any():
        raise SingularMatrix("zero matrix in canonicalization batch")
    if ((~dets) & (vals < vmin[None, :])).any():
        raise PrecisionExceeded("minimal valuation undetermined in batch")
    A, B, C, D = (eng.div_pi_right_var(x, vmin) for x in (A, B, C, D))
    zz = pi_in + vmin
    leadA = eng.lead_nonzero(A)
    leadC = eng.lead_nonzero(C)
    leadD = eng.lead_nonzero(D)

    side0 = leadC | leadD
    side1 = ~side0

    n_out = np.zeros(T, dtype=np.int64)
    mu_out = np.zeros((T, ncap), dtype=np.int16)
    kbar = np.zeros((T, 4), dtype=np.int16)

    # ---- side 0: bottom row contains a unit --------------------------------
    swap0 = side0 & ~leadD
    A0 = eng.where(swap0, B, A)
    B0 = eng.where(swap0, A, B)
    C0 = eng.where(swap0, D, C)
    D0 = eng.where(swap0, C, D)
    if side0.any():
        Dinv = eng.inv(D0, side0)
        R = eng.mul(B0, Dinv)
        A2 = eng.sub(A0, eng.mul(R, C0))
        nv = eng.val(A2, side0)
        if (side0 & (nv >= INF)).any():
            raise SingularMatrix("matrix not invertible (degenerate columns)")
        if (side0 & (nv > ncap)).any():
            raise PrecisionExceeded(f"coset depth exceeds cap {ncap}")
        nv = np.where(side0, nv, 0)
        mu = eng.digits_first(R, ncap, nvec=nv, mask=side0)
        MU = eng.from_digit_rows(mu)
        K11 = eng.shift_down_var(eng.sub(A0, eng.mul(MU, C0)), nv, side0)
        K12 = eng.shift_down_var(eng.sub(B0, eng.mul(MU, D0)), nv, side0)
        k11 = eng.residue(K11, side0)
        k12 = eng.residue(K12, side0)
        k21 = eng.residue(C0, side0)
        k22 = eng.residue(D0, side0)
        ks = np.stack([k11, k12, k21, k22], axis=1)
        sw = np.stack([k12, k11, k22, k21], axis=1)
        ks = np.where(swap0[:, None], sw, ks)
        n_out = np.where(side0, nv, n_out)
        mu_out[side0] = mu[side0]
        kbar[side0] = ks[side0]

    # ---- side 1: bottom row in the maximal ideal ---------------------------
    if side1.any():
        swap1 = side1 & ~leadA
        A1 = eng.where(swap1, B, A)
        B1 = eng.where(swap1, A, B)
        C1 = eng.where(swap1, D, C)
        D1 = eng.where(swap1, C, D)
        Ainv = eng.inv(A1, side1)
        D2 = eng.sub(D1, eng.mul(C1, eng.mul(Ainv, B1)))
        mval = eng.val(D2, side1)
        if (side1 & (mval >= INF)).any():
            raise SingularMatrix("matrix not invertible (degenerate columns)")
        nv1 = np.where(side1, mval - 1, 0)
        if (side1 & (nv1 > ncap)).any():
            raise PrecisionExceeded(f"coset depth exceeds cap {ncap}")
        if (side1 & (nv1 < 0)).any():
            raise SingularMatrix("side-1 matrix with unit bottom row")
        R1 = eng.shift_down_var(eng.mul(C1, Ainv), np.where(side1, 1, 0), side1)
        mu1 = eng.digits_first(R1, ncap, nvec=nv1, mask=side1)
        PIM = eng.shift_up1(eng.from_digit_rows(mu1))
        K21 = eng.shift_down_var(eng.sub(C1, eng.mul(PIM, A1)), nv1 + 1, side1)
        K22 = eng.shift_down_var(eng.sub(D1, eng.mul(PIM, B1)), nv1 + 1, side1)
        k11 = eng.residue(A1, side1)
        k12 = eng.residue(B1, side1)
        k21 = eng.residue(K21, side1)
        k22 = eng.residue(K22, side1)
        ks = np.stack([k11, k12, k21, k22], axis=1)
        sw = np.stack([k12, k11, k22, k21], axis=1)
        ks = np.where(swap1[:, None], sw, ks)
        n_out = np.where(side1, nv1, n_out)
        mu_out[side1] = mu1[side1]
        kbar[side1] = ks[side1]

    F = eng.F
    det = F.SUB[
        F.MUL[kbar[:, 0], kbar[:, 3]], F.MUL[kbar[:, 1], kbar[:, 2]]
    ]
    if (det == 0).any():
        raise SingularMatrix("K-part reduction is singular")
    side_arr = np.where(side0, 0, 1).astype(np.int8)
    return side_arr, n_out, mu_out, kbar, zz
