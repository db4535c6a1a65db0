"""Compact-induction elements over the tree of cosets.

Vertices of the coset tree are encoded by canonical representatives:
side 0 is ``(pi^n  mu; 0  1)`` and side 1 is ``(1  0; pi mu  pi^(n+1))``
with ``mu`` a depth-n digit string; ``(0, 0, ())`` is the identity and
``(1, 0, ())`` is ``alpha = diag(1, pi)``.  An induction element is a
finitely supported sum of ``[rep, weight-vector]`` terms, stored as
parallel arrays sorted by a packed rep key (exact equality is array
equality; no hashing of field data).

``canonicalize`` factors an invertible 2x2 matrix over the ring as
``pi^zz * rep * k`` with ``k`` integral and invertible mod pi.  The
left action routes every term through the batched canonicalization and
a cached matrix of the weight action of the K-part's reduction.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from . import _batchops
from .accel import kernels
from .errors import (
    InvalidExponent,
    InvalidWeight,
    ParamMismatch,
    PrecisionExceeded,
    SingularMatrix,
)
from .gf import vandermonde
from .od import DigitString, ODElement, RingParams
from .weight import ResidueMatrix, WeightParams, WeightVector, sigma_act, sigma_matrix

MAXN = 32


class InductionSpace:
    """Shared ring and weight parameters for one induction module.

    Right uniformizer-power cosets act on weights through the rotation
    intertwiner ``phi``: conjugation by the uniformizer twists the residue
    matrix by a q^t-Frobenius, and phi is the tensor-slot rotation
    satisfying ``phi sigma(k) phi^-1 = sigma(k-twisted)``.  It exists only
    when the exponent vector is rotation invariant, which is therefore a
    constructability requirement of the induction (for w = 1 the rotation
    is trivial and nothing is constrained).
    """

    def __init__(self, ring: RingParams, weight: WeightParams):
        if ring.field is not weight.field and ring.field != weight.field:
            raise ParamMismatch("ring and weight must share the residue field")
        self.ring = ring
        self.weight = weight
        self.field = ring.field
        self._action_cache: OrderedDict = OrderedDict()
        from .weight import pi_rotation_permutation

        shift = (self.field.f * ring.twist) % self.field.deg
        base = pi_rotation_permutation(weight, shift)
        self.phi_order = 1
        perm = base
        ident = np.arange(weight.dim, dtype=np.int64)
        perms = [ident]
        while not np.array_equal(perm, ident):
            perms.append(perm.copy())
            perm = perm[base]
            self.phi_order += 1
        self.phi_perms = np.stack(perms)  # [ord, dim]

    def __repr__(self):
        return f"InductionSpace(q^w={self.field.order}, r={self.weight.r_vec}, N={self.ring.ndigits}, backend={self.ring.backend})"


@dataclass(frozen=True)
class CosetRep:
    """Canonical coset representative (a tree vertex)."""

    side: int
    n: int
    mu: tuple

    def __post_init__(self):
        if self.side not in (0, 1):
            raise ValueError("side must be 0 or 1")
        if len(self.mu) != self.n:
            raise ValueError("mu must have exactly n digits")

    def digit_string(self, field) -> DigitString:
        return DigitString(field, self.mu)

    def matrix(self, ring: RingParams) -> "GroupElement":
        mu_od = ring.from_digits(list(self.mu) + [0] * (ring.ndigits - self.n))
        if self.side == 0:
            return GroupElement(ring, ring.pi(self.n), mu_od, ring.zero(), ring.one())
        return GroupElement(
            ring, ring.one(), ring.zero(), mu_od.shift_up(1), ring.pi(self.n + 1)
        )

    def key(self, Q: int) -> int:
        k = self.side * (MAXN + 1) + self.n
        for d in self.mu:
            k = k * Q + d
        return k

    def __repr__(self):
        return f"g{self.side}({self.n},{list(self.mu)})"


def identity_rep() -> CosetRep:
    return CosetRep(0, 0, ())


def alpha_rep() -> CosetRep:
    return CosetRep(1, 0, ())


class GroupElement:
    """2x2 invertible matrix over the ring, with a global pi-power factor."""

    __slots__ = ("ring", "a", "b", "c", "d", "pi_power")

    def __init__(self, ring, a, b, c, d, pi_power: int = 0):
        self.ring = ring
        self.a, self.b, self.c, self.d = a, b, c, d
        self.pi_power = pi_power

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        if self.ring is not other.ring and not self.ring.same(other.ring):
            raise ParamMismatch("group elements over different rings")
        # (pi^z1 M1)(pi^z2 M2) = pi^(z1+z2) (pi^-z2 M1 pi^z2) M2.
        z2 = other.pi_power
        a, b, c, d = self.entries()
        if z2:
            a, b, c, d = (e.twist_conj(-z2) for e in (a, b, c, d))
        oa, ob, oc, od_ = other.entries()
        return GroupElement(
            self.ring,
            a * oa + b * oc,
            a * ob + b * od_,
            c * oa + d * oc,
            c * ob + d * od_,
            self.pi_power + z2,
        )

    def fingerprint(self):
        return (
            tuple((e.digits, e.valid_to) for e in self.entries()),
            self.pi_power,
        )

    def __repr__(self):
        return f"GE(pi^{self.pi_power} * [{self.a}, {self.b}; {self.c}, {self.d}])"


def identity_elt(ring: RingParams) -> GroupElement:
    return GroupElement(ring, ring.one(), ring.zero(), ring.zero(), ring.one())


def alpha_elt(ring: RingParams) -> GroupElement:
    return GroupElement(ring, ring.one(), ring.zero(), ring.zero(), ring.pi(1))


def beta_elt(ring: RingParams) -> GroupElement:
    return GroupElement(ring, ring.zero(), ring.one(), ring.pi(1), ring.zero())


def w_elt(ring: RingParams) -> GroupElement:
    return GroupElement(ring, ring.zero(), ring.one(), ring.one(), ring.zero())


def diag_elt(ring: RingParams, a: ODElement, d: ODElement) -> GroupElement:
    return GroupElement(ring, a, ring.zero(), ring.zero(), d)


def upper_elt(ring: RingParams, b: ODElement) -> GroupElement:
    """(1 b; 0 1)."""
    return GroupElement(ring, ring.one(), b, ring.zero(), ring.one())


def lower_elt(ring: RingParams, c: ODElement) -> GroupElement:
    """(1 0; pi*c 1)."""
    return GroupElement(ring, ring.one(), ring.zero(), c.shift_up(1), ring.one())


# ---------------------------------------------------------------------------
# Scalar canonicalization (reference implementation).
# ---------------------------------------------------------------------------

def canonicalize(g: GroupElement):
    """Factor g = rep * k * pi^zz; returns (CosetRep, k: GroupElement, zz).

    The normalizing pi-power must sit on the *right* (the quotient is by
    right KZZ'-cosets); pulling it through the matrix twists every digit
    by a power of the q-Frobenius, so the stored left pi_power is first
    conjugated in and the minimal valuation is then divided out on the
    right.  Side selection: the bottom row contains a unit iff the vertex
    lies on side 0 (ties go to no column swap when the corner entry is
    already a unit).  The representative's data is read off Schur
    complements and digit truncations; k is assembled from the explicit
    inverse of the representative.
    """
    ring = g.ring
    entries = tuple(
        e.twist_conj(g.pi_power) if g.pi_power else e for e in g.entries()
    )
    bounds = [e.valuation_bound() for e in entries]
    det_vals = [v for v, d in bounds if d]
    if not det_vals:
        raise PrecisionExceeded("no entry valuation is determined")
    vmin = min(det_vals)
    if vmin is math.inf:
        raise SingularMatrix("zero matrix")
    for v, d in bounds:
        if not d and v < vmin:
            raise PrecisionExceeded("minimal valuation undetermined")
    A, B, C, D = (e.div_pi_right(vmin) for e in entries)
    zz = g.pi_power + vmin
    if C.lead_nonzero() or D.lead_nonzero():
        swapped = not D.lead_nonzero()
        if swapped:
            A, B = B, A
            C, D = D, C
        Dinv = D.inverse()
        R = B * Dinv
        A2 = A - R * C
        n = A2.valuation()
        if n is math.inf:
            raise SingularMatrix("degenerate columns")
        mu = R.truncate(n)
        mu_od = ring.from_digit_string(mu)
        k11 = (A - mu_od * C).shift_down(n)
        k12 = (B - mu_od * D).shift_down(n)
        k21, k22 = C, D
        if swapped:
            k11, k12 = k12, k11
            k21, k22 = k22, k21
        rep = CosetRep(0, n, mu.digits)
    else:
        swapped = not A.lead_nonzero()
        if swapped:
            A, B = B, A
            C, D = D, C
        Ainv = A.inverse()
        D2 = D - C * (Ainv * B)
        m = D2.valuation()
        if m is math.inf:
            raise SingularMatrix("degenerate columns")
        n = m - 1
        R = (C * Ainv).shift_down(1)
        mu = R.truncate(n)
        pim = ring.from_digit_string(mu).shift_up(1)
        k11, k12 = A, B
        k21 = (C - pim * A).shift_down(n + 1)
        k22 = (D - pim * B).shift_down(n + 1)
        if swapped:
            k11, k12 = k12, k11
            k21, k22 = k22, k21
        rep = CosetRep(1, n, mu.digits)
    k = GroupElement(ring, k11, k12, k21, k22)
    F = ring.field
    det = F.SUB[F.MUL[k11.residue(), k22.residue()], F.MUL[k12.residue(), k21.residue()]]
    if det == 0:
        raise SingularMatrix("K-part reduction is singular")
    return rep, k, zz


def kbar(k: GroupElement) -> ResidueMatrix:
    """Reduction of an integral matrix mod pi."""
    return ResidueMatrix(
        k.ring.field, k.a.residue(), k.b.residue(), k.c.residue(), k.d.residue()
    )


# ---------------------------------------------------------------------------
# Induction elements (structure-of-arrays, canonically sorted).
# ---------------------------------------------------------------------------

class InductionElement:
    __slots__ = ("space", "side", "n", "mu", "coeffs", "_repsig")

    def __init__(self, space, side, n, mu, coeffs):
        self.space = space
        self.side = side
        self.n = n
        self.mu = mu
        self.coeffs = coeffs
        self._repsig = None

    # -- construction ---------------------------------------------------------

    @staticmethod
    def zero(space: InductionSpace) -> "InductionElement":
        dim = space.weight.dim
        return InductionElement(
            space,
            np.zeros(0, dtype=np.int8),
            np.zeros(0, dtype=np.int16),
            np.zeros((0, 1), dtype=np.int16),
            np.zeros((0, dim), dtype=np.int16),
        )

    @staticmethod
    def build(space, side, n, mu, coeffs) -> "InductionElement":
        """Normalize raw term arrays: sort, merge, drop zeros."""
        side = np.asarray(side, dtype=np.int8)
        n = np.asarray(n, dtype=np.int16)
        mu = np.asarray(mu, dtype=np.int16)
        if mu.ndim == 1:
            mu = mu[:, None]
        coeffs = np.asarray(coeffs, dtype=np.int16)
        T = side.shape[0]
        if T == 0:
            return InductionElement.zero(space)
        width = max(int(n.max()), 1) if T else 1
        mu = _pad_width(mu, width)
        keys = _pack_keys(space.field.order, side, n, mu)
        order = np.argsort(keys, kind="stable")
        keys = keys[order]
        side, n, mu, coeffs = side[order], n[order], mu[order], coeffs[order]
        uniq, seg = np.unique(keys, return_inverse=True)
        if uniq.shape[0] != T:
            F = space.field
            coeffs = kernels().segment_sum_gf(
                np.ascontiguousarray(coeffs), seg.astype(np.int64), uniq.shape[0], F.ADD
            )
            first = np.searchsorted(keys, uniq)
            side, n, mu = side[first], n[first], mu[first]
        keep = coeffs.any(axis=1)
        side, n, mu, coeffs = side[keep], n[keep], mu[keep], coeffs[keep]
        if side.shape[0]:
            width = max(int(n.max()), 1)
            mu = np.ascontiguousarray(mu[:, :width])
        else:
            mu = np.zeros((0, 1), dtype=np.int16)
        return InductionElement(space, side, n, mu, np.ascontiguousarray(coeffs))

    @staticmethod
    def single(space, rep: CosetRep, wv: WeightVector) -> "InductionElement":
        width = max(rep.n, 1)
        mu = np.zeros((1, width), dtype=np.int16)
        mu[0, : rep.n] = rep.mu
        return InductionElement.build(
            space,
            np.array([rep.side], dtype=np.int8),
            np.array([rep.n], dtype=np.int16),
            mu,
            wv.coeffs[None, :],
        )

    @staticmethod
    def from_terms(space, terms) -> "InductionElement":
        sides, ns, mus, cs = [], [], [], []
        for rep, wv in terms:
            sides.append(rep.side)
            ns.append(rep.n)
            mus.append(rep.mu)
            cs.append(wv.coeffs)
        if not sides:
            return InductionElement.zero(space)
        width = max(max(ns), 1)
        mu = np.zeros((len(sides), width), dtype=np.int16)
        for i, m in enumerate(mus):
            mu[i, : len(m)] = m
        return InductionElement.build(space, sides, ns, mu, np.stack(cs))

    # -- views ------------------------------------------------------------------

    @property
    def term_count(self) -> int:
        return self.side.shape[0]

    def is_zero(self) -> bool:
        return self.term_count == 0

    def reps(self):
        for i in range(self.term_count):
            yield CosetRep(
                int(self.side[i]),
                int(self.n[i]),
                tuple(int(v) for v in self.mu[i, : self.n[i]]),
            )

    def terms(self):
        wp = self.space.weight
        for i, rep in enumerate(self.reps()):
            yield rep, WeightVector(wp, self.coeffs[i].copy())

    def rep_signature(self):
        if self._repsig is None:
            self._repsig = (
                self.side.tobytes(),
                self.n.tobytes(),
                self.mu.tobytes(),
                self.mu.shape,
            )
        return self._repsig

    def max_depth(self) -> int:
        return int(self.n.max()) if self.term_count else 0

    # -- algebra ----------------------------------------------------------------

    def _check(self, other):
        if self.space is not other.space:
            raise ParamMismatch("elements from different induction spaces")

    def __add__(self, other: "InductionElement") -> "InductionElement":
        self._check(other)
        w = max(self.mu.shape[1], other.mu.shape[1], 1)
        return InductionElement.build(
            self.space,
            np.concatenate([self.side, other.side]),
            np.concatenate([self.n, other.n]),
            np.concatenate([_pad_width(self.mu, w), _pad_width(other.mu, w)]),
            np.concatenate([self.coeffs, other.coeffs]),
        )

    def __neg__(self):
        F = self.space.field
        return InductionElement(self.space, self.side, self.n, self.mu, F.NEG[self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "InductionElement":
        code = c.code if hasattr(c, "code") else int(c)
        F = self.space.field
        if code == 0:
            return InductionElement.zero(self.space)
        return InductionElement(self.space, self.side, self.n, self.mu, F.MUL[code, self.coeffs])

    def __eq__(self, other):
        if not isinstance(other, InductionElement):
            return NotImplemented
        if self.space is not other.space:
            return False
        if self.term_count != other.term_count:
            return False
        w = max(self.mu.shape[1], other.mu.shape[1], 1)
        return (
            np.array_equal(self.side, other.side)
            and np.array_equal(self.n, other.n)
            and np.array_equal(_pad_width(self.mu, w), _pad_width(other.mu, w))
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self):  # pragma: no cover
        return hash(self.rep_signature())

    def __repr__(self):
        return f"Ind({self.term_count} terms, depth<={self.max_depth()})"


def _pad_width(mu: np.ndarray, width: int) -> np.ndarray:
    if mu.shape[1] >= width:
        return mu
    out = np.zeros((mu.shape[0], width), dtype=np.int16)
    out[:, : mu.shape[1]] = mu
    return out


def _pack_keys(Q, side, n, mu):
    width = mu.shape[1]
    if (MAXN + 1) * 2 * (Q ** width) >= (1 << 62):
        raise InvalidExponent("coset key packing overflow; reduce depth")
    key = side.astype(np.int64) * (MAXN + 1) + n.astype(np.int64)
    for i in range(width):
        key = key * Q + mu[:, i].astype(np.int64)
    return key


# ---------------------------------------------------------------------------
# The left action.
# ---------------------------------------------------------------------------

def _rep_digit_rows(space, side, n, mu, width):
    """Digit rows of the four entries of the rep matrices."""
    T = side.shape[0]
    N = space.ring.ndigits
    need = int(n.max()) + 2 if T else 2
    if need > N:
        raise PrecisionExceeded(f"rep depth needs {need} digits, ring has {N}")
    rows_a = np.zeros((T, N), dtype=np.int16)
    rows_b = np.zeros((T, N), dtype=np.int16)
    rows_c = np.zeros((T, N), dtype=np.int16)
    rows_d = np.zeros((T, N), dtype=np.int16)
    s0 = side == 0
    s1 = ~s0
    ar = np.arange(T)
    # side 0: (pi^n, mu; 0, 1)
    rows_a[ar[s0], n[s0].astype(np.int64)] = 1
    rows_b[s0, :width] = mu[s0]
    rows_d[s0, 0] = 1
    # side 1: (1, 0; pi*mu, pi^(n+1))
    rows_a[s1, 0] = 1
    rows_c[s1, 1 : width + 1] = mu[s1]
    rows_d[ar[s1], n[s1].astype(np.int64) + 1] = 1
    return rows_a, rows_b, rows_c, rows_d


def coset_action_table(space: InductionSpace, g: GroupElement, element: InductionElement):
    """Canonical data of g * rep for every rep of the element.

    Returns (side', n', mu' [T, ncap], kbar [T, 4]); cached on
    (g, rep-array signature) so sweeps over many functionals of the same
    support pay for the coset arithmetic once.
    """
    key = (g.fingerprint(), element.rep_signature())
    cache = space._action_cache
    hit = cache.get(key)
    if hit is not None:
        cache.move_to_end(key)
        return hit
    ring = space.ring
    T = element.term_count
    eng = _batchops.make_engine(ring, T)
    width = element.mu.shape[1]
    rows = _rep_digit_rows(space, element.side, element.n, element.mu, width)
    A, B, C, D = (eng.from_digit_rows(r) for r in rows)
    GA, GB, GC, GD = (eng.const(e) for e in g.entries())
    E11 = eng.add(eng.mul(GA, A), eng.mul(GB, C))
    E12 = eng.add(eng.mul(GA, B), eng.mul(GB, D))
    E21 = eng.add(eng.mul(GC, A), eng.mul(GD, C))
    E22 = eng.add(eng.mul(GC, B), eng.mul(GD, D))
    ncap = max(ring.ndigits - 2, 1)
    pi_in = np.full(T, g.pi_power, dtype=np.int64)
    side, n, mu, kb, zz = _batchops.canonicalize_batch(eng, E11, E12, E21, E22, pi_in, ncap)
    table = (side, n.astype(np.int16), mu, kb, zz)
    cache[key] = table
    if len(cache) > 256:
        cache.popitem(last=False)
    return table


def act(g: GroupElement, f: InductionElement) -> InductionElement:
    """Left action of g; right uniformizer powers act through the
    rotation intertwiner (trivially when w = 1)."""
    if f.is_zero():
        return f
    space = f.space
    if not space.ring.same(g.ring):
        raise ParamMismatch("group element over a different ring")
    side, n, mu, kb, zz = coset_action_table(space, g, f)
    F = space.field
    coeffs = np.ascontiguousarray(f.coeffs)
    if space.phi_order > 1:
        perms = space.phi_perms[np.asarray(zz) % space.phi_order]  # [T, dim]
        coeffs = np.take_along_axis(coeffs, perms, axis=1)
        coeffs = np.ascontiguousarray(coeffs)
    packed = (
        (kb[:, 0].astype(np.int64) * F.order + kb[:, 1]) * F.order + kb[:, 2]
    ) * F.order + kb[:, 3]
    uniq, gid = np.unique(packed, return_inverse=True)
    mats = []
    for u in uniq:
        u = int(u)
        d = u % F.order
        u //= F.order
        c = u % F.order
        u //= F.order
        b = u % F.order
        a = u // F.order
        mats.append(sigma_matrix(space.weight, ResidueMatrix(F, a, b, c, d)))
    MATS = np.stack(mats)
    coeffs = kernels().gf_apply_matrix_groups(
        coeffs, gid.astype(np.int64), MATS, F.MUL, F.ADD
    )
    return InductionElement.build(space, side, n, mu, coeffs)


def phi_rotate(space: InductionSpace, wv: WeightVector, power: int) -> WeightVector:
    """Apply the uniformizer intertwiner to a weight vector."""
    if space.phi_order == 1:
        return wv
    perm = space.phi_perms[power % space.phi_order]
    return WeightVector(space.weight, wv.coeffs[perm])


def act_term(g: GroupElement, space, rep: CosetRep, wv: WeightVector):
    """Scalar-path action on a single term (reference for the batch path)."""
    prod = g @ rep.matrix(space.ring)
    rep2, k, zz = canonicalize(prod)
    return rep2, sigma_act(kbar(k), phi_rotate(space, wv, zz))


# ---------------------------------------------------------------------------
# Standard elements and filtrations.
# ---------------------------------------------------------------------------

def enumerate_strings(Q: int, n: int) -> np.ndarray:
    """All of I_n as digit rows [Q^n, n], lowest digit fastest."""
    count = Q**n
    out = np.zeros((count, max(n, 1)), dtype=np.int16)
    codes = np.arange(count, dtype=np.int64)
    for i in range(n):
        out[:, i] = (codes // (Q**i)) % Q
    return out[:, :n] if n else np.zeros((1, 0), dtype=np.int16)


def make_s(space: InductionSpace, n: int, k: int) -> InductionElement:
    """Sum over I_n of [g0(n,mu), mu_{n-1}^k * pure_x], 0^0 = 1."""
    Q = space.field.order
    if k < 0 or k > Q - 1:
        raise InvalidExponent(f"k must lie in [0, {Q - 1}]")
    if n == 0:
        if k > 0:
            raise InvalidExponent("depth 0 admits only k = 0")
        return InductionElement.single(space, identity_rep(), space.weight.pure_x())
    mu = enumerate_strings(Q, n)
    T = mu.shape[0]
    V = vandermonde(space.field)
    coeff_scalar = V[mu[:, n - 1].astype(np.int64), k]
    coeffs = np.zeros((T, space.weight.dim), dtype=np.int16)
    coeffs[:, 0] = coeff_scalar
    return InductionElement.build(
        space,
        np.zeros(T, dtype=np.int8),
        np.full(T, n, dtype=np.int16),
        mu,
        coeffs,
    )


def make_t(space: InductionSpace, n: int, s: int) -> InductionElement:
    """Sum over I_n of [g0(n,mu), x_s^(r_s-1) y_s * prod_{j!=s} x_j^(r_j)]."""
    wp = space.weight
    if s < 0 or s >= space.field.deg:
        raise InvalidExponent(f"s must lie in [0, {space.field.deg - 1}]")
    if wp.r_vec[s] < 1:
        raise InvalidWeight(f"r_{s} = 0 admits no mixed monomial")
    if n < 1:
        raise InvalidExponent("t-elements are defined for depth >= 1")
    Q = space.field.order
    mu = enumerate_strings(Q, n)
    T = mu.shape[0]
    coeffs = np.zeros((T, wp.dim), dtype=np.int16)
    coeffs[:, wp.strides[s]] = 1
    return InductionElement.build(
        space,
        np.zeros(T, dtype=np.int8),
        np.full(T, n, dtype=np.int16),
        mu,
        coeffs,
    )


def support_filtration(f: InductionElement):
    """Partition of the terms by (side, depth); recombining yields f."""
    out = {}
    for s in (0, 1):
        for depth in np.unique(f.n[f.side == s]) if f.term_count else []:
            mask = (f.side == s) & (f.n == depth)
            out[(s, int(depth))] = InductionElement.build(
                f.space, f.side[mask], f.n[mask], f.mu[mask], f.coeffs[mask]
            )
    return out


# ---------------------------------------------------------------------------
# Canonical serialization (stable text form for golden files and reports).
# ---------------------------------------------------------------------------

def serialize(f: InductionElement) -> str:
    """Deterministic text form: sorted reps, sorted exponent tuples,
    every field element rendered as its base-p coefficient vector."""
    F = f.space.field
    wp = f.space.weight
    head = (
        f"# induction p={F.p} f={F.f} w={F.w} r={list(wp.r_vec)} "
        f"modulus={list(F.modulus)}"
    )
    if f.is_zero():
        return head + "\n0\n"
    lines = [head]
    for rep, wv in f.terms():
        mu_txt = ",".join(_fe_txt(F, d) for d in rep.mu)
        parts = []
        for exps, code in sorted(wv.as_dict().items(), key=lambda t: wp.index_of(t[0])):
            e_txt = ",".join(str(e) for e in exps)
            parts.append(f"({e_txt}):{_fe_txt(F, code)}")
        lines.append(f"[{rep.side} {rep.n} {mu_txt}] " + " ".join(parts))
    return "\n".join(lines) + "\n"


def _fe_txt(F, code) -> str:
    return "(" + ",".join(str(int(v)) for v in F.COEFFS[int(code)]) + ")"
