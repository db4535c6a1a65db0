"""The spherical Hecke operator and its image catalog.

``hecke_t`` is the closed form: a side-0 depth-n term spreads to the
q^w children with the kernel-factor coefficient sum and drops one level
with the expanded carry weight; side 1 mirrors with the roles of the two
pure monomials exchanged.  When the division index exceeds 1, the
depth-dropping representative picks up the inverse-Frobenius twist of
conjugating the digit string through the uniformizer; the w = 1 case
reduces to the familiar formulas.

``hecke_t_oracle`` recomputes the operator through equivariance alone:
``T([h, v]) = h . T([base, v])`` with the base at depth 0, exercising the
full canonicalization/action machinery and sharing no code path with the
closed form beyond the depth-0 formulas.

"Modulo image" questions are decided against explicit verified witnesses
(preimage, target, scalar): every constructor runs the operator and
asserts the identity, so a broken formula surfaces as ``CatalogBroken``
rather than a silently wrong span.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import linalg
from .accel import kernels
from .errors import CatalogBroken, InvalidExponent, WindowExceeded
from .gf import vandermonde
from .induction import (
    CosetRep,
    GroupElement,
    InductionElement,
    InductionSpace,
    act,
    alpha_rep,
    enumerate_strings,
    identity_rep,
    support_filtration,
)
from .od import RingParams
from .weight import WeightVector, expand_pair_tensor


# ---------------------------------------------------------------------------
# Closed form.
# ---------------------------------------------------------------------------

def _lambda_coefficient_matrix(space: InductionSpace, side: int) -> np.ndarray:
    """Coefficient of the depth-raising child with top digit lam.

    Side 0: the child inherits sum_i c_i (-lam)^i on the pure-x line.
    Side 1: the lam != 0 children arise from the inverted-digit coset
    representatives, which leaves sum_i c_i (-1)^(r+i) lam^(r*E - i) on
    the pure-y line, where E is the integer exponent realizing the
    inverse pi-conjugation Frobenius (E = 1 when w = 1, recovering the
    familiar (-lam)^(r-i)); the lam = 0 child carries the top
    coefficient alone.
    """
    key = ("lam_coeff", side)
    cache = space.__dict__.setdefault("_hecke_cache", {})
    if key in cache:
        return cache[key]
    F = space.field
    wp = space.weight
    Q = F.order
    P = np.zeros((Q, wp.dim), dtype=np.int16)
    iw = wp.i_weights()
    if side == 0:
        for lam in range(Q):
            neg = int(F.NEG[lam])
            for idx in range(wp.dim):
                P[lam, idx] = F.pow_int(neg, iw[idx])
    else:
        E = F.p ** ((-F.f * space.ring.twist) % F.deg) if F.deg > 1 else 1
        rE = wp.r * E
        sign_r = int(F.pow_int(F.NEG[1], wp.r))
        P[0, wp.top_index] = 1
        for lam in range(1, Q):
            for idx in range(wp.dim):
                i = iw[idx]
                sgn = F.MUL[sign_r, F.pow_int(F.NEG[1], i)]
                P[lam, idx] = F.MUL[sgn, F.pow_int(lam, rE - i)]
    cache[key] = P
    return P


def _carry_expansion_matrix(space: InductionSpace, side: int) -> np.ndarray:
    """Row m: expansion of tensor (m^(p^j) x + y)^(r_j) (side 0) or
    (x + m^(p^j) y)^(r_j) (side 1)."""
    key = ("carry_exp", side)
    cache = space.__dict__.setdefault("_hecke_cache", {})
    if key in cache:
        return cache[key]
    F = space.field
    wp = space.weight
    Q = F.order
    out = np.zeros((Q, wp.dim), dtype=np.int16)
    for m in range(Q):
        powers = [int(F.FROBP[j % F.deg, m]) for j in range(F.deg)]
        if side == 0:
            v = expand_pair_tensor(wp, powers, [1] * F.deg)
        else:
            v = expand_pair_tensor(wp, [1] * F.deg, powers)
        out[m] = v.coeffs
    cache[key] = out
    return out


def hecke_t(f: InductionElement) -> InductionElement:
    """Closed-form action of the spherical Hecke operator."""
    space = f.space
    F = space.field
    wp = space.weight
    Q = F.order
    dim = wp.dim
    pieces = []

    for (side, n), sub in sorted(support_filtration(f).items()):
        T = sub.term_count
        # -- depth-increasing part: Q children per term --------------------
        P = _lambda_coefficient_matrix(space, side)
        scal = kernels().gf_matmul(
            np.ascontiguousarray(sub.coeffs),
            np.ascontiguousarray(P.T),
            F.MUL,
            F.ADD,
        )  # [T, Q]
        lam = np.arange(Q, dtype=np.int16)
        mu_up = np.zeros((T * Q, n + 1), dtype=np.int16)
        if n:
            mu_up[:, :n] = np.repeat(sub.mu[:, :n], Q, axis=0)
        mu_up[:, n] = np.tile(lam, T)
        co_up = np.zeros((T * Q, dim), dtype=np.int16)
        col = 0 if side == 0 else wp.top_index
        co_up[:, col] = scal.reshape(-1)
        pieces.append(
            (
                np.full(T * Q, side, dtype=np.int8),
                np.full(T * Q, n + 1, dtype=np.int16),
                mu_up,
                co_up,
            )
        )
        # -- depth-decreasing part -----------------------------------------
        sel = wp.top_index if side == 0 else 0
        c_sel = sub.coeffs[:, sel]
        if n == 0:
            # [Id, v] -> [alpha, c_top * pure_y];  [alpha, v] -> [Id, c_0 * pure_x]
            co_dn = np.zeros((T, dim), dtype=np.int16)
            col_dn = wp.top_index if side == 0 else 0
            co_dn[:, col_dn] = c_sel
            pieces.append(
                (
                    np.full(T, 1 - side, dtype=np.int8),
                    np.zeros(T, dtype=np.int16),
                    np.zeros((T, 1), dtype=np.int16),
                    co_dn,
                )
            )
        else:
            # The parent rep carries one right uniformizer power, but the
            # rotation intertwiner acts before the K-part and the kernel
            # weights are pure-monomial lines, which it fixes.
            EXP = _carry_expansion_matrix(space, side)
            m_top = sub.mu[:, n - 1]
            weights = F.MUL[c_sel[:, None], EXP[m_top.astype(np.int64)]]
            mu_dn = sub.mu[:, : n - 1] if n > 1 else np.zeros((T, 1), np.int16)
            pieces.append(
                (
                    np.full(T, side, dtype=np.int8),
                    np.full(T, n - 1, dtype=np.int16),
                    mu_dn.astype(np.int16),
                    weights,
                )
            )

    if not pieces:
        return InductionElement.zero(space)
    width = max(p[2].shape[1] for p in pieces)
    from .induction import _pad_width

    return InductionElement.build(
        space,
        np.concatenate([p[0] for p in pieces]),
        np.concatenate([p[1] for p in pieces]),
        np.concatenate([_pad_width(p[2], width) for p in pieces]),
        np.concatenate([p[3] for p in pieces]),
    )


# ---------------------------------------------------------------------------
# Equivariance oracle.
# ---------------------------------------------------------------------------

def _depth0_image(space: InductionSpace, side: int, wv: WeightVector) -> InductionElement:
    """T([Id, v]) or T([alpha, v]) straight from the depth-0 formulas."""
    base = identity_rep() if side == 0 else alpha_rep()
    single = InductionElement.single(space, base, wv)
    return hecke_t(single)


def hecke_t_oracle(f: InductionElement) -> InductionElement:
    """T through equivariance: every term is translated from depth 0.

    For a side-0 term, [g, v] = g . [Id, v]; for side 1,
    [g, v] = h . [alpha, v] with h the representative matrix with its
    lowest uniformizer power peeled off the last column.
    """
    space = f.space
    ring = space.ring
    out = InductionElement.zero(space)
    for rep, wv in f.terms():
        base_side = rep.side
        img = _depth0_image(space, base_side, wv)
        if rep.side == 0:
            h = rep.matrix(ring)
        else:
            mu_od = ring.from_digits(list(rep.mu) + [0] * (ring.ndigits - rep.n))
            h = GroupElement(
                ring, ring.one(), ring.zero(), mu_od.shift_up(1), ring.pi(rep.n)
            )
        out = out + act(h, img)
    return out


# ---------------------------------------------------------------------------
# Witness catalog.
# ---------------------------------------------------------------------------

@dataclass
class PreimageWitness:
    """A verified membership certificate: hecke_t(preimage) = scalar * target."""

    label: str
    target: InductionElement
    preimage: InductionElement
    scalar: int = 1

    def __post_init__(self):
        got = hecke_t(self.preimage)
        if got != self.target.scale(self.scalar):
            raise CatalogBroken(
                f"witness {self.label!r} failed verification "
                f"(operator image does not match scalar * target)"
            )

    def verify(self) -> bool:
        if hecke_t(self.preimage) != self.target.scale(self.scalar):
            raise CatalogBroken(f"witness {self.label!r} failed re-verification")
        return True


@dataclass
class SpanTarget:
    """A bare allowed direction (no operator preimage), used where an
    invariance statement quotients by a module span rather than the image."""

    label: str
    target: InductionElement


def digit_exponents_le(space: InductionSpace, k: int) -> bool:
    """Base-p digits of k bounded by the weight exponents."""
    p = space.field.p
    for r_j in space.weight.r_vec:
        if k % p > r_j:
            return False
        k //= p
    return k == 0


def reduce_exponent(Q: int, k: int) -> int:
    """Representative of k in [0, Q-1] acting identically on all field values."""
    if k <= 0:
        return max(k, 0)
    return 1 + (k - 1) % (Q - 1)


def _weighted_sum(space: InductionSpace, n: int, coeff_fn, weight_vec) -> InductionElement:
    Q = space.field.order
    mu = enumerate_strings(Q, n)
    T = mu.shape[0]
    co = np.zeros((T, space.weight.dim), dtype=np.int16)
    scal = coeff_fn(mu)
    co[:] = space.field.MUL[scal[:, None], weight_vec.coeffs[None, :]]
    return InductionElement.build(
        space,
        np.zeros(T, dtype=np.int8),
        np.full(T, n, dtype=np.int16),
        mu if n else np.zeros((T, 1), np.int16),
        co,
    )


def monomial_coeff_fn(space: InductionSpace, evec):
    """mu -> prod_i mu_i^(e_i) as a vectorized coefficient function."""
    V = vandermonde(space.field)
    F = space.field

    def fn(mu):
        out = np.ones(mu.shape[0], dtype=np.int16)
        for i, e in enumerate(evec):
            if e:
                out = F.MUL[out, V[mu[:, i].astype(np.int64), e]]
        return out

    return fn


def witness_s(space: InductionSpace, n: int, k: int) -> PreimageWitness:
    """s_n^k with k-digits inside the weight box and k != r; n >= 1."""
    from .induction import make_s

    wp = space.weight
    if n < 1:
        raise InvalidExponent("witnesses start at depth 1")
    if k == wp.r or not digit_exponents_le(space, k):
        raise InvalidExponent(f"exponent {k} has no elementary preimage")
    p = space.field.p
    kdigs = []
    kk = k
    for _ in range(space.field.deg):
        kdigs.append(kk % p)
        kk //= p
    v_k = wp.basis_vector(tuple(kdigs))
    sign = space.field.pow_int(space.field.NEG[1], k)
    pre = _weighted_sum(
        space, n - 1, lambda mu: np.full(mu.shape[0], sign, dtype=np.int16), v_k
    )
    return PreimageWitness(f"s_{n}^{k}", make_s(space, n, k), pre)


def witness_weighted(space: InductionSpace, n: int, evec) -> PreimageWitness:
    """Digit-weighted target sum_mu [g0(n,mu), prod mu_i^(e_i) pure_x].

    The top exponent e_{n-1} must have digits inside the weight box and
    differ from r; lower exponents are free in [0, Q-1].  These realize
    the translated images that depth > 1 invariance differences land in.
    """
    wp = space.weight
    if n < 1:
        raise InvalidExponent("witnesses start at depth 1")
    evec = tuple(int(e) for e in evec)
    if len(evec) != n:
        raise InvalidExponent("exponent vector must have length n")
    k = evec[-1]
    if k == wp.r or not digit_exponents_le(space, k):
        raise InvalidExponent(f"top exponent {k} has no elementary preimage")
    p = space.field.p
    kdigs = []
    kk = k
    for _ in range(space.field.deg):
        kdigs.append(kk % p)
        kk //= p
    v_k = wp.basis_vector(tuple(kdigs))
    F = space.field
    target = _weighted_sum(space, n, monomial_coeff_fn(space, evec), wp.pure_x())
    sign = F.pow_int(F.NEG[1], k)
    lower = monomial_coeff_fn(space, evec[:-1])

    def pre_fn(mu):
        return F.MUL[sign, lower(mu)]

    pre = _weighted_sum(space, n - 1, pre_fn, v_k)
    return PreimageWitness(f"wsum_{n}^{evec}", target, pre)


def witness_s_r(space: InductionSpace, n: int) -> PreimageWitness:
    """s_n^r for n >= 2; the dropped level cancels by the power-sum identity."""
    from .induction import make_s

    wp = space.weight
    Q = space.field.order
    if n < 2:
        raise InvalidExponent("the pure-y preimage needs depth >= 2")
    if wp.r == Q - 1:
        raise InvalidExponent("r = q^w - 1 leaves a surviving tail")
    F = space.field
    pre = _weighted_sum(
        space, n - 1, lambda mu: np.ones(mu.shape[0], dtype=np.int16), wp.pure_y()
    )
    scalar = F.pow_int(F.NEG[1], wp.r)
    return PreimageWitness(f"s_{n}^r", make_s(space, n, wp.r), pre, scalar=int(scalar))


def witness_s1r_alpha(space: InductionSpace) -> PreimageWitness:
    """T[Id, pure_y] = (-1)^r s_1^r + [alpha, pure_y]: the composite target."""
    from .induction import make_s

    wp = space.weight
    F = space.field
    sign = int(F.pow_int(F.NEG[1], wp.r))
    target = make_s(space, 1, reduce_exponent(F.order, wp.r)).scale(sign) + (
        InductionElement.single(space, alpha_rep(), wp.pure_y())
    )
    pre = InductionElement.single(space, identity_rep(), wp.pure_y())
    return PreimageWitness("s_1^r+alpha", target, pre)


def t_related_targets(space: InductionSpace, n: int, s: int):
    """Allowed directions for the t-element invariance at e = 1.

    The carry polynomial contributes monomial exponents m * p^(wf+s-1)
    (reduced mod q^w - 1); directions whose digits stay inside the weight
    box come with verified preimages, the rest enter as bare span targets.
    """
    from .induction import make_s

    F = space.field
    Q = F.order
    deg = F.deg
    out = []
    for m in range(1, F.p):
        k = reduce_exponent(Q, m * F.p ** ((deg + s - 1) % deg))
        if k != space.weight.r and digit_exponents_le(space, k):
            out.append(witness_s(space, n, k))
        else:
            out.append(SpanTarget(f"t_span_s_{n}^{k}", make_s(space, n, k)))
    return out


def preimage_catalog(space: InductionSpace, n: int, kind: str, k: int | None = None, s: int | None = None):
    """Catalog entries by kind; see the individual constructors."""
    if kind == "s":
        return witness_s(space, n, k)
    if kind == "s_r":
        return witness_s_r(space, n)
    if kind == "s_1_r_plus_alpha":
        return witness_s1r_alpha(space)
    if kind == "t_related":
        return t_related_targets(space, n, s)
    raise InvalidExponent(f"unknown catalog kind {kind!r}")


def beta_translate(item, beta_elt_: GroupElement):
    """The side-1 twin of a catalog item (re-verified for witnesses)."""
    if isinstance(item, PreimageWitness):
        return PreimageWitness(
            "beta:" + item.label,
            act(beta_elt_, item.target),
            act(beta_elt_, item.preimage),
            item.scalar,
        )
    return SpanTarget("beta:" + item.label, act(beta_elt_, item.target))


# ---------------------------------------------------------------------------
# Span reduction.
# ---------------------------------------------------------------------------

def stack_coords(elements):
    """Dense coordinate matrix over the union of nonzero (rep, monomial) keys.

    Returns (keys [n_keys], matrix [n_keys, n_elements]).
    """
    assert elements
    space = elements[0].space
    dim = space.weight.dim
    Q = space.field.order
    from .induction import _pack_keys, _pad_width

    width = max(max(e.mu.shape[1] for e in elements), 1)
    all_keys = []
    per_elem = []
    for e in elements:
        rk = _pack_keys(Q, e.side, e.n, _pad_width(e.mu, width)).astype(np.int64)
        mono = np.arange(dim, dtype=np.int64)
        keys = (rk[:, None] * dim + mono[None, :]).reshape(-1)
        vals = e.coeffs.reshape(-1)
        nz = vals != 0
        all_keys.append(keys[nz])
        per_elem.append((keys[nz], vals[nz]))
    union = np.unique(np.concatenate(all_keys)) if all_keys else np.zeros(0, np.int64)
    mat = np.zeros((union.shape[0], len(elements)), dtype=np.int16)
    for col, (keys, vals) in enumerate(per_elem):
        pos = np.searchsorted(union, keys)
        mat[pos, col] = vals
    return union, mat


@dataclass
class ReduceResult:
    coefficients: np.ndarray | None
    labels: list
    residual_is_zero: bool

    @property
    def in_span(self) -> bool:
        return self.coefficients is not None


def im_t_reduce(f: InductionElement, items, window: int | None = None) -> ReduceResult:
    """Express f over the catalog targets by exact linear algebra.

    ``items`` is a list of PreimageWitness / SpanTarget entries; ``window``
    bounds the support depth (default: max depth of f plus 1).
    """
    space = f.space
    labels = [it.label for it in items]
    if f.is_zero():
        return ReduceResult(np.zeros(len(items), dtype=np.int16), labels, True)
    win = window if window is not None else f.max_depth() + 1
    for e in [f] + [it.target for it in items]:
        if e.term_count and int(e.n.max()) > win:
            raise WindowExceeded(f"support depth exceeds window {win}")
    if not items:
        return ReduceResult(None, labels, False)
    _, mat = stack_coords([it.target for it in items] + [f])
    A = mat[:, :-1]
    b = mat[:, -1]
    x = linalg.solve(space.field, A, b)
    if x is None:
        return ReduceResult(None, labels, False)
    return ReduceResult(x, labels, True)


def combination(items, coeffs) -> InductionElement:
    out = None
    for it, c in zip(items, coeffs):
        piece = it.target.scale(int(c))
        out = piece if out is None else out + piece
    return out


# ---------------------------------------------------------------------------
# Window kernel of the operator (injectivity probe).
# ---------------------------------------------------------------------------

def window_kernel_dimension(space: InductionSpace, depth: int) -> int:
    """Exact kernel dimension of the operator on the depth-window space.

    Basis: all [rep, monomial] with rep depth <= ``depth`` on both sides.
    Sparse column elimination over the coded field.
    """
    F = space.field
    wp = space.weight
    Q = F.order
    pivots: dict[int, dict[int, int]] = {}
    kernel_dim = 0
    from .induction import _pack_keys

    for side in (0, 1):
        for n in range(depth + 1):
            mus = enumerate_strings(Q, n)
            for row in mus:
                rep = CosetRep(side, n, tuple(int(v) for v in row[:n]))
                for idx in range(wp.dim):
                    wv = WeightVector(
                        wp, np.eye(wp.dim, dtype=np.int16)[idx]
                    )
                    img = hecke_t(InductionElement.single(space, rep, wv))
                    col = _sparse_of(img)
                    col = _eliminate(F, pivots, col)
                    if col:
                        lead = min(col)
                        inv = F.inv_code(col[lead])
                        col = {k: int(F.MUL[inv, v]) for k, v in col.items()}
                        pivots[lead] = col
                    else:
                        kernel_dim += 1
    return kernel_dim


def _sparse_of(e: InductionElement) -> dict[int, int]:
    from .induction import _pack_keys

    Q = e.space.field.order
    dim = e.space.weight.dim
    rk = _pack_keys(Q, e.side, e.n, e.mu).astype(np.int64)
    out = {}
    for i in range(e.term_count):
        base = int(rk[i]) * dim
        for j in range(dim):
            v = int(e.coeffs[i, j])
            if v:
                out[base + j] = v
    return out


def _eliminate(F, pivots, col):
    while col:
        lead = min(col)
        piv = pivots.get(lead)
        if piv is None:
            return col
        factor = col[lead]
        for k, v in piv.items():
            newv = int(F.SUB[col.get(k, 0), F.MUL[factor, v]])
            if newv:
                col[k] = newv
            elif k in col:
                del col[k]
    return col
