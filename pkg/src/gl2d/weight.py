"""The weight space: a tensor of symmetric powers with its twisted action.

``V = tensor_j Sym^{r_j}`` over the residue field, with basis monomials
``tensor_j x_j^(r_j - i_j) y_j^(i_j)`` indexed by exponent tuples
``0 <= i_j <= r_j``.  Vectors are dense coefficient arrays indexed in
mixed radix with ``i_0`` fastest.  An invertible residue matrix
``(a b; c d)`` acts factorwise through its ``p^j``-power entries:

    x_j -> a^(p^j) x_j + c^(p^j) y_j,   y_j -> b^(p^j) x_j + d^(p^j) y_j.

Binomial coefficients in the expansions are exact integer binomials
reduced mod p, so this module is independent of the digit-product
binomial path and can be tested against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidWeight, SingularMatrix
from .gf import FieldElement, FieldParams


class WeightParams:
    """Exponent box (r_0, ..., r_{deg-1}) with 0 <= r_j <= p-1."""

    def __init__(self, field: FieldParams, r_vec):
        r_vec = tuple(int(r) for r in r_vec)
        if len(r_vec) != field.deg:
            raise InvalidWeight(f"r_vec must have length {field.deg}")
        if any(r < 0 or r > field.p - 1 for r in r_vec):
            raise InvalidWeight("each r_j must lie in [0, p-1]")
        self.field = field
        self.r_vec = r_vec
        self.dim = math.prod(r + 1 for r in r_vec)
        strides = []
        acc = 1
        for r in r_vec:
            strides.append(acc)
            acc *= r + 1
        self.strides = tuple(strides)
        self.r = sum(field.p**j * r for j, r in enumerate(r_vec))
        self.top_index = self.dim - 1  # the pure-y monomial, all i_j = r_j
        self._sigma_cache: dict[tuple, np.ndarray] = {}
        self._exp_tuples = tuple(self.index_to_tuple(i) for i in range(self.dim))
        # i(vec) = sum p^j i_j for each basis index.
        self._i_of_index = tuple(
            sum(field.p**j * e for j, e in enumerate(t)) for t in self._exp_tuples
        )

    def index_of(self, exps) -> int:
        idx = 0
        for j, e in enumerate(exps):
            if e < 0 or e > self.r_vec[j]:
                raise InvalidWeight(f"exponent {e} outside [0, {self.r_vec[j]}]")
            idx += e * self.strides[j]
        return idx

    def index_to_tuple(self, idx: int):
        out = []
        for r in self.r_vec:
            out.append(idx % (r + 1))
            idx //= r + 1
        return tuple(out)

    def exponent_tuples(self):
        return self._exp_tuples

    def i_weights(self):
        """For each basis index, the integer i = sum_j p^j i_j."""
        return self._i_of_index

    def __eq__(self, other):
        return (
            isinstance(other, WeightParams)
            and self.field == other.field
            and self.r_vec == other.r_vec
        )

    def __hash__(self):
        return hash((self.field, self.r_vec))

    def __repr__(self):
        return f"WeightParams(r_vec={self.r_vec})"

    # -- constructors ---------------------------------------------------------

    def zero(self) -> "WeightVector":
        return WeightVector(self, np.zeros(self.dim, dtype=np.int16))

    def basis_vector(self, exps, coeff=1) -> "WeightVector":
        arr = np.zeros(self.dim, dtype=np.int16)
        c = coeff.code if isinstance(coeff, FieldElement) else int(coeff)
        arr[self.index_of(exps)] = c
        return WeightVector(self, arr)

    def pure_x(self) -> "WeightVector":
        """tensor_j x_j^(r_j)."""
        return self.basis_vector((0,) * self.field.deg)

    def pure_y(self) -> "WeightVector":
        """tensor_j y_j^(r_j)."""
        return self.basis_vector(self.r_vec)

    def from_dict(self, coeffs) -> "WeightVector":
        arr = np.zeros(self.dim, dtype=np.int16)
        for exps, c in coeffs.items():
            code = c.code if isinstance(c, FieldElement) else int(c)
            arr[self.index_of(exps)] = code
        return WeightVector(self, arr)


class WeightVector:
    """Dense coefficient vector over the monomial basis."""

    __slots__ = ("params", "coeffs")

    def __init__(self, params: WeightParams, coeffs: np.ndarray):
        self.params = params
        self.coeffs = coeffs

    def as_dict(self):
        return {
            self.params.index_to_tuple(i): int(c)
            for i, c in enumerate(self.coeffs)
            if c
        }

    def __add__(self, other: "WeightVector") -> "WeightVector":
        F = self.params.field
        return WeightVector(self.params, F.ADD[self.coeffs, other.coeffs])

    def __sub__(self, other: "WeightVector") -> "WeightVector":
        F = self.params.field
        return WeightVector(self.params, F.SUB[self.coeffs, other.coeffs])

    def __neg__(self) -> "WeightVector":
        return WeightVector(self.params, self.params.field.NEG[self.coeffs])

    def scale(self, c) -> "WeightVector":
        code = c.code if isinstance(c, FieldElement) else int(c)
        F = self.params.field
        return WeightVector(self.params, F.MUL[code, self.coeffs])

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def __eq__(self, other):
        if not isinstance(other, WeightVector):
            return NotImplemented
        return self.params == other.params and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):  # pragma: no cover
        return hash(bytes(self.coeffs))

    def __repr__(self):
        return f"WV({self.as_dict()})"


@dataclass(frozen=True)
class ResidueMatrix:
    """Invertible 2x2 matrix over the residue field, entries as codes."""

    field: FieldParams
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        F = self.field
        det = F.SUB[F.MUL[self.a, self.d], F.MUL[self.b, self.c]]
        if det == 0:
            raise SingularMatrix(f"matrix {(self.a, self.b, self.c, self.d)} has det 0")

    @property
    def det(self) -> int:
        F = self.field
        return int(F.SUB[F.MUL[self.a, self.d], F.MUL[self.b, self.c]])

    def __matmul__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        F = self.field
        M, A = F.MUL, F.ADD
        return ResidueMatrix(
            F,
            int(A[M[self.a, other.a], M[self.b, other.c]]),
            int(A[M[self.a, other.b], M[self.b, other.d]]),
            int(A[M[self.c, other.a], M[self.d, other.c]]),
            int(A[M[self.c, other.b], M[self.d, other.d]]),
        )

    def codes(self):
        return (self.a, self.b, self.c, self.d)


def identity_matrix(field: FieldParams) -> ResidueMatrix:
    return ResidueMatrix(field, 1, 0, 0, 1)


def w_matrix(field: FieldParams) -> ResidueMatrix:
    return ResidueMatrix(field, 0, 1, 1, 0)


def w_lambda(field: FieldParams, lam) -> ResidueMatrix:
    """(0 1; 1 -lam)."""
    code = lam.code if isinstance(lam, FieldElement) else int(lam)
    return ResidueMatrix(field, 0, 1, 1, int(field.NEG[code]))


# ---------------------------------------------------------------------------
# The action.
# ---------------------------------------------------------------------------

def _binom_pair_vector(F: FieldParams, m: int, alpha: int, beta: int) -> np.ndarray:
    """Coefficients of (alpha x + beta y)^m by y-degree: C(m,s) a^(m-s) b^s."""
    out = np.zeros(m + 1, dtype=np.int16)
    for s in range(m + 1):
        c = math.comb(m, s) % F.p
        if c == 0:
            continue
        term = F.MUL[c, F.MUL[F.pow_int(alpha, m - s), F.pow_int(beta, s)]]
        out[s] = term
    return out


def _conv_gf(F: FieldParams, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = np.zeros(len(u) + len(v) - 1, dtype=np.int16)
    for i, ui in enumerate(u):
        if ui:
            for j, vj in enumerate(v):
                if vj:
                    out[i + j] = F.ADD[out[i + j], F.MUL[ui, vj]]
    return out


def sigma_matrix(params: WeightParams, g: ResidueMatrix) -> np.ndarray:
    """Matrix of the action of g on the monomial basis (output index first)."""
    key = g.codes()
    cached = params._sigma_cache.get(key)
    if cached is not None:
        return cached
    F = params.field
    factors = []
    for j, r in enumerate(params.r_vec):
        fp = F.FROBP[j % F.deg]
        aj, bj, cj, dj = (int(fp[g.a]), int(fp[g.b]), int(fp[g.c]), int(fp[g.d]))
        M = np.zeros((r + 1, r + 1), dtype=np.int16)
        for i_in in range(r + 1):
            left = _binom_pair_vector(F, r - i_in, aj, cj)
            right = _binom_pair_vector(F, i_in, bj, dj)
            M[:, i_in] = _conv_gf(F, left, right)
        factors.append(M)
    full = factors[0]
    for M in factors[1:]:
        # new index = i_j * (size of lower block) + lower index
        nb = full.shape[0]
        na = M.shape[0]
        out = np.zeros((na * nb, na * nb), dtype=np.int16)
        for oa in range(na):
            for ia in range(na):
                m = M[oa, ia]
                if m:
                    out[oa * nb : (oa + 1) * nb, ia * nb : (ia + 1) * nb] = F.MUL[
                        m, full
                    ]
        full = out
    params._sigma_cache[key] = full
    return full


def sigma_act(g: ResidueMatrix, v: WeightVector) -> WeightVector:
    """Action of an invertible residue matrix on a weight vector."""
    M = sigma_matrix(v.params, g)
    from . import linalg

    out = linalg.matmul(v.params.field, M, v.coeffs[:, None])[:, 0]
    return WeightVector(v.params, out)


def phi_alpha_inv(v: WeightVector) -> WeightVector:
    """Projection onto the pure-y line (the Hecke kernel endomorphism)."""
    out = np.zeros_like(v.coeffs)
    out[v.params.top_index] = v.coeffs[v.params.top_index]
    return WeightVector(v.params, out)


def kernel_factor(v: WeightVector, lam, side: str) -> WeightVector:
    """The two depth-zero Hecke weight maps, by composition.

    side 'x': sigma(w) . phi . sigma(w_lam), collapsing onto the pure-x
    line with coefficient sum_i c_i (-lam)^i;
    side 'y': phi . sigma(w_lam w), collapsing onto pure-y with
    coefficients (-lam)^(r-i).  The closed forms are asserted in tests.
    """
    F = v.params.field
    wl = w_lambda(F, lam)
    if side == "x":
        return sigma_act(w_matrix(F), phi_alpha_inv(sigma_act(wl, v)))
    if side == "y":
        return phi_alpha_inv(sigma_act(wl @ w_matrix(F), v))
    raise ValueError(f"side must be 'x' or 'y', got {side!r}")


def pi_rotation_permutation(params: WeightParams, shift: int) -> np.ndarray:
    """Index permutation of the intertwiner between the action and its
    q^t-Frobenius twist: the tensor factors rotate by ``shift`` slots.

    Exists only when the exponent vector is invariant under that rotation;
    on basis monomials it maps exponents i_j to i_{(j+shift) mod deg}.
    """
    deg = params.field.deg
    shift %= deg
    if any(
        params.r_vec[j] != params.r_vec[(j + shift) % deg] for j in range(deg)
    ):
        raise InvalidWeight(
            "the exponent vector is not invariant under the Frobenius slot "
            "rotation; the uniformizer has no equivariant action on this weight"
        )
    perm = np.empty(params.dim, dtype=np.int64)
    for idx, exps in enumerate(params.exponent_tuples()):
        rot = tuple(exps[(j + shift) % deg] for j in range(deg))
        perm[params.index_of(rot)] = idx
    return perm


def expand_pair_tensor(params: WeightParams, alphas, betas) -> WeightVector:
    """tensor_j (alpha_j x_j + beta_j y_j)^(r_j), fully expanded."""
    F = params.field
    per = [
        _binom_pair_vector(F, params.r_vec[j], int(alphas[j]), int(betas[j]))
        for j in range(F.deg)
    ]
    arr = np.zeros(params.dim, dtype=np.int16)
    for idx, exps in enumerate(params.exponent_tuples()):
        acc = 1
        for j, e in enumerate(exps):
            acc = int(F.MUL[acc, per[j][e]])
            if not acc:
                break
        arr[idx] = acc
    return WeightVector(params, arr)
