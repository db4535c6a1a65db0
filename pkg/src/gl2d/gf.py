"""Exact arithmetic in F_p and F_{p^(w*f)}.

Elements of the residue field are stored as integer codes in ``[0, Q)``,
``Q = p**(w*f)``: the code of an element with polynomial coefficients
``(c_0, ..., c_{d-1})`` is ``sum(c_i * p**i)``.  All arithmetic is table
driven (addition, multiplication, inversion, Frobenius), which keeps the
batch kernels branch-free: a field operation is one fancy-indexed gather.

The defining modulus is the monic irreducible polynomial of degree ``w*f``
over F_p whose coefficient vector, read as a base-p integer (constant term
in the lowest digit), is smallest.  Any fixed choice gives an isomorphic
field; a deterministic one keeps serialized output stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    ConfigRejected,
    DivisionByZero,
    IncompleteData,
    InvalidExponent,
)

MAX_FIELD_ORDER = 4096  # desk-scale cap; tables are dense Q x Q


# ---------------------------------------------------------------------------
# Dense polynomial helpers over F_p (coefficient tuples, constant term first).
# ---------------------------------------------------------------------------

def _poly_trim(a):
    i = len(a)
    while i > 0 and a[i - 1] == 0:
        i -= 1
    return a[:i]


def _poly_mulmod(a, b, mod, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_divmod(out, mod, p)[1]


def _poly_divmod(a, b, p):
    a = list(a)
    b = _poly_trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(b[-1], -1, p)
    q = [0] * max(0, len(a) - len(b) + 1)
    for k in range(len(a) - len(b), -1, -1):
        c = (a[k + len(b) - 1] * inv_lead) % p
        if c:
            q[k] = c
            for j, bj in enumerate(b):
                a[k + j] = (a[k + j] - c * bj) % p
    return q, _poly_trim(a)


def _poly_gcd(a, b, p):
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        a, b = b, _poly_divmod(a, b, p)[1]
    return a


def _poly_powmod(base, e, mod, p):
    result = [1]
    base = _poly_divmod(list(base), mod, p)[1]
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod, p)
        base = _poly_mulmod(base, base, mod, p)
        e >>= 1
    return result


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(coeffs, p) -> bool:
    """Frobenius test for a monic polynomial over F_p.

    ``coeffs`` are the low coefficients (length = degree); the leading 1 is
    implied.  Degree d is irreducible iff x^(p^d) == x mod m and, for every
    prime l dividing d, gcd(x^(p^(d/l)) - x, m) = 1.
    """
    d = len(coeffs)
    if d == 1:
        return True
    mod = list(coeffs) + [1]
    x = [0, 1]
    xq = _poly_powmod(x, p**d, mod, p)
    diff = [(a - b) % p for a, b in zip_pad(xq, x)]
    if _poly_trim(diff):
        return False
    for ell in _prime_factors(d):
        sub = _poly_powmod(x, p ** (d // ell), mod, p)
        diff = [(a - b) % p for a, b in zip_pad(sub, x)]
        if len(_poly_gcd(diff, mod, p)) > 1:
            return False
    return True


def zip_pad(a, b):
    n = max(len(a), len(b))
    return zip(list(a) + [0] * (n - len(a)), list(b) + [0] * (n - len(b)))


def smallest_irreducible(p: int, degree: int):
    """Lex-smallest monic irreducible of the given degree over F_p."""
    for code in range(p**degree):
        coeffs = _digits(code, p, degree)
        if is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise AssertionError("no irreducible polynomial found")  # unreachable


def _digits(code, p, length):
    out = []
    for _ in range(length):
        out.append(code % p)
        code //= p
    return out


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# Field parameters and tables.
# ---------------------------------------------------------------------------

class FieldParams:
    """Residue-field description: F_{q^w} with q = p^f, as F_p[x]/(modulus).

    Heavy tables are built once at construction:

    - ``ADD``, ``SUB``, ``MUL``: ``[Q, Q]`` code tables,
    - ``NEG``, ``INV``: ``[Q]`` code tables (``INV[0]`` is a 0 sentinel),
    - ``FROBP``: ``[deg, Q]`` with ``FROBP[j][a] = a**(p**j)``,
    - ``EXP``/``LOG``: discrete log relative to a fixed generator,
    - ``POWMOD``: helper data for integer powers.
    """

    def __init__(self, p: int, f: int, w: int, modulus=None):
        if not _is_prime(p):
            raise ConfigRejected(f"p = {p} is not prime")
        if f < 1 or w < 1:
            raise ConfigRejected("f and w must be positive")
        self.p, self.f, self.w = p, f, w
        self.deg = w * f
        self.q = p**f
        self.order = p**self.deg
        if self.order > MAX_FIELD_ORDER:
            raise ConfigRejected(
                f"field order {self.order} exceeds desk-scale cap {MAX_FIELD_ORDER}"
            )
        if modulus is None:
            modulus = smallest_irreducible(p, self.deg)
        else:
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != self.deg:
                raise ConfigRejected("modulus degree must equal w*f")
            if not is_irreducible(list(modulus), p):
                raise ConfigRejected("modulus is reducible over F_p")
        self.modulus = modulus
        self._build_tables()

    # -- construction ------------------------------------------------------

    def _build_tables(self):
        p, d, Q = self.p, self.deg, self.order
        powers = p ** np.arange(d, dtype=np.int64)
        coeffs = np.zeros((Q, d), dtype=np.int64)
        codes = np.arange(Q, dtype=np.int64)
        for j in range(d):
            coeffs[:, j] = (codes // powers[j]) % p
        self.COEFFS = coeffs.astype(np.int16)

        self.NEG = ((-coeffs) % p @ powers).astype(np.int16)

        add = np.empty((Q, Q), dtype=np.int16)
        for a in range(Q):
            add[a] = ((coeffs[a] + coeffs) % p) @ powers
        self.ADD = add

        # x^k mod modulus for k < 2d-1, as coefficient rows.
        red = np.zeros((2 * d - 1, d), dtype=np.int64)
        for k in range(d):
            red[k, k] = 1
        mod_vec = np.array(self.modulus, dtype=np.int64)
        for k in range(d, 2 * d - 1):
            prev = red[k - 1]
            shifted = np.zeros(d + 1, dtype=np.int64)
            shifted[1:] = prev
            carry = shifted[d]
            shifted = shifted[:d] + (-carry) * mod_vec
            red[k] = shifted % p
        self._REDROWS = red

        mul = np.empty((Q, Q), dtype=np.int16)
        conv = np.zeros((Q, 2 * d - 1), dtype=np.int64)
        for a in range(Q):
            conv[:] = 0
            ca = coeffs[a]
            for i in range(d):
                if ca[i]:
                    conv[:, i : i + d] += ca[i] * coeffs
            mul[a] = (((conv @ red) % p) @ powers) % (p**d)
        self.MUL = mul

        self.SUB = add[:, self.NEG]

        # Discrete log tables for O(1) powers and inverses.
        gen = self._find_generator()
        exp = np.zeros(max(Q - 1, 1), dtype=np.int16)
        log = np.full(Q, -1, dtype=np.int64)
        acc = 1
        for k in range(Q - 1):
            exp[k] = acc
            log[acc] = k
            acc = int(mul[acc, gen])
        self.generator = gen
        self.EXP = exp
        self.LOG = log

        inv = np.zeros(Q, dtype=np.int16)
        if Q > 1:
            nz = np.arange(1, Q)
            inv[nz] = exp[(-log[nz]) % (Q - 1)]
        self.INV = inv

        frobp = np.empty((d, Q), dtype=np.int16)
        frobp[0] = np.arange(Q, dtype=np.int16)
        if d > 1:
            fr1 = np.array([self.pow_int(a, p) for a in range(Q)], dtype=np.int16)
            frobp[1] = fr1
            for j in range(2, d):
                frobp[j] = fr1[frobp[j - 1]]
        self.FROBP = frobp

    def _find_generator(self) -> int:
        Q = self.order
        if Q == 2:
            return 1
        for g in range(2, Q):
            acc, k = g, 1
            while acc != 1:
                acc = int(self.MUL[acc, g])
                k += 1
            if k == Q - 1:
                return g
        raise AssertionError("no generator found")  # unreachable

    # -- code-level operations ----------------------------------------------

    def encode(self, coeffs) -> int:
        c = 0
        for j, v in enumerate(coeffs):
            c += (int(v) % self.p) * self.p**j
        return c

    def decode(self, code: int):
        return tuple(int(v) for v in self.COEFFS[code])

    def pow_int(self, code: int, e: int) -> int:
        """code**e with the convention 0**0 = 1."""
        if e == 0:
            return 1
        if code == 0:
            if e < 0:
                raise DivisionByZero("0 has no negative powers")
            return 0
        r = int(self.LOG[code]) * e % (self.order - 1)
        return int(self.EXP[r])

    def inv_code(self, code: int) -> int:
        if code == 0:
            raise DivisionByZero("inversion of zero")
        return int(self.INV[code])

    def frob_q_power(self, code: int, k: int) -> int:
        """code**(q**k) for any integer k (k may be negative)."""
        j = (self.f * k) % self.deg
        return int(self.FROBP[j, code])

    def frob_q_table(self, k: int) -> np.ndarray:
        return self.FROBP[(self.f * k) % self.deg]

    def element(self, value) -> "FieldElement":
        """Wrap a code (int, taken mod Q) or a coefficient sequence."""
        if isinstance(value, FieldElement):
            if value.params is not self:
                raise ValueError("element belongs to another field")
            return value
        if isinstance(value, (int, np.integer)):
            return FieldElement(self, int(value) % self.order)
        return FieldElement(self, self.encode(value))

    def from_prime_subfield(self, c: int) -> "FieldElement":
        return FieldElement(self, int(c) % self.p)

    def all_elements(self):
        return [FieldElement(self, c) for c in range(self.order)]

    # -- misc ----------------------------------------------------------------

    def __repr__(self):
        return f"FieldParams(p={self.p}, f={self.f}, w={self.w}, modulus={self.modulus})"

    def __eq__(self, other):
        return (
            isinstance(other, FieldParams)
            and (self.p, self.f, self.w, self.modulus)
            == (other.p, other.f, other.w, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.f, self.w, self.modulus))


@lru_cache(maxsize=None)
def field(p: int, f: int, w: int) -> FieldParams:
    """Shared FieldParams instance with the canonical modulus."""
    return FieldParams(p, f, w)


@dataclass(frozen=True)
class FieldElement:
    """An element of F_{q^w}, wrapping an integer code."""

    params: FieldParams
    code: int

    @property
    def coeffs(self):
        return self.params.decode(self.code)

    def _codeof(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.params is not self.params and other.params != self.params:
                raise ValueError("mixed fields")
            return other.code
        return self.params.element(other).code

    def __add__(self, other):
        return FieldElement(self.params, int(self.params.ADD[self.code, self._codeof(other)]))

    def __sub__(self, other):
        return FieldElement(self.params, int(self.params.SUB[self.code, self._codeof(other)]))

    def __neg__(self):
        return FieldElement(self.params, int(self.params.NEG[self.code]))

    def __mul__(self, other):
        return FieldElement(self.params, int(self.params.MUL[self.code, self._codeof(other)]))

    def __pow__(self, e: int):
        return FieldElement(self.params, self.params.pow_int(self.code, e))

    def inverse(self):
        return FieldElement(self.params, self.params.inv_code(self.code))

    def __truediv__(self, other):
        oc = self._codeof(other)
        return FieldElement(self.params, int(self.params.MUL[self.code, self.params.inv_code(oc)]))

    def frobenius_p(self):
        """a -> a**p."""
        return FieldElement(self.params, int(self.params.FROBP[1 % self.params.deg, self.code]))

    def frobenius_q(self):
        """a -> a**q, q = p^f."""
        return FieldElement(self.params, self.params.frob_q_power(self.code, 1))

    def is_zero(self):
        return self.code == 0

    def __bool__(self):
        return self.code != 0

    def __repr__(self):
        return f"F({self.code})"


# ---------------------------------------------------------------------------
# Lucas binomials.
# ---------------------------------------------------------------------------

def lucas_binom(m: int, n: int, p: int) -> int:
    """C(m, n) mod p via the base-p digit product.

    Returns a residue in [0, p); it is 0 exactly when some digit of n
    exceeds the matching digit of m.
    """
    if m < 0 or n < 0:
        raise InvalidExponent("binomial arguments must be nonnegative")
    if not _is_prime(p):
        raise InvalidExponent(f"p = {p} is not prime")
    out = 1
    while m or n:
        mi, ni = m % p, n % p
        if ni > mi:
            return 0
        out = out * math.comb(mi, ni) % p
        m //= p
        n //= p
    return out


# ---------------------------------------------------------------------------
# Power sums over the whole field.
# ---------------------------------------------------------------------------

def power_sum(params: FieldParams, j: int) -> FieldElement:
    """Sum of lam**j over all lam in the field, with 0**0 = 1.

    Computed by direct summation; equals 0 for j < Q-1 and -1 for j = Q-1.
    """
    Q = params.order
    if j < 0 or j > Q - 1:
        raise InvalidExponent(f"exponent {j} outside [0, {Q - 1}]")
    acc = 0
    for c in range(Q):
        acc = int(params.ADD[acc, params.pow_int(c, j)])
    return FieldElement(params, acc)


# ---------------------------------------------------------------------------
# Multivariate interpolation with per-variable degree < Q.
# ---------------------------------------------------------------------------

class TensorPoly:
    """Polynomial in n variables over F_{q^w}, per-variable degree <= Q-1.

    ``coeffs`` has shape ``(Q,) * nvars``; entry at index ``(e_0, ..,
    e_{n-1})`` is the code of the coefficient of ``z_0^e_0 .. z_{n-1}^e_{n-1}``.
    """

    def __init__(self, params: FieldParams, coeffs: np.ndarray):
        self.params = params
        self.coeffs = coeffs
        self.nvars = coeffs.ndim

    def evaluate(self, point) -> int:
        """Evaluate at a tuple of codes; returns a code."""
        par = self.params
        arr = self.coeffs
        for c in point:
            vand = _vandermonde_row(par, int(c))
            if arr.ndim == 1:
                arr = _gf_dot(par, vand, arr)
            else:
                flat = arr.reshape(arr.shape[0], -1)
                arr = _gf_vecmat(par, vand, flat).reshape(arr.shape[1:])
        return int(arr)

    def evaluate_all(self) -> np.ndarray:
        """Values on the full grid, index order matching the coefficients."""
        par = self.params
        V = vandermonde(par)
        arr = self.coeffs
        for _ in range(self.nvars):
            flat = arr.reshape(arr.shape[0], -1)
            arr = _gf_matmul(par, V, flat).reshape(arr.shape)
            arr = np.moveaxis(arr, 0, -1)
        return arr

    def monomials(self):
        """Sorted list of (exponent-tuple, coefficient-code) with nonzero coefficient."""
        idx = np.argwhere(self.coeffs != 0)
        return [(tuple(int(v) for v in e), int(self.coeffs[tuple(e)])) for e in idx]


@lru_cache(maxsize=None)
def _vandermonde_cache_key(params_key):  # pragma: no cover - helper for cache identity
    return params_key


_VANDERMONDE = {}


def vandermonde(params: FieldParams) -> np.ndarray:
    """V[c, e] = c**e over codes, 0**0 = 1."""
    key = id(params)
    if key not in _VANDERMONDE:
        Q = params.order
        V = np.empty((Q, Q), dtype=np.int16)
        for c in range(Q):
            acc = 1
            for e in range(Q):
                V[c, e] = acc
                acc = int(params.MUL[acc, c])
        _VANDERMONDE[key] = V
    return _VANDERMONDE[key]


_VANDERMONDE_INV = {}


def vandermonde_inv(params: FieldParams) -> np.ndarray:
    """Exact inverse of the evaluation matrix, by Gaussian elimination."""
    key = id(params)
    if key not in _VANDERMONDE_INV:
        from . import linalg

        V = vandermonde(params)
        _VANDERMONDE_INV[key] = linalg.inverse(params, V)
    return _VANDERMONDE_INV[key]


def _vandermonde_row(params, c):
    return vandermonde(params)[c]


def _gf_matmul(params, A, B):
    from . import linalg

    return linalg.matmul(params, A, B)


def _gf_vecmat(params, v, B):
    from . import linalg

    return linalg.matmul(params, v[None, :], B)[0]


def _gf_dot(params, v, w):
    from . import linalg

    return int(linalg.matmul(params, v[None, :], w[:, None])[0, 0])


def interpolate(params: FieldParams, nvars: int, values) -> TensorPoly:
    """Unique polynomial with per-variable degree <= Q-1 matching ``values``.

    ``values`` is either an ndarray of codes with shape ``(Q,) * nvars``
    (index = point codes) or a mapping from point tuples to codes /
    FieldElements, total on the grid.
    """
    if nvars < 1:
        raise InvalidExponent("need at least one variable")
    Q = params.order
    shape = (Q,) * nvars
    if isinstance(values, np.ndarray):
        arr = values.astype(np.int16)
        if arr.shape != shape:
            raise IncompleteData(f"value grid must have shape {shape}")
    else:
        arr = np.zeros(shape, dtype=np.int16)
        seen = 0
        for point, val in values.items():
            if len(point) != nvars:
                raise IncompleteData("point arity mismatch")
            code = val.code if isinstance(val, FieldElement) else int(val)
            arr[tuple(int(c) for c in point)] = code
            seen += 1
        if seen != Q**nvars:
            raise IncompleteData(
                f"map has {seen} points, needs all {Q**nvars}"
            )
    Vinv = vandermonde_inv(params)
    out = arr
    for _ in range(nvars):
        flat = out.reshape(out.shape[0], -1)
        out = _gf_matmul(params, Vinv, flat).reshape(out.shape)
        out = np.moveaxis(out, 0, -1)
    return TensorPoly(params, out)
