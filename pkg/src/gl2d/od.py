"""Truncated arithmetic in the ring of integers of a division algebra.

Elements are stored as strings of Teichmueller digits: ``a = sum_i pi^i
[d_i]`` with ``d_i`` in the residue field ``F_{q^w}`` and ``pi`` the
uniformizer, digits written to the *right* of the uniformizer powers.
Conjugation by ``pi`` acts on multiplicative representatives as a power of
the q-Frobenius: ``pi [c] pi^-1 = [c^(q^t)]`` with configurable twist
``t`` (default 1).  Consequently ``[c] pi = pi [c^(q^-t)]``, which is the
only rewriting rule the digit calculus needs.

Two backends compute the same operations:

- ``exact`` (unramified base, e = 1): the ring is modelled exactly as
  ``W<pi>`` with ``W = (Z/p^M)[x]/(m~)`` lifting the residue field,
  ``pi^w = p`` and ``pi a pi^-1`` the lifted q^t-Frobenius of ``W``.
  Digits are re-extracted after every operation; all stored digits are
  reliable (``valid_to = N``).

- ``tracked`` (any ramification): digit-level rules with a single
  first-order carry.  Adding two nonzero representatives at position i
  yields the digit sum at i, the carry ``P0`` at ``i + kappa``, and
  unknown corrections from ``i + kappa + 1`` on; validity shrinks
  accordingly, and anything that would require a carry-of-a-carry is
  likewise cut off.  Asking for a digit at or beyond ``valid_to`` raises
  ``PrecisionExceeded`` instead of returning garbage.

The carry position ``kappa`` is a parameter: ``e * w`` (the absolute
ramification over Q_p, which is what the exact model exhibits) or the
literal ``e`` convention; both are supported and compared by the
verification suites.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    ConfigRejected,
    NotAUnit,
    ParamMismatch,
    PrecisionExceeded,
)
from .gf import FieldElement, FieldParams

MAX_DIGITS = 64


# ---------------------------------------------------------------------------
# Exact model: W<pi>, W = (Z/p^M)[x]/(m~), pi^w = p.
# ---------------------------------------------------------------------------

class ExactModel:
    """Exact arithmetic backend for e = 1.

    ``W``-elements are int64 coefficient vectors of length ``deg`` modulo
    ``p^M``; ring elements are ``[w, deg]`` arrays, row i holding the
    left coefficient of ``pi^i``.  ``M`` is chosen so that ``p^M`` covers
    ``N`` uniformizer digits with headroom for the divisions performed
    during digit extraction.
    """

    def __init__(self, field: FieldParams, w: int, twist: int, ndigits: int):
        self.field = field
        self.w = w
        self.twist = twist
        self.deg = field.deg
        self.p = field.p
        self.M = math.ceil(ndigits / w) + 2
        self.pM = field.p**self.M
        if self.pM > 10**9:
            raise ConfigRejected(
                "exact backend precision p^M exceeds the safe int64 range; "
                "reduce the digit count"
            )
        self.ndigits = ndigits
        self._build()

    # -- W arithmetic --------------------------------------------------------

    def _build(self):
        p, deg, pM = self.p, self.deg, self.pM
        self.mod_lift = np.array(list(self.field.modulus), dtype=np.int64)

        # x^k mod m~ for k < 2*deg-1, over Z/p^M.
        red = np.zeros((2 * deg - 1, deg), dtype=np.int64)
        for k in range(deg):
            red[k, k] = 1
        for k in range(deg, 2 * deg - 1):
            shifted = np.zeros(deg + 1, dtype=np.int64)
            shifted[1:] = red[k - 1]
            red[k] = (shifted[:deg] - shifted[deg] * self.mod_lift) % pM
        self._red = red

        # Lifted p-Frobenius: the root of m~ congruent to x^p mod p.
        if deg > 1:
            xi = self._wpow(self._xvec(), p)
            xi = self._hensel_root(xi)
        else:
            xi = np.array([(-int(self.mod_lift[0])) % pM], dtype=np.int64)
        frobp = np.empty((deg, deg), dtype=np.int64)
        acc = self._wone()
        for i in range(deg):
            frobp[:, i] = acc
            acc = self._wmul(acc, xi)
        # phi = lift of (y -> y^(q^t)); powers of the matrix cycle.
        phi = np.eye(deg, dtype=np.int64)
        for _ in range((self.field.f * self.twist) % deg):
            phi = frobp @ phi % pM
        cycle = [np.eye(deg, dtype=np.int64)]
        mat = phi
        while not np.array_equal(mat, cycle[0]):
            cycle.append(mat)
            mat = phi @ mat % pM
        self._phi_cycle = np.stack(cycle)  # [ord, deg, deg]
        self.phi_order = len(cycle)

        # Teichmueller lifts of all residues: iterate y -> y^Q to a fixed point.
        Q = self.field.order
        teich = np.zeros((Q, deg), dtype=np.int64)
        for c in range(Q):
            y = np.array(self.field.COEFFS[c], dtype=np.int64)
            for _ in range(self.M + 2):
                y2 = self._wpow(y, Q)
                if np.array_equal(y2, y):
                    break
                y = y2
            teich[c] = y
        self.TEICH = teich

    def _xvec(self):
        v = np.zeros(self.deg, dtype=np.int64)
        if self.deg > 1:
            v[1] = 1
        else:
            v[0] = (-int(self.mod_lift[0])) % self.pM
        return v

    def _wone(self):
        v = np.zeros(self.deg, dtype=np.int64)
        v[0] = 1
        return v

    def _wmul(self, a, b):
        conv = np.zeros(2 * self.deg - 1, dtype=np.int64)
        for i in range(self.deg):
            if a[i]:
                conv[i : i + self.deg] = (conv[i : i + self.deg] + a[i] * b) % self.pM
        return conv @ self._red % self.pM

    def _wpow(self, a, e):
        out = self._wone()
        base = a.copy()
        while e:
            if e & 1:
                out = self._wmul(out, base)
            base = self._wmul(base, base)
            e >>= 1
        return out

    def _weval_mod(self, xi):
        """m~(xi) and m~'(xi) in W."""
        deg, pM = self.deg, self.pM
        val = np.zeros(deg, dtype=np.int64)
        dval = np.zeros(deg, dtype=np.int64)
        pw = self._wone()
        for i in range(deg):
            c = int(self.mod_lift[i])
            val = (val + c * pw) % pM
            if i >= 1:
                dval = (dval + (i * c % pM) * self._wpow(xi, i - 1)) % pM
            pw = self._wmul(pw, xi)
        val = (val + pw) % pM  # + xi^deg
        dval = (dval + (deg % pM) * self._wpow(xi, deg - 1)) % pM
        return val, dval

    def _winv(self, a):
        """Inverse of a unit of W by Newton lifting."""
        res = self.field.encode(a % self.p)
        x = np.zeros(self.deg, dtype=np.int64)
        x[:] = self.field.COEFFS[self.field.inv_code(res)]
        for _ in range(self.M.bit_length() + 1):
            ax = self._wmul(a, x)
            corr = (2 * self._wone() - ax) % self.pM
            x = self._wmul(x, corr)
        return x

    def _hensel_root(self, xi):
        for _ in range(self.M.bit_length() + 2):
            val, dval = self._weval_mod(xi)
            if not val.any():
                break
            xi = (xi - self._wmul(val, self._winv(dval))) % self.pM
        val, _ = self._weval_mod(xi)
        if val.any():
            raise AssertionError("Hensel lift of Frobenius failed")
        return xi

    def _phi(self, a, k):
        """Apply phi^k (k may be negative) to a W-element."""
        return self._phi_cycle[k % self.phi_order] @ a % self.pM

    # -- O_D arithmetic (arrays [w, deg]) -------------------------------------

    def zero(self):
        return np.zeros((self.w, self.deg), dtype=np.int64)

    def mul(self, a, b):
        out = self.zero()
        for i in range(self.w):
            if not a[i].any():
                continue
            for j in range(self.w):
                if not b[j].any():
                    continue
                term = self._wmul(a[i], self._phi(b[j], i))
                k = i + j
                if k >= self.w:
                    term = term * self.p % self.pM
                    k -= self.w
                out[k] = (out[k] + term) % self.pM
        return out

    def add(self, a, b):
        return (a + b) % self.pM

    def neg(self, a):
        return (-a) % self.pM

    def lshift(self, a):
        """pi * a."""
        out = self.zero()
        for i in range(self.w):
            j = i + 1
            coeff = self._phi(a[i], 1)
            if j >= self.w:
                out[j - self.w] = coeff * self.p % self.pM
            else:
                out[j] = coeff
        return out

    def rdiv_pi(self, a):
        """pi^-1 * a; requires val >= 1 (coordinate 0 divisible by p)."""
        out = self.zero()
        if np.any(a[0] % self.p):
            raise PrecisionExceeded("division by pi of a unit")
        for i in range(1, self.w):
            out[i - 1] = self._phi(a[i], -1)
        out[self.w - 1] = self._phi(a[0] // self.p, -1)
        return out

    def residue_code(self, a) -> int:
        return self.field.encode(a[0] % self.p)

    def from_digits(self, digits) -> np.ndarray:
        out = self.zero()
        for d in reversed(list(digits)):
            out = self.lshift(out)
            out[0] = (out[0] + self.TEICH[int(d)]) % self.pM
        return out

    def to_digits(self, a, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=np.int16)
        cur = a.copy()
        for i in range(n):
            d = self.residue_code(cur)
            out[i] = d
            cur[0] = (cur[0] - self.TEICH[d]) % self.pM
            cur = self.rdiv_pi(cur)
        return out


# ---------------------------------------------------------------------------
# Ring parameters.
# ---------------------------------------------------------------------------

KAPPA_MODES = ("absolute", "paper_literal")


@dataclass(frozen=True, eq=False)
class RingParams:
    """Parameters of the truncated ring and its digit calculus."""

    field: FieldParams
    e: int
    ndigits: int
    kappa: int
    twist: int
    backend: str  # 'exact' | 'tracked'

    def __post_init__(self):
        if self.ndigits < 1 or self.ndigits > MAX_DIGITS:
            raise ConfigRejected(f"ndigits must be in [1, {MAX_DIGITS}]")
        if not (1 <= self.kappa):
            raise ConfigRejected("carry position must be >= 1")
        if self.backend not in ("exact", "tracked"):
            raise ConfigRejected(f"unknown backend {self.backend!r}")
        if self.backend == "exact" and self.e != 1:
            raise ConfigRejected("exact backend requires e = 1")

    @staticmethod
    def make(
        field: FieldParams,
        e: int,
        ndigits: int,
        kappa_mode: str = "absolute",
        twist: int = 1,
        backend: str | None = None,
    ) -> "RingParams":
        if kappa_mode not in KAPPA_MODES:
            raise ConfigRejected(f"unknown kappa mode {kappa_mode!r}")
        kappa = e * field.w if kappa_mode == "absolute" else e
        if backend is None:
            backend = "exact" if e == 1 else "tracked"
        return RingParams(field, e, ndigits, kappa, twist, backend)

    @cached_property
    def exact_model(self) -> ExactModel:
        if self.e != 1:
            raise ConfigRejected("exact model exists only for e = 1")
        return ExactModel(self.field, self.field.w, self.twist, self.ndigits)

    @cached_property
    def P0(self) -> np.ndarray:
        """Carry table: P0[x, y] is the first carry digit of [x] + [y].

        Reduction of (X^Qe + Y^Qe - (X+Y)^Qe)/p with Qe = q^(w*e): the
        integer binomial quotients C(Qe, m*p^(d-1))/p are congruent to
        (-1)^(m-1)/m mod p, so

            P0(x, y) = -sum_m (-1)^(m-1) m^-1 x^(m p^(d-1)) y^(Qe - m p^(d-1)).
        """
        F = self.field
        p, Q = F.p, F.order
        d_exp = F.deg * self.e
        Qe = p**d_exp
        base = p ** (d_exp - 1)
        coeffs = []
        for m in range(1, p):
            a_m = (-1) ** (m - 1) * pow(m, -1, p) % p
            coeffs.append((m, a_m))
        tab = np.zeros((Q, Q), dtype=np.int16)
        for x in range(Q):
            if x == 0:
                continue
            for y in range(Q):
                if y == 0:
                    continue
                acc = 0
                for m, a_m in coeffs:
                    term = F.MUL[F.pow_int(x, m * base), F.pow_int(y, Qe - m * base)]
                    term = F.MUL[a_m, term]
                    acc = F.ADD[acc, term]
                tab[x, y] = F.NEG[acc]
        return tab

    @cached_property
    def neg_one(self) -> "ODElement":
        """The ring element -1 (nontrivial digits in characteristic 2)."""
        if self.field.p != 2:
            return self.teich(self.field.NEG[1])
        if self.backend == "exact":
            em = self.exact_model
            m = em.zero()
            m[0, 0] = em.pM - 1
            return ODElement._from_model(self, m)
        # tracked, p = 2: solve 1 + y = 0 digit by digit; validity is honest
        # (knowledge of -1 stops where carries of carries would start).
        N = self.ndigits
        y = [1] + [0] * (N - 1)
        one = [1] + [0] * (N - 1)
        for i in range(1, N):
            s, v = _tracked_add(self, one, N, y, N)
            if i >= v:
                break
            if s[i]:
                y[i] = s[i]
        s, v = _tracked_add(self, one, N, y, N)
        good = v
        for idx in range(v):
            if s[idx]:
                good = idx
                break
        return self.from_digits(y, good)

    @cached_property
    def TWIST_NEG(self) -> np.ndarray:
        """TWIST_NEG[j] = table of c -> c^(q^(-t*j)), j = 0..ndigits."""
        F = self.field
        return np.stack(
            [F.frob_q_table(-self.twist * j) for j in range(self.ndigits + 1)]
        )

    @cached_property
    def TWIST_POS(self) -> np.ndarray:
        F = self.field
        return np.stack(
            [F.frob_q_table(self.twist * j) for j in range(self.ndigits + 1)]
        )

    # -- element constructors -------------------------------------------------

    def zero(self) -> "ODElement":
        return ODElement(self, (0,) * self.ndigits, self.ndigits)

    def one(self) -> "ODElement":
        return self.teich(1)

    def teich(self, code) -> "ODElement":
        """Multiplicative representative [c]."""
        c = code.code if isinstance(code, FieldElement) else int(code)
        digits = (c,) + (0,) * (self.ndigits - 1)
        return ODElement(self, digits, self.ndigits)

    def pi(self, k: int = 1) -> "ODElement":
        """pi^k for 0 <= k < ndigits."""
        if k < 0 or k >= self.ndigits:
            raise PrecisionExceeded(f"pi^{k} not representable in {self.ndigits} digits")
        digits = [0] * self.ndigits
        digits[k] = 1
        return ODElement(self, tuple(digits), self.ndigits)

    def from_digits(self, digits, valid=None) -> "ODElement":
        ds = [int(d) for d in digits][: self.ndigits]
        ds += [0] * (self.ndigits - len(ds))
        v = self.ndigits if valid is None else min(valid, self.ndigits)
        ds = [d if i < v else 0 for i, d in enumerate(ds)]
        return ODElement(self, tuple(ds), v)

    def from_digit_string(self, mu: "DigitString") -> "ODElement":
        return self.from_digits(mu.digits)

    def same(self, other: "RingParams") -> bool:
        return self is other or (
            self.field == other.field
            and (self.e, self.ndigits, self.kappa, self.twist, self.backend)
            == (other.e, other.ndigits, other.kappa, other.twist, other.backend)
        )


@dataclass(frozen=True)
class DigitString:
    """mu in I_n: a depth-n string of residue digits (I_0 is the empty string)."""

    field: FieldParams
    digits: tuple

    @property
    def n(self) -> int:
        return len(self.digits)

    def truncate(self, m: int) -> "DigitString":
        if m > self.n:
            raise PrecisionExceeded(f"truncation to {m} digits of an I_{self.n} string")
        return DigitString(self.field, self.digits[:m])

    def __repr__(self):
        return f"I{self.n}{list(self.digits)}"


def digit_string(field: FieldParams, digits) -> DigitString:
    return DigitString(field, tuple(int(d) for d in digits))


# ---------------------------------------------------------------------------
# Elements.
# ---------------------------------------------------------------------------

class ODElement:
    """A truncated ring element: digits plus a validity bound.

    Digits at positions >= ``valid_to`` are stored as 0 but are not
    meaningful; reading them raises ``PrecisionExceeded``.
    """

    __slots__ = ("ring", "digits", "valid_to", "_model")

    def __init__(self, ring: RingParams, digits: tuple, valid_to: int):
        self.ring = ring
        self.digits = digits
        self.valid_to = valid_to
        self._model = None

    # -- digit access ---------------------------------------------------------

    def digit(self, i: int) -> int:
        if i >= self.valid_to:
            raise PrecisionExceeded(f"digit {i} beyond validity {self.valid_to}")
        return self.digits[i]

    def known_digits(self):
        return self.digits[: self.valid_to]

    def residue(self) -> int:
        return self.digit(0)

    def is_exact_zero(self) -> bool:
        return self.valid_to == self.ring.ndigits and not any(self.digits)

    def is_zero_within_validity(self) -> bool:
        return not any(self.known_digits())

    # -- model bridge ---------------------------------------------------------

    def _as_model(self):
        if self._model is None:
            self._model = self.ring.exact_model.from_digits(self.digits)
        return self._model

    @staticmethod
    def _from_model(ring: RingParams, arr) -> "ODElement":
        digits = ring.exact_model.to_digits(arr, ring.ndigits)
        el = ODElement(ring, tuple(int(d) for d in digits), ring.ndigits)
        return el

    # -- arithmetic -----------------------------------------------------------

    def _check(self, other: "ODElement"):
        if not self.ring.same(other.ring):
            raise ParamMismatch("operands from different rings")

    def __add__(self, other: "ODElement") -> "ODElement":
        self._check(other)
        ring = self.ring
        if ring.backend == "exact":
            return self._from_model(ring, ring.exact_model.add(self._as_model(), other._as_model()))
        digits, valid = _tracked_add(
            ring, self.digits, self.valid_to, other.digits, other.valid_to
        )
        return ring.from_digits(digits, valid)

    def __neg__(self) -> "ODElement":
        ring = self.ring
        if ring.field.p != 2:
            # [-d] = -[d] for p odd, so negation is digit-wise and exact.
            neg = ring.field.NEG
            return ODElement(
                ring, tuple(int(neg[d]) for d in self.digits), self.valid_to
            )
        if ring.backend == "exact":
            em = ring.exact_model
            return self._from_model(ring, em.neg(self._as_model()))
        return ring.neg_one * self

    def __sub__(self, other: "ODElement") -> "ODElement":
        return self + (-other)

    def __mul__(self, other: "ODElement") -> "ODElement":
        self._check(other)
        ring = self.ring
        if ring.backend == "exact":
            return self._from_model(ring, ring.exact_model.mul(self._as_model(), other._as_model()))
        digits, valid = _tracked_mul(
            ring, self.digits, self.valid_to, other.digits, other.valid_to
        )
        return ring.from_digits(digits, valid)

    def inverse(self) -> "ODElement":
        ring = self.ring
        if self.valid_to == 0:
            raise PrecisionExceeded("no valid digits")
        if self.digits[0] == 0:
            raise NotAUnit("leading digit vanishes")
        if ring.backend == "exact":
            m = self._as_model()
            # Newton: x <- x + x(1 - a x); start from the residue inverse.
            em = ring.exact_model
            x = em.zero()
            x[0] = em.TEICH[ring.field.inv_code(self.digits[0])]
            one = em.zero()
            one[0, 0] = 1
            for _ in range(ring.ndigits.bit_length() + 2):
                err = em.add(one, em.neg(em.mul(m, x)))
                x = em.add(x, em.mul(x, err))
            return self._from_model(ring, x)
        digits, valid = _tracked_inv(ring, self.digits, self.valid_to)
        return ring.from_digits(digits, valid)

    # -- structure ------------------------------------------------------------

    def valuation(self):
        """Index of the first nonzero digit; math.inf for exact zero."""
        for i in range(self.valid_to):
            if self.digits[i]:
                return i
        if self.valid_to == self.ring.ndigits:
            return math.inf
        raise PrecisionExceeded(
            f"element vanishes within validity {self.valid_to} < {self.ring.ndigits}"
        )

    def valuation_bound(self):
        """(value, determined): the valuation, or a lower bound when the
        element vanishes within a truncated validity window."""
        for i in range(self.valid_to):
            if self.digits[i]:
                return i, True
        if self.valid_to == self.ring.ndigits:
            return math.inf, True
        return self.valid_to, False

    def lead_nonzero(self) -> bool:
        """Whether the valuation is exactly zero (needs one valid digit)."""
        if self.valid_to < 1:
            raise PrecisionExceeded("no valid digits to inspect")
        return self.digits[0] != 0

    def truncate(self, m: int) -> DigitString:
        """First m digits as an element of I_m."""
        if m > self.valid_to:
            raise PrecisionExceeded(f"truncation to {m} digits, validity {self.valid_to}")
        return DigitString(self.ring.field, tuple(self.digits[:m]))

    def split_at(self, n: int):
        """Exact split a = [a]_n + pi^n * high; returns (DigitString, high).

        Both pieces are exact re-groupings of the stored digits, so no
        validity is lost beyond the shift.
        """
        low = self.truncate(n)
        ring = self.ring
        hi = self.digits[n : ring.ndigits] + (0,) * n
        v = ring.ndigits if ring.backend == "exact" else max(self.valid_to - n, 0)
        return low, ring.from_digits(hi, v)

    def shift_up(self, k: int) -> "ODElement":
        """pi^k * a (left multiplication: digits move up, untwisted)."""
        ring = self.ring
        digits = (0,) * k + self.digits[: ring.ndigits - k]
        return ring.from_digits(digits, min(self.valid_to + k, ring.ndigits))

    def shift_down(self, k: int) -> "ODElement":
        """pi^-k * a; requires the low k digits to vanish."""
        if k == 0:
            return self
        for i in range(min(k, self.valid_to)):
            if self.digits[i]:
                raise PrecisionExceeded(f"pi^-{k} of element with digit at {i}")
        if self.valid_to < k:
            raise PrecisionExceeded("insufficient validity for downshift")
        digits = self.digits[k:] + (0,) * k
        ring = self.ring
        v = ring.ndigits if ring.backend == "exact" else self.valid_to - k
        return ring.from_digits(digits, v)

    def mul_pi_right(self, k: int) -> "ODElement":
        """a * pi^k = pi^k * (a twisted by q^(-t k))."""
        ring = self.ring
        tw = ring.field.frob_q_table(-ring.twist * k)
        digits = tuple(int(tw[d]) for d in self.digits)
        return ODElement(ring, digits, self.valid_to).shift_up(k)

    def div_pi_right(self, k: int) -> "ODElement":
        """a * pi^-k: downshift with the digits twisted by q^(t k)."""
        return self.shift_down(k).twist_conj(k)

    def twist_conj(self, k: int) -> "ODElement":
        """pi^k * a * pi^-k: digit-wise q^(t*k) power."""
        ring = self.ring
        tw = ring.field.frob_q_table(ring.twist * k)
        return ODElement(ring, tuple(int(tw[d]) for d in self.digits), self.valid_to)

    # -- comparison and display ------------------------------------------------

    def eq_within_validity(self, other: "ODElement") -> bool:
        self._check(other)
        v = min(self.valid_to, other.valid_to)
        return self.digits[:v] == other.digits[:v]

    def assert_fully_equal(self, other: "ODElement") -> bool:
        v = min(self.valid_to, other.valid_to)
        if v < self.ring.ndigits:
            raise PrecisionExceeded("comparison beyond shared validity")
        return self.digits[:v] == other.digits[:v]

    def __eq__(self, other):
        if not isinstance(other, ODElement):
            return NotImplemented
        return self.eq_within_validity(other)

    def __hash__(self):  # pragma: no cover - elements are not dict keys
        return hash((self.digits, self.valid_to))

    def __repr__(self):
        ds = list(self.known_digits())
        return f"OD({ds}, valid={self.valid_to})"


# ---------------------------------------------------------------------------
# Spec-level operation aliases.
# ---------------------------------------------------------------------------

def od_add(a: ODElement, b: ODElement) -> ODElement:
    return a + b


def od_mul(a: ODElement, b: ODElement) -> ODElement:
    return a * b


def od_inv(a: ODElement) -> ODElement:
    return a.inverse()


def truncate(a, m: int) -> DigitString:
    if isinstance(a, DigitString):
        return a.truncate(m)
    return a.truncate(m)


def valuation(a: ODElement):
    return a.valuation()


def carry_p0(ring: RingParams, mu, lam) -> FieldElement:
    """First carry digit of [mu] + [lam]."""
    mc = mu.code if isinstance(mu, FieldElement) else int(mu)
    lc = lam.code if isinstance(lam, FieldElement) else int(lam)
    return FieldElement(ring.field, int(ring.P0[mc, lc]))


# ---------------------------------------------------------------------------
# Tracked digit rules (scalar reference; batch twins live in the kernels).
# ---------------------------------------------------------------------------

def _tracked_add(ring: RingParams, da, va, db, vb):
    F = ring.field
    N, kappa = ring.ndigits, ring.kappa
    P0 = ring.P0
    v = min(va, vb)
    out = [0] * N
    carry = [0] * N
    for i in range(N):
        vals = []
        if i < va and da[i]:
            vals.append(da[i])
        if i < vb and db[i]:
            vals.append(db[i])
        if carry[i]:
            vals.append(carry[i])
        s = 0
        for x in vals:
            if s == 0:
                s = x
                continue
            v = min(v, i + kappa + 1)
            if i + kappa < N:
                c = int(P0[s, x])
                if c:
                    carry[i + kappa] = int(F.ADD[carry[i + kappa], c]) if carry[i + kappa] else c
            s = int(F.ADD[s, x])
        out[i] = s
    return out, v


def _tracked_val(digits, valid):
    for i in range(valid):
        if digits[i]:
            return i
    return None


def _tracked_mul(ring: RingParams, da, va, db, vb):
    F = ring.field
    N = ring.ndigits
    val_a = _tracked_val(da, va)
    val_b = _tracked_val(db, vb)
    if val_a is None and va == N:
        return [0] * N, N
    if val_b is None and vb == N:
        return [0] * N, N
    eff_a = va if val_a is None else val_a
    eff_b = vb if val_b is None else val_b
    vcap = min(N, va + eff_b, vb + eff_a)
    if val_a is None or val_b is None:
        return [0] * N, vcap

    tw = ring.TWIST_NEG
    # Cross terms, then positional accumulation with the carry rule.
    out = [0] * N
    carry = [0] * N
    pending = [[] for _ in range(N)]
    for i in range(va):
        ai = da[i]
        if not ai:
            continue
        for j in range(vb):
            bj = db[j]
            if not bj:
                continue
            k = i + j
            if k >= N:
                continue
            pending[k].append(int(F.MUL[tw[j][ai], bj]))
    v = vcap
    kappa, P0 = ring.kappa, ring.P0
    for i in range(N):
        vals = pending[i]
        if carry[i]:
            vals = vals + [carry[i]]
        s = 0
        for x in vals:
            if not x:
                continue
            if s == 0:
                s = x
                continue
            v = min(v, i + kappa + 1)
            if i + kappa < N:
                c = int(P0[s, x])
                if c:
                    carry[i + kappa] = int(F.ADD[carry[i + kappa], c]) if carry[i + kappa] else c
            s = int(F.ADD[s, x])
        out[i] = s
    return out, v


def _tracked_inv(ring: RingParams, da, va):
    """Digit-by-digit solve of a * x = 1 (Hensel-style refinement)."""
    F = ring.field
    N = ring.ndigits
    tw = ring.TWIST_NEG
    x = [0] * N
    x[0] = F.inv_code(da[0])
    limit = va
    for k in range(1, N):
        if k >= limit:
            break
        prod, pv = _tracked_mul(ring, da, va, x, N)
        if k >= pv:
            limit = min(limit, pv)
            break
        s = prod[k]
        if s:
            lead = int(tw[k][da[0]])  # coefficient the new digit enters with
            x[k] = int(F.MUL[F.NEG[s], F.inv_code(lead)])
    prod, pv = _tracked_mul(ring, da, va, x, N)
    one = [1] + [0] * (N - 1)
    good = pv
    for i in range(pv):
        if prod[i] != one[i]:
            good = i
            break
    return x, good
