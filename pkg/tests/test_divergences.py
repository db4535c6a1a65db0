"""Mechanically verified corrections to the printed closed forms.

Each divergence that the suites record is pinned down here with an
independent computation, so the corrected statements are covered green
while the printed forms stay visibly red in test_acceptance.py.
"""

import numpy as np

from gl2d.basis import LabeledElement, fit_character, reference_character
from gl2d.config import Config
from gl2d.hecke import hecke_t, im_t_reduce, reduce_exponent, witness_s
from gl2d.induction import act, beta_elt, diag_elt, lower_elt, make_s, make_t
from gl2d.basis import difference_profile


def test_diagonal_characters_computed_forms(space_a, space_b):
    """chi(s_n^k) = a^(r-k) d^k at w = 1, with explicit Frobenius twists
    of the a-exponent at w = 2; equivariance pins the k = 0 case to a^r."""
    for space in (space_a, space_b):
        wp = space.weight
        # k = 0: the depth-0 generator [Id, pure_x] transforms by a^r, and
        # the operator (being equivariant) transports that to every s_n^0.
        ring = space.ring
        F = space.field
        g = F.generator
        dg = diag_elt(ring, ring.teich(g), ring.one())
        f0 = make_s(space, 0, 0)
        assert act(dg, f0) == f0.scale(F.pow_int(g, wp.r))
        s10 = make_s(space, 1, 0)
        assert act(dg, s10) == s10.scale(F.pow_int(g, wp.r))
        assert hecke_t(f0) == s10  # the transport itself
    # at w = 1 the fitted exponents are exactly (r - k, k)
    wp = space_a.weight
    for k in (0, 1, 4, 24):
        lab = LabeledElement("s", 0, 1, False, k, make_s(space_a, 1, k))
        assert fit_character(space_a, lab.element) == ((wp.r - k) % 48, k % 48)
    # and t_n^s carries a^(r - p^s) d^(p^s)
    lab = LabeledElement("t", 0, 1, False, 0, make_t(space_a, 1, 0))
    assert fit_character(space_a, lab.element) == ((wp.r - 1) % 48, 1)


def test_lower_unipotent_difference_is_image_member(space_a, space_b):
    """(1 0; pi c 1) t_1^s - t_1^s = -c0^(p^s) s_1^(p^s(1+q^(w-t))), a
    verified operator-image element (so the mixed line is still invariant
    in the quotient, which is the statement that matters)."""
    for space in (space_a, space_b):
        F = space.field
        ring = space.ring
        E = F.p ** ((-F.f * ring.twist) % F.deg) if F.deg > 1 else 1
        for s in range(F.deg):
            ps = F.p**s
            c0 = 3
            g = lower_elt(ring, ring.teich(c0))
            t1s = make_t(space, 1, s)
            d = act(g, t1s) - t1s
            assert not d.is_zero()
            k = reduce_exponent(F.order, ps * (1 + F.q ** ((ring.twist * (F.w - 1)) % max(F.deg, 1))))
            k = reduce_exponent(F.order, ps + ps * E)
            coeff = int(F.NEG[F.pow_int(c0, ps)])
            expect = make_s(space, 1, k).scale(coeff)
            assert d == expect
            wit = witness_s(space, 1, k)
            res = im_t_reduce(d, [wit])
            assert res.in_span and list(res.coefficients) == [coeff]


def test_beta_translate_characters(space_a):
    """Conjugating the torus through the involution swaps the exponents."""
    s = make_s(space_a, 1, 4)
    bs = act(beta_elt(space_a.ring), s)
    lab = LabeledElement("s", 0, 1, True, 4, bs)
    fit = fit_character(space_a, bs)
    assert fit == reference_character(space_a, lab)
    plain = fit_character(space_a, s)
    assert fit == (plain[1], plain[0])  # w = 1: plain coordinate swap
