import numpy as np
import pytest

from gl2d import field
from gl2d.errors import CatalogBroken, InvalidExponent, WindowExceeded
from gl2d.hecke import (
    PreimageWitness,
    SpanTarget,
    beta_translate,
    digit_exponents_le,
    hecke_t,
    hecke_t_oracle,
    im_t_reduce,
    preimage_catalog,
    reduce_exponent,
    stack_coords,
    t_related_targets,
    window_kernel_dimension,
    witness_s,
    witness_s1r_alpha,
    witness_s_r,
    witness_weighted,
)
from gl2d.induction import (
    CosetRep,
    InductionElement,
    InductionSpace,
    act,
    alpha_rep,
    beta_elt,
    identity_rep,
    make_s,
    make_t,
    support_filtration,
)
from gl2d.od import RingParams
from gl2d.weight import WeightParams, WeightVector

from helpers import hecke_coset_sum, random_group_elt, random_weight


def test_depth0_images(space_a):
    wp = space_a.weight
    # T[Id, pure_x] = s_1^0 for r > 0
    assert hecke_t(InductionElement.single(space_a, identity_rep(), wp.pure_x())) == make_s(space_a, 1, 0)
    # T[Id, pure_y] = (-1)^r s_1^r + [alpha, pure_y]
    F = space_a.field
    got = hecke_t(InductionElement.single(space_a, identity_rep(), wp.pure_y()))
    sign = int(F.pow_int(F.NEG[1], wp.r))
    expect = make_s(space_a, 1, reduce_exponent(F.order, wp.r)).scale(sign) + (
        InductionElement.single(space_a, alpha_rep(), wp.pure_y())
    )
    assert got == expect


def test_depth0_image_r0(space_a):
    wp0 = WeightParams(space_a.field, (0, 0))
    sp0 = InductionSpace(space_a.ring, wp0)
    got = hecke_t(make_s(sp0, 0, 0))
    assert got == make_s(sp0, 1, 0) + InductionElement.single(sp0, alpha_rep(), wp0.pure_y())


@pytest.mark.parametrize("fixture", ["space_a", "space_b", "space_c", "space_small"])
def test_triple_agreement_random_terms(fixture, request):
    """Closed form == direct double-coset sum == equivariance oracle."""
    space = request.getfixturevalue(fixture)
    rng = np.random.default_rng(17)
    Q = space.field.order
    for _ in range(12):
        side = int(rng.integers(0, 2))
        n = int(rng.integers(0, 3))
        mu = tuple(int(v) for v in rng.integers(0, Q, n))
        f = InductionElement.single(
            space, CosetRep(side, n, mu), random_weight(space.weight, rng)
        )
        a = hecke_t(f)
        assert a == hecke_coset_sum(f)
        assert a == hecke_t_oracle(f)


def test_linearity_and_equivariance(space_a):
    rng = np.random.default_rng(18)
    f1 = make_s(space_a, 1, 5)
    f2 = make_s(space_a, 2, 7)
    assert hecke_t(f1 + f2) == hecke_t(f1) + hecke_t(f2)
    assert hecke_t(f1.scale(11)) == hecke_t(f1).scale(11)
    for _ in range(5):
        g = random_group_elt(space_a.ring, rng, 1)
        assert hecke_t(act(g, f1)) == act(g, hecke_t(f1))


def test_witness_s_and_translation(space_a):
    wit = witness_s(space_a, 1, 0)
    assert wit.target == make_s(space_a, 1, 0)
    assert wit.scalar == 1
    assert wit.verify()
    bt = beta_translate(wit, beta_elt(space_a.ring))
    assert bt.verify()
    with pytest.raises(InvalidExponent):
        witness_s(space_a, 1, space_a.weight.r)  # k = r excluded
    with pytest.raises(InvalidExponent):
        witness_s(space_a, 1, 4)  # digit 4 exceeds the box


def test_witness_catalog_kinds(space_a):
    assert isinstance(preimage_catalog(space_a, 1, "s", k=3), PreimageWitness)
    assert isinstance(preimage_catalog(space_a, 2, "s_r"), PreimageWitness)
    assert isinstance(preimage_catalog(space_a, 1, "s_1_r_plus_alpha"), PreimageWitness)
    items = preimage_catalog(space_a, 1, "t_related", s=0)
    kinds = {type(it) for it in items}
    assert PreimageWitness in kinds and SpanTarget in kinds
    with pytest.raises(InvalidExponent):
        preimage_catalog(space_a, 1, "nope")


def test_witness_s_r_tail_cancellation(space_a):
    """The depth-dropping part of the pure-y preimage dies by the
    power-sum identity."""
    wit = witness_s_r(space_a, 2)
    img = hecke_t(wit.preimage)
    assert set(support_filtration(img)) == {(0, 2)}
    sign = int(space_a.field.pow_int(space_a.field.NEG[1], space_a.weight.r))
    assert wit.scalar == sign


def test_broken_witness_detected(space_a):
    wit = witness_s(space_a, 1, 1)
    with pytest.raises(CatalogBroken):
        PreimageWitness("bogus", wit.target.scale(2), wit.preimage)


def test_weighted_witness(space_a):
    wit = witness_weighted(space_a, 2, (5, 17))
    assert wit.verify()
    with pytest.raises(InvalidExponent):
        witness_weighted(space_a, 2, (5, 4))


def test_im_t_reduce(space_a):
    wit0 = witness_s(space_a, 2, 0)
    res = im_t_reduce(make_s(space_a, 2, 0), [wit0])
    assert res.in_span and list(res.coefficients) == [1]
    # linear combination recovers exact coefficients
    wit1 = witness_s(space_a, 2, 1)
    f = wit0.target.scale(3) + wit1.target.scale(5)
    res = im_t_reduce(f, [wit0, wit1])
    assert res.in_span and list(res.coefficients) == [3, 5]
    # mixed-monomial element is not in the pure-line span
    res = im_t_reduce(make_t(space_a, 1, 0), [witness_s(space_a, 1, 0), witness_s(space_a, 1, 1)])
    assert not res.in_span
    with pytest.raises(WindowExceeded):
        im_t_reduce(make_s(space_a, 2, 0), [wit0], window=1)


def test_window_kernel_trivial_small(space_small):
    assert window_kernel_dimension(space_small, 1) == 0


def test_stack_coords_rank(space_a):
    from gl2d import linalg

    elems = [make_s(space_a, 1, k) for k in (0, 1, 2, 3)]
    _keys, mat = stack_coords(elems)
    assert linalg.rank(space_a.field, mat) == 4


def test_exponent_reduction():
    assert reduce_exponent(49, 0) == 0
    assert reduce_exponent(49, 48) == 48
    assert reduce_exponent(49, 49) == 1
    assert reduce_exponent(49, 7 * 49) == 7
    # the reduced exponent acts identically on every field value
    F = field(7, 2, 1)
    for k in (49, 53, 96, 343):
        kr = reduce_exponent(49, k)
        for c in range(49):
            assert F.pow_int(c, k) == F.pow_int(c, kr)


def test_digit_exponent_box(space_a):
    assert digit_exponents_le(space_a, 0)
    assert digit_exponents_le(space_a, 3 + 7 * 3)
    assert not digit_exponents_le(space_a, 4)
    assert not digit_exponents_le(space_a, 7 * 4)
    assert not digit_exponents_le(space_a, 49)
