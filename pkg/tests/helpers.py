"""Shared test utilities: independent oracles and random generators."""

from __future__ import annotations

import numpy as np

from gl2d.induction import (
    CosetRep,
    GroupElement,
    InductionElement,
    alpha_elt,
    canonicalize,
    kbar,
)
from gl2d.induction import phi_rotate
from gl2d.weight import kernel_factor, phi_alpha_inv, sigma_act


def hecke_coset_sum(f: InductionElement) -> InductionElement:
    """Direct double-coset sum realization of the operator (test oracle).

    Sums [g g', phi(g'^-1) v] over the q^w + 1 coset representatives of
    the alpha double coset; independent of the closed form and of the
    equivariance route.
    """
    space = f.space
    ring = space.ring
    F = space.field
    out = InductionElement.zero(space)
    for rep, wv in f.terms():
        g = rep.matrix(ring)
        for lam in range(F.order):
            child = g @ CosetRep(0, 1, (lam,)).matrix(ring)
            u = kernel_factor(wv, lam, "x")
            rep2, k2, zz = canonicalize(child)
            out = out + InductionElement.single(
                space, rep2, sigma_act(kbar(k2), phi_rotate(space, u, zz))
            )
        child = g @ alpha_elt(ring)
        u = phi_alpha_inv(wv)
        rep2, k2, zz = canonicalize(child)
        out = out + InductionElement.single(
            space, rep2, sigma_act(kbar(k2), phi_rotate(space, u, zz))
        )
    return out


def random_unit_matrix(ring, rng) -> GroupElement:
    F = ring.field
    while True:
        es = [
            ring.from_digits([int(rng.integers(0, F.order)) for _ in range(ring.ndigits)])
            for _ in range(4)
        ]
        det = F.SUB[
            F.MUL[es[0].residue(), es[3].residue()],
            F.MUL[es[1].residue(), es[2].residue()],
        ]
        if det:
            return GroupElement(ring, *es)


def random_group_elt(ring, rng, max_disp=1, pi_scale=True) -> GroupElement:
    side = int(rng.integers(0, 2)) if max_disp >= 1 else 0
    n_hi = max_disp if side == 0 else max_disp - 1
    n = int(rng.integers(0, n_hi + 1))
    mu = tuple(int(rng.integers(0, ring.field.order)) for _ in range(n))
    g = CosetRep(side, n, mu).matrix(ring) @ random_unit_matrix(ring, rng)
    if pi_scale and rng.integers(0, 2):
        g = g @ GroupElement(ring, ring.pi(1), ring.zero(), ring.zero(), ring.pi(1))
    return g


def random_weight(wp, rng):
    from gl2d.weight import WeightVector

    return WeightVector(
        wp, np.asarray(rng.integers(0, wp.field.order, wp.dim), dtype=np.int16)
    )
