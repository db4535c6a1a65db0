"""Suite-level behaviour on small/fast configurations."""

import numpy as np
import pytest

from gl2d import field
from gl2d.basis import (
    completeness_probe,
    enumerate_basis,
    fit_character,
    i1_generator_family,
    paper_character,
    reference_character,
    LabeledElement,
)
from gl2d.config import Config
from gl2d.errors import ConfigRejected, ProbeSkipped
from gl2d.induction import InductionSpace, act, beta_elt, diag_elt, make_s, make_t
from gl2d.od import RingParams
from gl2d.suites import Env, run, suite_lemma35, suite_prop33
from gl2d.weight import WeightParams


def test_enumerate_basis_counts(space_a, space_c):
    # e = 1 branch: 2 slots x 2 depths x 2 translates + 2 depth-0 = 10
    elems = enumerate_basis(space_a, 2, e=1)
    assert len(elems) == 10
    labels = [lab.label for lab in elems]
    assert "s_1^4" in labels and "beta s_2^28" in labels
    assert "[Id, pure_x]" in labels and "[alpha, pure_y]" in labels
    # e > 1 branch adds the mixed-monomial families
    elems_c = enumerate_basis(space_c, 1, e=2)
    assert len(elems_c) == 2 * 2 * 1 * 2 + 2  # S_1 (4) + T_1 (4) + 2
    assert sum(1 for lab in elems_c if lab.family == "t") == 4


def test_enumerate_basis_rejects_bad_hypotheses(f49):
    ring = RingParams.make(f49, e=1, ndigits=5)
    sp = InductionSpace(ring, WeightParams(f49, (1, 1)))
    with pytest.raises(ConfigRejected):
        enumerate_basis(sp, 1, e=1)
    F7 = field(7, 1, 1)
    sp1 = InductionSpace(RingParams.make(F7, e=1, ndigits=5), WeightParams(F7, (3,)))
    with pytest.raises(ConfigRejected):
        enumerate_basis(sp1, 1, e=1)


def test_characters_fit_and_reference(space_a):
    space = space_a
    F = space.field
    rng = np.random.default_rng(0)
    for k in (0, 1, 4, 24):
        lab = LabeledElement("s", 0, 1, False, k, make_s(space, 1, k))
        fit = fit_character(space, lab.element, rng=rng)
        assert fit is not None
        assert fit == reference_character(space, lab)
        # the fitted character is a^(r-k) d^k here
        assert fit == ((space.weight.r - k) % 48, k % 48)
    lab_t = LabeledElement("t", 0, 1, False, 0, make_t(space, 1, 0))
    assert fit_character(space, lab_t.element, rng=rng) == reference_character(space, lab_t)


def test_beta_character_rule(space_b):
    space = space_b
    rng = np.random.default_rng(1)
    k = 4
    s = make_s(space, 1, k)
    bs = act(beta_elt(space.ring), s)
    lab = LabeledElement("s", 0, 1, True, k, bs)
    fit = fit_character(space, bs, rng=rng)
    assert fit == reference_character(space, lab)


def test_non_eigenvector_detected(space_a):
    f = make_s(space_a, 1, 0) + make_s(space_a, 1, 1)
    assert fit_character(space_a, f) is None


def test_printed_character_disagrees(space_a):
    """The printed closed form is refuted by the exact action: recorded as
    a divergence by the suites (see the character records)."""
    lab = LabeledElement("s", 0, 1, False, 0, make_s(space_a, 1, 0))
    fit = fit_character(space_a, lab.element)
    assert fit == (space_a.weight.r % 48, 0)
    assert paper_character(space_a, lab) == (1, 0)
    assert fit != paper_character(space_a, lab)


def test_probe_depth0_small():
    cfg = Config(p=7, f=1, w=2, e=1, r_vec=(3, 3), suites=("probe",)).validated()
    env = Env(cfg)
    result = completeness_probe(env.space, env.family, depth=0)
    assert result["dimension"] == 2
    assert result["window_dim"] == 2 * env.space.weight.dim
    assert result["leaked"] == 0


def test_probe_requires_exact_backend(space_c):
    fam = i1_generator_family(space_c, positions=1)
    with pytest.raises(ProbeSkipped):
        completeness_probe(space_c, fam, depth=0)


def test_probe_r0_full_induction_variant():
    """Without the quotient (trivial weight), the depth-0 invariants are
    the two constant functionals: the probe finds them."""
    F = field(3, 1, 2)
    ring = RingParams.make(F, e=1, ndigits=5)
    sp = InductionSpace(ring, WeightParams(F, (0, 0)))
    fam = i1_generator_family(sp)
    result = completeness_probe(sp, fam, depth=0)
    assert result["dimension"] == 2  # [Id, 1] and [alpha, 1]


def test_small_full_run_green():
    cfg = Config(
        p=3, f=1, w=2, e=1, r_vec=(1, 1), n_max=1,
        suites=("weight", "coset", "hecke", "prop33"), seed=1,
    )
    rep = run(cfg)
    counts = rep.counts()
    assert counts["fail"] == 0
    assert rep.exit_code(disputed="divergence") == 0


def test_prop33_kspan_small(f9):
    cfg = Config(p=3, f=1, w=2, e=1, r_vec=(1, 1), n_max=1, suites=("prop33",), seed=0)
    env = Env(cfg)
    records = suite_prop33(env)
    span = [r for r in records if r.name == "k-span-dimension"][0]
    assert span.status == "pass"
    assert span.params["rank"] == 10  # q^w + 1 = 9 + 1


def test_suite_subset_reports_are_stable():
    cfg = Config(p=3, f=1, w=2, e=1, r_vec=(1, 1), n_max=1, suites=("weight",), seed=5)
    r1 = run(cfg).to_json()
    r2 = run(cfg).to_json()
    assert r1 == r2
