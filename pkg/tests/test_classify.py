"""Recognition, isomorphism decisions, and fine-grading enumeration."""

import random

import numpy as np
import pytest

from cartangrade.abgroup import AbGroup, PSubgroup, coset_rep, subgroup_key
from cartangrade.autos import (AutO, push_grading, random_auto, scale_auto,
                               volume_factor)
from cartangrade.classify import (OPEN_IN_PAPER, GradingInvariants,
                                  canonical_key, enumerate_fine, iso_decide,
                                  o_grading_from_w, orbit_probe, recognize_O,
                                  recognize_S)
from cartangrade.errors import AdmissibilityError, ObstructionError
from cartangrade.gfp import Config
from cartangrade.gradings import (Grading, admissible_degree,
                                  grade_O_construct, grade_S_construct,
                                  induce_W)
from cartangrade.oalg import OElem


CFG = Config(5, 2)
G2 = AbGroup(0, (5, 5))
A = G2.element((1, 0))
B = G2.element((0, 1))
G1 = AbGroup(0, (5,))
C = G1.element((1,))


def standard_cases():
    """Construction data covering mixed ranks and degenerate free degrees."""
    return [
        (G2, [A], [B]),
        (G2, [A, B], []),
        (G2, [], [A, B]),
        (G2, [A], [A ** 3]),
        (G2, [A], [G2.identity()]),
        (G1, [C], [C ** 2]),
        (G1, [], [C, C ** 3]),
        (G2, [], [G2.identity(), A]),
    ]


def test_recognition_round_trip():
    for G, basis, gamma in standard_cases():
        g = grade_O_construct(CFG, G, basis, gamma)
        frame, inv = recognize_O(g)
        assert inv.s == len(basis)
        assert subgroup_key(G, inv.P.basis) == subgroup_key(G, tuple(basis))
        psub = PSubgroup(G, tuple(basis))
        want = tuple(sorted(coset_rep(x, psub).coords for x in gamma))
        assert tuple(r.coords for r in inv.gamma_cosets) == want
        one = OElem.one(CFG)
        for y in frame[inv.s:]:
            assert g.degree_of(y) is not None
        for y in frame[:inv.s]:
            assert g.degree_of(one + y) is not None


def test_invariants_stable_under_pushing():
    rng = random.Random(11)
    for G, basis, gamma in standard_cases():
        g = grade_O_construct(CFG, G, basis, gamma)
        _, inv = recognize_O(g)
        for _ in range(8):
            moved = push_grading(random_auto(CFG, rng), g)
            _, inv2 = recognize_O(moved)
            assert canonical_key(inv2) == canonical_key(inv)
            assert inv2 == inv


def test_reduction_loop_on_dependent_unit_degrees():
    g = grade_O_construct(CFG, G1, [C], [C ** 2])
    _, inv = recognize_O(g)
    x2 = OElem.variable(CFG, 2)
    comps = {d: list(vs) for d, vs in g.components.items()}
    # the component at C^2 contains the unit z1^2 next to the free slot x2;
    # replacing the unit by z1^2 + x2 (same span, presented first) forces a
    # toral pick whose degree depends on the one found at C
    old = comps[C ** 2]
    unit = next(v for v in old if v.constant_term)
    comps[C ** 2] = [unit + x2] + [v for v in old if not v.constant_term]
    g2 = Grading(CFG, G1, "O", comps)
    _, inv2 = recognize_O(g2)
    assert inv2.s == 1
    assert canonical_key(inv2) == canonical_key(inv)


def test_trivial_grading_recognized():
    comps = {G1.identity(): [OElem(CFG, row)
                             for row in np.eye(CFG.n, dtype=np.int64)]}
    g = Grading(CFG, G1, "O", comps)
    _, inv = recognize_O(g)
    assert inv.s == 0
    assert all(r.is_identity for r in inv.gamma_cosets)


def test_derivation_grading_reconstruction():
    for G, basis, gamma in standard_cases():
        g = grade_O_construct(CFG, G, basis, gamma)
        assert o_grading_from_w(induce_W(g)).same_components(g)


def test_reconstruction_after_pushing():
    mu = random_auto(CFG, random.Random(5))
    g = push_grading(mu, grade_O_construct(CFG, G2, [A], [B]))
    w = induce_W(g)
    assert o_grading_from_w(w).same_components(g)
    # inducing commutes with pushing
    w2 = push_grading(mu, induce_W(grade_O_construct(CFG, G2, [A], [B])))
    assert w.same_components(w2)


def test_iso_positive_algebra_flavor():
    rng = random.Random(23)
    pairs = [
        ((G2, [A], [B]), (G2, [A], [A * B])),
        ((G2, [A], [B]), (G2, [A ** 2], [B])),
        ((G2, [], [A, B]), (G2, [], [B, A])),
        ((G2, [A, B], []), (G2, [A * B, B ** 2], [])),
        ((G1, [C], [G1.identity()]), (G1, [C], [C ** 3])),
    ]
    for (Gx, b1, g1), (Gy, b2, g2) in pairs:
        x = push_grading(random_auto(CFG, rng), grade_O_construct(CFG, Gx, b1, g1))
        y = push_grading(random_auto(CFG, rng), grade_O_construct(CFG, Gy, b2, g2))
        wit = iso_decide(x, y, "O")
        assert isinstance(wit, AutO)
        assert push_grading(wit, x).same_components(y)


def test_iso_negative_algebra_flavor():
    negatives = [
        ((G2, [A], [B]), (G2, [B], [A])),
        ((G2, [A], [B]), (G2, [], [A, B])),
        ((G2, [], [A, B]), (G2, [], [A, A])),
    ]
    for (Gx, b1, g1), (Gy, b2, g2) in negatives:
        x = grade_O_construct(CFG, Gx, b1, g1)
        y = grade_O_construct(CFG, Gy, b2, g2)
        assert iso_decide(x, y, "O") is None


def test_iso_derivation_flavor():
    x = grade_O_construct(CFG, G2, [A], [B])
    wx = induce_W(x)
    wy = push_grading(random_auto(CFG, random.Random(7)), wx)
    wit = iso_decide(wx, wy, "W")
    assert isinstance(wit, AutO)
    assert push_grading(wit, wx).same_components(wy)
    y = grade_O_construct(CFG, G2, [B], [A])
    assert iso_decide(wx, induce_W(y), "W") is None


def unipotent_2d(cfg, k):
    """Jacobian-one substitution x1 -> x1 + k*x2^2 on two variables."""
    x1 = OElem.variable(cfg, 1)
    x2 = OElem.variable(cfg, 2)
    return AutO([x1 + k * (x2 * x2), x2])


def test_iso_volume_flavor_below_full_rank():
    x = grade_O_construct(CFG, G2, [A], [B])
    assert admissible_degree(x, "S") == A * B
    # same subgroup, same free coset, same volume degree: A^4 * (B*A^2) = A*B
    y = grade_O_construct(CFG, G2, [A ** 4], [B * A ** 2])
    x1 = push_grading(unipotent_2d(CFG, 1), x)
    x2 = push_grading(scale_auto(CFG, 1, 2).compose(unipotent_2d(CFG, 3)), y)
    wit = iso_decide(x1, x2, "S")
    assert isinstance(wit, AutO)
    assert push_grading(wit, x1).same_components(x2)
    assert wit.jacobian() == OElem.one(CFG)


def test_iso_volume_flavor_separates_volume_degree():
    x = grade_O_construct(CFG, G2, [A], [B])
    y = grade_O_construct(CFG, G2, [A], [A * B])
    assert recognize_S(y).g0 == A ** 2 * B
    k1 = canonical_key(recognize_O(x)[1])
    k2 = canonical_key(recognize_O(y)[1])
    assert k1 == k2
    assert iso_decide(x, y, "S") is None
    assert isinstance(iso_decide(x, y, "O"), AutO)
    # brute-force agreement: no short volume-preserving word does it either
    assert orbit_probe(x, y, "S", depth=2) is None
    assert orbit_probe(x, y, "O", depth=2) is not None


def test_iso_volume_flavor_full_rank():
    x = grade_O_construct(CFG, G2, [A, B], [])
    # another basis of the full subgroup with the same degree product:
    # (A^2 B^3)(A^4 B^3) = A B
    y = grade_O_construct(CFG, G2, [A ** 2 * B ** 3, A ** 4 * B ** 3], [])
    assert recognize_S(x).g0 == A * B
    assert recognize_S(y).g0 == A * B
    wit = iso_decide(x, y, "S")
    assert isinstance(wit, AutO)
    assert volume_factor(wit) is not None
    assert push_grading(wit, x).same_components(y)
    # same subgroup, different volume degree
    z = grade_O_construct(CFG, G2, [A ** 2, B], [])
    assert recognize_S(z).g0 == A ** 2 * B
    assert iso_decide(x, z, "S") is None
    assert isinstance(iso_decide(x, z, "O"), AutO)


def test_volume_recognition_corners():
    # with no toral slots the volume degree is forced
    x = grade_O_construct(CFG, G2, [], [A, B])
    inv = recognize_S(x)
    assert inv.s == 0
    assert inv.g0 == A * B
    # a push with non-homogeneous jacobian leaves the volume flavor
    x1 = OElem.variable(CFG, 1)
    x2 = OElem.variable(CFG, 2)
    moved = push_grading(AutO([x1 + x1 * x2, x2]),
                         grade_O_construct(CFG, G2, [A], [B]))
    with pytest.raises(AdmissibilityError):
        recognize_S(moved)
    # identity volume degree is impossible at full toral rank
    with pytest.raises(ObstructionError):
        GradingInvariants(PSubgroup(G2, (A, B)), [], G2.identity())
    # but fine with free slots present
    inv = GradingInvariants(PSubgroup(G1, (C,)), [C], G1.identity())
    assert inv.g0.is_identity


def test_iso_on_attached_subalgebra_gradings():
    sg = grade_S_construct(CFG, G2, PSubgroup(G2, (A,)), [B], A * B)
    assert sg.ambient == "sub"
    assert recognize_S(sg.origin["o_grading"]).g0 == A * B
    # same subgroup, same free coset, same volume degree, other presentation
    sg2 = grade_S_construct(CFG, G2, PSubgroup(G2, (A,)), [B * A ** 3], A * B)
    wit = iso_decide(sg, sg2, "S")
    assert isinstance(wit, AutO)
    assert push_grading(wit, sg).same_components(sg2)
    # a shifted free coset is a different class
    sg3 = grade_S_construct(CFG, G2, PSubgroup(G2, (A,)), [B ** 2], A * B ** 2)
    assert iso_decide(sg, sg3, "S") is None
    # stripped origin: nothing to decide on
    bare = Grading(CFG, G2, "sub", sg.components, sub_basis=sg.sub_basis)
    with pytest.raises(AdmissibilityError):
        iso_decide(bare, bare, "S")


def test_fine_enumeration_signatures():
    for ambient in ("O", "W"):
        fine = enumerate_fine(CFG, ambient)
        assert len(fine) == CFG.m + 1
        sigs = {(g.group.free_rank, g.group.torsion) for g in fine}
        assert len(sigs) == CFG.m + 1


def test_symplectic_dispatch():
    x = grade_O_construct(CFG, G2, [A], [B])
    y = push_grading(unipotent_2d(CFG, 2), x)
    wit = iso_decide(x, y, "H")
    assert isinstance(wit, AutO)
    cfg4 = Config(5, 4)
    c4 = G1.element((1,))
    x4 = grade_O_construct(cfg4, G1, [], [c4, c4, c4, c4])
    assert iso_decide(x4, x4, "H") == OPEN_IN_PAPER


def test_three_variable_decisions():
    cfg3 = Config(5, 3)
    G3 = AbGroup(0, (5, 5, 5))
    u = G3.element((1, 0, 0))
    v = G3.element((0, 1, 0))
    w = G3.element((0, 0, 1))
    x1 = OElem.variable(cfg3, 1)
    x2 = OElem.variable(cfg3, 2)
    x3 = OElem.variable(cfg3, 3)
    mu1 = AutO([x1 + x2 * x3, x2, x3])
    mu2 = AutO([x1, x2 + x1 * x1, x3]).compose(scale_auto(cfg3, 2, 3))
    # degree products agree: u^2 * (v u) * (w u^3) = u v w
    x = push_grading(mu1, grade_O_construct(cfg3, G3, [u], [v, w]))
    y = push_grading(mu2,
                     grade_O_construct(cfg3, G3, [u ** 2], [v * u, w * u ** 3]))
    wit = iso_decide(x, y, "S")
    assert isinstance(wit, AutO)
    assert wit.jacobian() == OElem.one(cfg3)
    assert push_grading(wit, x).same_components(y)
    wx, wy = induce_W(x), induce_W(y)
    witw = iso_decide(wx, wy, "W")
    assert isinstance(witw, AutO)
    assert push_grading(witw, wx).same_components(wy)


def test_invariant_keys_hash_and_compare():
    i1 = GradingInvariants(PSubgroup(G2, (A,)), [B])
    i2 = GradingInvariants(PSubgroup(G2, (A ** 2,)), [A * B])
    assert i1 == i2
    assert hash(i1) == hash(i2)
    assert canonical_key(i1) == canonical_key(i2)
    i3 = GradingInvariants(PSubgroup(G2, (A,)), [B ** 2])
    assert i1 != i3
    i4 = GradingInvariants(PSubgroup(G2, (A,)), [B], A * B)
    i5 = GradingInvariants(PSubgroup(G2, (A,)), [B], A ** 2 * B)
    assert i4 != i5
