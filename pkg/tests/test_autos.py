"""Algebra automorphisms: substitution action, witnesses, normalization."""

import random

import numpy as np
import pytest

from cartangrade.abgroup import AbGroup
from cartangrade.autos import (AutO, basis_change_auto, normalize_omega_S,
                               permutation_auto, push_grading, random_auto,
                               random_graded_auto, scale_auto, shift_auto,
                               volume_factor)
from cartangrade.errors import ObstructionError, ValidityError
from cartangrade.forms import omega_volume
from cartangrade.gfp import Config
from cartangrade.gradings import grade_O_construct, induce_W, verify_grading
from cartangrade.oalg import OElem
from cartangrade.witt import WElem


def random_elem(cfg, rng):
    return OElem(cfg, np.array([rng.randrange(cfg.p) for _ in range(cfg.n)],
                               dtype=np.int64))


def random_derivation(cfg, rng):
    t = np.array([[rng.randrange(cfg.p) for _ in range(cfg.n)]
                  for _ in range(cfg.m)], dtype=np.int64)
    return WElem(cfg, t)


def test_construction_validates_images():
    cfg = Config(5, 2)
    x1, x2 = OElem.variable(cfg, 1), OElem.variable(cfg, 2)
    with pytest.raises(ValidityError):
        AutO([x1 + OElem.one(cfg), x2])  # nonzero constant term
    with pytest.raises(ValidityError):
        AutO([x1, 2 * x1])  # dependent linear parts
    AutO([x1 + x2, x2 + x1 * x2])  # fine


def test_substitution_is_an_algebra_map():
    cfg = Config(5, 2)
    rng = random.Random(7)
    for _ in range(10):
        mu = random_auto(cfg, rng)
        f, g = random_elem(cfg, rng), random_elem(cfg, rng)
        assert mu.apply(f * g) == mu.apply(f) * mu.apply(g)
        assert mu.apply(f + g) == mu.apply(f) + mu.apply(g)
        assert mu.apply(OElem.one(cfg)) == OElem.one(cfg)


def test_compose_inverse_and_identity():
    cfg = Config(5, 2)
    rng = random.Random(11)
    ident = AutO.identity(cfg)
    for _ in range(8):
        mu, nu = random_auto(cfg, rng), random_auto(cfg, rng)
        f = random_elem(cfg, rng)
        assert mu.compose(nu).apply(f) == mu.apply(nu.apply(f))
        assert mu.compose(mu.inverse()) == ident
        assert mu.inverse().compose(mu) == ident


def test_push_derivation_is_conjugation():
    cfg = Config(5, 2)
    rng = random.Random(13)
    for _ in range(8):
        mu = random_auto(cfg, rng)
        d = random_derivation(cfg, rng)
        f = random_elem(cfg, rng)
        pushed = mu.push_derivation(d)
        assert pushed.apply(f) == mu.apply(d.apply(mu.inverse().apply(f)))
    # conjugation respects brackets
    mu = random_auto(cfg, rng)
    d, e = random_derivation(cfg, rng), random_derivation(cfg, rng)
    assert mu.push_derivation(d.bracket(e)) == \
        mu.push_derivation(d).bracket(mu.push_derivation(e))


def test_jacobian_is_multiplicative():
    cfg = Config(5, 2)
    rng = random.Random(17)
    for _ in range(6):
        mu, nu = random_auto(cfg, rng), random_auto(cfg, rng)
        lhs = mu.compose(nu).jacobian()
        rhs = mu.jacobian() * mu.apply(nu.jacobian())
        assert lhs == rhs


def test_volume_factor_of_standard_witnesses():
    cfg = Config(5, 3)
    assert volume_factor(permutation_auto(cfg, 0, (1, 0, 2))) == 5 - 1
    assert volume_factor(permutation_auto(cfg, 0, (1, 2, 0))) == 1
    assert volume_factor(scale_auto(cfg, 2, 3)) == 3
    assert volume_factor(AutO.identity(cfg)) == 1
    # shifts multiply free variables by units; the factor stays a unit but
    # the jacobian need not be scalar
    mu = shift_auto(cfg, 1, [[2], [0]])
    jac = mu.jacobian()
    assert jac.is_unit()


def test_act_on_form_tracks_the_jacobian_on_the_volume_form():
    cfg = Config(5, 2)
    rng = random.Random(19)
    omega = omega_volume(cfg)
    for _ in range(6):
        mu = random_auto(cfg, rng)
        got = mu.act_on_form(omega)
        want = mu.jacobian()
        assert got.coeff((1, 2)) == want


def test_push_grading_is_a_left_action():
    cfg = Config(5, 2)
    g = AbGroup(0, (5, 5))
    b, c = g.element((1, 0)), g.element((0, 1))
    grading = grade_O_construct(cfg, g, [b], [c])
    rng = random.Random(23)
    for _ in range(5):
        mu, nu = random_auto(cfg, rng), random_auto(cfg, rng)
        once = push_grading(mu, push_grading(nu, grading))
        joint = push_grading(mu.compose(nu), grading)
        assert once.same_components(joint)
    pushed = push_grading(random_auto(cfg, rng), grading)
    assert verify_grading(pushed).ok


def test_standard_witnesses_transport_standard_degree_data():
    cfg = Config(5, 2)
    g = AbGroup(0, (5, 5))
    b, c = g.element((1, 0)), g.element((0, 1))
    grading = grade_O_construct(cfg, g, [b], [c])
    # a shift multiplies the free degree by toral degrees
    mu = shift_auto(cfg, 1, [[3]])
    want = grade_O_construct(cfg, g, [b], [c * b.inverse() ** 3])
    assert push_grading(mu, grading).same_components(want)
    # a toral basis change re-reads the toral degrees over the new basis
    nu = basis_change_auto(cfg, 1, [[2]])
    want = grade_O_construct(cfg, g, [b ** 3], [c])
    assert push_grading(nu, grading).same_components(want)


def test_random_graded_autos_fix_the_grading():
    cfg = Config(5, 2)
    g = AbGroup(0, (5, 5))
    b, c = g.element((1, 0)), g.element((0, 1))
    grading = grade_O_construct(cfg, g, [b], [c])
    rng = random.Random(29)
    for _ in range(10):
        mu = random_graded_auto(grading, rng)
        assert push_grading(mu, grading).same_components(grading)


def test_normalization_fixes_the_volume_form_exactly():
    cfg = Config(5, 2)
    g = AbGroup(0, (5,))
    b = g.element((1,))
    # colliding degrees force genuine multi-round corrections
    grading = grade_O_construct(cfg, g, [b], [b])
    omega = omega_volume(cfg)
    rng = random.Random(31)
    multi_round = 0
    for _ in range(25):
        mu = random_graded_auto(grading, rng)
        trace = []
        nu = normalize_omega_S(mu, grading, _trace=trace)
        assert nu.act_on_form(omega) == omega
        assert len(trace) <= 5
        assert push_grading(nu, grading).same_components(grading)
        if len(trace) >= 2:
            multi_round += 1
    assert multi_round > 0


def test_normalization_obstruction_at_full_toral_rank():
    cfg = Config(5, 2)
    g = AbGroup(0, (5, 5))
    b, c = g.element((1, 0)), g.element((0, 1))
    grading = grade_O_construct(cfg, g, [b, c], [])
    mu = scale_auto(cfg, 1, 2)  # scalar jacobian 2, cannot be corrected
    with pytest.raises(ObstructionError):
        normalize_omega_S(mu, grading)
    ident = AutO.identity(cfg)
    assert normalize_omega_S(ident, grading) == ident