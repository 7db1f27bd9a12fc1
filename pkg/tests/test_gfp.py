"""Configuration, multi-index tables, and mod-p binomials."""

import math
import random

import numpy as np
import pytest

from cartangrade.errors import AxisRangeError, ConfigError, DimensionError
from cartangrade.gfp import (Config, alpha_table, binom_mod_p, mi_enumerate,
                             mul_index_table, radix_weights, weight_table)


def test_config_rejects_bad_parameters():
    with pytest.raises(ConfigError):
        Config(4, 2)
    with pytest.raises(ConfigError):
        Config(9, 2)
    with pytest.raises(ConfigError):
        Config(5, 0)
    with pytest.raises(ConfigError):
        Config(5, 6)  # 5**6 blows the dimension cap


def test_small_characteristic_needs_explicit_unlock():
    with pytest.raises(ConfigError):
        Config(3, 2)
    assert Config(3, 2, allow_small_p=True).n == 9
    assert Config(2, 3, allow_small_p=True).n == 8


def test_flat_index_round_trip():
    cfg = Config(5, 3)
    for idx in range(cfg.n):
        assert cfg.index(cfg.alpha(idx)) == idx
    assert cfg.index((0, 0, 0)) == 0
    assert cfg.index((4, 4, 4)) == cfg.n - 1
    # entries are reduced mod p before packing
    assert cfg.index((5, 0, 7)) == cfg.index((0, 0, 2))


def test_alpha_table_is_lexicographic_and_frozen():
    tbl = alpha_table(5, 2)
    assert tbl.shape == (25, 2)
    assert tbl[0].tolist() == [0, 0]
    assert tbl[1].tolist() == [0, 1]
    assert tbl[5].tolist() == [1, 0]
    with pytest.raises(ValueError):
        tbl[0, 0] = 1


def test_weight_and_radix_tables():
    assert weight_table(5, 2).tolist() == [a + b for a in range(5) for b in range(5)]
    assert radix_weights(5, 3).tolist() == [25, 5, 1]


def test_mul_index_table_matches_direct_addition():
    cfg = Config(5, 2)
    tbl = mul_index_table(5, 2)
    rng = random.Random(11)
    for _ in range(300):
        s, t = rng.randrange(cfg.n), rng.randrange(cfg.n)
        a, b = cfg.alpha(s), cfg.alpha(t)
        total = tuple(x + y for x, y in zip(a, b))
        if all(x < 5 for x in total):
            assert tbl[s, t] == cfg.index(total)
        else:
            assert tbl[s, t] == cfg.n


def test_mi_enumerate_covers_every_index_once():
    cfg = Config(7, 2)
    mis = mi_enumerate(cfg)
    assert len(mis) == 49
    assert len(set(mis)) == 49
    assert mis == sorted(mis)


def test_binom_mod_p_agrees_with_integer_binomials():
    rng = random.Random(23)
    for _ in range(200):
        p = rng.choice([5, 7])
        a = [rng.randrange(p) for _ in range(2)]
        b = [rng.randrange(p) for _ in range(2)]
        got = binom_mod_p(a, b, p)
        if any(x + y >= p for x, y in zip(a, b)):
            assert got == 0
        else:
            want = 1
            for x, y in zip(a, b):
                want = want * math.comb(x + y, x) % p
            assert got == want


def test_binom_mod_p_validates_input():
    with pytest.raises(DimensionError):
        binom_mod_p([1], [1, 2], 5)
    with pytest.raises(AxisRangeError):
        binom_mod_p([-1], [0], 5)


def test_axis_check():
    cfg = Config(5, 2)
    cfg.check_axis(1)
    cfg.check_axis(2)
    with pytest.raises(AxisRangeError):
        cfg.check_axis(0)
    with pytest.raises(AxisRangeError):
        cfg.check_axis(3)
