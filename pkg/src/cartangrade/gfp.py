"""Prime-field setup: ambient configuration, residues, multi-index tables.

Scalars are plain ints in [0, p); the modulus travels with an explicit
immutable Config rather than global state.  Multi-indices are tuples of
length m with entries in [0, p), enumerated lexicographically; the flat
index of a multi-index is its mixed-radix value, so tables over the
monomial basis are dense numpy arrays of length p**m.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .errors import AxisRangeError, ConfigError, DimensionError

DEFAULT_MAX_DIM = 2401


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, int(math.isqrt(n)) + 1):
        if n % d == 0:
            return False
    return True


def max_dim_limit() -> int:
    raw = os.environ.get("CARTAN_GRADE_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        val = int(raw)
    except ValueError as exc:
        raise ConfigError(f"CARTAN_GRADE_MAX_DIM must be an integer, got {raw!r}") from exc
    if val < 2:
        raise ConfigError("CARTAN_GRADE_MAX_DIM must be at least 2")
    return val


@dataclass(frozen=True)
class Config:
    """Ambient parameters (p, m). p must be prime; p > 3 unless explicitly unlocked.

    allow_small_p=True admits p in {2, 3} for derivation-algebra work only;
    the special/hamiltonian layers are mathematically untested there.
    """

    p: int = 5
    m: int = 2
    allow_small_p: bool = False

    def __post_init__(self) -> None:
        if not _is_prime(self.p):
            raise ConfigError(f"p must be prime, got {self.p}")
        if self.p <= 3 and not self.allow_small_p:
            raise ConfigError(f"p={self.p} needs allow_small_p=True and is supported for the derivation algebra only")
        if self.m < 1:
            raise ConfigError(f"m must be >= 1, got {self.m}")
        if self.p ** self.m > max_dim_limit():
            raise ConfigError(f"p**m = {self.p ** self.m} exceeds the configured limit {max_dim_limit()}")

    @property
    def n(self) -> int:
        """Dimension of the truncated polynomial algebra."""
        return self.p ** self.m

    def check_axis(self, i: int) -> None:
        if not 1 <= i <= self.m:
            raise AxisRangeError(f"axis {i} out of range 1..{self.m}")

    def index(self, alpha) -> int:
        """Flat index of a multi-index (entries reduced mod p)."""
        if len(alpha) != self.m:
            raise DimensionError(f"multi-index length {len(alpha)} != m={self.m}")
        idx = 0
        for a in alpha:
            idx = idx * self.p + (a % self.p)
        return idx

    def alpha(self, idx: int) -> tuple:
        return tuple(int(a) for a in alpha_table(self.p, self.m)[idx])

    def inv(self, a: int) -> int:
        return pow(a % self.p, -1, self.p)


@lru_cache(maxsize=None)
def alpha_table(p: int, m: int):
    """(p**m, m) array of all multi-indices in lexicographic order."""
    tbl = np.array(list(product(range(p), repeat=m)), dtype=np.int64)
    tbl.setflags(write=False)
    return tbl


@lru_cache(maxsize=None)
def weight_table(p: int, m: int):
    """|alpha| per flat index."""
    w = alpha_table(p, m).sum(axis=1)
    w.setflags(write=False)
    return w


@lru_cache(maxsize=None)
def radix_weights(p: int, m: int):
    w = np.array([p ** (m - 1 - i) for i in range(m)], dtype=np.int64)
    w.setflags(write=False)
    return w


@lru_cache(maxsize=None)
def mul_index_table(p: int, m: int):
    """(n, n) int32 table: flat index of alpha+beta, or n when truncated away.

    Built in row chunks to bound the temporary footprint at large n.
    """
    alphas = alpha_table(p, m)
    n = p ** m
    radix = radix_weights(p, m)
    out = np.empty((n, n), dtype=np.int32)
    chunk = max(1, (1 << 21) // n)
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        s = alphas[lo:hi, None, :] + alphas[None, :, :]
        ok = (s < p).all(axis=2)
        idx = s @ radix
        out[lo:hi] = np.where(ok, idx, n).astype(np.int32)
    out.setflags(write=False)
    return out


def mi_enumerate(cfg: Config) -> list:
    """All multi-indices for cfg, lexicographically."""
    return [tuple(int(a) for a in row) for row in alpha_table(cfg.p, cfg.m)]


def binom_mod_p(alpha, beta, p: int) -> int:
    """Product of per-coordinate binomials C(a_i+b_i, a_i) mod p; 0 on truncation.

    The explicit cutoff at a_i+b_i >= p agrees with the mod-p value of the
    integer binomial (Lucas), so divided-power products can use it directly.
    """
    if len(alpha) != len(beta):
        raise DimensionError(f"multi-index lengths differ: {len(alpha)} vs {len(beta)}")
    out = 1
    for a, b in zip(alpha, beta):
        if a < 0 or b < 0:
            raise AxisRangeError("multi-index entries must be nonnegative")
        if a + b >= p:
            return 0
        out = out * math.comb(a + b, a) % p
    return out
