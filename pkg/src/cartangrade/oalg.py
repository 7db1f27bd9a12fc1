"""Truncated polynomial algebra F[x_1..x_m]/(x_i^p) over GF(p).

Elements carry a dense coefficient table over the monomial basis x^alpha
(flat index = mixed-radix value of alpha).  The product is the truncated
convolution: x^alpha * x^beta = x^(alpha+beta), dropped whenever a
coordinate reaches p.  Divided powers and the grouplike generators
z_i = 1 + x_i are provided as constructors; z-exponents live mod p since
z_i^p = 1.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import (
    AxisRangeError,
    ConfigMismatchError,
    DimensionError,
    ValidityError,
    ZeroElementError,
)
from .gfp import Config, alpha_table, mul_index_table, radix_weights, weight_table


def _freeze(arr):
    arr.setflags(write=False)
    return arr


def mul_tables(cfg: Config, a, b):
    """Raw truncated product of two coefficient tables (1-D int64 arrays)."""
    p, n = cfg.p, cfg.n
    ia = np.flatnonzero(a)
    ib = np.flatnonzero(b)
    if ia.size == 0 or ib.size == 0:
        return np.zeros(n, dtype=np.int64)
    tbl = mul_index_table(p, cfg.m)
    tgt = tbl[np.ix_(ia, ib)]
    # float64 accumulation is exact here: products < p^2, at most n summands
    vals = (a[ia][:, None] * b[ib][None, :]).astype(np.float64)
    out = np.bincount(tgt.ravel(), weights=vals.ravel(), minlength=n + 1)
    return out[:n].astype(np.int64) % p


@lru_cache(maxsize=None)
def partial_matrix(p: int, m: int, i: int):
    """n x n matrix of d/dx_i acting on coefficient tables."""
    n = p ** m
    alphas = alpha_table(p, m)
    radix = radix_weights(p, m)
    out = np.zeros((n, n), dtype=np.int64)
    src = np.flatnonzero(alphas[:, i - 1] > 0)
    dst = src - radix[i - 1]
    out[dst, src] = alphas[src, i - 1] % p
    return _freeze(out)


def partial_table(cfg: Config, arr, i: int):
    cfg.check_axis(i)
    p, m = cfg.p, cfg.m
    moved = np.moveaxis(arr.reshape((p,) * m), i - 1, 0)
    out = np.zeros_like(moved)
    scale = np.arange(1, p, dtype=np.int64).reshape((p - 1,) + (1,) * (m - 1))
    out[: p - 1] = moved[1:] * scale % p
    return np.ascontiguousarray(np.moveaxis(out, 0, i - 1)).reshape(-1)


def mult_operator(cfg: Config, table):
    """n x n matrix of multiplication by the element with the given table."""
    p, n = cfg.p, cfg.n
    tbl = mul_index_table(p, cfg.m)
    ia = np.flatnonzero(table)
    if ia.size == 0:
        return np.zeros((n, n), dtype=np.int64)
    cols = np.broadcast_to(np.arange(n, dtype=np.int64), (ia.size, n))
    flat = tbl[ia].astype(np.int64) * n + cols
    w = np.repeat(table[ia].astype(np.float64), n)
    out = np.bincount(flat.ravel(), weights=w, minlength=(n + 1) * n)
    return out[: n * n].reshape(n, n).astype(np.int64) % p


class OElem:
    """An element of the truncated polynomial algebra."""

    __slots__ = ("cfg", "table")

    def __init__(self, cfg: Config, table):
        arr = np.asarray(table, dtype=np.int64)
        if arr.shape != (cfg.n,):
            raise DimensionError(f"coefficient table has shape {arr.shape}, expected ({cfg.n},)")
        self.cfg = cfg
        self.table = _freeze(arr % cfg.p)

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, cfg: Config) -> "OElem":
        return cls(cfg, np.zeros(cfg.n, dtype=np.int64))

    @classmethod
    def one(cls, cfg: Config) -> "OElem":
        t = np.zeros(cfg.n, dtype=np.int64)
        t[0] = 1
        return cls(cfg, t)

    @classmethod
    def constant(cls, cfg: Config, c: int) -> "OElem":
        t = np.zeros(cfg.n, dtype=np.int64)
        t[0] = c % cfg.p
        return cls(cfg, t)

    @classmethod
    def monomial(cls, cfg: Config, alpha, c: int = 1) -> "OElem":
        for a in alpha:
            if not 0 <= a < cfg.p:
                raise AxisRangeError(f"monomial exponent {a} out of range 0..{cfg.p - 1}")
        t = np.zeros(cfg.n, dtype=np.int64)
        t[cfg.index(alpha)] = c % cfg.p
        return cls(cfg, t)

    @classmethod
    def variable(cls, cfg: Config, i: int) -> "OElem":
        cfg.check_axis(i)
        return cls.monomial(cfg, tuple(1 if j == i else 0 for j in range(1, cfg.m + 1)))

    @classmethod
    def from_terms(cls, cfg: Config, terms) -> "OElem":
        t = np.zeros(cfg.n, dtype=np.int64)
        for alpha, c in terms:
            t[cfg.index(alpha)] = (t[cfg.index(alpha)] + c) % cfg.p
        return cls(cfg, t)

    # -- queries ------------------------------------------------------
    def terms(self):
        """Sorted (alpha, coefficient) pairs of the nonzero monomials."""
        return [(self.cfg.alpha(int(i)), int(self.table[i])) for i in np.flatnonzero(self.table)]

    @property
    def constant_term(self) -> int:
        return int(self.table[0])

    def is_zero(self) -> bool:
        return not self.table.any()

    def is_unit(self) -> bool:
        return self.constant_term != 0

    def in_max_ideal(self) -> bool:
        return self.constant_term == 0

    def linear_part(self):
        """Coefficients of x_1..x_m as a length-m vector."""
        radix = radix_weights(self.cfg.p, self.cfg.m)
        return self.table[radix].copy()

    def weight_degree(self) -> int:
        """Minimal total degree among nonzero monomials (filtration level)."""
        nz = np.flatnonzero(self.table)
        if nz.size == 0:
            raise ZeroElementError("weight degree of 0 is undefined")
        return int(weight_table(self.cfg.p, self.cfg.m)[nz].min())

    # -- arithmetic ---------------------------------------------------
    def _check(self, other: "OElem") -> None:
        if self.cfg != other.cfg:
            raise ConfigMismatchError("operands built over different configurations")

    def __add__(self, other: "OElem") -> "OElem":
        self._check(other)
        return OElem(self.cfg, self.table + other.table)

    def __sub__(self, other: "OElem") -> "OElem":
        self._check(other)
        return OElem(self.cfg, self.table - other.table)

    def __neg__(self) -> "OElem":
        return OElem(self.cfg, -self.table)

    def __mul__(self, other):
        if isinstance(other, int):
            return OElem(self.cfg, self.table * (other % self.cfg.p))
        if not isinstance(other, OElem):
            return NotImplemented
        self._check(other)
        return OElem(self.cfg, mul_tables(self.cfg, self.table, other.table))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, k: int) -> "OElem":
        if k < 0:
            return self.inverse() ** (-k)
        out = OElem.one(self.cfg)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self) -> "OElem":
        """Inverse of a unit via the terminating geometric series."""
        c = self.constant_term
        if c == 0:
            raise ValidityError("element lies in the maximal ideal; no inverse")
        cinv = pow(c, -1, self.cfg.p)
        neg_nil = OElem.one(self.cfg) - OElem(self.cfg, self.table * cinv % self.cfg.p)
        out = OElem.one(self.cfg)
        term = OElem.one(self.cfg)
        for _ in range(self.cfg.m * (self.cfg.p - 1) + 1):
            term = term * neg_nil
            if term.is_zero():
                break
            out = out + term
        return out * cinv

    def __eq__(self, other) -> bool:
        return isinstance(other, OElem) and self.cfg == other.cfg and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.cfg, self.table.tobytes()))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def partial(self, i: int) -> "OElem":
        return OElem(self.cfg, partial_table(self.cfg, self.table, i))

    def substitute(self, images) -> "OElem":
        """Evaluate at x_i -> images[i-1].  Images must have zero constant
        term so p-th powers of images vanish and the map is an algebra map."""
        if len(images) != self.cfg.m:
            raise DimensionError(f"need {self.cfg.m} images, got {len(images)}")
        for u in images:
            if u.cfg != self.cfg:
                raise ConfigMismatchError("image built over a different configuration")
            if u.constant_term != 0:
                raise ValidityError("substitution image has nonzero constant term")
        return _subst(self.cfg, self.table, images, 0)

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for alpha, c in self.terms():
            mono = "*".join(f"x{i + 1}^{a}" if a > 1 else f"x{i + 1}" for i, a in enumerate(alpha) if a)
            parts.append(str(c) if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return " + ".join(parts)


def _subst(cfg: Config, table, images, axis: int) -> OElem:
    """Horner evaluation, one axis at a time; table has length p**(m-axis)."""
    if not table.any():
        return OElem.zero(cfg)
    if axis == cfg.m:
        return OElem.constant(cfg, int(table[0]))
    shaped = table.reshape(cfg.p, -1)
    acc = _subst(cfg, shaped[cfg.p - 1], images, axis + 1)
    u = images[axis]
    for k in range(cfg.p - 2, -1, -1):
        acc = acc * u + _subst(cfg, shaped[k], images, axis + 1)
    return acc


def dp_monomial(cfg: Config, alpha) -> OElem:
    """Divided power x^(alpha) = x^alpha / prod(alpha_i!)."""
    c = 1
    for a in alpha:
        if not 0 <= a < cfg.p:
            raise AxisRangeError(f"divided-power exponent {a} out of range 0..{cfg.p - 1}")
        c = c * pow(math.factorial(a) % cfg.p, -1, cfg.p) % cfg.p
    return OElem.monomial(cfg, alpha, c)


@lru_cache(maxsize=None)
def _z_table(p: int, m: int, alpha: tuple):
    rows = []
    for e in alpha:
        rows.append(np.array([math.comb(e, a) % p for a in range(p)], dtype=np.int64))
    out = rows[0]
    for r in rows[1:]:
        out = np.kron(out, r)
    return _freeze(out % p)


def z_monomial(cfg: Config, alpha) -> OElem:
    """prod (1+x_i)^(alpha_i) with exponents taken mod p (since z_i^p = 1)."""
    if len(alpha) != cfg.m:
        raise DimensionError(f"multi-index length {len(alpha)} != m={cfg.m}")
    key = tuple(int(a) % cfg.p for a in alpha)
    return OElem(cfg, _z_table(cfg.p, cfg.m, key).copy())


def z_basis_matrix(cfg: Config, s: int):
    """n x n change of basis: column j = coefficient table of the mixed
    monomial with exponent tuple alpha(j), grouplike in the first s axes
    and plain x-powers in the rest."""
    if not 0 <= s <= cfg.m:
        raise AxisRangeError(f"s={s} out of range 0..{cfg.m}")
    p = cfg.p
    zp = np.array([[math.comb(e, a) % p for e in range(p)] for a in range(p)], dtype=np.int64)
    out = np.ones((1, 1), dtype=np.int64)
    for axis in range(cfg.m):
        out = np.kron(out, zp if axis < s else np.eye(p, dtype=np.int64))
    return out
