"""Differential forms over the truncated polynomial algebra.

A k-form is stored as coefficient tables indexed by the k-subsets of axes
(lexicographic order of the subset tuples).  One-forms pair with
derivations by (f dx_i)(D) = f * D(x_i); the Lie derivative acts
coefficientwise via D(f dx_I) = D(f) dx_I + f * sum_slots dx..d(D(x))..dx.
The volume-type forms pick out the special and hamiltonian subalgebras as
(projective) stabilizer kernels.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

import numpy as np

from . import linalg
from .errors import AxisRangeError, ConfigError, ConfigMismatchError, DimensionError
from .gfp import Config
from .oalg import OElem, mul_tables, partial_table
from .witt import WElem, conjugate_axis, w_basis


@lru_cache(maxsize=None)
def subset_list(m: int, k: int):
    return tuple(combinations(range(1, m + 1), k))


@lru_cache(maxsize=None)
def subset_pos(m: int, k: int):
    return {s: i for i, s in enumerate(subset_list(m, k))}


class KForm:
    """Exterior k-form with coefficient tables per axis subset."""

    __slots__ = ("cfg", "k", "tables")

    def __init__(self, cfg: Config, k: int, tables):
        if not 0 <= k <= cfg.m:
            raise AxisRangeError(f"form degree {k} out of range 0..{cfg.m}")
        arr = np.asarray(tables, dtype=np.int64)
        want = (len(subset_list(cfg.m, k)), cfg.n)
        if arr.shape != want:
            raise DimensionError(f"coefficient block has shape {arr.shape}, expected {want}")
        self.cfg = cfg
        self.k = k
        arr = arr % cfg.p
        arr.setflags(write=False)
        self.tables = arr

    @classmethod
    def zero(cls, cfg: Config, k: int) -> "KForm":
        return cls(cfg, k, np.zeros((len(subset_list(cfg.m, k)), cfg.n), dtype=np.int64))

    @classmethod
    def from_terms(cls, cfg: Config, k: int, terms) -> "KForm":
        """terms: iterable of (subset tuple, OElem)."""
        t = np.zeros((len(subset_list(cfg.m, k)), cfg.n), dtype=np.int64)
        pos = subset_pos(cfg.m, k)
        for subset, f in terms:
            key = tuple(sorted(subset))
            if key not in pos or len(set(key)) != len(subset):
                raise AxisRangeError(f"bad axis subset {subset}")
            t[pos[key]] = (t[pos[key]] + f.table) % cfg.p
        return cls(cfg, k, t)

    def coeff(self, subset) -> OElem:
        pos = subset_pos(self.cfg.m, self.k)
        key = tuple(sorted(subset))
        if key not in pos:
            raise AxisRangeError(f"bad axis subset {subset}")
        return OElem(self.cfg, self.tables[pos[key]].copy())

    def terms(self):
        out = []
        for s, row in zip(subset_list(self.cfg.m, self.k), self.tables):
            if row.any():
                out.append((s, OElem(self.cfg, row.copy())))
        return out

    def is_zero(self) -> bool:
        return not self.tables.any()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, KForm)
            and self.cfg == other.cfg
            and self.k == other.k
            and np.array_equal(self.tables, other.tables)
        )

    def __hash__(self):
        return hash((self.cfg, self.k, self.tables.tobytes()))

    def _check(self, other: "KForm") -> None:
        if self.cfg != other.cfg:
            raise ConfigMismatchError("operands built over different configurations")
        if self.k != other.k:
            raise DimensionError(f"form degrees differ: {self.k} vs {other.k}")

    def __add__(self, other: "KForm") -> "KForm":
        self._check(other)
        return KForm(self.cfg, self.k, self.tables + other.tables)

    def __sub__(self, other: "KForm") -> "KForm":
        self._check(other)
        return KForm(self.cfg, self.k, self.tables - other.tables)

    def __neg__(self) -> "KForm":
        return KForm(self.cfg, self.k, -self.tables)

    def __mul__(self, other):
        if isinstance(other, int):
            return KForm(self.cfg, self.k, self.tables * (other % self.cfg.p))
        if isinstance(other, OElem):
            return KForm(self.cfg, self.k, np.stack([mul_tables(self.cfg, other.table, row) for row in self.tables]))
        return NotImplemented

    def __rmul__(self, other):
        return self.__mul__(other)

    def evaluate(self, ds) -> OElem:
        """Value on k derivations: sum over subsets of coeff * det of the
        relevant coefficient columns."""
        if len(ds) != self.k:
            raise DimensionError(f"need {self.k} derivations, got {len(ds)}")
        for d in ds:
            if d.cfg != self.cfg:
                raise ConfigMismatchError("argument built over a different configuration")
        acc = OElem.zero(self.cfg)
        for subset, f in self.terms():
            acc = acc + f * _minor_det([d.coeffs() for d in ds], subset, self.cfg)
        return acc

    def wedge(self, other: "KForm") -> "KForm":
        if self.cfg != other.cfg:
            raise ConfigMismatchError("operands built over different configurations")
        kk = self.k + other.k
        if kk > self.cfg.m:
            raise DimensionError(f"wedge degree {kk} exceeds m={self.cfg.m}")
        out = np.zeros((len(subset_list(self.cfg.m, kk)), self.cfg.n), dtype=np.int64)
        pos = subset_pos(self.cfg.m, kk)
        for sa, fa in self.terms():
            for sb, fb in other.terms():
                if set(sa) & set(sb):
                    continue
                merged = tuple(sorted(sa + sb))
                sign = _merge_sign(sa + sb)
                prod = mul_tables(self.cfg, fa.table, fb.table)
                out[pos[merged]] = (out[pos[merged]] + sign * prod) % self.cfg.p
        return KForm(self.cfg, kk, out)

    def __repr__(self) -> str:
        parts = []
        for s, f in self.terms():
            dx = "^".join(f"dx{i}" for i in s) if s else "1"
            parts.append(f"({f!r}) {dx}")
        return " + ".join(parts) if parts else "0"


def _merge_sign(seq) -> int:
    """Parity of the permutation sorting a duplicate-free sequence."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def _minor_det(coeff_rows, subset, cfg: Config) -> OElem:
    """det of the matrix (D_r(x_{subset[c]}))_{r,c} over the algebra."""
    k = len(subset)
    acc = OElem.zero(cfg)
    from itertools import permutations

    for perm in permutations(range(k)):
        sign = _merge_sign(perm)
        term = OElem.one(cfg)
        ok = True
        for r in range(k):
            f = coeff_rows[r][subset[perm[r]] - 1]
            if f.is_zero():
                ok = False
                break
            term = term * f
        if ok:
            acc = acc + (term if sign > 0 else -term)
    return acc


def differential(f: OElem) -> KForm:
    """df = sum d_i(f) dx_i."""
    cfg = f.cfg
    rows = np.stack([partial_table(cfg, f.table, i) for i in range(1, cfg.m + 1)])
    return KForm(cfg, 1, rows)


def d_form(omega: KForm) -> KForm:
    """Exterior derivative: d(f dx_I) = df ^ dx_I."""
    cfg = omega.cfg
    if omega.k == cfg.m:
        return KForm.zero(cfg, cfg.m)
    out = np.zeros((len(subset_list(cfg.m, omega.k + 1)), cfg.n), dtype=np.int64)
    pos = subset_pos(cfg.m, omega.k + 1)
    for subset, f in zip(subset_list(cfg.m, omega.k), omega.tables):
        if not f.any():
            continue
        for ell in range(1, cfg.m + 1):
            if ell in subset:
                continue
            df = partial_table(cfg, f, ell)
            if not df.any():
                continue
            sign = (-1) ** sum(1 for i in subset if i < ell)
            merged = tuple(sorted(subset + (ell,)))
            out[pos[merged]] = (out[pos[merged]] + sign * df) % cfg.p
    return KForm(cfg, omega.k + 1, out)


def lie_derivative(d: WElem, omega: KForm) -> KForm:
    """Action of a derivation on a form, coefficientwise:
    D(f dx_I) = D(f) dx_I + f * sum_j dx_{i_1}..d(D(x_{i_j}))..dx_{i_k}."""
    cfg = omega.cfg
    if d.cfg != cfg:
        raise ConfigMismatchError("operands built over different configurations")
    out = np.zeros_like(omega.tables)
    pos = subset_pos(cfg.m, omega.k)
    for subset, f in zip(subset_list(cfg.m, omega.k), omega.tables):
        if not f.any():
            continue
        out[pos[subset]] = (out[pos[subset]] + d.apply(OElem(cfg, f.copy())).table) % cfg.p
        for slot, i_j in enumerate(subset):
            g = d.tables[i_j - 1]  # D(x_{i_j})
            if not g.any():
                continue
            for ell in range(1, cfg.m + 1):
                dg = partial_table(cfg, g, ell)
                if not dg.any():
                    continue
                rest = subset[:slot] + subset[slot + 1:]
                if ell in rest:
                    continue
                coeff = mul_tables(cfg, f, dg)
                new = tuple(sorted(rest + (ell,)))
                # parity of moving the new index from the slot into sorted order
                crossings = sum(1 for x in rest if (x - ell) * (x - i_j) < 0)
                sign = (-1) ** crossings
                out[pos[new]] = (out[pos[new]] + sign * coeff) % cfg.p
    return KForm(cfg, omega.k, out)


def pair_one_form(omega: KForm, d: WElem) -> OElem:
    """Module pairing of a 1-form with a derivation."""
    if omega.k != 1:
        raise DimensionError("pairing is defined for 1-forms")
    if omega.cfg != d.cfg:
        raise ConfigMismatchError("operands built over different configurations")
    acc = np.zeros(omega.cfg.n, dtype=np.int64)
    for i in range(omega.cfg.m):
        acc = acc + mul_tables(omega.cfg, omega.tables[i], d.tables[i])
    return OElem(omega.cfg, acc)


def omega_volume(cfg: Config) -> KForm:
    """dx_1 ^ ... ^ dx_m."""
    t = np.zeros((1, cfg.n), dtype=np.int64)
    t[0, 0] = 1
    return KForm(cfg, cfg.m, t)


def omega_symplectic(cfg: Config) -> KForm:
    """sum dx_i ^ dx_{i+r} over the first half of the axes (even m)."""
    if cfg.m % 2 != 0:
        raise ConfigError(f"symplectic form needs even m, got {cfg.m}")
    out = KForm.zero(cfg, 2)
    t = np.array(out.tables)
    pos = subset_pos(cfg.m, 2)
    for i in range(1, cfg.m // 2 + 1):
        t[pos[(i, conjugate_axis(cfg, i))], 0] = 1
    return KForm(cfg, 2, t)


def stabilizer_test(d: WElem, omega: KForm, projective: bool):
    """Whether D(omega) = 0 (strict) or D(omega) = c*omega (projective).
    Returns (flag, c or None); c = 0 when the action is strictly zero."""
    res = lie_derivative(d, omega)
    if res.is_zero():
        return True, 0
    if not projective:
        return False, None
    nz = np.argwhere(omega.tables)
    if nz.size == 0:
        return False, None
    r, c = nz[0]
    scale = int(res.tables[r, c]) * pow(int(omega.tables[r, c]), -1, d.cfg.p) % d.cfg.p
    if np.array_equal(res.tables, omega.tables * scale % d.cfg.p):
        return True, scale
    return False, None


def _lie_matrix(cfg: Config, omega: KForm):
    """Matrix of D -> D(omega) on flat coordinates, one column per basis."""
    rows = []
    for e in w_basis(cfg):
        rows.append(lie_derivative(e, omega).tables.reshape(-1))
    return np.stack(rows).T % cfg.p


@lru_cache(maxsize=None)
def _algebra_rows_cached(cfg: Config, kind: str):
    p = cfg.p
    mn = cfg.m * cfg.n
    if kind == "W":
        return np.eye(mn, dtype=np.int64)
    if kind in ("S", "CS"):
        omega = omega_volume(cfg)
    elif kind in ("H", "CH"):
        omega = omega_symplectic(cfg)
    else:
        raise ConfigError(f"unknown algebra kind {kind!r}")
    mat = _lie_matrix(cfg, omega)
    if kind in ("S", "H"):
        return linalg.nullspace(mat, p)
    # projective: allow D(omega) = c * omega
    target = omega.tables.reshape(-1, 1) % p
    aug = np.hstack([mat, (-target) % p])
    ker = linalg.nullspace(aug, p)
    if ker.shape[0] == 0:
        return np.zeros((0, mn), dtype=np.int64)
    return linalg.row_space(ker[:, :mn], p)


def algebra_rows(cfg: Config, kind: str):
    """Flat coordinate rows of W, S, CS, H, CH inside the derivation algebra."""
    if kind in ("H", "CH") and cfg.m % 2 != 0:
        raise ConfigError(f"kind {kind} needs even m, got {cfg.m}")
    return _algebra_rows_cached(cfg, kind).copy()


def algebra_basis(cfg: Config, kind: str):
    """Same as algebra_rows, wrapped as derivations."""
    return [WElem.from_flat(cfg, row) for row in algebra_rows(cfg, kind)]


def derived_rows(cfg: Config, rows, iterations: int = 1, cap: int = 3):
    """Row space of the iterated derived subalgebra, stabilizing early.

    rows span a subalgebra; each step replaces the span by the span of all
    pairwise brackets.  iterations beyond the stabilization point (or the
    cap) are no-ops.
    """
    cur = linalg.row_space(np.asarray(rows, dtype=np.int64) % cfg.p, cfg.p)
    steps = min(iterations, cap)
    for _ in range(steps):
        space = linalg.EchelonSpace(cfg.m * cfg.n, cfg.p)
        basis = cur
        for row in basis:
            d = WElem.from_flat(cfg, row)
            admat = d.ad_matrix().astype(np.float64)
            prods = (admat @ basis.T.astype(np.float64)).T.astype(np.int64) % cfg.p
            space.add_batch(prods)
        nxt = space.basis()
        stable = nxt.shape == cur.shape and np.array_equal(nxt, cur)
        cur = nxt
        if stable:
            break
    return cur


def derived_subalgebra(basis, iterations: int = 1):
    """Derived series step(s) on a list of derivations."""
    if not basis:
        return []
    cfg = basis[0].cfg
    rows = np.stack([d.flat() for d in basis])
    out = derived_rows(cfg, rows, iterations)
    return [WElem.from_flat(cfg, row) for row in out]
