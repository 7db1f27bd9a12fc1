"""Finitely generated abelian groups and their elementary p-subgroups.

Degrees of gradings live in a group Z^r x Z_d1 x ... x Z_dk, written
multiplicatively.  Elements are coordinate tuples with torsion slots
reduced; the free slots carry plain integers.  An elementary p-subgroup
is handed around with a chosen basis because the classification invariants
are read off relative to such a basis.
"""

from __future__ import annotations

import math
from itertools import product

from .errors import DimensionError, GroupMismatchError, NoSuchBasisError


class AbGroup:
    """Direct product of a free part Z^r and cyclic factors Z_d."""

    __slots__ = ("free_rank", "torsion")

    def __init__(self, free_rank: int = 0, torsion=()):
        if free_rank < 0:
            raise DimensionError(f"free rank must be >= 0, got {free_rank}")
        torsion = tuple(int(d) for d in torsion)
        for d in torsion:
            if d < 2:
                raise DimensionError(f"torsion modulus must be >= 2, got {d}")
        object.__setattr__(self, "free_rank", free_rank)
        object.__setattr__(self, "torsion", torsion)

    def __setattr__(self, name, value):
        raise AttributeError("AbGroup is immutable")

    @property
    def rank(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self):
        """Number of elements, or None when the free part is nontrivial."""
        if not self.is_finite:
            return None
        return math.prod(self.torsion)

    def element(self, coords) -> "GElem":
        return GElem(self, coords)

    def identity(self) -> "GElem":
        return GElem(self, (0,) * self.rank)

    def elements(self):
        """All elements of a finite group, lex-ordered by coordinates."""
        assert self.is_finite, "cannot enumerate an infinite group"
        return [GElem(self, c) for c in product(*(range(d) for d in self.torsion))]

    def __eq__(self, other) -> bool:
        if not isinstance(other, AbGroup):
            return NotImplemented
        return self.free_rank == other.free_rank and self.torsion == other.torsion

    def __hash__(self) -> int:
        return hash((self.free_rank, self.torsion))

    def __repr__(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z_{d}" for d in self.torsion]
        return " x ".join(parts) if parts else "1"


class GElem:
    """Group element as a coordinate tuple; multiplication adds coordinates."""

    __slots__ = ("group", "coords")

    def __init__(self, group: AbGroup, coords):
        coords = tuple(int(c) for c in coords)
        if len(coords) != group.rank:
            raise DimensionError(f"expected {group.rank} coordinates, got {len(coords)}")
        r = group.free_rank
        reduced = coords[:r] + tuple(c % d for c, d in zip(coords[r:], group.torsion))
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "coords", reduced)

    def __setattr__(self, name, value):
        raise AttributeError("GElem is immutable")

    def _check(self, other: "GElem"):
        if self.group != other.group:
            raise GroupMismatchError(f"elements of {self.group!r} and {other.group!r}")

    @property
    def is_identity(self) -> bool:
        return not any(self.coords)

    def __mul__(self, other: "GElem") -> "GElem":
        if not isinstance(other, GElem):
            return NotImplemented
        self._check(other)
        return GElem(self.group, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def inverse(self) -> "GElem":
        return GElem(self.group, tuple(-c for c in self.coords))

    def __pow__(self, n: int) -> "GElem":
        return GElem(self.group, tuple(n * c for c in self.coords))

    def order(self):
        """Smallest n >= 1 with g^n = e, or None for infinite order."""
        r = self.group.free_rank
        if any(self.coords[:r]):
            return None
        n = 1
        for c, d in zip(self.coords[r:], self.group.torsion):
            if c:
                n = math.lcm(n, d // math.gcd(c, d))
        return n

    def __eq__(self, other) -> bool:
        if not isinstance(other, GElem):
            return NotImplemented
        return self.group == other.group and self.coords == other.coords

    def __hash__(self) -> int:
        return hash((self.group, self.coords))

    def __lt__(self, other: "GElem") -> bool:
        self._check(other)
        return self.coords < other.coords

    def __repr__(self) -> str:
        return f"g{self.coords}"


def p_independent(basis) -> bool:
    """Whether the elements all share a prime order p and generate p^len products.

    Independence is decided by brute enumeration: the products over exponent
    boxes {0..p-1}^s must be pairwise distinct.  An empty list is independent.
    """
    basis = list(basis)
    if not basis:
        return True
    orders = {b.order() for b in basis}
    if len(orders) != 1:
        return False
    p = orders.pop()
    if p is None or p < 2 or any(p % q == 0 for q in range(2, p) if q * q <= p):
        return False
    group = basis[0].group
    seen = set()
    for exps in product(range(p), repeat=len(basis)):
        g = group.identity()
        for b, e in zip(basis, exps):
            g = g * b**e
        if g.coords in seen:
            return False
        seen.add(g.coords)
    return True


class PSubgroup:
    """Elementary p-subgroup with a chosen basis of order-p elements."""

    __slots__ = ("group", "basis", "p", "_elements")

    def __init__(self, group: AbGroup, basis):
        basis = tuple(basis)
        for b in basis:
            if b.group != group:
                raise GroupMismatchError("basis element from a different group")
        assert p_independent(basis), "basis elements must be independent of common prime order"
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "p", basis[0].order() if basis else None)
        object.__setattr__(self, "_elements", None)

    def __setattr__(self, name, value):
        raise AttributeError("PSubgroup is immutable")

    @property
    def s(self) -> int:
        return len(self.basis)

    def order(self) -> int:
        return (self.p or 1) ** self.s

    def elements(self):
        """All p^s elements, cached after the first call."""
        if self._elements is None:
            if not self.basis:
                elems = (self.group.identity(),)
            else:
                elems = []
                for exps in product(range(self.p), repeat=self.s):
                    g = self.group.identity()
                    for b, e in zip(self.basis, exps):
                        g = g * b**e
                    elems.append(g)
                elems = tuple(elems)
            object.__setattr__(self, "_elements", elems)
        return self._elements

    def __contains__(self, g: GElem) -> bool:
        return g in set(self.elements())

    def exponents_of(self, g: GElem):
        """Exponent tuple of g over the basis, or None when g is outside."""
        if not self.basis:
            return () if g.is_identity else None
        for exps in product(range(self.p), repeat=self.s):
            h = self.group.identity()
            for b, e in zip(self.basis, exps):
                h = h * b**e
            if h == g:
                return exps
        return None

    def same_subgroup(self, other: "PSubgroup") -> bool:
        return self.group == other.group and set(self.elements()) == set(other.elements())

    def __eq__(self, other) -> bool:
        if not isinstance(other, PSubgroup):
            return NotImplemented
        return self.group == other.group and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.group, self.basis))

    def __repr__(self) -> str:
        return f"PSubgroup({list(self.basis)!r})"


def coset_eq(g: GElem, h: GElem, sub: PSubgroup) -> bool:
    """Whether g and h lie in the same coset of the subgroup."""
    g._check(h)
    return (g * h.inverse()) in sub


def coset_rep(g: GElem, sub: PSubgroup) -> GElem:
    """Lex-smallest element of the coset g*P; canonical across the coset."""
    return min((g * q for q in sub.elements()), key=lambda e: e.coords)


def basis_with_product(sub: PSubgroup, g0: GElem) -> list:
    """A basis of the same subgroup whose product of members equals g0.

    Writes g0 over the old basis, pivots on the first nonzero exponent, and
    folds the inverses of the remaining members into that slot, so exactly
    one basis element changes.  Requires g0 inside the subgroup and not the
    identity (the identity admits no such basis when s = 1, and the callers'
    degree bookkeeping excludes it uniformly).
    """
    if g0.is_identity:
        raise NoSuchBasisError("product target must not be the identity")
    exps = sub.exponents_of(g0)
    if exps is None:
        raise NoSuchBasisError(f"{g0!r} lies outside the subgroup")
    pivot = next(i for i, e in enumerate(exps) if e)
    new_basis = list(sub.basis)
    folded = g0
    for i, b in enumerate(sub.basis):
        if i != pivot:
            folded = folded * b.inverse()
    new_basis[pivot] = folded
    assert p_independent(new_basis)
    return new_basis


def subgroup_key(group: AbGroup, gens) -> tuple:
    """Canonical key of the subgroup generated by gens; equal keys iff equal subgroups.

    The subgroup is the image of the integer column lattice spanned by the
    generators together with the torsion relations d_i * e_i, so the unique
    column Hermite normal form of that lattice is a complete invariant.
    Works for infinite groups, where plain enumeration cannot.
    """
    rank = group.rank
    cols = [list(g.coords) for g in gens if isinstance(g, GElem)]
    for g in gens:
        if not isinstance(g, GElem):
            raise GroupMismatchError("generators must be group elements")
        if g.group != group:
            raise GroupMismatchError("generator from a different group")
    for i, d in enumerate(group.torsion):
        col = [0] * rank
        col[group.free_rank + i] = d
        cols.append(col)
    return _hermite_key(cols, rank)


def _hermite_key(cols, rank: int) -> tuple:
    """Column Hermite normal form of the lattice spanned by cols, as a tuple.

    Deterministic Euclidean column reduction: pivots are ordered by their
    first nonzero row, made positive, and earlier pivots' entries in each
    pivot row are reduced into [0, pivot), which is the unique normal form.
    """
    cols = [list(c) for c in cols if any(c)]
    fixed = []
    for row in range(rank):
        active = [c for c in cols if c[row]]
        others = [c for c in cols if not c[row] and any(c)]
        while len(active) > 1:
            active.sort(key=lambda c: abs(c[row]))
            base, remainder = active[0], []
            for c in active[1:]:
                q = c[row] // base[row]
                c = [x - q * y for x, y in zip(c, base)]
                if c[row]:
                    remainder.append(c)
                elif any(c):
                    others.append(c)
            active = [base] + remainder
        if active:
            piv = active[0]
            if piv[row] < 0:
                piv = [-x for x in piv]
            for c in fixed:
                q = c[row] // piv[row]
                if q:
                    c[:] = [x - q * y for x, y in zip(c, piv)]
            fixed.append(piv)
        cols = others
    return tuple(tuple(c) for c in fixed)
