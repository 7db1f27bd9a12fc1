"""Dense exact linear algebra over GF(p).

Everything works on numpy int64 matrices with entries in [0, p).  Pivoting
is deterministic: first row with a nonzero entry in the leftmost open
column.  Row reductions are vectorized; float64 matmuls are used for bulk
reduction steps where the integer bounds keep them exact (entries < p,
inner dimension * (p-1)^2 < 2**53).
"""

from __future__ import annotations

import numpy as np

from .errors import NoSuchBasisError


def as_matrix(rows, ncols: int, p: int):
    a = np.asarray(rows, dtype=np.int64)
    if a.size == 0:
        return np.zeros((0, ncols), dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    return a % p


def rref(mat, p: int):
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    a = np.array(mat, dtype=np.int64) % p
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, p) % p
        col = a[:, c].copy()
        col[r] = 0
        a = (a - np.outer(col, a[r])) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(mat, p: int) -> int:
    return rref(mat, p)[0].shape[0]


def nullspace(mat, p: int):
    """Rows form a canonical basis of the right kernel: one row per free
    column, unit coefficient there, in increasing free-column order."""
    a = np.asarray(mat, dtype=np.int64)
    cols = a.shape[1]
    r, pivots = rref(a, p)
    free = [c for c in range(cols) if c not in pivots]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for k, fc in enumerate(free):
        out[k, fc] = 1
        for i, pc in enumerate(pivots):
            out[k, pc] = (-int(r[i, fc])) % p
    return out


def solve(mat, rhs, p: int):
    """A particular solution x of mat @ x = rhs (free variables 0), or None."""
    a = np.asarray(mat, dtype=np.int64) % p
    b = np.asarray(rhs, dtype=np.int64).reshape(-1, 1) % p
    aug, pivots = rref(np.hstack([a, b]), p)
    cols = a.shape[1]
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = aug[i, cols]
    return x


def inverse(mat, p: int):
    a = np.asarray(mat, dtype=np.int64) % p
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise NoSuchBasisError("matrix is not square")
    aug, pivots = rref(np.hstack([a, np.eye(n, dtype=np.int64)]), p)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise NoSuchBasisError("matrix is singular mod p")
    return aug[:n, n:]


def det(mat, p: int) -> int:
    """Determinant mod p by fraction-free elimination on a working copy."""
    a = np.array(mat, dtype=np.int64) % p
    n = a.shape[0]
    sign = 1
    d = 1
    for c in range(n):
        nz = np.flatnonzero(a[c:, c])
        if nz.size == 0:
            return 0
        i = c + int(nz[0])
        if i != c:
            a[[c, i]] = a[[i, c]]
            sign = -sign
        piv = int(a[c, c])
        d = d * piv % p
        inv = pow(piv, -1, p)
        col = a[c + 1:, c].copy()
        a[c + 1:] = (a[c + 1:] - np.outer(col * inv % p, a[c])) % p
    return d * sign % p


class EchelonSpace:
    """Incrementally maintained row space in reduced echelon form.

    add() returns True when the vector enlarged the space.  add_batch()
    reduces a whole matrix against the current space with one matmul before
    inserting survivors, which keeps closure computations fast.
    """

    def __init__(self, ncols: int, p: int):
        self.p = p
        self.ncols = ncols
        self.mat = np.zeros((0, ncols), dtype=np.int64)
        self.pivots: list[int] = []

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def residual(self, vec):
        v = np.asarray(vec, dtype=np.int64) % self.p
        if self.dim:
            v = (v - v[self.pivots] @ self.mat) % self.p
        return v

    def contains(self, vec) -> bool:
        return not self.residual(vec).any()

    def add(self, vec) -> bool:
        v = self.residual(vec)
        nz = np.flatnonzero(v)
        if nz.size == 0:
            return False
        c = int(nz[0])
        v = v * pow(int(v[c]), -1, self.p) % self.p
        if self.dim:
            self.mat = (self.mat - np.outer(self.mat[:, c], v)) % self.p
        pos = int(np.searchsorted(np.array(self.pivots, dtype=np.int64), c)) if self.pivots else 0
        self.mat = np.insert(self.mat, pos, v, axis=0)
        self.pivots.insert(pos, c)
        return True

    def add_batch(self, rows) -> int:
        m = as_matrix(rows, self.ncols, self.p)
        if m.shape[0] == 0:
            return 0
        if self.dim:
            red = (m[:, self.pivots].astype(np.float64) @ self.mat.astype(np.float64))
            m = (m - red.astype(np.int64)) % self.p
        added = 0
        for v in m:
            if v.any() and self.add(v):
                added += 1
        return added

    def basis(self):
        return self.mat.copy()


def row_space(mat, p: int):
    """Canonical (RREF) basis of the row space."""
    return rref(mat, p)[0]


def intersect_row_spaces(a, b, p: int):
    """Canonical basis of rowspace(a) & rowspace(b)."""
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((0, a.shape[1]), dtype=np.int64)
    stacked = np.vstack([a, b])
    ker = nullspace(stacked.T, p)
    if ker.shape[0] == 0:
        return np.zeros((0, a.shape[1]), dtype=np.int64)
    combos = ker[:, : a.shape[0]] @ a % p
    return row_space(combos, p)
