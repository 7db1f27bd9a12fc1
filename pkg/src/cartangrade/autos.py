"""Automorphisms of the truncated polynomial algebra.

An automorphism is determined by the images of the variables: any tuple of
elements with zero constant term and independent linear parts extends to a
unique algebra automorphism.  This module provides the substitution action
on the algebra, the adjoint action on derivations, pushforward of
differential forms and of gradings, jacobian determinants, the standard
witness families (permutation, shift, basis change), seeded random draws,
and the iterative correction that turns a volume-factor-up-to-units map
into one fixing the volume form exactly.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import linalg
from .errors import (
    AdmissibilityError,
    CartanGradeError,
    ConfigMismatchError,
    DimensionError,
    ObstructionError,
    ValidityError,
)
from .gfp import Config, alpha_table, radix_weights
from .gradings import Grading, induce_W
from .oalg import OElem, mult_operator, z_basis_matrix
from .forms import KForm, differential
from .witt import WElem, _exact_matmul


class AutO:
    """Algebra automorphism given by the images of the m variables.

    Validity requires every image to lie in the maximal ideal (zero constant
    term) and the linear parts to be independent mod squares; both are
    checked at construction.  The action on the whole algebra is cached as a
    matrix on the monomial basis, built column by column from products of
    the images.
    """

    def __init__(self, images):
        images = tuple(images)
        if not images:
            raise DimensionError("an automorphism needs at least one variable image")
        cfg = images[0].cfg
        if len(images) != cfg.m:
            raise DimensionError(f"need {cfg.m} images, got {len(images)}")
        for u in images:
            if not isinstance(u, OElem):
                raise ValidityError("images must be algebra elements")
            if u.cfg != cfg:
                raise ConfigMismatchError("image built over a different configuration")
            if u.constant_term != 0:
                raise ValidityError("image has nonzero constant term")
        lin = np.array([u.linear_part() for u in images], dtype=np.int64)
        if linalg.rank(lin, cfg.p) != cfg.m:
            raise ValidityError("images are dependent modulo the square of the maximal ideal")
        self.cfg = cfg
        self.images = images
        self._matrix = None
        self._inverse = None

    @classmethod
    def identity(cls, cfg: Config) -> "AutO":
        return cls([OElem.variable(cfg, i) for i in range(1, cfg.m + 1)])

    @property
    def matrix(self):
        """Matrix of the algebra map on the monomial basis.

        Column at the index of x^alpha holds the table of the product of the
        variable images with exponents alpha; columns are filled in index
        order, each as one multiplication applied to an earlier column.
        """
        if self._matrix is None:
            cfg = self.cfg
            p, n = cfg.p, cfg.n
            at = alpha_table(p, cfg.m)
            radix = radix_weights(p, cfg.m)
            ops = [mult_operator(cfg, u.table).astype(np.float64) for u in self.images]
            cols = np.zeros((n, n), dtype=np.float64)
            cols[0, 0] = 1.0
            for idx in range(1, n):
                j = int(np.argmax(at[idx] > 0))
                prev = idx - radix[j]
                cols[:, idx] = np.floor(ops[j] @ cols[:, prev]) % p
            mat = cols.astype(np.int64)
            mat.setflags(write=False)
            self._matrix = mat
        return self._matrix

    def apply(self, f: OElem) -> OElem:
        """Image of an algebra element under the substitution map."""
        if f.cfg != self.cfg:
            raise ConfigMismatchError("element built over a different configuration")
        return OElem(self.cfg, _exact_matmul(self.matrix, f.table.reshape(-1, 1), self.cfg.p).ravel())

    def compose(self, other: "AutO") -> "AutO":
        """Map sending f to self(other(f))."""
        if other.cfg != self.cfg:
            raise ConfigMismatchError("composing automorphisms over different configurations")
        return AutO([self.apply(u) for u in other.images])

    def inverse(self) -> "AutO":
        """Inverse automorphism, via inversion of the cached matrix."""
        if self._inverse is None:
            cfg = self.cfg
            minv = linalg.inverse(self.matrix, cfg.p)
            radix = radix_weights(cfg.p, cfg.m)
            images = [OElem(cfg, minv[:, radix[i]].copy()) for i in range(cfg.m)]
            inv = AutO(images)
            inv._matrix = minv
            inv._inverse = self
            self._inverse = inv
        return self._inverse

    def push_derivation(self, d: WElem) -> WElem:
        """Conjugated derivation: apply the inverse, derive, apply the map."""
        if d.cfg != self.cfg:
            raise ConfigMismatchError("derivation built over a different configuration")
        back = self.inverse()
        return WElem.from_coeffs([self.apply(d.apply(u)) for u in back.images])

    def jacobian(self) -> OElem:
        """Determinant of the matrix of partials of the variable images."""
        cfg = self.cfg
        rows = [[u.partial(j) for j in range(1, cfg.m + 1)] for u in self.images]
        total = OElem.zero(cfg)
        for perm in itertools.permutations(range(cfg.m)):
            term = OElem.one(cfg)
            for i in range(cfg.m):
                term = term * rows[i][perm[i]]
            total = total + (term if _perm_sign(perm) == 1 else -term)
        return total

    def act_on_form(self, omega: KForm) -> KForm:
        """Pushforward: coefficients map through, axis differentials become
        differentials of the corresponding images."""
        if omega.cfg != self.cfg:
            raise ConfigMismatchError("form built over a different configuration")
        cfg = self.cfg
        dimg = [differential(u) for u in self.images]
        out = KForm.zero(cfg, omega.k)
        for subset, f in omega.terms():
            term = KForm(cfg, 0, self.apply(f).table.reshape(1, -1))
            for i in subset:
                term = term.wedge(dimg[i - 1])
            out = out + term
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, AutO) and self.cfg == other.cfg and self.images == other.images

    def __hash__(self):
        return hash((self.cfg, self.images))

    def __repr__(self) -> str:
        body = ", ".join(f"x{i + 1} -> {u!r}" for i, u in enumerate(self.images))
        return f"AutO({body})"


def _perm_sign(perm) -> int:
    sign = 1
    for a, b in itertools.combinations(range(len(perm)), 2):
        if perm[a] > perm[b]:
            sign = -sign
    return sign


def volume_factor(mu: AutO):
    """The scalar c with mu(volume form) = c * volume form, or None.

    A unit scalar here is exactly membership in the stabilizer of the line
    spanned by the volume form.
    """
    jac = mu.jacobian()
    c = int(jac.table[0])
    if c != 0 and not jac.table[1:].any():
        return c
    return None


def in_aut_S(mu: AutO):
    """Alias of volume_factor: scalar when the volume line is stabilized."""
    return volume_factor(mu)


# -- standard families ----------------------------------------------------

def permutation_auto(cfg: Config, s: int, perm) -> AutO:
    """Fix the first s variables, permute the rest: x_{s+i} -> x_{s+perm[i]}."""
    t = cfg.m - s
    perm = tuple(perm)
    if not 0 <= s <= cfg.m:
        raise DimensionError(f"toral rank {s} out of range 0..{cfg.m}")
    if sorted(perm) != list(range(t)):
        raise ValidityError(f"{perm!r} is not a permutation of 0..{t - 1}")
    images = [OElem.variable(cfg, i) for i in range(1, s + 1)]
    images += [OElem.variable(cfg, s + perm[i] + 1) for i in range(t)]
    return AutO(images)


def shift_auto(cfg: Config, s: int, exps) -> AutO:
    """Multiply each free variable by a unit monomial in the toral ones:
    x_{s+i} -> x_{s+i} * prod_j (1+x_j)^{exps[i][j]}."""
    t = cfg.m - s
    exps = [list(row) for row in exps]
    if len(exps) != t or any(len(row) != s for row in exps):
        raise DimensionError(f"shift exponents must form a {t} x {s} matrix")
    images = [OElem.variable(cfg, i) for i in range(1, s + 1)]
    one = OElem.one(cfg)
    for i in range(t):
        u = OElem.variable(cfg, s + i + 1)
        for j in range(s):
            u = u * (one + OElem.variable(cfg, j + 1)) ** (exps[i][j] % cfg.p)
        images.append(u)
    return AutO(images)


def basis_change_auto(cfg: Config, s: int, alpha) -> AutO:
    """Replace the toral variables: x_j -> prod_i (1+x_i)^{alpha[i][j]} - 1.

    Column j of alpha gives the exponents of the new j-th variable; the
    matrix must be invertible mod p.
    """
    alpha = np.array(alpha, dtype=np.int64) % cfg.p
    if alpha.shape != (s, s):
        raise DimensionError(f"basis change matrix must be {s} x {s}")
    if s and linalg.det(alpha, cfg.p) == 0:
        raise ValidityError("basis change matrix is singular mod p")
    one = OElem.one(cfg)
    images = []
    for j in range(s):
        u = one
        for i in range(s):
            u = u * (one + OElem.variable(cfg, i + 1)) ** int(alpha[i, j])
        images.append(u - one)
    images += [OElem.variable(cfg, i) for i in range(s + 1, cfg.m + 1)]
    return AutO(images)


def scale_auto(cfg: Config, i: int, c: int) -> AutO:
    """Scale one variable by a unit: x_i -> c * x_i."""
    cfg.check_axis(i)
    if c % cfg.p == 0:
        raise ValidityError("scaling factor must be a unit")
    images = [OElem.variable(cfg, j) for j in range(1, cfg.m + 1)]
    images[i - 1] = (c % cfg.p) * images[i - 1]
    return AutO(images)


def standard_auto(cfg: Config, kind: str, **params) -> AutO:
    """Dispatch to the named family: permutation, shift, or basis_change."""
    if kind == "permutation":
        return permutation_auto(cfg, params["s"], params["perm"])
    if kind == "shift":
        return shift_auto(cfg, params["s"], params["exps"])
    if kind == "basis_change":
        return basis_change_auto(cfg, params["s"], params["alpha"])
    raise ValidityError(f"unknown automorphism family {kind!r}")


def random_auto(cfg: Config, rng, extra_terms: int = 3) -> AutO:
    """Seeded random automorphism: invertible linear part plus sparse tail."""
    p, m, n = cfg.p, cfg.m, cfg.n
    at = alpha_table(p, m)
    radix = radix_weights(p, m)
    higher = [idx for idx in range(n) if int(at[idx].sum()) >= 2]
    while True:
        lin = np.array([[rng.randrange(p) for _ in range(m)] for _ in range(m)], dtype=np.int64)
        if linalg.det(lin, p) != 0:
            break
    images = []
    for i in range(m):
        tbl = np.zeros(n, dtype=np.int64)
        for j in range(m):
            tbl[radix[j]] = lin[i, j]
        for _ in range(rng.randrange(extra_terms + 1)):
            if higher:
                tbl[rng.choice(higher)] = rng.randrange(p)
        images.append(OElem(cfg, tbl))
    return AutO(images)


def random_graded_auto(grading: Grading, rng, tries: int = 200) -> AutO:
    """Seeded random automorphism preserving each component of a standard
    grading of the algebra: every variable image is homogeneous of the same
    degree as the variable (1+image of a toral variable stays a unit)."""
    if grading.ambient != "O" or grading.origin is None:
        raise AdmissibilityError("graded draws need a standard grading of the algebra")
    cfg = grading.cfg
    p, m, n = cfg.p, cfg.m, cfg.n
    s = grading.origin["s"]
    degrees = grading.origin["degrees"]
    at = alpha_table(p, m)
    mixed = z_basis_matrix(cfg, s)
    radix = radix_weights(p, m)
    buckets = {}
    for idx in range(n):
        g = _exponent_degree(degrees, at[idx])
        buckets.setdefault(g, []).append(idx)
    for _ in range(tries):
        images = []
        for i in range(m):
            idxs = buckets[degrees[i]]
            unit_slots = [idx for idx in idxs if not at[idx, s:].any()]
            coeffs = {idx: rng.randrange(p) for idx in idxs}
            anchor = radix[i] if i < s else (unit_slots[0] if unit_slots else None)
            want = 1 if i < s else 0
            if anchor is not None:
                rest = sum(coeffs[idx] for idx in unit_slots if idx != anchor)
                coeffs[anchor] = (want - rest) % p
            tbl = np.zeros(n, dtype=np.int64)
            for idx, c in coeffs.items():
                if c:
                    tbl = (tbl + c * mixed[:, idx]) % p
            u = OElem(cfg, tbl)
            if i < s:
                u = u - OElem.one(cfg)
            images.append(u)
        try:
            return AutO(images)
        except ValidityError:
            continue
    raise ValidityError("could not draw a graded automorphism for this degree data")


def _exponent_degree(degrees, alpha):
    g = degrees[0].group.identity()
    for d, a in zip(degrees, alpha):
        a = int(a)
        if a:
            g = g * d ** a
    return g


# -- action on gradings ----------------------------------------------------

def push_grading(mu: AutO, grading: Grading) -> Grading:
    """Transport a grading along an automorphism, keeping the degrees.

    Algebra components map through the substitution, derivation components
    through conjugation; the result is a raw grading (no standard origin).
    """
    if grading.cfg != mu.cfg:
        raise ConfigMismatchError("grading built over a different configuration")
    if grading.ambient == "O":
        comps = {g: [mu.apply(v) for v in vecs] for g, vecs in grading.components.items()}
        return Grading(grading.cfg, grading.group, "O", comps)
    comps = {g: [mu.push_derivation(v) for v in vecs] for g, vecs in grading.components.items()}
    if grading.ambient == "W":
        return Grading(grading.cfg, grading.group, "W", comps)
    sub = [mu.push_derivation(v) for v in grading.sub_basis]
    return Grading(grading.cfg, grading.group, "sub", comps, sub_basis=sub)


# -- volume form normalization ----------------------------------------------

def volume_vector_field(mu: AutO) -> WElem:
    """Derivation whose divergence is the jacobian of the map.

    Expand image(x_1) * d image(x_2) ^ ... ^ d image(x_m) over the standard
    top-minor basis; the signed coefficients are the component functions.
    """
    cfg = mu.cfg
    m = cfg.m
    wedge = None
    for u in mu.images[1:]:
        du = differential(u)
        wedge = du if wedge is None else wedge.wedge(du)
    if wedge is None:
        xi = KForm(cfg, 0, mu.images[0].table.reshape(1, -1))
    else:
        xi = mu.images[0] * wedge
    full = tuple(range(1, m + 1))
    coeffs = []
    for i in range(1, m + 1):
        subset = tuple(a for a in full if a != i)
        h = xi.coeff(subset)
        coeffs.append(h if i % 2 == 1 else -h)
    return WElem.from_coeffs(coeffs)


def divergence_preimage(w_grading: Grading, target: OElem, degree):
    """A derivation of the given degree whose divergence is target, or None.

    Direct linear solve inside one component of a derivation grading; used
    as a cross-check of the constructive route above.
    """
    vecs = w_grading.component(degree)
    if not vecs:
        return None
    cfg = w_grading.cfg
    cols = np.stack([v.divergence().table for v in vecs], axis=1)
    sol = linalg.solve(cols, target.table, cfg.p)
    if sol is None:
        return None
    flat = np.zeros(cfg.m * cfg.n, dtype=np.int64)
    for c, v in zip(sol, vecs):
        if c:
            flat = (flat + int(c) * v.flat()) % cfg.p
    return WElem.from_flat(cfg, flat)


def normalize_omega_S(mu: AutO, grading: Grading, _trace=None) -> AutO:
    """Correct a map with homogeneous trivial-degree jacobian until the
    volume form is fixed exactly.

    grading must be a standard grading of the algebra (it fixes the toral
    rank s and the axis degrees).  Repeatedly: scale the last free variable
    by the inverse of the weight-zero jacobian part, then cancel the lowest
    free-weight part of the jacobian by the unipotent map
    x_i -> x_i - E(x_i), where E is the trivial-degree, fixed-free-weight
    part of the derivation produced by volume_vector_field.  Each round
    raises the free weight, so at most (p-1)*(m-s)+1 rounds run.  At full
    toral rank the jacobian is forced scalar and no graded correction can
    change it, so the map is returned unchanged when that scalar is 1 and
    an obstruction is reported otherwise.
    """
    cfg = mu.cfg
    if grading.cfg != cfg:
        raise ConfigMismatchError("grading built over a different configuration")
    if grading.ambient != "O" or grading.origin is None:
        raise AdmissibilityError("normalization needs a standard grading of the algebra")
    p, m, n = cfg.p, cfg.m, cfg.n
    s = grading.origin["s"]
    e = grading.group.identity()
    jac = mu.jacobian()
    if not jac.is_unit():
        raise ValidityError("jacobian of an automorphism must be a unit")
    if jac != OElem.one(cfg) and grading.degree_of(jac) != e:
        raise AdmissibilityError("jacobian is not homogeneous of trivial degree for this grading")
    if s == m:
        c = int(jac.table[0])
        if jac.table[1:].any():
            raise AdmissibilityError("full toral rank forces a scalar jacobian; got a non-scalar")
        if c != 1:
            raise ObstructionError(
                f"full toral rank: the volume factor {c} is a fixed scalar and cannot be removed")
        return mu
    at = alpha_table(p, m)
    free_weight = at[:, s:].sum(axis=1)
    w_masks = _free_weight_masks(cfg, s, free_weight)
    gw = induce_W(grading)
    limit = (p - 1) * (m - s) + 1
    cur = mu
    steps = 0
    while True:
        jac = cur.jacobian()
        if jac == OElem.one(cfg):
            return cur
        steps += 1
        if _trace is not None:
            _trace.append(steps)
        if steps > limit:
            raise CartanGradeError("normalization failed to terminate within the weight bound")
        head = jac.table.copy()
        head[free_weight > 0] = 0
        f0 = OElem(cfg, head)
        if f0 != OElem.one(cfg):
            cur = _unit_scale_correction(cfg, f0).compose(cur)
            continue
        tail = jac.table.copy()
        tail[free_weight == 0] = 0
        ell = int(free_weight[np.flatnonzero(tail)].min())
        field = volume_vector_field(cur)
        parts = gw.decompose(field)
        coeffs = parts.get(e)
        if coeffs is None:
            raise AdmissibilityError("volume field has no trivial-degree part; map is not graded")
        flat = np.zeros(m * n, dtype=np.int64)
        for c, v in zip(coeffs, gw.component(e)):
            if c:
                flat = (flat + int(c) * v.flat()) % p
        flat = flat * w_masks[ell] % p
        piece = WElem.from_flat(cfg, flat)
        slice_tbl = jac.table.copy()
        slice_tbl[free_weight != ell] = 0
        assert piece.divergence() == OElem(cfg, slice_tbl), \
            "weight slice of the volume field must account for the jacobian slice"
        images = [OElem.variable(cfg, i + 1) - piece.coeff(i + 1) for i in range(m)]
        cur = AutO(images).compose(cur)


def _free_weight_masks(cfg: Config, s: int, free_weight):
    """0/1 flat masks on derivations: free weight of x^a d_i is the free
    weight of the monomial minus one when the axis itself is free."""
    m, n = cfg.m, cfg.n
    out = {}
    top = int(free_weight.max()) if n else 0
    for ell in range(-1, top + 1):
        mask = np.zeros(m * n, dtype=np.int64)
        for i in range(m):
            drop = 1 if i >= s else 0
            mask[i * n: (i + 1) * n] = (free_weight - drop) == ell
        out[ell] = mask
    return out


def _unit_scale_correction(cfg: Config, f0: OElem) -> AutO:
    """Map fixing all variables but the last, which is scaled by 1/f0."""
    images = [OElem.variable(cfg, i) for i in range(1, cfg.m)]
    images.append(f0.inverse() * OElem.variable(cfg, cfg.m))
    return AutO(images)
