"""Recognition and isomorphism classification of gradings.

Any grading of the truncated algebra is isomorphic to a standard one; the
isomorphism class is determined by the subgroup supporting unit components,
the multiset of free-axis degrees modulo that subgroup, and — for the
volume-form flavor — the degree of the volume form.  This module extracts
those invariants from raw gradings, decides isomorphism with an explicit
automorphism witness built from the standard families, reconstructs the
algebra grading behind a derivation grading, enumerates the maximally
refined gradings, and provides a brute-force orbit probe used as a
completeness heuristic in tests.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import linalg
from .abgroup import (
    GElem,
    PSubgroup,
    basis_with_product,
    coset_eq,
    coset_rep,
    p_independent,
    subgroup_key,
)
from .autos import (
    AutO,
    basis_change_auto,
    normalize_omega_S,
    permutation_auto,
    push_grading,
    shift_auto,
    volume_factor,
)
from .errors import (
    AdmissibilityError,
    ConfigMismatchError,
    GroupMismatchError,
    NoSuchBasisError,
    ObstructionError,
)
from .gfp import Config, mul_index_table
from .gradings import Grading, admissible_degree, fine_grading, grade_O_construct, induce_W
from .oalg import OElem

# Status returned for the symplectic flavor at half-rank > 1, whose
# classification is an open problem; distinct from a negative decision.
OPEN_IN_PAPER = "open-in-paper"

FLAVORS = ("O", "W", "S", "H")


class GradingInvariants:
    """Isomorphism invariants of a grading.

    P is the subgroup of degrees whose components contain units; the free
    degrees are stored as canonical coset representatives with multiplicity;
    g0, when present, is the degree of the volume form (exact, not a coset).
    """

    def __init__(self, psub: PSubgroup, gamma, g0=None):
        group = psub.group
        reps = []
        for g in gamma:
            if not isinstance(g, GElem) or g.group != group:
                raise GroupMismatchError(f"free degree {g!r} does not live in {group!r}")
            reps.append(coset_rep(g, psub))
        self.P = psub
        self.gamma_cosets = tuple(sorted(reps, key=lambda r: r.coords))
        if g0 is not None:
            if not isinstance(g0, GElem) or g0.group != group:
                raise GroupMismatchError(f"volume degree {g0!r} does not live in {group!r}")
            target = g0
            for g in reps:
                target = target * g.inverse()
            if target not in psub:
                raise ObstructionError(
                    "volume degree must sit over the product of the free degrees")
            if psub.s == 0 and not target.is_identity:
                raise ObstructionError("with trivial toral part the volume degree is forced")
            if psub.s > 0 and not reps and target.is_identity:
                raise ObstructionError(
                    "identity volume degree is impossible at full toral rank")
        self.g0 = g0

    @property
    def s(self) -> int:
        return self.P.s

    @property
    def m(self) -> int:
        return self.s + len(self.gamma_cosets)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradingInvariants):
            return NotImplemented
        return (self.P.group == other.P.group
                and canonical_key(self) == canonical_key(other))

    def __hash__(self):
        return hash((self.P.group, canonical_key(self)))

    def __repr__(self) -> str:
        g0 = "" if self.g0 is None else f", g0={self.g0!r}"
        return (f"GradingInvariants(s={self.s}, P={list(self.P.basis)!r}, "
                f"cosets={list(self.gamma_cosets)!r}{g0})")


def canonical_key(inv: GradingInvariants):
    """Deterministic key: equal keys exactly when the invariants match.

    The subgroup enters through its basis-independent lattice key, the free
    degrees through their sorted canonical coset representatives (with
    multiplicity), and the volume degree exactly.
    """
    reps = tuple(r.coords for r in inv.gamma_cosets)
    g0 = None if inv.g0 is None else inv.g0.coords
    return (inv.s, subgroup_key(inv.P.group, inv.P.basis), reps, g0)


def recognize_O(grading: Grading):
    """Extract a homogeneous frame and the invariants of an algebra grading.

    Greedy pass: walk the homogeneous basis vectors in degree order and keep
    those independent modulo constants and the square of the maximal ideal.
    Vectors with a unit constant term are normalized to 1 + y with y in the
    maximal ideal; the rest are frame vectors as they stand.  A reduction
    loop then eliminates dependencies among the unit-slot degrees, moving
    the offending slots to the free part, so the remaining degrees form a
    basis of the unit-support subgroup.  Returns (frame, invariants).
    """
    if grading.ambient != "O":
        raise AdmissibilityError("recognition expects a grading of the algebra")
    cfg = grading.cfg
    group = grading.group
    one = OElem.one(cfg)
    ech = linalg.EchelonSpace(cfg.m, cfg.p)
    toral, free = [], []
    for g in sorted(grading.components, key=lambda d: d.coords):
        for v in grading.components[g]:
            if ech.dim == cfg.m:
                break
            if not ech.add(v.linear_part()):
                continue
            if v.constant_term:
                toral.append((cfg.inv(v.constant_term) * v - one, g))
            else:
                free.append((v, g))
    assert ech.dim == cfg.m, "homogeneous components must span all cotangent directions"
    while True:
        degs = [g for _, g in toral]
        culprit = None
        prefix = []
        for k, a in enumerate(degs):
            if p_independent(tuple(prefix) + (a,)):
                prefix.append(a)
            else:
                culprit = k
                break
        if culprit is None:
            break
        sub = PSubgroup(group, tuple(degs[:culprit]))
        exps = sub.exponents_of(degs[culprit])
        assert exps is not None, "a failing unit degree must lie over the earlier ones"
        y, a = toral.pop(culprit)
        prod = one
        for (yi, _), l in zip(toral[:culprit], exps):
            prod = prod * (one + yi) ** int(l)
        free.append(((one + y) - prod, a))
    frame = [y for y, _ in toral] + [y for y, _ in free]
    psub = PSubgroup(group, tuple(g for _, g in toral))
    return frame, GradingInvariants(psub, [g for _, g in free])


def _recognize_S_frame(grading: Grading):
    """Frame, invariants with volume degree, and exact axis degrees.

    The frame from recognition is corrected so its degree product equals the
    volume degree: below full toral rank the last free variable absorbs the
    mismatch through a unit factor; at full rank the subgroup basis is
    replaced by one whose product is the volume degree.
    """
    cfg = grading.cfg
    group = grading.group
    g0 = admissible_degree(grading, "S")
    if g0 is None:
        raise AdmissibilityError("grading does not keep the volume line homogeneous")
    frame, inv = recognize_O(grading)
    s, m = inv.s, cfg.m
    one = OElem.one(cfg)
    free_degs = [grading.degree_of(y) for y in frame[s:]]
    total = group.identity()
    for b in inv.P.basis:
        total = total * b
    for g in free_degs:
        total = total * g
    delta = total * g0.inverse()
    if s < m:
        exps = inv.P.exponents_of(delta)
        if exps is None:
            raise AdmissibilityError("volume degree is incompatible with the unit-support subgroup")
        if any(exps):
            unit = one
            for yi, l in zip(frame[:s], exps):
                unit = unit * (one + yi) ** ((cfg.p - int(l)) % cfg.p)
            frame = list(frame)
            frame[m - 1] = frame[m - 1] * unit
            free_degs[-1] = free_degs[-1] * delta.inverse()
        out = GradingInvariants(inv.P, free_degs, g0)
        return frame, out, list(inv.P.basis) + free_degs
    if g0.is_identity:
        raise ObstructionError("identity volume degree is impossible at toral rank s >= 1")
    if g0 not in inv.P:
        raise AdmissibilityError("volume degree lies outside the unit-support subgroup")
    if delta.is_identity:
        basis = list(inv.P.basis)
        new_frame = list(frame)
    else:
        basis = list(basis_with_product(inv.P, g0))
        new_frame = []
        for b in basis:
            exps = inv.P.exponents_of(b)
            u = one
            for yi, l in zip(frame, exps):
                u = u * (one + yi) ** int(l)
            new_frame.append(u - one)
    psub = PSubgroup(group, tuple(basis))
    return new_frame, GradingInvariants(psub, [], g0), basis


def recognize_S(grading: Grading) -> GradingInvariants:
    """Invariants of a volume-admissible algebra grading, volume degree included."""
    return _recognize_S_frame(grading)[1]


def _mul_matrix(cfg: Config, table):
    """n x n matrix of multiplication by the function with the given table."""
    n = cfg.n
    idx = mul_index_table(cfg.p, cfg.m)
    out = np.zeros((n + 1, n), dtype=np.int64)
    cols = np.broadcast_to(np.arange(n), (n, n))
    vals = np.broadcast_to(np.asarray(table, dtype=np.int64)[:, None], (n, n))
    np.add.at(out, (idx, cols), vals)
    return out[:n] % cfg.p


def o_grading_from_w(w_grading: Grading) -> Grading:
    """The algebra grading that induces a given derivation grading.

    Some homogeneous derivation has a coefficient with nonzero constant term
    (the decomposition of any coordinate derivative forces one), and
    multiplying such an anchor by functions is injective.  For each degree g
    in the support, the functions carrying the anchor into the component at
    g are then exactly the component of the inducing algebra grading at
    g / (anchor degree).  The result is validated by inducing forward again.
    """
    if w_grading.ambient != "W":
        raise AdmissibilityError("reconstruction expects a grading of the derivations")
    cfg = w_grading.cfg
    p, m, n = cfg.p, cfg.m, cfg.n
    anchor = g_star = None
    for g in sorted(w_grading.support(), key=lambda d: d.coords):
        for d in w_grading.components[g]:
            if any(d.coeff(i).constant_term for i in range(1, m + 1)):
                anchor, g_star = d, g
                break
        if anchor is not None:
            break
    if anchor is None:
        raise AdmissibilityError(
            "no homogeneous derivation has a unit coefficient; grading is not induced")
    stack = np.vstack([_mul_matrix(cfg, anchor.coeff(i).table) for i in range(1, m + 1)])
    comps = {}
    total = 0
    for g in w_grading.support():
        basis_mat = np.array([v.flat() for v in w_grading.components[g]], dtype=np.int64)
        aug = np.hstack([stack, (-basis_mat.T) % p])
        null = linalg.nullspace(aug, p)
        if null.shape[0] == 0:
            continue
        vecs = [OElem(cfg, row) for row in null[:, :n] % p]
        comps[g * g_star.inverse()] = vecs
        total += len(vecs)
    if total != n:
        raise AdmissibilityError("derivation grading is not induced by an algebra grading")
    out = Grading(cfg, w_grading.group, "O", comps)
    if not induce_W(out).same_components(w_grading):
        raise AdmissibilityError("derivation grading is not induced by an algebra grading")
    return out


def _standard_bridge(cfg: Config, basis1, gamma1, basis2, gamma2, psub: PSubgroup) -> AutO:
    """Composition of standard maps carrying one standard grading to another.

    Both data describe the same subgroup with matching free-degree cosets:
    first permute the free axes to align cosets, then change the toral basis,
    then shift the free degrees onto their exact targets.
    """
    s, t = len(basis1), len(gamma1)
    sub2 = PSubgroup(psub.group, tuple(basis2))
    used = [False] * t
    rho = []
    for k in range(t):
        for j in range(t):
            if not used[j] and coset_eq(gamma2[k], gamma1[j], psub):
                used[j] = True
                rho.append(j)
                break
        else:
            raise NoSuchBasisError("free degrees do not match modulo the subgroup")
    perm = [0] * t
    for k in range(t):
        perm[rho[k]] = k
    step = permutation_auto(cfg, s, perm)
    if s:
        alpha = [[0] * s for _ in range(s)]
        for j in range(s):
            exps = sub2.exponents_of(basis1[j])
            assert exps is not None, "both bases span the same subgroup"
            for i in range(s):
                alpha[i][j] = int(exps[i])
        step = basis_change_auto(cfg, s, alpha).compose(step)
    rows = []
    for k in range(t):
        d = gamma1[rho[k]] * gamma2[k].inverse()
        exps = sub2.exponents_of(d)
        assert exps is not None, "matched cosets differ by a subgroup element"
        rows.append([int(x) for x in exps])
    return shift_auto(cfg, s, rows).compose(step)


def iso_decide(g1: Grading, g2: Grading, flavor: str = "O"):
    """Decide isomorphism of two gradings, producing an automorphism witness.

    Returns None when the invariants differ; otherwise an automorphism whose
    push carries the first grading onto the second componentwise.  Volume
    flavor: the witness fixes the volume form exactly below full toral rank
    and scales it by a unit at full rank.  The symplectic flavor at rank 2
    coincides with the volume flavor; at higher half-rank the classification
    is open and the module-level OPEN_IN_PAPER status is returned.
    """
    if g1.cfg != g2.cfg:
        raise ConfigMismatchError("gradings built over different configurations")
    if g1.group != g2.group:
        raise GroupMismatchError("gradings live over different groups")
    if flavor not in FLAVORS:
        raise AdmissibilityError(f"unknown flavor {flavor!r}")
    cfg = g1.cfg
    if flavor == "H":
        if cfg.m != 2:
            return OPEN_IN_PAPER
        flavor = "S"
    if flavor == "W":
        if g1.ambient != "W" or g2.ambient != "W":
            raise AdmissibilityError("derivation flavor expects derivation gradings")
        wit = iso_decide(o_grading_from_w(g1), o_grading_from_w(g2), "O")
        if wit is not None:
            assert push_grading(wit, g1).same_components(g2), \
                "witness must transport the derivation grading"
        return wit
    if flavor == "S" and g1.ambient == "sub" and g2.ambient == "sub":
        o1 = (g1.origin or {}).get("o_grading")
        o2 = (g2.origin or {}).get("o_grading")
        if o1 is None or o2 is None:
            raise AdmissibilityError(
                "subalgebra gradings carry no inducing algebra grading; decide on that instead")
        wit = iso_decide(o1, o2, "S")
        if isinstance(wit, AutO):
            assert push_grading(wit, g1).same_components(g2), \
                "witness must transport the subalgebra grading"
        return wit
    if g1.ambient != "O" or g2.ambient != "O":
        raise AdmissibilityError("this flavor expects gradings of the algebra")
    if flavor == "O":
        f1, i1 = recognize_O(g1)
        f2, i2 = recognize_O(g2)
        if canonical_key(i1) != canonical_key(i2):
            return None
        gamma1 = [g1.degree_of(y) for y in f1[i1.s:]]
        gamma2 = [g2.degree_of(y) for y in f2[i2.s:]]
        nu = _standard_bridge(cfg, list(i1.P.basis), gamma1, list(i2.P.basis), gamma2, i1.P)
        psi = AutO(f2).compose(nu).compose(AutO(f1).inverse())
        assert push_grading(psi, g1).same_components(g2), "witness must transport the grading"
        return psi
    fr1, i1, axes1 = _recognize_S_frame(g1)
    fr2, i2, axes2 = _recognize_S_frame(g2)
    if canonical_key(i1) != canonical_key(i2):
        return None
    s, m = i1.s, cfg.m
    nu = _standard_bridge(cfg, axes1[:s], axes1[s:], axes2[:s], axes2[s:], i1.P)
    mu1 = nu.compose(AutO(fr1).inverse())
    mu2 = AutO(fr2).inverse()
    if s < m:
        std2 = grade_O_construct(cfg, g1.group, axes2[:s], axes2[s:])
        mu1 = normalize_omega_S(mu1, std2)
        mu2 = normalize_omega_S(mu2, std2)
    psi = mu2.inverse().compose(mu1)
    if s == m:
        assert volume_factor(psi) is not None, "full-rank witness must scale the volume form"
    else:
        assert psi.jacobian() == OElem.one(cfg), "witness must fix the volume form exactly"
    assert push_grading(psi, g1).same_components(g2), "witness must transport the grading"
    return psi


def enumerate_fine(cfg: Config, ambient: str = "O"):
    """The m+1 maximally refined gradings, one per toral rank.

    Their universal groups have pairwise distinct signatures (torsion rank,
    free rank), so no two are equivalent.
    """
    return [fine_grading(cfg, s, ambient) for s in range(cfg.m + 1)]


def _probe_generators(cfg: Config, s: int):
    """Standard-family generator set used by the brute-force orbit probe."""
    p, m = cfg.p, cfg.m
    t = m - s
    gens = []
    for perm in itertools.permutations(range(t)):
        if perm != tuple(range(t)):
            gens.append(permutation_auto(cfg, s, perm))
    for i in range(t):
        for j in range(s):
            for c in range(1, p):
                exps = [[0] * s for _ in range(t)]
                exps[i][j] = c
                gens.append(shift_auto(cfg, s, exps))
    for i in range(s):
        for j in range(s):
            if i == j:
                for d in range(2, p):
                    alpha = np.eye(s, dtype=np.int64)
                    alpha[i, i] = d
                    gens.append(basis_change_auto(cfg, s, alpha))
            else:
                for c in range(1, p):
                    alpha = np.eye(s, dtype=np.int64)
                    alpha[i, j] = c
                    gens.append(basis_change_auto(cfg, s, alpha))
    return gens


def orbit_probe(g1: Grading, g2: Grading, flavor: str = "O", depth: int = 2):
    """Brute-force search over short words in the standard families.

    A completeness heuristic, not a proof: conjugates the first grading by
    every word of bounded length and reports a matching word, None when no
    word matches.  Volume flavor requires the word to scale the volume form
    by a unit.
    """
    if g1.ambient != "O" or g2.ambient != "O":
        raise AdmissibilityError("the probe works on gradings of the algebra")
    if g1.group != g2.group:
        raise GroupMismatchError("gradings live over different groups")
    cfg = g1.cfg
    _, inv = recognize_O(g1)
    gens = _probe_generators(cfg, inv.s)
    need_volume = flavor in ("S", "H")
    for d in range(depth + 1):
        for word in itertools.product(gens, repeat=d):
            mu = AutO.identity(cfg)
            for w in word:
                mu = w.compose(mu)
            if need_volume and volume_factor(mu) is None:
                continue
            if push_grading(mu, g1).same_components(g2):
                return mu
    return None
