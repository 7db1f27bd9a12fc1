"""Deterministic JSON serialization of every value the CLI reads or writes.

Schemas (field order fixed, integers decimal):

  function        {"basis": "x", "m": int, "p": int,
                   "terms": [{"alpha": [int...], "c": int}, ...]}
  derivation      {"coeffs": [<function>, ...]}
  form            {"k": int, "terms": [{"subset": [int...],
                   "coeff": <function>}, ...]}
  group           {"free_rank": int, "torsion": [int...]}
  grading         {"group": <group>, "ambient": "O"|"W"|"sub",
                   "components": [{"degree": [int...],
                   "basis": [<function>|<derivation>, ...]}, ...]}
  automorphism    {"images": [<function>, ...]}
  invariants      {"P": [[int...], ...], "s": int,
                   "gamma": [{"rep": [int...], "mult": int}, ...],
                   "g0": [int...] | null}

Terms are listed in increasing flat-index order, form terms in increasing
subset order, grading components sorted by degree coordinates; zero terms
are dropped.  With those conventions serialize(parse(text)) == text byte
for byte.
"""

from __future__ import annotations

import json

import numpy as np

from .abgroup import AbGroup, GElem, PSubgroup
from .errors import CartanGradeError, ParseError, ValidityError
from .gfp import Config
from .oalg import OElem
from .witt import WElem


def _need(data, key, kind):
    if not isinstance(data, dict) or key not in data:
        raise ParseError(f"missing field {key!r} in {kind} payload")
    return data[key]


def _int_list(val, kind):
    if not isinstance(val, (list, tuple)) or not all(isinstance(x, int) for x in val):
        raise ParseError(f"{kind} must be a list of integers, got {val!r}")
    return [int(x) for x in val]


def oelem_to_data(f: OElem) -> dict:
    cfg = f.cfg
    terms = []
    for idx in range(cfg.n):
        c = int(f.table[idx])
        if c:
            terms.append({"alpha": [int(a) for a in cfg.alpha(idx)], "c": c})
    return {"basis": "x", "m": cfg.m, "p": cfg.p, "terms": terms}


def oelem_from_data(data, cfg: Config | None = None) -> OElem:
    if _need(data, "basis", "function") != "x":
        raise ParseError(f"unknown basis tag {data['basis']!r}")
    p = _need(data, "p", "function")
    m = _need(data, "m", "function")
    if not isinstance(p, int) or not isinstance(m, int):
        raise ParseError("p and m must be integers")
    if cfg is None:
        try:
            cfg = Config(p, m) if p > 3 else Config(p, m, allow_small_p=True)
        except CartanGradeError as exc:
            raise ParseError(f"bad configuration in payload: {exc}") from exc
    elif (cfg.p, cfg.m) != (p, m):
        raise ParseError(f"payload is for p={p}, m={m}, expected p={cfg.p}, m={cfg.m}")
    table = np.zeros(cfg.n, dtype=np.int64)
    for term in _need(data, "terms", "function"):
        alpha = _int_list(_need(term, "alpha", "term"), "alpha")
        if len(alpha) != m or not all(0 <= a < p for a in alpha):
            raise ParseError(f"bad exponent vector {alpha!r}")
        c = _need(term, "c", "term")
        if not isinstance(c, int):
            raise ParseError(f"coefficient {c!r} is not an integer")
        table[cfg.index(alpha)] = c % p
    return OElem(cfg, table)


def welem_to_data(d: WElem) -> dict:
    return {"coeffs": [oelem_to_data(d.coeff(i)) for i in range(1, d.cfg.m + 1)]}


def welem_from_data(data, cfg: Config | None = None) -> WElem:
    coeffs = _need(data, "coeffs", "derivation")
    if not isinstance(coeffs, list) or not coeffs:
        raise ParseError("derivation payload needs a nonempty coefficient list")
    parsed = []
    for item in coeffs:
        f = oelem_from_data(item, cfg)
        cfg = f.cfg
        parsed.append(f)
    if len(parsed) != cfg.m:
        raise ParseError(f"derivation needs {cfg.m} coefficients, got {len(parsed)}")
    return WElem.from_coeffs(parsed)


def kform_to_data(w) -> dict:
    terms = []
    for subset, coeff in sorted(w.terms(), key=lambda t: t[0]):
        terms.append({"subset": [int(i) for i in subset],
                      "coeff": oelem_to_data(coeff)})
    return {"k": w.k, "terms": terms}


def kform_from_data(data, cfg: Config | None = None):
    from .forms import KForm

    k = _need(data, "k", "form")
    if not isinstance(k, int) or k < 0:
        raise ParseError(f"bad form degree {k!r}")
    parsed = []
    for item in _need(data, "terms", "form"):
        subset = tuple(_int_list(_need(item, "subset", "form term"), "subset"))
        if len(subset) != k:
            raise ParseError(f"subset {subset!r} does not have {k} axes")
        coeff = oelem_from_data(_need(item, "coeff", "form term"), cfg)
        cfg = coeff.cfg
        parsed.append((subset, coeff))
    if cfg is None:
        raise ParseError("empty form payload needs an explicit configuration")
    try:
        return KForm.from_terms(cfg, k, parsed)
    except CartanGradeError as exc:
        raise ParseError(f"bad form payload: {exc}") from exc


def group_to_data(group: AbGroup) -> dict:
    return {"free_rank": group.free_rank, "torsion": [int(d) for d in group.torsion]}


def group_from_data(data) -> AbGroup:
    free_rank = _need(data, "free_rank", "group")
    torsion = _int_list(_need(data, "torsion", "group"), "torsion")
    if not isinstance(free_rank, int) or free_rank < 0:
        raise ParseError(f"bad free rank {free_rank!r}")
    try:
        return AbGroup(free_rank, tuple(torsion))
    except CartanGradeError as exc:
        raise ParseError(f"bad group payload: {exc}") from exc


def gelem_to_data(g: GElem) -> list:
    return [int(c) for c in g.coords]


def gelem_from_data(data, group: AbGroup) -> GElem:
    coords = _int_list(data, "group element")
    if len(coords) != group.rank:
        raise ParseError(f"element {coords!r} does not match group rank {group.rank}")
    return group.element(coords)


def grading_to_data(grading) -> dict:
    if grading.ambient == "O":
        vec_data = oelem_to_data
    else:
        vec_data = welem_to_data
    comps = []
    for g in sorted(grading.components, key=lambda d: d.coords):
        comps.append({"degree": gelem_to_data(g),
                      "basis": [vec_data(v) for v in grading.components[g]]})
    return {"group": group_to_data(grading.group),
            "ambient": grading.ambient,
            "components": comps}


def grading_from_data(data, cfg: Config | None = None):
    from .gradings import Grading

    group = group_from_data(_need(data, "group", "grading"))
    ambient = _need(data, "ambient", "grading")
    if ambient not in ("O", "W", "sub"):
        raise ParseError(f"unknown ambient {ambient!r}")
    vec_from = oelem_from_data if ambient == "O" else welem_from_data
    comps = {}
    order = []
    for item in _need(data, "components", "grading"):
        degree = gelem_from_data(_need(item, "degree", "component"), group)
        vecs = []
        for payload in _need(item, "basis", "component"):
            v = vec_from(payload, cfg)
            cfg = v.cfg
            vecs.append(v)
        if degree in comps:
            raise ParseError(f"duplicate component degree {degree!r}")
        if not vecs:
            raise ParseError("empty component in grading payload")
        comps[degree] = vecs
        order.append(degree)
    if not comps:
        raise ParseError("grading payload has no components")
    sub_basis = None
    if ambient == "sub":
        sub_basis = [v for degree in order for v in comps[degree]]
    try:
        return Grading(cfg, group, ambient, comps, sub_basis=sub_basis)
    except CartanGradeError as exc:
        raise ValidityError(f"parsed grading is inconsistent: {exc}") from exc


def auto_to_data(mu) -> dict:
    return {"images": [oelem_to_data(u) for u in mu.images]}


def auto_from_data(data, cfg: Config | None = None):
    from .autos import AutO

    images = _need(data, "images", "automorphism")
    if not isinstance(images, list) or not images:
        raise ParseError("automorphism payload needs a nonempty image list")
    parsed = []
    for item in images:
        u = oelem_from_data(item, cfg)
        cfg = u.cfg
        parsed.append(u)
    if len(parsed) != cfg.m:
        raise ParseError(f"automorphism needs {cfg.m} images, got {len(parsed)}")
    try:
        return AutO(parsed)
    except CartanGradeError as exc:
        raise ValidityError(f"parsed map is not an automorphism: {exc}") from exc


def invariants_to_data(inv) -> dict:
    gamma = []
    for rep in inv.gamma_cosets:
        if gamma and gamma[-1]["rep"] == gelem_to_data(rep):
            gamma[-1]["mult"] += 1
        else:
            gamma.append({"rep": gelem_to_data(rep), "mult": 1})
    return {"P": [gelem_to_data(b) for b in inv.P.basis],
            "s": inv.s,
            "gamma": gamma,
            "g0": None if inv.g0 is None else gelem_to_data(inv.g0)}


def invariants_from_data(data, group: AbGroup):
    from .classify import GradingInvariants

    basis = tuple(gelem_from_data(row, group) for row in _need(data, "P", "invariants"))
    s = _need(data, "s", "invariants")
    if s != len(basis):
        raise ParseError(f"rank field {s!r} does not match basis size {len(basis)}")
    gamma = []
    for item in _need(data, "gamma", "invariants"):
        rep = gelem_from_data(_need(item, "rep", "invariants"), group)
        mult = _need(item, "mult", "invariants")
        if not isinstance(mult, int) or mult < 1:
            raise ParseError(f"bad multiplicity {mult!r}")
        gamma.extend([rep] * mult)
    g0 = data.get("g0")
    if g0 is not None:
        g0 = gelem_from_data(g0, group)
    try:
        return GradingInvariants(PSubgroup(group, basis), gamma, g0)
    except CartanGradeError as exc:
        raise ValidityError(f"parsed invariants are inconsistent: {exc}") from exc


def dumps(data) -> str:
    """Canonical text for a payload: two-space indent, fixed field order,
    trailing newline."""
    return json.dumps(data, indent=2) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid payload text: {exc}") from exc
