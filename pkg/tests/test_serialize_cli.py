"""JSON payload round trips and command-line driver behaviour."""

import json
import random

import numpy as np
import pytest

from cartangrade import cli, serialize
from cartangrade.abgroup import AbGroup, PSubgroup
from cartangrade.autos import AutO, push_grading, random_auto, shift_auto
from cartangrade.classify import GradingInvariants, canonical_key, recognize_O
from cartangrade.errors import ParseError, ValidityError
from cartangrade.forms import KForm, omega_volume
from cartangrade.gfp import Config
from cartangrade.gradings import grade_O_construct, grade_S_construct, induce_W
from cartangrade.oalg import OElem
from cartangrade.witt import WElem, d_ij_z


CFG = Config(5, 2)
G2 = AbGroup(0, (5, 5))
A = G2.element((1, 0))
B = G2.element((0, 1))


def random_elem(cfg, rng):
    return OElem(cfg, np.array([rng.randrange(cfg.p) for _ in range(cfg.n)],
                               dtype=np.int64))


def round_trip(text, from_data, to_data):
    """Parse canonical text, re-serialize, and demand byte identity."""
    value = from_data(serialize.loads(text))
    assert serialize.dumps(to_data(value)) == text
    return value


def test_function_round_trip():
    rng = random.Random(3)
    for _ in range(20):
        f = random_elem(CFG, rng)
        text = serialize.dumps(serialize.oelem_to_data(f))
        g = round_trip(text, serialize.oelem_from_data, serialize.oelem_to_data)
        assert g == f


def test_derivation_and_form_round_trip():
    d = d_ij_z(CFG, 1, 2, (1, 1))
    text = serialize.dumps(serialize.welem_to_data(d))
    d2 = round_trip(text, serialize.welem_from_data, serialize.welem_to_data)
    assert d2 == d
    w = omega_volume(CFG)
    text = serialize.dumps(serialize.kform_to_data(w))
    w2 = round_trip(text, serialize.kform_from_data, serialize.kform_to_data)
    assert w2 == w
    # an empty term list needs the configuration spelled out
    zero = {"k": 1, "terms": []}
    with pytest.raises(ParseError):
        serialize.kform_from_data(zero)
    assert serialize.kform_from_data(zero, CFG) == KForm.zero(CFG, 1)


def test_group_and_element_round_trip():
    for group in (G2, AbGroup(1, (5,)), AbGroup(0, (25,))):
        text = serialize.dumps(serialize.group_to_data(group))
        back = round_trip(text, serialize.group_from_data, serialize.group_to_data)
        assert back == group
        g = group.element(tuple(1 for _ in range(group.rank)))
        assert serialize.gelem_from_data(serialize.gelem_to_data(g), group) == g
    with pytest.raises(ParseError):
        serialize.gelem_from_data([1], G2)


def test_grading_round_trip_all_ambients():
    og = grade_O_construct(CFG, G2, [A], [B])
    wg = induce_W(og)
    sg = grade_S_construct(CFG, G2, PSubgroup(G2, (A,)), [B], A * B)
    for g in (og, wg, sg):
        text = serialize.dumps(serialize.grading_to_data(g))
        back = round_trip(text, serialize.grading_from_data,
                          serialize.grading_to_data)
        assert back.ambient == g.ambient
        assert back.same_components(g)


def test_auto_round_trip_and_validation():
    mu = random_auto(CFG, random.Random(9))
    text = serialize.dumps(serialize.auto_to_data(mu))
    back = round_trip(text, serialize.auto_from_data, serialize.auto_to_data)
    assert all(back.images[i] == mu.images[i] for i in range(CFG.m))
    x1 = serialize.oelem_to_data(OElem.variable(CFG, 1))
    with pytest.raises(ValidityError):
        serialize.auto_from_data({"images": [x1, x1]})


def test_invariants_round_trip_with_multiplicity():
    inv = GradingInvariants(PSubgroup(G2, (A,)), [B, B, B ** 2], A * B ** 4)
    data = serialize.invariants_to_data(inv)
    assert data["s"] == 1
    assert data["gamma"] == [{"rep": [0, 1], "mult": 2}, {"rep": [0, 2], "mult": 1}]
    back = serialize.invariants_from_data(serialize.loads(serialize.dumps(data)), G2)
    assert canonical_key(back) == canonical_key(inv)
    bad = dict(data, s=2)
    with pytest.raises(ParseError):
        serialize.invariants_from_data(bad, G2)
    bad = dict(data, gamma=[{"rep": [0, 1], "mult": 0}])
    with pytest.raises(ParseError):
        serialize.invariants_from_data(bad, G2)


def test_parse_error_paths():
    with pytest.raises(ParseError):
        serialize.loads("{not json")
    f = serialize.oelem_to_data(OElem.one(CFG))
    with pytest.raises(ParseError):
        serialize.oelem_from_data({k: v for k, v in f.items() if k != "terms"})
    with pytest.raises(ParseError):
        serialize.oelem_from_data(dict(f, basis="y"))
    with pytest.raises(ParseError):
        serialize.oelem_from_data(dict(f, terms=[{"alpha": [9, 0], "c": 1}]))
    with pytest.raises(ParseError):
        serialize.oelem_from_data(dict(f, terms=[{"alpha": [1, 0], "c": "x"}]))
    with pytest.raises(ParseError):
        serialize.oelem_from_data(f, Config(5, 3))
    g = serialize.grading_to_data(grade_O_construct(CFG, G2, [A], [B]))
    twice = dict(g, components=g["components"] + [g["components"][0]])
    with pytest.raises(ParseError):
        serialize.grading_from_data(twice)
    with pytest.raises(ParseError):
        serialize.grading_from_data(dict(g, ambient="Q"))


def write_request(path, **fields):
    base = {"p": 5, "m": 2, "kind": "O",
            "group": {"free_rank": 0, "torsion": [5, 5]},
            "basis": [[1, 0]], "gamma": [[0, 1]]}
    base.update(fields)
    path.write_text(json.dumps(base))
    return path


def test_cli_construct_verify_classify(tmp_path):
    req = write_request(tmp_path / "req.json")
    out = tmp_path / "g.json"
    assert cli.main(["grade", "construct", "--request", str(req),
                     "--out", str(out)]) == 0
    text = out.read_text()
    grading = serialize.grading_from_data(serialize.loads(text))
    assert serialize.dumps(serialize.grading_to_data(grading)) == text
    assert grading.same_components(grade_O_construct(CFG, G2, [A], [B]))

    report = tmp_path / "verify.json"
    assert cli.main(["grade", "verify", "--grading", str(out),
                     "--out", str(report)]) == 0
    payload = json.loads(report.read_text())
    assert payload["valid"] is True and not payload["failures"]

    inv_out = tmp_path / "inv.json"
    assert cli.main(["grade", "classify", "--grading", str(out),
                     "--out", str(inv_out)]) == 0
    payload = json.loads(inv_out.read_text())
    assert payload == {"P": [[1, 0]], "s": 1,
                       "gamma": [{"rep": [0, 1], "mult": 1}], "g0": None}
    assert cli.main(["grade", "classify", "--grading", str(out), "--flavor", "S",
                     "--out", str(inv_out)]) == 0
    assert json.loads(inv_out.read_text())["g0"] == [1, 1]


def test_cli_verify_rejects_swapped_components(tmp_path):
    req = write_request(tmp_path / "req.json")
    out = tmp_path / "g.json"
    assert cli.main(["grade", "construct", "--request", str(req),
                     "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    comps = data["components"]
    comps[1]["basis"], comps[5]["basis"] = comps[5]["basis"], comps[1]["basis"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert cli.main(["grade", "verify", "--grading", str(bad),
                     "--out", str(tmp_path / "r.json")]) == 4


def test_cli_iso_witness_file(tmp_path):
    req1 = write_request(tmp_path / "r1.json")
    req2 = write_request(tmp_path / "r2.json", gamma=[[1, 1]])
    f1, f2 = tmp_path / "g1.json", tmp_path / "g2.json"
    assert cli.main(["grade", "construct", "--request", str(req1), "--out", str(f1)]) == 0
    assert cli.main(["grade", "construct", "--request", str(req2), "--out", str(f2)]) == 0
    wit_file = tmp_path / "wit.json"
    res = tmp_path / "iso.json"
    assert cli.main(["grade", "iso", "--g1", str(f1), "--g2", str(f2),
                     "--witness-out", str(wit_file), "--out", str(res)]) == 0
    payload = json.loads(res.read_text())
    assert payload["isomorphic"] is True and payload["status"] == "witness"
    mu = serialize.auto_from_data(json.loads(wit_file.read_text()))
    g1 = serialize.grading_from_data(json.loads(f1.read_text()))
    g2 = serialize.grading_from_data(json.loads(f2.read_text()))
    assert push_grading(mu, g1).same_components(g2)
    # distinct invariants: exit 0 with a negative verdict
    req3 = write_request(tmp_path / "r3.json", basis=[[0, 1]], gamma=[[1, 0]])
    f3 = tmp_path / "g3.json"
    assert cli.main(["grade", "construct", "--request", str(req3), "--out", str(f3)]) == 0
    assert cli.main(["grade", "iso", "--g1", str(f1), "--g2", str(f3),
                     "--out", str(res)]) == 0
    payload = json.loads(res.read_text())
    assert payload == {"isomorphic": False, "status": "distinct-invariants"}


def test_cli_fine_and_flavor_errors(tmp_path):
    out = tmp_path / "fine.json"
    assert cli.main(["grade", "fine", "--p", "5", "--m", "2",
                     "--ambient", "O", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["count"] == 3
    assert len(payload["gradings"]) == 3
    # flavor W expects a derivation grading
    req = write_request(tmp_path / "req.json")
    f1 = tmp_path / "g1.json"
    assert cli.main(["grade", "construct", "--request", str(req), "--out", str(f1)]) == 0
    assert cli.main(["grade", "classify", "--grading", str(f1),
                     "--flavor", "W"]) == 3


def test_cli_derivation_pipeline(tmp_path):
    req = write_request(tmp_path / "req.json", kind="W")
    out = tmp_path / "w.json"
    assert cli.main(["grade", "construct", "--request", str(req), "--out", str(out)]) == 0
    grading = serialize.grading_from_data(json.loads(out.read_text()))
    assert grading.ambient == "W"
    inv_out = tmp_path / "inv.json"
    assert cli.main(["grade", "classify", "--grading", str(out), "--flavor", "W",
                     "--out", str(inv_out)]) == 0
    assert json.loads(inv_out.read_text())["P"] == [[1, 0]]


def test_cli_exit_codes(tmp_path):
    # unreadable and unparsable inputs
    assert cli.main(["grade", "verify", "--grading",
                     str(tmp_path / "missing.json")]) == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{oops")
    assert cli.main(["grade", "verify", "--grading", str(broken)]) == 2
    # missing required request field
    req = tmp_path / "req.json"
    req.write_text(json.dumps({"p": 5, "m": 2, "kind": "O"}))
    assert cli.main(["grade", "construct", "--request", str(req)]) == 2
    # semantic refusals
    assert cli.main(["grade", "fine", "--p", "3", "--m", "2"]) == 3
    assert cli.main(["grade", "fine", "--p", "4", "--m", "2"]) == 3
    small = write_request(tmp_path / "small.json", p=3,
                          group={"free_rank": 0, "torsion": [3, 3]})
    g3 = tmp_path / "g3.json"
    assert cli.main(["grade", "construct", "--request", str(small),
                     "--out", str(g3)]) == 0
    assert cli.main(["grade", "verify", "--grading", str(g3)]) == 0
    assert cli.main(["grade", "classify", "--grading", str(g3)]) == 3


def test_cli_paper_check_and_dims(tmp_path):
    out = tmp_path / "pc.json"
    assert cli.main(["paper-check", "--p", "5", "--m", "2", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["ok"] is True
    assert all(c["status"] in ("pass", "skipped") for c in payload["checks"])
    assert cli.main(["paper-check", "--p", "3", "--m", "2"]) == 3

    out = tmp_path / "dims.json"
    assert cli.main(["dims", "--p", "5", "--m", "2", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    byname = {row["algebra"]: row for row in payload["dims"]}
    assert byname["O(2;1)"]["computed"] == 25
    assert byname["W(2;1)"]["computed"] == 50
    assert byname["S(2;1)^(1)"]["computed"] == 24
    assert byname["H(2;1)^(2)"]["computed"] == 23
    assert all(row["agree"] for row in payload["dims"])
    assert payload["ok"] is True
    # small characteristic: only the unrestricted families are reported
    assert cli.main(["dims", "--p", "2", "--m", "2",
                     "--out", str(tmp_path / "d2.json")]) == 0


def test_cli_stdout_and_table(tmp_path, capsys):
    req = write_request(tmp_path / "req.json")
    assert cli.main(["grade", "construct", "--request", str(req)]) == 0
    printed = capsys.readouterr().out
    grading = serialize.grading_from_data(serialize.loads(printed))
    _, inv = recognize_O(grading)
    assert inv.s == 1
    assert cli.main(["dims", "--p", "5", "--m", "2", "--format", "table"]) == 0
    table = capsys.readouterr().out
    assert "O" in table and "25" in table
