"""Command-line interface: exit codes, frozen outputs, determinism."""

from __future__ import annotations

import io
import json

from cantordyn.cli import run

DESC = "descriptors"
ODO2 = f"{DESC}/odo2.json"
ODO3 = f"{DESC}/odo3.json"
ODO4 = f"{DESC}/odo4.json"
BV11 = f"{DESC}/bv11.json"

SWAP = {"pieces": [{"domain": "0", "power": 1}, {"domain": "1", "power": -1}]}
SIGMA = {"pieces": [{"domain": "X", "power": 1}]}
OVERLAP = {"pieces": [{"domain": "0", "power": 0}, {"domain": "00", "power": 1}]}


def invoke(*argv):
    out = io.StringIO()
    code = run(list(argv), out=out)
    return code, out.getvalue()


def write_json(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


# ---------------------------------------------------------------- towers

def test_towers_render():
    code, text = invoke("towers", ODO2, "--max-level", "1")
    assert code == 0
    assert "[0]" in text and "[1]" in text
    assert "T0->T1" in text and "T1->T0" not in text or "top->base" in text


def test_towers_json():
    code, text = invoke("towers", ODO2, "--max-level", "2", "--json")
    assert code == 0
    data = json.loads(text)
    assert [lvl["level"] for lvl in data["levels"]] == [1, 2]
    assert data["levels"][1]["towers"][0]["floors"] == ["00", "10", "01", "11"]


# ---------------------------------------------------------------- group

def test_group_validate_ok(tmp_path):
    el = write_json(tmp_path, "swap.json", SWAP)
    code, text = invoke("group", "validate", ODO2, el, "--json")
    assert code == 0
    assert json.loads(text)["verdict"] == "Valid"


def test_group_validate_invalid(tmp_path):
    el = write_json(tmp_path, "overlap.json", OVERLAP)
    code, text = invoke("group", "validate", ODO2, el, "--json")
    assert code == 1
    data = json.loads(text)
    assert data["verdict"] == "Invalid" and "reason" in data


def test_group_validate_garbage(tmp_path):
    p = tmp_path / "junk.json"
    p.write_text("{not json")
    code, _ = invoke("group", "validate", ODO2, str(p))
    assert code == 2


def test_group_member_yes(tmp_path):
    el = write_json(tmp_path, "swap.json", SWAP)
    code, text = invoke("group", "member", ODO2, el, "--json")
    assert code == 0
    assert json.loads(text)["member"] is True


def test_group_member_no_shift(tmp_path):
    el = write_json(tmp_path, "sigma.json", SIGMA)
    code, text = invoke("group", "member", ODO2, el, "--json")
    assert code == 1
    data = json.loads(text)
    assert data["member"] is False
    assert data["witness"]["allowed"] == [0, 0]


def test_group_sign_levels(tmp_path):
    el = write_json(tmp_path, "swap.json", SWAP)
    code, text = invoke("group", "sign", ODO2, el, "--level", "1")
    assert code == 0 and text.strip() == "-1"
    code, text = invoke("group", "sign", ODO2, el, "--level", "2")
    assert code == 0 and text.strip() == "+1"


def test_group_commutator(tmp_path):
    el = write_json(tmp_path, "swap.json", SWAP)
    code, text = invoke("group", "commutator", ODO2, el, "--depth", "3", "--json")
    assert code == 0
    assert json.loads(text) == {"in_commutator": True, "level": 2}

    gamma3 = {
        "pieces": [
            {"domain": "2", "power": 0},
            {"domain": "0", "power": 1},
            {"domain": "1", "power": -1},
        ]
    }
    el3 = write_json(tmp_path, "gamma3.json", gamma3)
    code, text = invoke("group", "commutator", ODO3, el3, "--depth", "8", "--json")
    assert code == 1
    assert json.loads(text) == {"in_commutator": "not-up-to-depth", "depth": 8}


def test_group_dense_approx(tmp_path):
    el = write_json(tmp_path, "swap.json", SWAP)
    code, text = invoke("group", "dense-approx", ODO2, el, "--level", "2", "--json")
    assert code == 0
    data = json.loads(text)
    assert data["level"] == 2 and data["perms"] == [[1, 0, 3, 2]]


def test_group_involution():
    code, text = invoke("group", "involution", ODO2, "--clopen", "0", "--json")
    assert code == 0
    data = json.loads(text)
    assert data == {"level": 3, "perms": [[2, 1, 0, 3, 6, 5, 4, 7]]}


def test_group_tower_perm_element_file(tmp_path):
    el = write_json(tmp_path, "tp.json", {"level": 2, "perms": [[1, 0, 3, 2]]})
    code, text = invoke("group", "member", ODO2, el, "--json")
    assert code == 0 and json.loads(text)["member"] is True


# ---------------------------------------------------------------- orbit

def test_orbit_equivalent():
    code, text = invoke(
        "orbit", "decide", ODO2, "--a", "0", "--b", "1", "--max-level", "3", "--json"
    )
    assert code == 0
    data = json.loads(text)
    assert data["verdict"] == "Equivalent" and data["level"] == 1
    assert data["witness"] == {"level": 1, "perms": [[1, 0]]}


def test_orbit_distinct():
    code, text = invoke(
        "orbit", "decide", ODO2, "--a", "00", "--b", "1", "--json"
    )
    assert code == 1
    data = json.loads(text)
    assert data == {"verdict": "CertifiedDistinct", "measures": ["1/4", "1/2"]}


def test_orbit_not_yet():
    code, text = invoke(
        "orbit", "decide", ODO2,
        "--a", "000+111", "--b", "00", "--max-level", "2", "--json",
    )
    assert code == 3
    assert json.loads(text)["verdict"] == "NotYetEquivalent"


def test_orbit_plain_lines():
    code, text = invoke("orbit", "decide", ODO2, "--a", "0", "--b", "1")
    assert code == 0 and text.strip() == "Equivalent at level 1"
    code, text = invoke("orbit", "decide", ODO2, "--a", "00", "--b", "1")
    assert code == 1 and text.strip() == "Distinct (measure gap)"


# ---------------------------------------------------------------- soe

def test_soe_equivalent():
    code, text = invoke("soe", "check", ODO2, ODO4, "--json")
    assert code == 0
    assert json.loads(text)["verdict"] == "Equivalent"


def test_soe_distinct():
    code, text = invoke("soe", "check", ODO2, ODO3, "--json")
    assert code == 1
    data = json.loads(text)
    assert data["verdict"] == "Distinct"
    assert data["obstruction"] == {
        "kind": "prime-valuation",
        "prime": 2,
        "valuations": ["inf", 0],
    }


def test_soe_depth_payload():
    code, text = invoke("soe", "check", ODO2, ODO3, "--depth", "3", "--json")
    assert code == 1
    data = json.loads(text)
    assert data["backandforth"]["verdict"] == "Stuck"
    assert data["backandforth"]["reason"] == {"kind": "value-gap", "value": "1/2"}

    code, text = invoke(
        "soe", "check", ODO2, ODO4, "--depth", "3", "--report", "--json"
    )
    assert code == 0
    data = json.loads(text)
    assert data["backandforth"]["verdict"] == "PartialIso"
    assert data["cocycle_report"]["shrinking"] is True


def test_soe_plain_lines():
    code, text = invoke("soe", "check", ODO2, ODO3)
    assert code == 1 and text.strip() == "Distinct (prime-valuation)"
    code, text = invoke("soe", "check", ODO2, ODO4)
    assert code == 0 and text.strip() == "Equivalent"


def test_soe_rejects_bv():
    code, _ = invoke("soe", "check", ODO2, BV11, "--json")
    assert code == 2


# ---------------------------------------------------------------- enum

def test_enum_tfg_lines():
    code, text = invoke("enum", "tfg", ODO2, "--count", "6")
    assert code == 0
    lines = text.strip().splitlines()
    assert len(lines) == 6
    rows = [json.loads(ln) for ln in lines]
    assert [r["index"] for r in rows] == [0, 1, 2, 3, 4, 5]
    nonid = [
        r["index"]
        for r in rows
        if r["element"]["pieces"] != [{"domain": "X", "power": 0}]
    ]
    assert nonid == [4]


def test_enum_dgamma_lines():
    code, text = invoke("enum", "dgamma", ODO2, "--count", "5")
    assert code == 0
    assert len(text.strip().splitlines()) == 5


# ---------------------------------------------------------------- hygiene

def test_byte_identical_reruns():
    for argv in (
        ("towers", ODO2, "--max-level", "3", "--json"),
        ("soe", "check", ODO2, ODO4, "--depth", "4", "--report", "--json"),
        ("enum", "tfg", ODO2, "--count", "12"),
        ("orbit", "decide", ODO2, "--a", "00+11", "--b", "01+10", "--json"),
    ):
        first = invoke(*argv)
        second = invoke(*argv)
        assert first == second


def test_input_errors_exit_two():
    code, _ = invoke("nosuchcommand")
    assert code == 2
    code, _ = invoke("towers", "descriptors/missing.json")
    assert code == 2
    code, _ = invoke("orbit", "decide", ODO2, "--a", "7", "--b", "1")
    assert code == 2
